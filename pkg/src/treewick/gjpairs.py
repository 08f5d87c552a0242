"""Factorizations of a long cycle, balanced sign functions on them, integer
height functions, and the map-counting identity check.

A pair (theta, sigma) is minimal-transitive when the orbit counts add to
n + 1 and theta*sigma is an n-cycle; these are the Goulden-Jackson pairs,
equivalent to bipartite edge-labeled planar trees.  On top of such a pair
live sign functions g taking values in {-1, 0, +1}, constant on sigma-orbits,
averaging to zero on theta-orbits, with -1 confined to sigma-fixed points and
0 confined to sigma-2-cycles.  Each such g integrates to a height function h
with h(theta(i)) - h(i) = g(i) and h constant on sigma-orbits.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Sequence

from .maps import enumerate_maps
from .perms import Permutation, as_partition


def _cycle_count(images: Sequence[int]) -> int:
    seen = [False] * len(images)
    count = 0
    for start in range(len(images)):
        if seen[start]:
            continue
        count += 1
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = images[cur]
    return count


def is_gj_pair(theta: Permutation, sigma: Permutation) -> bool:
    if theta.domain != sigma.domain:
        raise ValueError("ground sets differ")
    m = theta.n
    if theta.num_orbits + sigma.num_orbits != m + 1:
        return False
    return (theta * sigma).num_orbits == 1


def enumerate_gj(theta: Permutation) -> list[Permutation]:
    """All sigma with l(theta) + l(sigma) = n + 1 and theta*sigma a single
    cycle, by brute force over the symmetric group of the ground set."""
    dom = theta.domain
    m = len(dom)
    if m == 0:
        return []
    pos = theta._pos()
    timg = [pos[theta.images[k]] for k in range(m)]
    target = m + 1 - theta.num_orbits
    out = []
    for cand in itertools.permutations(range(m)):
        if _cycle_count(cand) != target:
            continue
        comp = tuple(timg[cand[k]] for k in range(m))
        if _cycle_count(comp) != 1:
            continue
        out.append(Permutation(dom, tuple(dom[cand[k]] for k in range(m))))
    return out


def gj_count_formula(lam) -> int:
    """Closed count of the factorizations for a class: the falling product
    (n-1)! / (n-l+1)! times the product of the parts."""
    lam = as_partition(lam)
    n, ell = lam.size, lam.length
    value = Fraction(factorial(n - 1) * prod(lam.parts), factorial(n - ell + 1))
    assert value.denominator == 1
    return int(value)


# -- sign functions ------------------------------------------------------

def _require_natural(perm: Permutation):
    if perm.domain != tuple(range(1, perm.n + 1)):
        raise ValueError("this operation requires ground set {1,..,n}")


def is_dmotz(theta: Permutation, sigma: Permutation, g: Sequence[int],
             tilde: bool = False) -> bool:
    """Check the defining constraints of a balanced sign function directly.

    The tilde variant drops only the requirement that zeros lie inside the
    support of sigma.
    """
    _require_natural(theta)
    n = theta.n
    if len(g) != n or any(abs(v) > 1 for v in g):
        return False
    for orb in theta.orbits():
        if sum(g[i - 1] for i in orb) != 0:
            return False
    if any(g[sigma(i) - 1] != g[i - 1] for i in range(1, n + 1)):
        return False
    supp = sigma.support()
    supp2 = (sigma * sigma).support()
    for i in range(1, n + 1):
        if g[i - 1] == -1 and i in supp:
            return False
        if g[i - 1] == 0 and i in supp2:
            return False
        if not tilde and g[i - 1] == 0 and i not in supp:
            return False
    return True


def enumerate_dmotz(theta: Permutation, sigma: Permutation,
                    tilde: bool = False) -> list[tuple[int, ...]]:
    """All balanced sign functions on a factorization pair.

    Signs are constant on sigma-orbits, so the search runs orbit by orbit,
    pruning on the partial sums over each theta-orbit.
    """
    _require_natural(theta)
    n = theta.n
    sorbits = [tuple(sorted(o)) for o in sigma.orbits()]
    supp2 = (sigma * sigma).support()

    allowed: list[tuple[int, ...]] = []
    for orb in sorbits:
        vals = [1]
        if len(orb) == 1:
            vals.append(-1)
        if not (set(orb) & supp2) and (tilde or len(orb) >= 2):
            vals.append(0)
        allowed.append(tuple(vals))

    torbits = theta.orbits()
    tindex = {i: t for t, orb in enumerate(torbits) for i in orb}
    contrib = [[0] * len(torbits) for _ in sorbits]
    for k, orb in enumerate(sorbits):
        for i in orb:
            contrib[k][tindex[i]] += 1
    remaining = [[0] * len(torbits) for _ in range(len(sorbits) + 1)]
    for k in range(len(sorbits) - 1, -1, -1):
        for t in range(len(torbits)):
            remaining[k][t] = remaining[k + 1][t] + contrib[k][t]

    out: list[tuple[int, ...]] = []
    g = [0] * n
    sums = [0] * len(torbits)

    def rec(k: int):
        if k == len(sorbits):
            if all(s == 0 for s in sums):
                out.append(tuple(g))
            return
        for val in allowed[k]:
            touched = []
            ok = True
            for t, cnt in enumerate(contrib[k]):
                if cnt:
                    sums[t] += val * cnt
                    touched.append(t)
            for t in range(len(torbits)):
                if abs(sums[t]) > remaining[k + 1][t]:
                    ok = False
                    break
            if ok:
                for i in sorbits[k]:
                    g[i - 1] = val
                rec(k + 1)
            for t in touched:
                sums[t] -= val * contrib[k][t]

    rec(0)
    return out


@functools.lru_cache(maxsize=None)
def enumerate_gjdm(theta: Permutation) -> tuple[tuple[Permutation, tuple[int, ...]], ...]:
    """All (sigma, g) completing theta; cached per theta."""
    out = []
    for sigma in enumerate_gj(theta):
        for g in enumerate_dmotz(theta, sigma):
            out.append((sigma, g))
    return tuple(out)


def gjdm_count(theta: Permutation) -> int:
    return len(enumerate_gjdm(theta))


# -- height functions ------------------------------------------------------

def antiderivative(theta: Permutation, sigma: Permutation, g: Sequence[int],
                   normalization: str = "h1") -> tuple[int, ...]:
    """The unique height function with increments g along theta and constant
    on sigma-orbits.

    Built by propagating along a spanning tree made of all-but-one edge of
    each theta-cycle (carrying increments) and of each sigma-cycle (carrying
    zero), then checked against g; fails when g does not average to zero on
    some theta-orbit.  Normalization "h1" pins h(1) = 0, "min0" shifts the
    minimum to 0.
    """
    _require_natural(theta)
    n = theta.n
    if len(g) != n:
        raise ValueError("sign sequence has wrong length")
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(1, n + 1)}

    def add_tree_edges(perm: Permutation, weights: bool):
        for cyc in perm.cycles():
            for a in cyc[:-1]:
                b = perm(a)
                w = g[a - 1] if weights else 0
                adj[a].append((b, w))
                adj[b].append((a, -w))

    add_tree_edges(theta, True)
    add_tree_edges(sigma, False)

    h: dict[int, int] = {1: 0}
    stack = [1]
    while stack:
        cur = stack.pop()
        for nxt, w in adj[cur]:
            if nxt not in h:
                h[nxt] = h[cur] + w
                stack.append(nxt)
    if len(h) != n:
        raise ValueError("pair is not minimal-transitive; no spanning tree")
    heights = [h[i] for i in range(1, n + 1)]
    for i in range(1, n + 1):
        if heights[theta(i) - 1] - heights[i - 1] != g[i - 1]:
            raise ValueError("signs do not average to zero on some orbit; "
                             "no potential exists")
    if normalization == "h1":
        shift = -heights[0]
    elif normalization == "min0":
        shift = -min(heights)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return tuple(v + shift for v in heights)


def height_increments(theta: Permutation, h: Sequence[int]) -> tuple[int, ...]:
    return tuple(h[theta(i) - 1] - h[i - 1] for i in range(1, theta.n + 1))


def jset(theta: Permutation, h: Sequence[int], eps: int) -> frozenset[int]:
    """Labels i where the height steps by eps along theta."""
    return frozenset(i for i in range(1, theta.n + 1)
                     if h[theta(i) - 1] - h[i - 1] == eps)


def is_motz_height(theta: Permutation, sigma: Permutation, h: Sequence[int],
                   tilde: bool = False, levels: "int | None" = None) -> bool:
    """Membership test for height functions: constant on sigma-orbits with
    increments forming a (tilde-)balanced sign function; with ``levels`` set,
    values must also lie in {1,..,levels}."""
    n = theta.n
    if any(h[sigma(i) - 1] != h[i - 1] for i in range(1, n + 1)):
        return False
    g = height_increments(theta, h)
    if not is_dmotz(theta, sigma, g, tilde=tilde):
        return False
    if levels is not None and not all(1 <= v <= levels for v in h):
        return False
    return True


def motz_heights(theta: Permutation, sigma: Permutation, levels: int,
                 tilde: bool = False) -> list[tuple[int, ...]]:
    """All height functions with values in {1,..,levels}: each sign function
    fixes the heights up to a constant shift, so shifts are enumerated."""
    out = []
    for g in enumerate_dmotz(theta, sigma, tilde=tilde):
        base = antiderivative(theta, sigma, g, normalization="min0")
        top = max(base)
        for shift in range(1, levels - top + 1):
            out.append(tuple(v + shift for v in base))
    return out


# -- the main counting identity ---------------------------------------------

@dataclass(frozen=True)
class MainTheoremCheck:
    theta: Permutation
    map_count: int
    gjdm_count: int
    denominator: Fraction

    @property
    def lhs(self) -> int:
        return self.map_count

    @property
    def rhs(self) -> Fraction:
        if self.denominator <= 0:
            return Fraction(0)
        return Fraction(self.gjdm_count) / self.denominator

    @property
    def passed(self) -> bool:
        if self.denominator <= 0:
            return self.map_count == 0 and self.gjdm_count == 0
        return self.lhs == self.rhs


def main_theorem_check(theta: Permutation) -> MainTheoremCheck:
    """Compare the map count against the weighted count of sign-decorated
    factorizations; for nonpositive denominator both families must be
    empty."""
    _require_natural(theta)
    denom = Fraction(theta.n, 2) - theta.num_orbits + 2
    return MainTheoremCheck(
        theta=theta,
        map_count=len(enumerate_maps(theta)),
        gjdm_count=gjdm_count(theta),
        denominator=denom,
    )
