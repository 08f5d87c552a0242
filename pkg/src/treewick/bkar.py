"""Bond sets over <n>, linear forests, spanning trees of block graphs, and
the tree-interpolation probability measures with their forest-interpolation
identity.

A bond set Gamma together with a partition Theta defines a multigraph whose
vertices are the blocks of Theta and whose edges are the bonds.  When that
graph is a tree, a probability measure on unit-diagonal symmetric matrices is
attached to (Theta, Gamma); its integrals are computed exactly by summing
iterated simplex integrals over the edge orderings, and sampled by drawing a
random edge ordering together with sorted uniforms.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .partitions import SetPartition, interval_to_top, join_bonds, moebius
from .perms import CycleCutting, Permutation
from .polynomials import RationalPolynomial, partial_sym_gamma

Bond = frozenset


def bond(i: int, j: int) -> Bond:
    if i == j:
        raise ValueError("a bond joins two distinct labels")
    return frozenset((i, j))


def _bond_key(b: Bond) -> tuple[int, int]:
    return (min(b), max(b))


@dataclass(frozen=True)
class BondSet:
    """A set of 2-subsets of <n>; text form "{1-5,4-6,5-7,9-10}"."""

    n: int
    bonds: frozenset

    def __post_init__(self):
        for b in self.bonds:
            pair = sorted(b)
            if len(pair) != 2:
                raise ValueError(f"bond must have exactly two elements: {set(b)}")
            if not (1 <= pair[0] and pair[1] <= self.n):
                raise ValueError(f"bond {set(b)} outside ground set <{self.n}>")

    @staticmethod
    def of(n: int, bonds: Iterable[Iterable[int]]) -> "BondSet":
        return BondSet(n, frozenset(frozenset(b) for b in bonds))

    @staticmethod
    def from_string(n: int, text: str) -> "BondSet":
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"bad bond set text: {text!r}")
        body = re.sub(r"\s+", "", body[1:-1])
        bonds = []
        if body:
            for item in body.split(","):
                a, b = item.split("-")
                bonds.append(bond(int(a), int(b)))
        return BondSet.of(n, bonds)

    def to_string(self) -> str:
        items = sorted(self.bonds, key=_bond_key)
        return "{" + ",".join(f"{min(b)}-{max(b)}" for b in items) + "}"

    def sorted_bonds(self) -> list[Bond]:
        return sorted(self.bonds, key=_bond_key)

    def __iter__(self):
        return iter(self.sorted_bonds())

    def __len__(self):
        return len(self.bonds)


def is_tree_over(theta: SetPartition, bonds: Iterable[Bond]) -> bool:
    """Whether the bonds form a spanning tree of the block graph of theta."""
    bonds = list(bonds)
    if len(bonds) != theta.num_blocks - 1:
        return False
    return join_bonds(theta, bonds).num_blocks == 1


def enumerate_trees(theta: SetPartition, linear_only: bool = False) -> list[BondSet]:
    """All bond sets turning the blocks of theta into a tree (size k-1 and
    joining everything); optionally restricted to linear forests."""
    n, k = theta.n, theta.num_blocks
    if k == 1:
        return [BondSet.of(n, [])]
    idx = theta.block_index()
    cross = [bond(i, j)
             for i in range(1, n + 1) for j in range(i + 1, n + 1)
             if idx[i] != idx[j]]
    out = []
    for combo in itertools.combinations(cross, k - 1):
        if join_bonds(theta, combo).num_blocks != 1:
            continue
        if linear_only and not is_linear_forest(combo):
            continue
        out.append(BondSet.of(n, combo))
    return out


def is_linear_forest(bonds: Iterable[Bond]) -> bool:
    """Circuitless and of maximum degree two: a disjoint union of paths."""
    deg: dict[int, int] = {}
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in bonds:
        u, v = sorted(b)
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
        if deg[u] > 2 or deg[v] > 2:
            return False
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


@dataclass(frozen=True)
class LinearForest:
    """A linear forest with its path decomposition and endpoint pairs."""

    n: int
    bonds: frozenset
    components: tuple[tuple[Bond, ...], ...]
    boundary: frozenset

    @staticmethod
    def from_bonds(n: int, bonds: Iterable[Iterable[int]]) -> "LinearForest":
        bset = frozenset(frozenset(b) for b in bonds)
        if not is_linear_forest(bset):
            raise ValueError("bonds do not form a linear forest")
        adj: dict[int, list[int]] = {}
        for b in bset:
            u, v = sorted(b)
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        comps = []
        ends = []
        seen: set[int] = set()
        for start in sorted(adj):
            if start in seen or len(adj[start]) != 1:
                continue
            path = [start]
            seen.add(start)
            cur = start
            while True:
                nxt = [w for w in adj[cur] if w not in seen]
                if not nxt:
                    break
                cur = nxt[0]
                path.append(cur)
                seen.add(cur)
            comps.append(tuple(bond(a, b) for a, b in zip(path, path[1:])))
            ends.append(frozenset((path[0], path[-1])))
        return LinearForest(n, bset, tuple(comps), frozenset(ends))

    def num_components(self) -> int:
        return len(self.components)

    def vertices(self) -> frozenset[int]:
        return frozenset(x for b in self.bonds for x in b)


def linear_forest_of(sigma: Permutation, cutting: "CycleCutting | Iterable[int]") -> LinearForest:
    """The linear forest of a cycle-cut permutation: bonds {i, sigma(i)} for
    i in the support minus the cutting."""
    points = cutting.points if isinstance(cutting, CycleCutting) else frozenset(cutting)
    CycleCutting(sigma, points)  # validates the cutting
    bonds = [bond(i, sigma(i)) for i in sorted(sigma.support() - points)]
    return LinearForest.from_bonds(sigma.n, bonds)


def cycle_cut_preimages(forest: LinearForest, n: int) -> list[tuple[Permutation, frozenset]]:
    """All cycle-cut permutations of <n> mapping to the forest; there are
    2^(number of components), one per choice of walking direction per path."""
    paths = []
    for comp in forest.components:
        # rebuild the vertex sequence from the bond chain
        adj: dict[int, list[int]] = {}
        for b in comp:
            u, v = sorted(b)
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        start = min(x for x in adj if len(adj[x]) == 1)
        seq = [start]
        seen = {start}
        cur = start
        while True:
            nxt = [w for w in adj[cur] if w not in seen]
            if not nxt:
                break
            cur = nxt[0]
            seq.append(cur)
            seen.add(cur)
        paths.append(seq)
    out = []
    for dirs in itertools.product((False, True), repeat=len(paths)):
        cycles = []
        points = []
        for seq, flip in zip(paths, dirs):
            walk = list(reversed(seq)) if flip else list(seq)
            cycles.append(tuple(walk))
            points.append(walk[-1])
        sigma = Permutation.from_cycles(n, cycles)
        out.append((sigma, frozenset(points)))
    return out


# -- the interpolation measure ---------------------------------------------

def _require_tree(theta: SetPartition, gamma: BondSet) -> list[Bond]:
    bonds = gamma.sorted_bonds()
    if not is_tree_over(theta, bonds):
        raise ValueError("bond set is not a tree over the partition")
    return bonds


def _prefix_partitions(theta: SetPartition, ordering: Sequence[Bond]) -> list[SetPartition]:
    parts = [theta]
    cur = theta
    for e in ordering:
        cur = join_bonds(cur, [e])
        parts.append(cur)
    return parts


@functools.lru_cache(maxsize=65536)
def _prefix_matrices(theta: SetPartition,
                     ordering: tuple) -> tuple[tuple[SetPartition, ...], tuple]:
    """Partition chain and its float matrices for one edge ordering; repeated
    draws against the same tree revisit few distinct orderings."""
    parts = tuple(_prefix_partitions(theta, ordering))
    mats = tuple(np.array(p.matrix(), dtype=float) for p in parts)
    return parts, mats


def _simplex_monomial_integral(exponents: Sequence[int]) -> Fraction:
    """Integral of prod t_a^{e_a} over 1 > t_1 > ... > t_m > 0."""
    total_exp = 0
    value = Fraction(1)
    for e in reversed(list(exponents)):
        total_exp += e
        value /= total_exp + 1
        total_exp += 1
    return value


def integrate_interpolation(theta: SetPartition, gamma: BondSet,
                            f: RationalPolynomial) -> Fraction:
    """Exact integral of a q-polynomial against the tree measure.

    Sums over the (k-1)! edge orderings; under each ordering the matrix entry
    for a bond {i,j} equals the simplex coordinate attached to the first
    prefix join that relates i and j (1 if theta already does), so each
    monomial becomes a monomial in the simplex coordinates and integrates in
    closed form.
    """
    bonds = _require_tree(theta, gamma)
    k = theta.num_blocks
    for v in f.variables():
        if v[0] != "q":
            raise ValueError(f"integrand must be a q-polynomial, found {v}")
    total = Fraction(0)
    for ordering in itertools.permutations(bonds):
        parts = _prefix_partitions(theta, ordering)
        beta_cache: dict[Bond, int] = {}

        def beta(i: int, j: int) -> int:
            key = frozenset((i, j))
            if key not in beta_cache:
                for alpha, p in enumerate(parts):
                    if p.related(i, j):
                        beta_cache[key] = alpha
                        break
            return beta_cache[key]

        for mono, c in f.terms.items():
            exps = [0] * k  # index 0 corresponds to the constant t_0 = 1
            for v, e in mono:
                b = beta(v[1], v[2])
                if b:
                    exps[b] += e
            total += c * _simplex_monomial_integral(exps[1:])
    return total


def sample_interpolation_decomposed(theta: SetPartition, gamma: BondSet, rng):
    """One draw from the tree measure, returned with its convex decomposition
    into partition matrices (weights sum to 1, so the sample is positive
    semidefinite by construction)."""
    bonds = _require_tree(theta, gamma)
    k = theta.num_blocks
    order = tuple(bonds[t] for t in rng.permutation(len(bonds)))
    ts = np.sort(rng.random(k - 1))[::-1] if k > 1 else np.array([])
    levels = np.concatenate(([1.0], ts, [0.0]))
    parts, mats = _prefix_matrices(theta, order)
    weights = levels[:-1] - levels[1:]
    x = np.zeros((theta.n, theta.n))
    for w, m in zip(weights, mats):
        x += w * m
    return x, list(zip(weights, parts))


def sample_interpolation(theta: SetPartition, gamma: BondSet, rng) -> np.ndarray:
    """One matrix draw from the tree measure attached to (theta, gamma)."""
    x, _ = sample_interpolation_decomposed(theta, gamma, rng)
    return x


def tree_path_edges(theta: SetPartition, gamma: BondSet, i: int, j: int) -> frozenset:
    """Edges visited by the geodesic walk between the blocks of i and j in
    the tree on blocks (empty when they share a block)."""
    bonds = _require_tree(theta, gamma)
    idx = theta.block_index()
    start, goal = idx[i], idx[j]
    if start == goal:
        return frozenset()
    adj: dict[int, list[tuple[int, Bond]]] = {}
    for b in bonds:
        u, v = sorted(b)
        bu, bv = idx[u], idx[v]
        adj.setdefault(bu, []).append((bv, b))
        adj.setdefault(bv, []).append((bu, b))
    prev: dict[int, tuple[int, Bond]] = {start: (start, None)}
    queue = [start]
    while queue:
        cur = queue.pop(0)
        if cur == goal:
            break
        for nxt, via in adj.get(cur, []):
            if nxt not in prev:
                prev[nxt] = (cur, via)
                queue.append(nxt)
    path = []
    cur = goal
    while cur != start:
        cur, via = prev[cur]
        path.append(via)
    return frozenset(path)


# -- the forest-interpolation identity ---------------------------------------

@dataclass(frozen=True)
class BkarCheck:
    lhs: Fraction
    rhs: Fraction
    product_form: "Fraction | None"

    @property
    def passed(self) -> bool:
        ok = self.lhs == self.rhs
        if self.product_form is not None:
            ok = ok and self.lhs == self.product_form
        return ok


def _clinch_product_form(theta: SetPartition, f: RationalPolynomial) -> "Fraction | None":
    """Closed product form of the tree sum for a single q-monomial f: the sum
    over ordered tuples of support bonds forming a tree of the product of
    exponent / (exponent mass across the current prefix join)."""
    if len(f.terms) != 1:
        return None
    (mono, coeff), = f.terms.items()
    nu = {frozenset((v[1], v[2])): e for v, e in mono}
    supp = sorted(nu, key=_bond_key)
    k = theta.num_blocks
    if k == 1:
        return coeff
    total = Fraction(0)
    for tup in itertools.permutations(supp, k - 1):
        if not is_tree_over(theta, tup):
            continue
        cur = theta
        value = Fraction(1)
        for e in tup:
            mass = sum(x for b, x in nu.items() if not cur.related(*sorted(b)))
            value *= Fraction(nu[e], mass)
            cur = join_bonds(cur, [e])
        total += value
    return coeff * total


def bkar_check(theta: SetPartition, f: RationalPolynomial) -> BkarCheck:
    """Evaluate both sides of the forest-interpolation identity for a
    q-polynomial f over the partition theta.

    The left side is the Mobius-weighted sum of f over the partition
    matrices in [theta : 1_n]; the right side sums, over the spanning trees
    of the block graph, the exact tree-measure integral of the corresponding
    mixed derivative of f.  For a single monomial the closed product form is
    evaluated as a third route.
    """
    top = SetPartition.top(theta.n)
    lhs = Fraction(0)
    for pi in interval_to_top(theta):
        lhs += moebius(pi, top) * f.evaluate_q(pi.matrix())
    rhs = Fraction(0)
    for gamma in enumerate_trees(theta):
        df = partial_sym_gamma(f, gamma.sorted_bonds())
        if df.is_zero():
            continue
        rhs += integrate_interpolation(theta, gamma, df)
    return BkarCheck(lhs, rhs, _clinch_product_form(theta, f))


# -- exports -----------------------------------------------------------------

def block_graph_dot(theta: SetPartition, gamma: BondSet) -> str:
    """DOT rendering of the block graph: blocks as box nodes, bonds as edges
    annotated with their label pair."""
    lines = ["graph block_graph {", "  node [shape=box];"]
    idx = theta.block_index()
    for k, blk in enumerate(theta.blocks):
        label = ",".join(str(i) for i in sorted(blk))
        lines.append(f'  b{k} [label="{{{label}}}"];')
    for b in gamma.sorted_bonds():
        u, v = sorted(b)
        lines.append(f'  b{idx[u]} -- b{idx[v]} [label="{u}-{v}"];')
    lines.append("}")
    return "\n".join(lines)
