"""Tridiagonal matrix models with unit subdiagonal, Monte-Carlo trace-power
cumulants, Motzkin level assignments, and exact expansion checks.

The model has independent standard normal diagonal entries and Gamma-shaped
superdiagonal entries (shape i at position i, realized as a sum of i unit
exponentials), with the subdiagonal pinned to 1; its spectrum matches the
Gaussian unitary ensemble.  Trace powers are accumulated through banded
matrix products, so batches of samples never materialize dense powers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .bkar import BondSet, enumerate_trees, integrate_interpolation, linear_forest_of
from .partitions import (SetPartition, joint_cumulant, orbit_partition,
                         set_partitions)
from .perms import CycleCutting, Permutation, as_partition, cycle_cuttings
from .polynomials import (CovarianceSpec, RationalPolynomial, d_gamma,
                          gaussian_expectation, natural)
from .gjpairs import enumerate_gj, jset, motz_heights
from .maps import cumulant_polynomial


# -- sampling -----------------------------------------------------------------

@dataclass(frozen=True)
class TridiagonalSample:
    """One draw of the model: diagonal xi_1..xi_N, superdiagonal eta_1..eta_{N-1},
    subdiagonal fixed to 1."""

    diagonal: np.ndarray
    superdiagonal: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def matrix(self) -> np.ndarray:
        n = self.size
        m = np.diag(self.diagonal.astype(float))
        for i in range(n - 1):
            m[i, i + 1] = self.superdiagonal[i]
            m[i + 1, i] = 1.0
        return m

    def trace_power(self, k: int) -> float:
        xi = self.diagonal.reshape(1, -1)
        eta = self.superdiagonal.reshape(1, -1)
        return float(_batched_trace_powers(xi, eta, [k])[k][0])


def sample_tridiagonal(size: int, rng: np.random.Generator) -> TridiagonalSample:
    if size < 1:
        raise ValueError("matrix size must be at least 1")
    xi = rng.standard_normal(size)
    eta = np.array([rng.standard_exponential(i).sum() for i in range(1, size)])
    return TridiagonalSample(xi, eta)


def _batch_entries(size: int, count: int, rng: np.random.Generator):
    xi = rng.standard_normal((count, size))
    eta = np.empty((count, size - 1)) if size > 1 else np.empty((count, 0))
    for i in range(1, size):
        eta[:, i - 1] = rng.standard_exponential((count, i)).sum(axis=1)
    return xi, eta


def _batched_trace_powers(xi: np.ndarray, eta: np.ndarray,
                          powers: Sequence[int]) -> dict[int, np.ndarray]:
    """Traces of matrix powers for a batch of samples via banded products.

    Band d of the running power holds M(r, r+d) at column r, zero-padded
    outside validity, so one multiplication by the tridiagonal matrix is three
    shifted elementwise products.
    """
    count, size = xi.shape
    kmax = max(powers)
    eta_full = np.zeros((count, size))
    if size > 1:
        eta_full[:, : size - 1] = eta

    def shifted(arr: np.ndarray, d: int) -> np.ndarray:
        # out[:, r] = arr[:, r+d] where valid, else 0
        out = np.zeros_like(arr)
        if d >= size or d <= -size:
            return out
        if d >= 0:
            out[:, : size - d] = arr[:, d:]
        else:
            out[:, -d:] = arr[:, :size + d]
        return out

    def mask(band: np.ndarray, d: int) -> np.ndarray:
        # zero entries whose column index r+d falls outside the matrix
        if d > 0:
            band[:, size - d:] = 0.0
        elif d < 0:
            band[:, :-d] = 0.0
        return band

    bands: dict[int, np.ndarray] = {
        -1: mask(np.ones((count, size)), -1),
        0: xi.copy(),
        1: mask(eta_full.copy(), 1),
    }
    if size == 1:
        bands = {0: xi.copy()}
    out: dict[int, np.ndarray] = {}
    if 1 in powers:
        out[1] = bands[0].sum(axis=1)
    for step in range(2, kmax + 1):
        new: dict[int, np.ndarray] = {}
        lo = max(-(size - 1), min(bands) - 1)
        hi = min(size - 1, max(bands) + 1)
        for d in range(lo, hi + 1):
            acc = np.zeros((count, size))
            if d - 1 in bands:  # times superdiagonal entry eta[r+d-1]
                acc += bands[d - 1] * shifted(eta_full, d - 1)
            if d in bands:      # times diagonal entry xi[r+d]
                acc += bands[d] * shifted(xi, d)
            if d + 1 in bands:  # times subdiagonal entry 1 at (r+d+1, r+d)
                acc += bands[d + 1] * _sub_mask(size, d)
            new[d] = mask(acc, d)
        bands = new
        if step in powers:
            out[step] = bands[0].sum(axis=1)
    return out


def _sub_mask(size: int, d: int) -> np.ndarray:
    # entry T(r+d+1, r+d) = 1 exists iff 0 <= r+d <= size-2
    m = np.zeros((1, size))
    lo, hi = max(0, -d), min(size - 1, size - 2 - d)
    if lo <= hi:
        m[0, lo:hi + 1] = 1.0
    return m


# -- Monte-Carlo cumulants ----------------------------------------------------

@dataclass
class McCumulant:
    partition: tuple[int, ...]
    size: int
    samples: int
    estimate: float
    stderr: float
    trail: list[tuple[int, float, float]] = field(default_factory=list)


def _kstat(sums: Mapping[frozenset, float], count: int, ell: int) -> float:
    """Joint cumulant estimate from subset product sums: unbiased
    k-statistics up to third order, plug-in beyond."""
    def t(*idx):
        return sums[frozenset(idx)]

    n = count
    if ell == 1:
        return t(0) / n
    if ell == 2:
        return (t(0, 1) - t(0) * t(1) / n) / (n - 1)
    if ell == 3:
        m = [t(r) / n for r in range(3)]
        s3 = (t(0, 1, 2) - m[0] * t(1, 2) - m[1] * t(0, 2) - m[2] * t(0, 1)
              + 2 * n * m[0] * m[1] * m[2])
        return n * s3 / ((n - 1) * (n - 2))
    total = 0.0
    for grouping in set_partitions(list(range(ell))):
        k = len(grouping)
        weight = (-1) ** (k - 1) * factorial(k - 1)
        term = 1.0
        for blk in grouping:
            term *= sums[frozenset(blk)] / n
        total += weight * term
    return total


def mc_cumulant(lam, size: int, samples: int, rng: np.random.Generator,
                groups: int = 100, chunk: int = 1 << 14,
                keep_trail: bool = False) -> McCumulant:
    """Monte-Carlo estimate of the joint cumulant of the trace powers of the
    tridiagonal model, with a grouped-jackknife standard error.

    Accumulation is streamed in extended precision; samples are split into
    contiguous groups and the estimator is recomputed on each leave-one-group-
    out total.
    """
    lam = as_partition(lam)
    if samples < 2:
        raise ValueError("need at least two samples")
    ell = lam.length
    groups = max(2, min(groups, samples))
    subsets = [frozenset(s) for r in range(1, ell + 1)
               for s in itertools.combinations(range(ell), r)]
    group_sums = {s: np.zeros(groups, dtype=np.longdouble) for s in subsets}
    group_counts = np.zeros(groups, dtype=np.int64)
    powers = sorted(set(lam.parts))
    trail: list[tuple[int, float, float]] = []

    bounds = np.linspace(0, samples, groups + 1).astype(int)
    done = 0
    for g in range(groups):
        quota = int(bounds[g + 1] - bounds[g])
        remaining = quota
        while remaining > 0:
            batch = min(chunk, remaining)
            xi, eta = _batch_entries(size, batch, rng)
            traces = _batched_trace_powers(xi, eta, powers)
            y = [traces[p].astype(np.longdouble) for p in lam.parts]
            for s in subsets:
                prodv = np.ones(batch, dtype=np.longdouble)
                for r in s:
                    prodv = prodv * y[r]
                group_sums[s][g] += prodv.sum()
            group_counts[g] += batch
            remaining -= batch
        done += quota
        if keep_trail and g >= 1:
            est, err = _estimate_from_groups(group_sums, group_counts, g + 1, ell)
            trail.append((done, est, err))

    estimate, stderr = _estimate_from_groups(group_sums, group_counts, groups, ell)
    return McCumulant(lam.parts, size, samples, estimate, stderr, trail)


def _estimate_from_groups(group_sums, group_counts, used: int, ell: int):
    totals = {s: float(v[:used].sum()) for s, v in group_sums.items()}
    count = int(group_counts[:used].sum())
    estimate = _kstat(totals, count, ell)
    deleted = []
    for g in range(used):
        sums_g = {s: float(totals[s] - float(group_sums[s][g])) for s in totals}
        count_g = count - int(group_counts[g])
        if count_g >= ell + 1:
            deleted.append(_kstat(sums_g, count_g, ell))
    k = len(deleted)
    if k < 2:
        return estimate, float("nan")
    mean = sum(deleted) / k
    var = (k - 1) / k * sum((d - mean) ** 2 for d in deleted)
    return estimate, var ** 0.5


# -- Motzkin level assignments -------------------------------------------------

def motzkin_assignments(theta: Permutation, levels: int) -> Iterator[tuple[int, ...]]:
    """All maps h from <n> to {1..levels} whose step along theta is at most 1
    in absolute value: closed Motzkin loops, one per theta-orbit."""
    if theta.domain != tuple(range(1, theta.n + 1)):
        raise ValueError("level assignments require ground set {1,..,n}")
    orbit_cycles = []
    for orb in theta.orbits():
        start = min(orb)
        cyc = [start]
        cur = theta(start)
        while cur != start:
            cyc.append(cur)
            cur = theta(cur)
        orbit_cycles.append(cyc)

    def orbit_loops(length: int) -> list[tuple[int, ...]]:
        out = []

        def rec(prefix):
            if len(prefix) == length:
                if abs(prefix[0] - prefix[-1]) <= 1:
                    out.append(tuple(prefix))
                return
            remaining = length - len(prefix)
            for step in (-1, 0, 1):
                nxt = prefix[-1] + step
                if 1 <= nxt <= levels and abs(nxt - prefix[0]) <= remaining:
                    rec(prefix + [nxt])

        for start in range(1, levels + 1):
            rec([start])
        return out

    options = [orbit_loops(len(c)) for c in orbit_cycles]
    n = theta.n
    for combo in itertools.product(*options):
        h = [0] * n
        for cyc, vals in zip(orbit_cycles, combo):
            for i, v in zip(cyc, vals):
                h[i - 1] = v
        yield tuple(h)


# -- the polynomial family attached to a level assignment ----------------------

@dataclass(frozen=True)
class LevelPolynomials:
    """Per-block polynomials, their product, and the level-matching
    covariance attached to a level assignment."""

    blocks: tuple[tuple[frozenset, RationalPolynomial], ...]
    product: RationalPolynomial
    covariance: CovarianceSpec


def build_fh(theta: Permutation, h: Sequence[int]) -> LevelPolynomials:
    """Flat steps contribute a linear slot z[i,0]; up steps contribute the
    half-sum of 2h(i) squared slots.  Two labels share covariance exactly
    when they sit at the same level."""
    n = theta.n
    j0 = jset(theta, h, 0)
    j1 = jset(theta, h, 1)
    jm = jset(theta, h, -1)
    if len(j0) + len(j1) + len(jm) != n:
        raise ValueError("assignment steps by more than one somewhere")
    blocks = []
    product = RationalPolynomial.one()
    for orb in theta.orbits():
        fa = RationalPolynomial.one()
        for i in sorted(orb):
            if i in j0:
                fa = fa * RationalPolynomial.z(i, 0)
            elif i in j1:
                acc = RationalPolynomial.zero()
                for j in range(1, 2 * h[i - 1] + 1):
                    acc = acc + RationalPolynomial.z(i, j) * RationalPolynomial.z(i, j)
                fa = fa * (Fraction(1, 2) * acc)
        blocks.append((frozenset(orb), fa))
        product = product * fa
    rows = [[Fraction(1 if h[i - 1] == h[ip - 1] else 0) for ip in range(1, n + 1)]
            for i in range(1, n + 1)]
    cov = CovarianceSpec.from_rows(rows)
    return LevelPolynomials(tuple(blocks), product, cov)


# -- the cumulant identity for Gaussian polynomial families --------------------

def maintool_check(theta: SetPartition,
                   block_polys: Mapping[frozenset, RationalPolynomial],
                   cov: CovarianceSpec) -> tuple[Fraction, Fraction]:
    """Both routes to the joint cumulant of per-block polynomials of a
    replicated Gaussian family.

    Left: Mobius-inverted products of plain expectations (pairing sums).
    Right: sum over spanning trees of the block graph of the covariance
    weight times the exact tree-measure integral of the recoupled expectation
    of the mixed derivative.
    """
    n = theta.n
    ones = [[Fraction(1)] * n for _ in range(n)]

    def moment(pi: SetPartition) -> Fraction:
        val = Fraction(1)
        for blk in pi.blocks:
            g = RationalPolynomial.one()
            for a, poly in block_polys.items():
                if a <= blk:
                    g = g * poly
            val *= gaussian_expectation(g, cov, ones)
        return val

    lhs = joint_cumulant(theta, moment)

    f = RationalPolynomial.one()
    for _, poly in sorted(block_polys.items(), key=lambda kv: min(kv[0])):
        f = f * poly
    rhs = Fraction(0)
    for gamma in enumerate_trees(theta):
        weight = Fraction(1)
        for b in gamma.sorted_bonds():
            i, ip = sorted(b)
            weight *= cov.cov(i, ip)
        if not weight:
            continue
        df = d_gamma(f, gamma.sorted_bonds())
        if df.is_zero():
            continue
        rhs += weight * integrate_interpolation(theta, gamma, natural(df, cov))
    return lhs, rhs


# -- refined expansions ---------------------------------------------------------

def redux_flags(gamma: Iterable[frozenset], h: Sequence[int],
                theta: Permutation) -> tuple[bool, bool, bool, bool]:
    """The four vanishing conditions for a (tree, assignment) term: constant
    levels on edges, edges inside a single step class, flat labels in at most
    one edge, every label in at most two edges."""
    bonds = list(gamma)
    j0 = jset(theta, h, 0)
    j1 = jset(theta, h, 1)
    c1 = all(len({h[i - 1] for i in b}) == 1 for b in bonds)
    c2 = all(set(b) <= j0 or set(b) <= j1 for b in bonds)
    deg: dict[int, int] = {}
    for b in bonds:
        for i in b:
            deg[i] = deg.get(i, 0) + 1
    c3 = all(deg.get(i, 0) <= 1 for i in j0)
    c4 = all(d <= 2 for d in deg.values())
    return c1, c2, c3, c4


def steroid_term(theta: Permutation, gamma: BondSet,
                 h: Sequence[int]) -> Fraction:
    """One term of the tree-by-assignment expansion: the level-matching
    factor over the edges times the exact tree integral of the recoupled
    expectation of the mixed derivative."""
    for b in gamma.sorted_bonds():
        if len({h[i - 1] for i in b}) != 1:
            return Fraction(0)
    data = build_fh(theta, h)
    df = d_gamma(data.product, gamma.sorted_bonds())
    if df.is_zero():
        return Fraction(0)
    integrand = natural(df, data.covariance)
    if integrand.is_zero():
        return Fraction(0)
    return integrate_interpolation(orbit_partition(theta), gamma, integrand)


@dataclass(frozen=True)
class RefinedExpansion:
    partition: tuple[int, ...]
    size: int
    exact: Fraction
    quadruple_sum: Fraction
    tree_assignment_sum: Fraction

    @property
    def passed(self) -> bool:
        return self.exact == self.quadruple_sum == self.tree_assignment_sum


def refined_expansion_check(lam, levels: int) -> RefinedExpansion:
    """Exactly resum the trace-power cumulant two ways.

    The tree-by-assignment route sums over spanning trees and Motzkin level
    assignments; the quadruple route sums over factorizations sigma, cuttings
    A, tilde-height functions h and the linear forest they induce, with
    weight 2^-|A|.  Both must reproduce the exact cumulant polynomial at the
    given matrix size.
    """
    lam = as_partition(lam)
    theta = lam.representative()
    orbits = orbit_partition(theta)
    exact = cumulant_polynomial(lam).evaluate_n(levels)

    tree_sum = Fraction(0)
    for gamma in enumerate_trees(orbits):
        for h in motzkin_assignments(theta, levels):
            tree_sum += steroid_term(theta, gamma, h)

    quad_sum = Fraction(0)
    for sigma in enumerate_gj(theta):
        for cutting in cycle_cuttings(sigma):
            forest = linear_forest_of(sigma, cutting)
            gamma = BondSet(theta.n, forest.bonds)
            weight = Fraction(1, 2 ** len(cutting.points))
            for h in motz_heights(theta, sigma, levels, tilde=True):
                data = build_fh(theta, h)
                df = d_gamma(data.product, gamma.sorted_bonds())
                if df.is_zero():
                    continue
                integrand = natural(df, data.covariance)
                if integrand.is_zero():
                    continue
                quad_sum += weight * integrate_interpolation(orbits, gamma, integrand)

    return RefinedExpansion(lam.parts, levels, exact, quad_sum, tree_sum)


def lemma_cull_closed_form(theta: Permutation, sigma: Permutation,
                           cutting: CycleCutting,
                           h: Sequence[int]) -> RationalPolynomial:
    """Closed form of the mixed derivative of the level polynomial along the
    linear forest of (sigma, cutting): flat slots off the support survive,
    up slots off the support keep their half-sums, and each cut point turns
    into a bilinear sum pairing it with its sigma-image."""
    supp = sigma.support()
    j0 = jset(theta, h, 0)
    j1 = jset(theta, h, 1)
    s0 = sorted(j0 - supp)
    s1 = sorted(j1 - supp)
    a1 = sorted(j1 & cutting.points)
    out = RationalPolynomial.one()
    for i in s0:
        out = out * RationalPolynomial.z(i, 0)
    for i in s1:
        acc = RationalPolynomial.zero()
        for j in range(1, 2 * h[i - 1] + 1):
            acc = acc + RationalPolynomial.z(i, j) * RationalPolynomial.z(i, j)
        out = out * (Fraction(1, 2) * acc)
    for i in a1:
        acc = RationalPolynomial.zero()
        for j in range(1, 2 * h[i - 1] + 1):
            acc = acc + RationalPolynomial.z(i, j) * RationalPolynomial.z(sigma(i), j)
        out = out * acc
    return out


def kill_zero_main_term(theta: Permutation, sigma: Permutation,
                        cutting: CycleCutting,
                        h: Sequence[int]) -> RationalPolynomial:
    """Leading part (in the level values) of the recoupled expectation of the
    mixed derivative: zero unless no flat slot sits off the support, else the
    product of 2 q(i, sigma(i)) over cut up-points times the level values."""
    supp = sigma.support()
    j0 = jset(theta, h, 0)
    j1 = jset(theta, h, 1)
    if j0 - supp:
        return RationalPolynomial.zero()
    s1 = sorted(j1 - supp)
    a1 = sorted(j1 & cutting.points)
    out = RationalPolynomial.one()
    for i in a1:
        out = out * (2 * RationalPolynomial.q(i, sigma(i)))
    for i in s1 + a1:
        out = out * h[i - 1]
    return out
