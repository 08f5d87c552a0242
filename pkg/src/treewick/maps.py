"""Half-edge permutation pairs, Tutte's closed counts, and exact trace-power
cumulants of the Gaussian unitary ensemble as polynomials in the matrix size.

A pair (theta, iota) encodes a half-edge-labeled planar map when iota is a
fixed-point-free involution, the orbit counts satisfy the Euler relation
l(theta) - l(iota) + l(theta*iota) = 2, and the two permutations act
transitively.  Dropping the Euler relation and weighting each pair by
N^(number of orbits of theta*iota) instead yields the finite-N cumulant of
the trace powers, from which the planar count is the leading coefficient.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterable, Iterator

from .partitions import SetPartition, joint_cumulant, orbit_partition
from .perms import NumericalPartition, Permutation, as_partition
from .polynomials import N_VAR, RationalPolynomial


def fixed_point_free_involutions(labels: Iterable[int]) -> Iterator[Permutation]:
    """All involutions without fixed points on a label set, by repeatedly
    pairing the smallest unmatched label; none when the size is odd."""
    labels = sorted(labels)
    if len(labels) % 2:
        return

    dom = tuple(labels)

    def rec(rem, acc):
        if not rem:
            mapping = dict(acc)
            yield Permutation(dom, tuple(mapping[i] for i in dom))
            return
        a = rem[0]
        for k in range(1, len(rem)):
            b = rem[k]
            yield from rec(rem[1:k] + rem[k + 1:], acc + [(a, b), (b, a)])

    yield from rec(list(labels), [])


def is_map_pair(theta: Permutation, iota: Permutation) -> bool:
    """Whether (theta, iota) encodes a half-edge-labeled planar map."""
    if theta.domain != iota.domain:
        raise ValueError("ground sets differ")
    if iota.support() != frozenset(iota.domain) or not (iota * iota).is_identity():
        return False
    euler = theta.num_orbits - iota.num_orbits + (theta * iota).num_orbits
    if euler != 2:
        return False
    return theta.generates_transitively_with(iota)


def enumerate_maps(theta: Permutation) -> list[Permutation]:
    """All iota completing theta to a planar map pair, in lexicographic
    image-list order.  Empty for odd ground sets."""
    out = [iota for iota in fixed_point_free_involutions(theta.domain)
           if is_map_pair(theta, iota)]
    return sorted(out, key=lambda p: p.images)


@functools.lru_cache(maxsize=None)
def map_count(lam: NumericalPartition) -> int:
    """Number of map pairs over a representative of the conjugacy class."""
    return len(enumerate_maps(lam.representative()))


def rooted_map_count(lam) -> Fraction:
    """Count of rooted maps with the given vertex degree distribution,
    n * (class count) / z, using that relabeling acts freely."""
    lam = as_partition(lam)
    return Fraction(lam.size * map_count(lam), lam.z())


def tutte(lam) -> tuple[Fraction, Fraction]:
    """Tutte's closed counts (rooted, labeled) for an even-degree profile.

    Returns (Mstar, M) where Mstar counts rooted maps and M counts the pairs
    over a fixed theta; they satisfy z * Mstar / n = M.
    """
    lam = as_partition(lam)
    if not lam.is_eulerian():
        raise ValueError("closed formulas require all parts even")
    n, ell = lam.size, lam.length
    half = n // 2
    if half - ell + 2 <= 0:
        return Fraction(0), Fraction(0)
    mstar = Fraction(2 * factorial(half), factorial(half - ell + 2))
    for i in sorted({p // 2 for p in lam.parts}):
        m2i = lam.multiplicity(2 * i)
        mstar *= Fraction(comb(2 * i - 1, i) ** m2i, factorial(m2i))
    m = Fraction(factorial(half - 1), factorial(half - ell + 2))
    m *= prod(p // 2 for p in lam.parts)
    m *= prod(comb(p, p // 2) for p in lam.parts)
    return mstar, m


# -- exact cumulants of trace powers -----------------------------------------

def _npow(exp: int) -> RationalPolynomial:
    return RationalPolynomial.monomial({N_VAR: exp})


def gue_trace_moment(theta: Permutation, labels: frozenset) -> RationalPolynomial:
    """Expected product of trace powers over a theta-stable label set, as a
    polynomial in N: each pairing iota of the labels contributes
    N^(orbits of theta restricted to the set, composed with iota)."""
    sub = theta.restricted_to(labels)
    total = RationalPolynomial.zero()
    for iota in fixed_point_free_involutions(labels):
        total = total + _npow((sub * iota).num_orbits)
    return total


@functools.lru_cache(maxsize=None)
def _block_moment_cached(theta: Permutation, labels: frozenset) -> RationalPolynomial:
    return gue_trace_moment(theta, labels)


def cumulant_polynomial(lam) -> RationalPolynomial:
    """The joint cumulant of tr X^(lambda_1), ..., tr X^(lambda_l) for an
    N x N standard GUE matrix X, exact in N.

    Connectivity is imposed by Mobius inversion of the per-block moment
    polynomials over the interval above the orbit partition.
    """
    lam = as_partition(lam)
    n = lam.size
    if n == 0:
        return RationalPolynomial.zero()
    if n > 14:
        raise ValueError("pairing enumeration capped at n = 14")
    theta = lam.representative()
    orbits = orbit_partition(theta)

    def moment(pi: SetPartition) -> RationalPolynomial:
        out = RationalPolynomial.one()
        for blk in pi.blocks:
            out = out * _block_moment_cached(theta, frozenset(blk))
        return out

    return joint_cumulant(orbits, moment)


def connected_pairing_polynomial(lam) -> RationalPolynomial:
    """Independent route to the same cumulant: sum N^(orbits of theta*iota)
    over the pairings iota that act transitively together with theta."""
    lam = as_partition(lam)
    theta = lam.representative()
    total = RationalPolynomial.zero()
    for iota in fixed_point_free_involutions(theta.domain):
        if theta.generates_transitively_with(iota):
            total = total + _npow((theta * iota).num_orbits)
    return total


def thooft_leading(lam) -> Fraction:
    """Coefficient of N^(n/2 + 2 - l) in the exact cumulant; equals the
    planar map count of the class."""
    lam = as_partition(lam)
    if lam.size % 2:
        return Fraction(0)
    exp = lam.size // 2 + 2 - lam.length
    if exp < 0:
        return Fraction(0)
    poly = cumulant_polynomial(lam)
    return poly.coefficient({N_VAR: exp} if exp else {})


def class_summary(lam) -> dict:
    """JSON-ready summary of a class: degree profile, both counts, and the
    cumulant as exponent/coefficient pairs sorted by falling exponent."""
    lam = as_partition(lam)
    poly = cumulant_polynomial(lam)
    pairs = sorted(((sum(e for _, e in mono), int(c))
                    for mono, c in poly.terms.items()), reverse=True)
    rooted = rooted_map_count(lam)
    assert rooted.denominator == 1  # relabeling acts freely
    return {
        "lambda": list(lam.parts),
        "M": map_count(lam),
        "Mstar": int(rooted),
        "cumulant_poly": [list(p) for p in pairs],
    }
