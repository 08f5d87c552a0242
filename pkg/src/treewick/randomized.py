"""Seeded random instances for the verification suites: partitions, bond
monomials, covariances, and per-block polynomial families.

Everything draws from a caller-supplied random.Random so that identical
seeds give identical instances.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .partitions import SetPartition
from .polynomials import CovarianceSpec, RationalPolynomial, qkey, zkey


def random_set_partition(n: int, rng: random.Random) -> SetPartition:
    """Uniform-ish partition: assign each label to one of n urns, keep the
    nonempty ones."""
    urns: dict[int, list[int]] = {}
    for i in range(1, n + 1):
        urns.setdefault(rng.randrange(n), []).append(i)
    return SetPartition.from_blocks(n, urns.values())


def random_q_monomial(n: int, rng: random.Random,
                      max_bonds: int = 4, max_exp: int = 3) -> RationalPolynomial:
    """A monomial in the off-diagonal symmetric-matrix variables."""
    all_bonds = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    count = rng.randint(1, min(max_bonds, len(all_bonds)))
    chosen = rng.sample(all_bonds, count)
    exps = {qkey(i, j): rng.randint(1, max_exp) for i, j in chosen}
    return RationalPolynomial.monomial(exps)


def random_bkar_instance(rng: random.Random, n_max: int = 5):
    """(partition, q-monomial) pair for the forest-interpolation identity."""
    n = rng.randint(2, n_max)
    theta = random_set_partition(n, rng)
    f = random_q_monomial(n, rng)
    return theta, f


def random_covariance(n: int, rng: random.Random,
                      denominator: int = 3) -> CovarianceSpec:
    """A random exact positive-semidefinite matrix built as A^T A."""
    a = [[Fraction(rng.randint(-2, 2), rng.randint(1, denominator))
          for _ in range(n)] for _ in range(n)]
    rows = [[sum(a[k][i] * a[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]
    return CovarianceSpec.from_rows(rows)


def random_block_polynomial(labels, levels: int, rng: random.Random,
                            max_degree: int = 3) -> RationalPolynomial:
    """A short sum of monomials in the z-slots of the given labels, replica
    indices up to 2*levels, biased toward even degrees so that expectations
    are usually nonzero."""
    labels = sorted(labels)
    # cross-block pairings need equal replica indices, and squares are what
    # lets three or more blocks connect, so draw slot patterns accordingly
    replicas = [0, 0, 0, 1, 1] + list(range(2, 2 * levels + 1))

    def slot():
        return zkey(rng.choice(labels), rng.choice(replicas))

    patterns = ("s", "st", "ss", "ss", "sst", "stu")
    out = RationalPolynomial.zero()
    for _ in range(rng.randint(1, 2)):
        pattern = rng.choice(patterns)
        exps: dict = {}
        chosen = {}
        for ch in pattern:
            key = chosen.setdefault(ch, slot())
            exps[key] = exps.get(key, 0) + 1
        if sum(exps.values()) > max_degree + 1:
            exps.pop(next(iter(exps)))
        coeff = Fraction(rng.randint(1, 3), rng.randint(1, 2))
        out = out + RationalPolynomial.monomial(exps, coeff)
    return out


def random_maintool_instance(rng: random.Random, n_max: int = 4,
                             levels: int = 2):
    """(partition, per-block polynomials, covariance) for the cumulant
    identity.  Families whose total expectation vanishes are redrawn a few
    times so that most instances exercise nonzero values."""
    from .polynomials import gaussian_expectation

    n = rng.randint(2, n_max)
    theta = random_set_partition(n, rng)
    cov = random_covariance(n, rng)
    ones = [[Fraction(1)] * n for _ in range(n)]
    for _ in range(20):
        blocks = {frozenset(b): random_block_polynomial(b, levels, rng)
                  for b in theta.blocks}
        f = RationalPolynomial.one()
        for _, poly in sorted(blocks.items(), key=lambda kv: min(kv[0])):
            f = f * poly
        if gaussian_expectation(f, cov, ones) != 0:
            break
    return theta, blocks, cov
