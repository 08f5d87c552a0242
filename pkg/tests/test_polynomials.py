"""Exact polynomial algebra and the Gaussian calculus on it."""

import random
from fractions import Fraction

import pytest

from treewick.partitions import SetPartition
from treewick.polynomials import (CovarianceSpec, RationalPolynomial, d_edge,
                                  d_gamma, gaussian_expectation, natural,
                                  partial_sym, partial_sym_gamma, qkey, zkey)
from treewick.randomized import random_covariance

z = RationalPolynomial.z
q = RationalPolynomial.q


def random_z_monomial(rng, n=4, jmax=4, degree=None):
    degree = rng.randint(0, 6) if degree is None else degree
    exps = {}
    for _ in range(degree):
        key = zkey(rng.randint(1, n), rng.randint(0, jmax))
        exps[key] = exps.get(key, 0) + 1
    return RationalPolynomial.monomial(exps, Fraction(rng.randint(1, 5), rng.randint(1, 3)))


class TestRing:
    def test_zero_coefficients_dropped(self):
        p = z(1, 0) - z(1, 0)
        assert p.is_zero() and p.terms == {}

    def test_product_degree_adds(self):
        rng = random.Random(0)
        for _ in range(20):
            a, b = random_z_monomial(rng), random_z_monomial(rng)
            if a.is_zero() or b.is_zero():
                continue
            assert (a * b).degree() == a.degree() + b.degree()

    def test_power(self):
        p = z(1, 0) + 1
        assert p ** 3 == p * p * p
        assert p ** 0 == RationalPolynomial.one()

    def test_q_symmetry_and_diagonal(self):
        assert q(2, 1) == q(1, 2)
        assert q(1, 1) == RationalPolynomial.one()
        assert qkey(3, 2) == ("q", 2, 3)

    def test_evaluate(self):
        p = 2 * q(1, 2) * q(1, 2) + 3
        assert p.evaluate_q([[1, Fraction(1, 2)], [Fraction(1, 2), 1]]) == Fraction(7, 2)

    def test_term_lines_format(self):
        p = Fraction(1, 2) * z(1, 0) * z(1, 0) * q(1, 2)
        assert p.term_lines() == ["1/2 * q[1,2] * z[1,0]^2"]

    def test_str_of_zero(self):
        assert str(RationalPolynomial.zero()) == "0"


class TestDEdge:
    def test_single_matched_pair(self):
        assert d_edge(z(1, 0) * z(2, 0), {1, 2}) == RationalPolynomial.one()

    def test_missing_variable_gives_zero(self):
        assert d_edge(z(1, 0), {1, 2}).is_zero()

    def test_closed_derivative_identity(self):
        # 2 * D_{2,3}[(1/2 sum_j z1j z2j)(sum_j z3j^2 / 2)] = sum_j z1j z3j
        for m in (1, 2, 4):
            f1 = sum((z(1, j) * z(2, j) for j in range(1, m + 1)),
                     RationalPolynomial.zero()) * Fraction(1, 2)
            f2 = sum((z(3, j) * z(3, j) for j in range(1, m + 1)),
                     RationalPolynomial.zero()) * Fraction(1, 2)
            lhs = 2 * d_edge(f1 * f2, {2, 3})
            rhs = sum((z(1, j) * z(3, j) for j in range(1, m + 1)),
                      RationalPolynomial.zero())
            assert lhs == rhs

    def test_operators_commute(self):
        rng = random.Random(1)
        for _ in range(30):
            g = random_z_monomial(rng)
            e1, e2 = frozenset({1, 2}), frozenset({3, 4})
            assert d_edge(d_edge(g, e1), e2) == d_edge(d_edge(g, e2), e1)


class TestCullingRules:
    def test_first_cull(self):
        # no shared replica between the edge ends: derivative vanishes
        rng = random.Random(2)
        for _ in range(200):
            g = random_z_monomial(rng)
            if g.is_zero():
                continue
            (mono, _), = g.terms.items()
            exps = dict(mono)
            bonds = [frozenset({i, ip}) for i in range(1, 5)
                     for ip in range(i + 1, 5)]
            gamma = rng.sample(bonds, rng.randint(1, 3))
            crossing = 1
            for e in gamma:
                i, ip = sorted(e)
                crossing *= sum(exps.get(zkey(i, j), 0) * exps.get(zkey(ip, j), 0)
                                for j in range(0, 5))
            if crossing == 0:
                assert d_gamma(g, gamma).is_zero()

    def test_second_cull(self):
        # an index hit by more edges than its degree kills the derivative
        rng = random.Random(3)
        seen = 0
        for _ in range(300):
            g = random_z_monomial(rng)
            if g.is_zero():
                continue
            (mono, _), = g.terms.items()
            exps = dict(mono)
            bonds = [frozenset({i, ip}) for i in range(1, 5)
                     for ip in range(i + 1, 5)]
            gamma = rng.sample(bonds, rng.randint(1, 4))
            deg = {i: sum(1 for e in gamma if i in e) for i in range(1, 5)}
            nu = {i: sum(e for v, e in exps.items() if v[1] == i)
                  for i in range(1, 5)}
            if any(deg[i] > nu[i] for i in range(1, 5)):
                seen += 1
                assert d_gamma(g, gamma).is_zero()
        assert seen > 50


class TestPartialSym:
    def test_linear(self):
        assert partial_sym(q(1, 2), {1, 2}) == RationalPolynomial.one()

    def test_power_rule(self):
        assert partial_sym(q(1, 2) * q(1, 2), {1, 2}) == 2 * q(1, 2)

    def test_independent_variable(self):
        assert partial_sym(q(1, 2), {1, 3}).is_zero()


class TestCovarianceSpec:
    def test_psd_accepts_gram_matrices(self):
        rng = random.Random(4)
        for _ in range(20):
            random_covariance(rng.randint(1, 4), rng)  # must not raise

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            CovarianceSpec.from_rows([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            CovarianceSpec.from_rows([[-1]])
        with pytest.raises(ValueError):
            CovarianceSpec.from_rows([[1, 2], [2, 1]])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            CovarianceSpec.from_rows([[1, 0], [1, 1]])

    def test_accepts_degenerate(self):
        CovarianceSpec.from_rows([[1, 1], [1, 1]])
        CovarianceSpec.from_rows([[0, 0], [0, 0]])


class TestNatural:
    def test_odd_degree_maps_to_zero(self):
        assert natural(z(1, 0), CovarianceSpec.standard(1)).is_zero()

    def test_one_pairing(self):
        cov = CovarianceSpec.from_rows([[1, 1], [1, 1]])
        assert natural(z(1, 0) * z(2, 0), cov) == q(1, 2)

    def test_standard_square(self):
        assert natural(z(1, 0) * z(1, 0), CovarianceSpec.standard(1)) == \
            RationalPolynomial.one()

    def test_mixed_parity_split(self):
        cov = CovarianceSpec.from_rows([[1, 1], [1, 1]])
        g = z(1, 0) + z(1, 0) * z(2, 0)
        assert natural(g, cov) == q(1, 2)

    def test_heat_equation(self):
        rng = random.Random(5)
        for trial in range(40):
            n = rng.randint(2, 4)
            cov = random_covariance(n, rng)
            g = random_z_monomial(rng, n=n, jmax=4)
            bonds = [frozenset({i, ip}) for i in range(1, n + 1)
                     for ip in range(i + 1, n + 1)]
            gamma = rng.sample(bonds, rng.randint(1, min(2, len(bonds))))
            lhs = partial_sym_gamma(natural(g, cov), gamma)
            weight = Fraction(1)
            for e in gamma:
                i, ip = sorted(e)
                weight *= cov.cov(i, ip)
            rhs = weight * natural(d_gamma(g, gamma), cov)
            assert lhs == rhs

    def test_block_diagonal_factorization(self):
        rng = random.Random(6)
        cov = CovarianceSpec.from_rows([[Fraction(1)] * 4 for _ in range(4)])
        pi = SetPartition.from_blocks(4, [[1, 2], [3, 4]])
        for _ in range(20):
            g1 = random_z_monomial(rng, n=2, jmax=2)
            # shift the second factor onto indices {3, 4}
            g2raw = random_z_monomial(rng, n=2, jmax=2)
            terms = {}
            for mono, c in g2raw.terms.items():
                terms[tuple((("z", v[1] + 2, v[2]), e) for v, e in mono)] = c
            g2 = RationalPolynomial(terms)
            lhs = natural(g1 * g2, cov).evaluate_q(pi.matrix())
            rhs = (natural(g1, cov).evaluate_q(pi.matrix())
                   * natural(g2, cov).evaluate_q(pi.matrix()))
            assert lhs == rhs


class TestGaussianExpectation:
    def test_independent_slots(self):
        cov = CovarianceSpec.standard(2)
        assert gaussian_expectation(z(1, 0) * z(2, 0), cov,
                                    SetPartition.top(2)) == 0

    def test_recoupling_scales_covariance(self):
        cov = CovarianceSpec.from_rows([[1, 1], [1, 1]])
        t = Fraction(3, 7)
        val = gaussian_expectation(z(1, 0) * z(2, 0), cov, [[1, t], [t, 1]])
        assert val == t

    def test_fourth_moment(self):
        cov = CovarianceSpec.standard(1)
        assert gaussian_expectation(z(1, 0) ** 4, cov, [[1]]) == 3

    def test_state_space_validated(self):
        cov = CovarianceSpec.standard(2)
        with pytest.raises(ValueError):
            gaussian_expectation(z(1, 0), cov, [[1, 0], [1, 1]])
        with pytest.raises(ValueError):
            gaussian_expectation(z(1, 0), cov, [[2, 0], [0, 1]])

    def test_agrees_with_natural_on_200_random_instances(self):
        rng = random.Random(7)
        from treewick.partitions import all_partitions
        for _ in range(200):
            n = rng.randint(1, 4)
            cov = random_covariance(n, rng)
            g = random_z_monomial(rng, n=n, jmax=3)
            pi = rng.choice(all_partitions(n))
            direct = gaussian_expectation(g, cov, pi)
            via_natural = natural(g, cov).evaluate_q(pi.matrix())
            assert direct == via_natural
