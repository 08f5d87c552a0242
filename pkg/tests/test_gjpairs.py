"""Long-cycle factorizations, sign functions, heights, and the main identity."""

import random
from fractions import Fraction
from math import prod

import pytest

from treewick.gjpairs import (antiderivative, enumerate_dmotz, enumerate_gj,
                              gj_count_formula, gjdm_count,
                              height_increments, is_dmotz, is_gj_pair,
                              is_motz_height, jset, main_theorem_check,
                              motz_heights)
from treewick.perms import (CycleCutting, NumericalPartition, Permutation,
                            cycle_cuttings, orbit_size, partitions_of,
                            random_permutation)

FIG_THETA = Permutation.from_cycles(10, "(1,2,3,4)(5,7,8)(9,10)")
FIG_SIGMA = Permutation.from_cycles(10, "(4,8,10)(5,6)")
FIG_G = tuple({1: 1, 2: -1, 3: -1, 4: 1, 5: 0, 6: 0, 7: -1, 8: 1,
               9: -1, 10: 1}[i] for i in range(1, 11))


class TestEnumerateGJ:
    def test_long_cycle_forces_identity(self):
        for n in (3, 4, 5):
            theta = Permutation.from_cycles(n, f"({','.join(map(str, range(1, n+1)))})")
            assert enumerate_gj(theta) == [Permutation.identity(n)]

    def test_figure_pair_is_member(self):
        assert is_gj_pair(FIG_THETA, FIG_SIGMA)
        assert FIG_SIGMA in enumerate_gj(FIG_THETA)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_counts_match_closed_formula(self, n):
        for lam in partitions_of(n):
            theta = lam.representative()
            assert len(enumerate_gj(theta)) == gj_count_formula(lam)

    def test_two_two_count(self):
        theta = Permutation.from_cycles(4, "(1,2)(3,4)")
        assert len(enumerate_gj(theta)) == 4


class TestEnumerateDmotz:
    def test_single_transposition(self):
        theta = Permutation.from_cycles(2, "(1,2)")
        out = enumerate_dmotz(theta, Permutation.identity(2))
        assert sorted(out) == [(-1, 1), (1, -1)]

    def test_four_cycle_identity_sigma(self):
        theta = Permutation.from_cycles(4, "(1,2,3,4)")
        out = enumerate_dmotz(theta, Permutation.identity(4))
        assert len(out) == 6
        assert all(sorted(g) == [-1, -1, 1, 1] for g in out)

    def test_figure_instance_is_member(self):
        out = enumerate_dmotz(FIG_THETA, FIG_SIGMA)
        assert FIG_G in out
        assert is_dmotz(FIG_THETA, FIG_SIGMA, FIG_G)

    def test_matches_direct_filter(self):
        import itertools
        rng = random.Random(13)
        cases = 0
        for lam in partitions_of(5):
            theta = lam.representative()
            for sigma in enumerate_gj(theta)[:6]:
                expected = [g for g in itertools.product((-1, 0, 1), repeat=5)
                            if is_dmotz(theta, sigma, g)]
                assert sorted(enumerate_dmotz(theta, sigma)) == expected
                tilde_expected = [g for g in itertools.product((-1, 0, 1), repeat=5)
                                  if is_dmotz(theta, sigma, g, tilde=True)]
                assert sorted(enumerate_dmotz(theta, sigma, tilde=True)) == \
                    tilde_expected
                cases += 1
        assert cases > 5

    def test_tilde_is_superset(self):
        full = set(enumerate_dmotz(FIG_THETA, FIG_SIGMA, tilde=True))
        assert set(enumerate_dmotz(FIG_THETA, FIG_SIGMA)) <= full


class TestAntiderivative:
    def test_figure_heights(self):
        h = antiderivative(FIG_THETA, FIG_SIGMA, FIG_G, normalization="min0")
        expected = {4: 0, 8: 0, 10: 0, 1: 1, 3: 1, 5: 1, 6: 1, 7: 1, 9: 1, 2: 2}
        assert h == tuple(expected[i] for i in range(1, 11))

    def test_transposition(self):
        theta = Permutation.from_cycles(2, "(1,2)")
        h = antiderivative(theta, Permutation.identity(2), (1, -1))
        assert h == (0, 1)

    def test_determinism(self):
        a = antiderivative(FIG_THETA, FIG_SIGMA, FIG_G)
        b = antiderivative(FIG_THETA, FIG_SIGMA, FIG_G)
        assert a == b

    def test_defining_relations(self):
        theta = FIG_THETA
        for g in enumerate_dmotz(theta, FIG_SIGMA):
            h = antiderivative(theta, FIG_SIGMA, g)
            assert height_increments(theta, h) == g
            assert all(h[FIG_SIGMA(i) - 1] == h[i - 1] for i in range(1, 11))
            assert h[0] == 0

    def test_unbalanced_signs_rejected(self):
        theta = Permutation.from_cycles(2, "(1,2)")
        with pytest.raises(ValueError):
            antiderivative(theta, Permutation.identity(2), (1, 1))


class TestHeights:
    def test_shift_stability(self):
        heights = motz_heights(FIG_THETA, FIG_SIGMA, levels=6)
        for h in heights:
            for c in (-2, -1, 1, 2):
                shifted = tuple(v + c for v in h)
                assert is_motz_height(FIG_THETA, FIG_SIGMA, shifted)

    def test_window_membership_by_double_enumeration(self):
        import itertools
        theta = Permutation.from_cycles(4, "(1,2)(3,4)")
        for sigma in enumerate_gj(theta):
            for tilde in (False, True):
                direct = sorted(
                    h for h in itertools.product((1, 2, 3), repeat=4)
                    if is_motz_height(theta, sigma, h, tilde=tilde, levels=3))
                assert direct == sorted(motz_heights(theta, sigma, 3, tilde=tilde))

    def test_plain_heights_are_tilde_with_flat_steps_in_support(self):
        theta = FIG_THETA
        sigma = FIG_SIGMA
        tilde = set(motz_heights(theta, sigma, 5, tilde=True))
        plain = set(motz_heights(theta, sigma, 5, tilde=False))
        supp = sigma.support()
        filtered = {h for h in tilde if jset(theta, h, 0) <= supp}
        assert plain == filtered

    def test_range_spread_bound(self):
        theta = FIG_THETA
        for h in motz_heights(theta, FIG_SIGMA, 6):
            spread = max(h) - min(h)
            step = max(abs(d) for d in height_increments(theta, h))
            assert spread <= (theta.n - 1) * step


class TestHeightSumDiscretization:
    """The windowed height sums approximate the power integral: the error of
    sum over shifts of prod h(i) against N^(v+1)/(v+1), scaled by N^v, stays
    below the crude (n+1)^2 bound as the window doubles."""

    CASES = [
        # (theta, sigma, g, cutting)
        (Permutation.from_cycles(2, "(1,2)"), Permutation.identity(2),
         (1, -1), frozenset()),
        (FIG_THETA, FIG_SIGMA, FIG_G, frozenset({4, 5})),
        (FIG_THETA, FIG_SIGMA, FIG_G, frozenset({8, 6})),
    ]

    @pytest.mark.parametrize("case", range(3))
    def test_windowed_sums(self, case):
        theta, sigma, g, cut_points = self.CASES[case]
        n = theta.n
        CycleCutting(sigma, cut_points)  # validates the cutting
        supp = sigma.support()
        nu = Fraction(n, 2) - theta.num_orbits + 1
        assert nu.denominator == 1
        nu = int(nu)
        base = antiderivative(theta, sigma, g, normalization="min0")
        top = max(base)
        for levels in (50, 100, 200):
            total = 0
            for shift in range(1, levels - top + 1):
                h = tuple(v + shift for v in base)
                picked = jset(theta, h, 1) - (supp - cut_points)
                assert len(picked) == nu
                total += prod(h[i - 1] for i in picked)
            err = abs(Fraction(levels ** (nu + 1), nu + 1) - total)
            assert err <= (n + 1) ** 2 * levels ** nu


class TestBalanceBooks:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_identities(self, n):
        for lam in partitions_of(n):
            theta = lam.representative()
            half_n = Fraction(n, 2)
            for sigma in enumerate_gj(theta):
                supp = sigma.support()
                for h in motz_heights(theta, sigma, levels=n + 2, tilde=True):
                    j0 = jset(theta, h, 0)
                    j1 = jset(theta, h, 1)
                    for cut in cycle_cuttings(sigma):
                        a = cut.points
                        lhs = half_n - theta.num_orbits + 1
                        rhs = (Fraction(len(j0 - supp), 2) + len(j1 - supp)
                               + len(j1 & a))
                        assert lhs == rhs >= 0
                        # the power-of-two bookkeeping over cut up-points
                        prod = Fraction(1)
                        for p in sorted(j1 & a):
                            prod *= Fraction(2, orbit_size(sigma, p))
                        m_sigma = 1
                        for orb in sigma.orbits():
                            if len(orb) > 1:
                                m_sigma *= len(orb)
                        assert Fraction(1, m_sigma) == \
                            Fraction(1, 2 ** len(a)) * prod


class TestMainTheorem:
    def test_single_edge(self):
        res = main_theorem_check(Permutation.from_cycles(2, "(1,2)"))
        assert (res.map_count, res.gjdm_count, res.denominator) == (1, 2, 2)
        assert res.passed

    def test_four_cycle(self):
        res = main_theorem_check(Permutation.from_cycles(4, "(1,2,3,4)"))
        assert (res.map_count, res.gjdm_count, res.denominator) == (2, 6, 3)
        assert res.passed

    def test_odd_sizes_are_empty(self):
        for n in (3, 5):
            for lam in partitions_of(n):
                res = main_theorem_check(lam.representative())
                assert res.map_count == 0 and res.gjdm_count == 0

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_all_classes(self, n):
        for lam in partitions_of(n):
            assert main_theorem_check(lam.representative()).passed

    def test_gjdm_count_is_class_function(self):
        rng = random.Random(14)
        theta = NumericalPartition((4, 2)).representative()
        base = gjdm_count(theta)
        for _ in range(3):
            rho = random_permutation(6, rng)
            assert gjdm_count(theta.conjugated_by(rho)) == base

    def test_nonpositive_denominator_families_empty(self):
        for lam_parts in [(1, 1, 1, 1), (2, 1, 1, 1, 1), (1, 1, 1, 1, 1, 1)]:
            lam = NumericalPartition(lam_parts)
            res = main_theorem_check(lam.representative())
            assert res.denominator <= 0
            assert res.map_count == 0 and res.gjdm_count == 0
            assert res.passed
