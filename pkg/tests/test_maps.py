"""Map pairs, the closed even-degree counts, and exact trace cumulants."""

import itertools
import random
from fractions import Fraction

import pytest

from treewick.maps import (connected_pairing_polynomial, cumulant_polynomial,
                           enumerate_maps, fixed_point_free_involutions,
                           is_map_pair, map_count, rooted_map_count,
                           thooft_leading, tutte)
from treewick.perms import (NumericalPartition, Permutation, partitions_of,
                            random_permutation)
from treewick.polynomials import N_VAR, RationalPolynomial


def npoly(pairs):
    out = RationalPolynomial.zero()
    for exp, coeff in pairs:
        out = out + coeff * RationalPolynomial.monomial({N_VAR: exp} if exp else {})
    return out


class TestInvolutions:
    def test_counts_are_double_factorials(self):
        assert len(list(fixed_point_free_involutions(range(1, 3)))) == 1
        assert len(list(fixed_point_free_involutions(range(1, 5)))) == 3
        assert len(list(fixed_point_free_involutions(range(1, 7)))) == 15
        assert len(list(fixed_point_free_involutions(range(1, 9)))) == 105

    def test_odd_empty(self):
        assert list(fixed_point_free_involutions(range(1, 4))) == []

    def test_all_are_fixed_point_free_involutions(self):
        for iota in fixed_point_free_involutions(range(1, 7)):
            assert iota.support() == frozenset(range(1, 7))
            assert (iota * iota).is_identity()


class TestEnumerateMaps:
    def test_figure_pair_is_member(self):
        theta = Permutation.from_cycles(12, "(1,8,6)(2,3,9,5)(4,7,12,10)")
        iota = Permutation.from_cycles(12, "(1,9)(2,10)(3,11)(4,7)(5,6)(8,12)")
        assert is_map_pair(theta, iota)
        assert iota in enumerate_maps(theta)
        assert theta.cycle_type().parts == (4, 4, 3, 1)

    def test_single_edge(self):
        theta = Permutation.from_cycles(2, "(1,2)")
        assert enumerate_maps(theta) == [theta]

    def test_euler_filter_on_four_cycle(self):
        theta = Permutation.from_cycles(4, "(1,2,3,4)")
        out = enumerate_maps(theta)
        assert len(out) == 2
        assert Permutation.from_cycles(4, "(1,3)(2,4)") not in out

    def test_odd_ground_set_empty(self):
        assert enumerate_maps(Permutation.from_cycles(3, "(1,2,3)")) == []

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_no_maps_when_not_enough_edges(self, n):
        for lam in partitions_of(n):
            if Fraction(n, 2) - lam.length + 2 <= 0:
                assert enumerate_maps(lam.representative()) == []

    def test_conjugation_invariance(self):
        rng = random.Random(12)
        for lam_parts in [(4,), (2, 2), (4, 2), (2, 2, 2)]:
            lam = NumericalPartition(lam_parts)
            theta = lam.representative()
            base = len(enumerate_maps(theta))
            for _ in range(3):
                rho = random_permutation(lam.size, rng)
                assert len(enumerate_maps(theta.conjugated_by(rho))) == base

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_relabeling_acts_freely(self, n):
        # no nonidentity permutation fixing the last label fixes any pair
        for lam in partitions_of(n):
            theta = lam.representative()
            centralizer = []
            for images in itertools.permutations(range(1, n)):
                rho = Permutation.from_images(list(images) + [n])
                if rho * theta == theta * rho:
                    centralizer.append(rho)
            for iota in enumerate_maps(theta):
                for rho in centralizer:
                    if rho.is_identity():
                        continue
                    assert rho * iota != iota * rho


class TestTutte:
    def test_single_even_cycles_are_catalan(self):
        for m, catalan in [(1, 1), (2, 2), (3, 5), (4, 14)]:
            mstar, _ = tutte(NumericalPartition((2 * m,)))
            assert mstar == catalan

    def test_two_two(self):
        mstar, m = tutte(NumericalPartition((2, 2)))
        assert m == 2 and mstar == 1

    def test_star_conversion(self):
        for lam in [NumericalPartition(p) for p in
                    [(2,), (4,), (2, 2), (6,), (4, 2), (2, 2, 2), (4, 4)]]:
            mstar, m = tutte(lam)
            assert Fraction(lam.z()) * mstar / lam.size == m

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_matches_enumeration(self, n):
        for lam in partitions_of(n):
            if not lam.is_eulerian():
                continue
            mstar, m = tutte(lam)
            assert m == map_count(lam)
            assert mstar == rooted_map_count(lam)

    def test_rejects_odd_parts(self):
        with pytest.raises(ValueError):
            tutte(NumericalPartition((3, 1)))


class TestCumulantPolynomial:
    def test_spot_values(self):
        assert cumulant_polynomial((2,)) == npoly([(2, 1)])
        assert cumulant_polynomial((4,)) == npoly([(3, 2), (1, 1)])
        assert cumulant_polynomial((2, 2)) == npoly([(2, 2)])

    def test_odd_size_vanishes(self):
        assert cumulant_polynomial((3,)).is_zero()
        assert cumulant_polynomial((2, 1)).is_zero()

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_agrees_with_connected_pairings(self, n):
        for lam in partitions_of(n):
            assert cumulant_polynomial(lam) == connected_pairing_polynomial(lam)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_degree_bound(self, n):
        for lam in partitions_of(n):
            exp = n // 2 + 2 - lam.length
            poly = cumulant_polynomial(lam)
            if exp > 0:
                degrees = [sum(e for _, e in mono) for mono in poly.terms]
                assert max(degrees) == exp

    def test_thooft_spot_values(self):
        assert thooft_leading((2,)) == 1
        assert thooft_leading((4,)) == 2
        assert thooft_leading((2, 2)) == 2

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_thooft_counts_maps(self, n):
        for lam in partitions_of(n):
            assert thooft_leading(lam) == map_count(lam)

    def test_json_style_pairs(self):
        # the CLI serializes the polynomial as exponent/coefficient pairs
        poly = cumulant_polynomial((4,))
        pairs = sorted((sum(e for _, e in mono), int(c))
                       for mono, c in poly.terms.items())
        assert pairs == [(1, 1), (3, 2)]
