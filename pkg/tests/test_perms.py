"""Permutation core: composition convention, striking, cuttings, partitions."""

import random

import pytest

from treewick.perms import (CycleCutting, NumericalPartition, Permutation,
                            as_partition, cycle_cuttings, cuttings_count,
                            orbit_size, partitions_of, random_permutation)


def perm(n, text):
    return Permutation.from_cycles(n, text)


class TestCompose:
    def test_identity(self):
        p = perm(4, "(1,2,3,4)")
        assert p * Permutation.identity(4) == p
        assert Permutation.identity(4) * p == p

    def test_right_to_left_examples(self):
        theta = perm(4, "(1,2,3,4)")
        # theta * (1 2)(3 4) = (1 3), three orbits
        out = theta * perm(4, "(1,2)(3,4)")
        assert out == perm(4, "(1,3)")
        assert out.num_orbits == 3
        assert set(out.orbits()) == {frozenset({1, 3}), frozenset({2}), frozenset({4})}
        # theta * (1 3)(2 4) = (1 4 3 2), a single orbit
        out = theta * perm(4, "(1,3)(2,4)")
        assert out == perm(4, "(1,4,3,2)")
        assert out.num_orbits == 1

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            perm(3, "(1,2)") * perm(4, "(1,2)")

    def test_inverse_round_trip(self):
        rng = random.Random(0)
        for _ in range(25):
            p = random_permutation(7, rng)
            assert p * p.inverse() == Permutation.identity(7)
            assert p.inverse() * p == Permutation.identity(7)


class TestStrike:
    def test_figure_example(self):
        theta = perm(12, "(1,2)(3,4,5,6,7,8)(9,10,11,12)")
        assert theta.strike({1, 3, 4, 6, 9, 10}) == Permutation.from_cycles(
            [2, 5, 7, 8, 11, 12], "(5,7,8)(11,12)")

    def test_empty_strike(self):
        theta = perm(5, "(1,3,5)(2,4)")
        assert theta.strike(set()) == theta

    def test_full_strike(self):
        theta = perm(3, "(1,2,3)")
        out = theta.strike({1, 2, 3})
        assert out.domain == () and out.images == ()

    def test_three_cycle(self):
        assert perm(3, "(1,2,3)").strike({2}) == Permutation.from_cycles(
            [1, 3], "(1,3)")

    def test_strike_composes_over_unions(self):
        rng = random.Random(1)
        for _ in range(50):
            tau = random_permutation(9, rng)
            pool = list(range(1, 10))
            x = set(rng.sample(pool, rng.randint(0, 4)))
            extra = set(rng.sample([i for i in pool if i not in x],
                                   rng.randint(0, 3)))
            assert tau.strike(x).strike(extra) == tau.strike(x | extra)

    def test_orbit_counting_after_strike(self):
        theta = perm(12, "(1,2)(3,4,5,6,7,8)(9,10,11,12)")
        out = theta.strike({1, 3, 4, 6, 9, 10})
        assert out.num_orbits == 3  # (5,7,8), (11,12), fixed point 2

    def test_outside_labels_rejected(self):
        with pytest.raises(ValueError):
            perm(3, "(1,2,3)").strike({4})


class TestCycleStrings:
    def test_parse_and_print(self):
        p = perm(9, "(1,8,6)(2,3,9,5)")
        assert p.cycle_string() == "(1,8,6)(2,3,9,5)"
        assert p(1) == 8 and p(6) == 1 and p(4) == 4

    def test_whitespace_ignored(self):
        assert perm(4, " (1, 2) ( 3 ,4) ") == perm(4, "(1,2)(3,4)")

    def test_repeated_label_rejected(self):
        with pytest.raises(ValueError):
            perm(4, "(1,2)(2,3)")

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            perm(4, "(1,2")

    def test_identity_prints_empty_parens(self):
        assert Permutation.identity(3).cycle_string() == "()"


class TestConjugation:
    def test_cycle_type_is_class_function(self):
        rng = random.Random(2)
        for _ in range(40):
            sigma = random_permutation(8, rng)
            rho = random_permutation(8, rng)
            assert sigma.conjugated_by(rho).cycle_type() == sigma.cycle_type()


class TestRiemannHurwitz:
    def test_transitive_pairs_bound(self):
        rng = random.Random(3)
        found = 0
        for _ in range(300):
            n = rng.randint(2, 8)
            sigma = random_permutation(n, rng)
            theta = random_permutation(n, rng)
            if not sigma.generates_transitively_with(theta):
                continue
            found += 1
            total = (sigma.num_orbits + theta.num_orbits
                     + (sigma * theta).num_orbits)
            assert total <= n + 2
        assert found > 100


class TestCycleCuttings:
    def test_identity_has_one_empty_cutting(self):
        cuts = cycle_cuttings(Permutation.identity(4))
        assert len(cuts) == 1 and cuts[0].points == frozenset()

    def test_figure_example(self):
        sigma = perm(11, "(1,4,5,2,6)(7,9,8)(10,11)")
        cuts = cycle_cuttings(sigma)
        assert len(cuts) == 30  # 5 * 3 * 2
        assert any(c.points == frozenset({5, 8, 10}) for c in cuts)
        assert cuttings_count(sigma) == 30

    def test_transposition(self):
        cuts = cycle_cuttings(perm(2, "(1,2)"))
        assert sorted(c.points for c in cuts) == [frozenset({1}), frozenset({2})]

    def test_count_matches_parts_product(self):
        rng = random.Random(4)
        for _ in range(20):
            sigma = random_permutation(7, rng)
            expected = 1
            for orb in sigma.orbits():
                if len(orb) > 1:
                    expected *= len(orb)
            assert len(cycle_cuttings(sigma)) == expected

    def test_invalid_cutting_rejected(self):
        sigma = perm(4, "(1,2)(3,4)")
        with pytest.raises(ValueError):
            CycleCutting(sigma, frozenset({1}))
        with pytest.raises(ValueError):
            CycleCutting(sigma, frozenset({1, 2}))

    def test_orbit_size(self):
        sigma = perm(11, "(1,4,5,2,6)(7,9,8)(10,11)")
        assert orbit_size(sigma, 5) == 5
        assert orbit_size(sigma, 8) == 3
        assert orbit_size(sigma, 3) == 1


class TestNumericalPartition:
    def test_basic_statistics(self):
        lam = NumericalPartition((4, 2, 2))
        assert lam.size == 8 and lam.length == 3
        assert lam.z() == 4 * 2 ** 2 * 2   # 4^1 1! * 2^2 2!
        assert lam.parts_product() == 16
        assert lam.is_eulerian()

    def test_not_eulerian(self):
        assert not NumericalPartition((3, 1)).is_eulerian()

    def test_representative_cycle_type(self):
        lam = NumericalPartition((3, 2, 1))
        assert lam.representative().cycle_type() == lam

    def test_partitions_of_counts(self):
        # partition numbers p(n) for n = 1..8
        expected = [1, 2, 3, 5, 7, 11, 15, 22]
        for n, count in zip(range(1, 9), expected):
            assert len(list(partitions_of(n))) == count

    def test_parsing(self):
        assert as_partition("4,2,2").parts == (4, 2, 2)
        assert as_partition((2, 4, 2)).parts == (4, 2, 2)

    def test_invalid_rejected(self):
        with pytest.raises(ValueError):
            NumericalPartition((2, 3))
        with pytest.raises(ValueError):
            NumericalPartition((0,))
