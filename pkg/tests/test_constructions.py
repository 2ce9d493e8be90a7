from fractions import Fraction
from itertools import combinations

import pytest

from mmskit.core.exceptions import BudgetExceededError, ValidationError
from mmskit.core.rational import binom
from mmskit.services.combinatorics import enumerate_ksets, enumerate_upsets
from mmskit.services.constructions import (
    CoverWitness,
    compute_ank,
    cover_witness_to_reals,
    hm_construction_1,
    hm_construction_2,
    realize_family,
    reals_to_cover_witness,
    small_n_counterexample,
    star_instance,
)
from mmskit.services.hypergraphs import Hypergraph
from mmskit.services.ksum_analysis import (
    Instance,
    KSumQuery,
    count_by_enumeration,
    count_nonnegative_ksums,
    nonnegative_ksets,
)

from .helpers import random_zero_sum


def count(inst, k):
    return count_nonnegative_ksums(KSumQuery(inst, k))


class TestStar:
    @pytest.mark.parametrize("n,k,expected", [
        (8, 3, 21), (4, 2, 3), (2, 1, 1), (16, 2, 15), (132, 2, 131), (297, 3, 43660),
    ])
    def test_count(self, n, k, expected):
        assert count(star_instance(n, k), k) == expected

    def test_values(self):
        assert star_instance(2, 1).values == (1, -1)

    def test_rejects_tiny_n(self):
        with pytest.raises(ValidationError):
            star_instance(1, 1)


class TestSmallN:
    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_below_star(self, k):
        inst = small_n_counterexample(k)
        assert inst.n == 3 * k + 1
        assert inst.total == 0
        assert count(inst, k) == binom(3 * k - 2, k) < binom(3 * k, k - 1)

    def test_k4(self):
        assert count(small_n_counterexample(4), 4) == 210 < 220

    def test_rejects_k2(self):
        with pytest.raises(ValidationError):
            small_n_counterexample(2)


class TestHiltonMilnerConstructions:
    def test_first_values(self):
        inst = hm_construction_1(20, 3)
        assert inst.values == (120, 18) + (-1,) * 16 + (-61, -61)
        assert inst.total == 0

    def test_first_k2(self):
        assert count(hm_construction_1(250, 2), 2) == 495

    def test_second_total(self):
        assert hm_construction_2(10).total == 0
        assert hm_construction_2(10, positive_middle=True).total == 1

    @pytest.mark.parametrize("positive_middle", [False, True])
    def test_second_sums_through_x2(self, positive_middle):
        inst = hm_construction_2(10, positive_middle)
        sets = nonnegative_ksets(KSumQuery(inst, 3)).members
        through_x2 = {s.indices for s in sets if 2 in s and 1 not in s}
        assert through_x2 == {(2, i, j) for i, j in combinations(range(3, 10), 2)}

    def test_second_meets_bound_at_small_n(self):
        n = 40
        assert count(hm_construction_2(n), 3) == binom(n - 1, 2) + binom(n - 4, 2) - 1

    def test_rejects(self):
        with pytest.raises(ValidationError):
            hm_construction_1(4, 2)
        with pytest.raises(ValidationError):
            hm_construction_2(5)

    def test_fast_count_matches_enumeration(self):
        for inst, k in [(star_instance(9, 3), 3), (small_n_counterexample(3), 3),
                        (hm_construction_1(12, 3), 3), (hm_construction_2(12), 3)]:
            q = KSumQuery(inst, k)
            assert count_nonnegative_ksums(q) == count_by_enumeration(q)


class TestCoverTransform:
    def test_star(self):
        witness = reals_to_cover_witness(star_instance(4, 2), 2)
        assert witness.hypergraph.num_edges == 3
        assert witness.total_weight < 2

    def test_all_zeros(self):
        witness = reals_to_cover_witness(Instance((Fraction(0),) * 5), 2)
        assert witness.hypergraph.num_edges == 0
        assert len(set(witness.weights)) == 1

    def test_small_n_counterexample(self):
        witness = reals_to_cover_witness(small_n_counterexample(3), 3)
        assert witness.hypergraph.num_edges == binom(10, 3) - 35 == 85
        assert witness.total_weight < Fraction(10, 3)

    def test_requires_zero_total(self):
        with pytest.raises(ValidationError):
            reals_to_cover_witness(Instance.from_values([2, -1]), 1)

    def test_round_trip_never_adds_nonnegative_sums(self, rng):
        for trial in range(100):
            n = int(rng.integers(4, 10))
            k = 2 + trial % 2
            inst = random_zero_sum(rng, n)
            witness = reals_to_cover_witness(inst, k)
            back = cover_witness_to_reals(witness)
            assert back.total == 0
            assert count(back, k) <= count(inst, k)

    def test_empty_cover_gives_equal_values(self):
        H = Hypergraph.from_edges(4, 2, [])
        witness = CoverWitness(H, (Fraction(3, 8),) * 4, Fraction(3, 2))
        back = cover_witness_to_reals(witness)
        assert back.values == (0, 0, 0, 0)
        assert count(back, 2) == 6

    def test_triangle_at_boundary_is_rejected(self):
        H = Hypergraph.from_edges(3, 2, [(1, 2), (2, 3), (1, 3)])
        with pytest.raises(ValidationError):
            CoverWitness(H, (Fraction(1, 2),) * 3, Fraction(3, 2))

    def test_uncovered_edge_is_rejected(self):
        H = Hypergraph.from_edges(4, 2, [(1, 2)])
        with pytest.raises(ValidationError):
            CoverWitness(H, (Fraction(1, 4),) * 4, Fraction(1))


class TestAnk:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_k1(self, n):
        assert compute_ank(n, 1).value == 1

    @pytest.mark.parametrize("n,k,expected", [(4, 2, 3), (6, 2, 5), (8, 2, 7), (6, 3, 10)])
    def test_divisible_and_large_pairs(self, n, k, expected):
        result = compute_ank(n, k)
        assert result.value == expected == binom(n - 1, k - 1)

    @pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 3)])
    def test_encodings_agree(self, n, k):
        primal = compute_ank(n, k, "instance")
        dual = compute_ank(n, k, "cover")
        assert primal.value == dual.value <= binom(n - 1, k - 1)

    def test_witness(self):
        result = compute_ank(5, 2)
        q = KSumQuery(result.witness_instance, 2)
        assert result.witness_instance.total >= 0
        assert count_nonnegative_ksums(q) == result.value == len(result.witness_family)
        assert nonnegative_ksets(q) == result.witness_family

    def test_realizable_upsets_are_monotone(self):
        n, k = 4, 2
        ksets = list(enumerate_ksets(n, k))
        upsets = list(enumerate_upsets(n, k, 100))
        realizable = {f: realize_family(n, k, f, ksets, "instance") is not None for f in upsets}
        assert all(realizable[f] == (len(f) >= 3) for f in upsets)
        for small in upsets:
            for large in upsets:
                if small < large and len(large) == len(small) + 1 and realizable[small]:
                    assert realizable[large]

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            compute_ank(10, 5)

    def test_unknown_encoding(self):
        with pytest.raises(ValidationError):
            compute_ank(4, 2, "primal")
