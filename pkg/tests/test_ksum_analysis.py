from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmskit.core.claims import HOLDS, PRECONDITION
from mmskit.core.exceptions import BudgetExceededError, PreconditionError, ValidationError
from mmskit.core.rational import binom
from mmskit.services.combinatorics import dominance_leq, enumerate_ksets
from mmskit.services.constructions import (
    hm_construction_1,
    hm_construction_2,
    small_n_counterexample,
    star_instance,
)
from mmskit.services.hypergraphs import Hypergraph, fractional_matching, matching_number
from mmskit.services.ksum_analysis import (
    Instance,
    KSumQuery,
    check_cubic_range,
    check_hilton_milner,
    check_matching_bounds,
    check_moderate,
    check_quadratic_range,
    count_avoiding,
    count_by_enumeration,
    count_containing,
    count_nonnegative_ksums,
    edge_density_bound,
    find_t_sequence,
    hilton_milner_bound,
    is_large,
    is_moderately_large,
    missing_set_bound,
    moderate_constant,
    negative_sum_hypergraph,
    nonnegative_ksets,
    permutation_sampler,
    reduce_instance,
)

from .helpers import (
    block_instance,
    instances,
    random_block_instance,
    random_nonnegative,
    random_zero_sum,
)

STAR = KSumQuery(star_instance(8, 3), 3)


@st.composite
def queries(draw, max_n=9):
    inst = draw(instances(max_n=max_n))
    k = draw(st.integers(1, inst.n))
    return KSumQuery(inst, k)


class TestInstance:
    def test_sorted_with_total(self):
        inst = Instance.from_values(["1/2", "-3", "2", "0.25"])
        assert inst.values == (2, Fraction(1, 2), Fraction(1, 4), -3)
        assert inst.total == Fraction(-1, 4)
        assert inst.x(1) == 2

    def test_integers_keep_order(self):
        inst = Instance.from_values(["1/2", "1/3"])
        assert inst.integers == (3, 2)

    def test_empty(self):
        with pytest.raises(ValidationError):
            Instance(())

    def test_k_out_of_range(self):
        with pytest.raises(ValidationError):
            KSumQuery(star_instance(4, 2), 5)


class TestCounting:
    def test_star(self):
        assert count_nonnegative_ksums(STAR) == 21

    def test_small_n_counterexample(self):
        q = KSumQuery(small_n_counterexample(3), 3)
        assert count_nonnegative_ksums(q) == 35 < binom(9, 2)

    def test_all_zeros(self):
        q = KSumQuery(Instance((Fraction(0),) * 7), 3)
        assert count_nonnegative_ksums(q) == 35

    @given(queries())
    def test_matches_enumeration(self, q):
        count = count_nonnegative_ksums(q)
        assert count == count_by_enumeration(q)
        assert count == len(nonnegative_ksets(q))

    def test_thread_count_does_not_matter(self, rng):
        for _ in range(10):
            q = KSumQuery(random_zero_sum(rng, 24), 4)
            assert count_nonnegative_ksums(q, threads=4) == count_nonnegative_ksums(q, threads=1)

    def test_negative_sets_complete_the_count(self, rng):
        q = KSumQuery(random_zero_sum(rng, 10), 4)
        negative = sum(1 for s in enumerate_ksets(10, 4)
                       if sum(q.instance.x(i) for i in s) < 0)
        assert count_nonnegative_ksums(q) + negative == binom(10, 4)

    def test_containing_and_avoiding_split(self, rng):
        q = KSumQuery(random_zero_sum(rng, 11), 3)
        assert count_containing(q, 1) + count_avoiding(q, [1]) == count_nonnegative_ksums(q)

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            count_nonnegative_ksums(STAR, budget=10)

    def test_upset_property(self, rng):
        for n in range(4, 11):
            q = KSumQuery(random_zero_sum(rng, n), 3)
            family = nonnegative_ksets(q).members
            for s, t in combinations(enumerate_ksets(n, 3), 2):
                if s in family and dominance_leq(t, s):
                    assert t in family
                if t in family and dominance_leq(s, t):
                    assert s in family

    def test_scaling_invariance(self, rng):
        for _ in range(10):
            q = KSumQuery(random_zero_sum(rng, 9), 3)
            scaled = KSumQuery(q.instance.scaled(Fraction(7, 3)), 3)
            assert count_nonnegative_ksums(q) == count_nonnegative_ksums(scaled)
            H, H2 = negative_sum_hypergraph(q), negative_sum_hypergraph(scaled)
            assert matching_number(H).nu == matching_number(H2).nu
            assert fractional_matching(H).value == fractional_matching(H2).value
            assert find_t_sequence(q).t == find_t_sequence(scaled).t


class TestNegativeSumHypergraph:
    def test_star_pivot_one_is_empty(self):
        H = negative_sum_hypergraph(STAR, 1)
        assert H.num_edges == 0
        assert H.vertices == tuple(range(2, 9))

    def test_star_pivot_two(self):
        H = negative_sum_hypergraph(STAR, 2)
        assert H.num_edges == 15
        assert all(1 not in e for e in H.sorted_edges())

    def test_zeros(self):
        q = KSumQuery(Instance((Fraction(0),) * 5), 2)
        assert negative_sum_hypergraph(q).num_edges == 0

    def test_requires_k_at_least_two(self):
        with pytest.raises(ValidationError):
            negative_sum_hypergraph(KSumQuery(star_instance(4, 1), 1))


class TestLargeness:
    def test_star(self):
        assert is_large(STAR, 1)
        assert not is_large(STAR, 2)

    def test_zeros(self):
        q = KSumQuery(Instance((Fraction(0),) * 5), 3)
        assert all(is_large(q, i) for i in range(1, 6))

    def test_moderately_large_star(self):
        assert is_moderately_large(STAR, 1, Fraction(9, 10))
        assert is_moderately_large(STAR, 1, Fraction(0))
        assert not is_moderately_large(STAR, 2, Fraction(1, 2))

    @given(queries())
    def test_delta_zero_is_largeness(self, q):
        for i in range(1, q.n + 1):
            assert is_moderately_large(q, i, Fraction(0)) == is_large(q, i)

    def test_delta_range(self):
        with pytest.raises(ValidationError):
            is_moderately_large(STAR, 1, Fraction(1))


class TestReduction:
    def test_negative_total(self):
        with pytest.raises(PreconditionError):
            reduce_instance(KSumQuery(Instance.from_values([1, -2]), 1))

    def test_translates_to_zero(self):
        reduction = reduce_instance(KSumQuery(Instance.from_values([3, 1, -1]), 2))
        assert reduction.instance.total == 0
        assert reduction.shift == -1
        assert reduction.x1_large

    def test_translation_never_adds_nonnegative_sums(self, rng):
        for _ in range(10):
            q = KSumQuery(random_nonnegative(rng, 9), 3)
            reduced = KSumQuery(reduce_instance(q).instance, 3)
            assert count_nonnegative_ksums(reduced) <= count_nonnegative_ksums(q)


class TestTSequence:
    def test_star_has_none(self):
        assert find_t_sequence(STAR).t == 0

    def test_first_construction(self):
        q = KSumQuery(hm_construction_1(20, 3), 3)
        tseq = find_t_sequence(q)
        assert tseq.t == 1
        assert tseq.sets[0].indices == (19, 20)

    @given(instances(min_n=3, max_n=10), st.integers(2, 3))
    def test_invariants(self, inst, k):
        if k > inst.n:
            return
        q = KSumQuery(inst, k)
        tseq = find_t_sequence(q)
        if not is_large(q, 1):
            assert tseq.t >= 1
        for j, s in enumerate(tseq.sets, start=1):
            assert min(s.indices, default=inst.n + 1) > j
            assert len(s) <= j * (k - 1)
            assert sum(inst.values[:j]) + sum(inst.x(i) for i in s) < 0

    def test_cap(self, rng):
        q = KSumQuery(block_instance(rng, 30), 2)
        assert find_t_sequence(q, t_max=2).t <= 2


class TestMatchingBounds:
    def test_small_n_counterexample(self):
        report = check_matching_bounds(KSumQuery(small_n_counterexample(3), 3))
        assert report.status == HOLDS
        assert report.details["nu"] == 3

    def test_star(self):
        report = check_matching_bounds(STAR)
        assert report.status == HOLDS
        assert report.details["nu"] == 0
        assert report.details["nu_star"] == "0/1"

    def test_random_zero_sum(self, rng):
        for _ in range(20):
            report = check_matching_bounds(KSumQuery(random_zero_sum(rng, 12), 3))
            assert report.status == HOLDS

    def test_negative_total(self):
        report = check_matching_bounds(KSumQuery(Instance.from_values([1, -2, -3]), 2))
        assert report.status == PRECONDITION

    def test_fractional_bound_on_many_instances(self, rng):
        for trial in range(100):
            k = 2 + trial % 2
            n = int(rng.integers(k + 1, 15))
            q = KSumQuery(random_zero_sum(rng, n), k)
            assert fractional_matching(negative_sum_hypergraph(q)).value <= Fraction(n, k)

    @pytest.mark.slow
    def test_fractional_bound_at_larger_n(self, rng):
        for trial in range(500):
            k = 2 + trial % 2
            n = int(rng.integers(k + 1, 41 if k == 2 else 21))
            q = KSumQuery(random_zero_sum(rng, n), k)
            assert fractional_matching(negative_sum_hypergraph(q)).value <= Fraction(n, k)


class TestEdgeDensity:
    def test_empty(self):
        H = negative_sum_hypergraph(STAR)
        result = edge_density_bound(H, 8, 3)
        assert result.holds
        assert result.missing == 21
        assert result.missing_bound is None

    def test_small_n_counterexample(self):
        H = negative_sum_hypergraph(KSumQuery(small_n_counterexample(3), 3))
        result = edge_density_bound(H, 10, 3)
        assert H.num_edges == 21
        assert result.bound == Fraction(240, 7)
        assert result.holds
        assert result.missing_bound is None

    def test_both_inequalities_above_cube(self, rng):
        for _ in range(20):
            q = KSumQuery(random_zero_sum(rng, 9), 2)
            result = edge_density_bound(negative_sum_hypergraph(q), 9, 2)
            assert result.missing_bound == Fraction(8, 3)
            assert result.holds

    def test_wrong_shape(self):
        H = Hypergraph.from_edges(8, 3, [])
        with pytest.raises(ValidationError):
            edge_density_bound(H, 8, 3)

    def test_matching_too_large(self):
        H = Hypergraph.from_edges(9, 1, [(i,) for i in range(2, 10)], vertices=range(2, 10))
        with pytest.raises(PreconditionError):
            edge_density_bound(H, 9, 2)


class TestPermutationSampler:
    VERTICES = tuple(range(2, 10))

    def test_empty(self):
        H = Hypergraph.from_edges(9, 2, [], vertices=self.VERTICES)
        report = permutation_sampler(H, 3, 200, seed=1)
        assert report.mean_Z == 0
        assert report.max_Z == 0

    def test_complete(self):
        H = Hypergraph.from_edges(9, 2, combinations(self.VERTICES, 2), vertices=self.VERTICES)
        report = permutation_sampler(H, 3, 200, seed=1)
        assert report.blocks == 4
        assert report.mean_Z == 4
        assert report.max_Z == 4

    def test_half_density(self):
        pairs = list(combinations(self.VERTICES, 2))[:14]
        H = Hypergraph.from_edges(9, 2, pairs, vertices=self.VERTICES)
        report = permutation_sampler(H, 3, 100_000, seed=7, workers=2)
        assert report.exact_expectation == 2
        assert abs(float(report.mean_Z - report.exact_expectation)) <= 5 * report.stderr
        assert report.max_Z <= matching_number(H).nu

    def test_labels_past_64(self):
        wide = tuple(range(2, 71))
        H = Hypergraph.from_edges(70, 1, [(65,), (70,)], vertices=wide)
        report = permutation_sampler(H, 2, 500, seed=4)
        assert report.blocks == 69
        assert report.exact_expectation == 2
        assert report.mean_Z == 2
        assert report.max_Z == 2

    def test_complete_graph_past_64(self):
        wide = tuple(range(2, 71))
        H = Hypergraph.from_edges(70, 2, combinations(wide, 2), vertices=wide)
        report = permutation_sampler(H, 3, 300, seed=4)
        assert report.blocks == 34
        assert report.mean_Z == report.max_Z == 34

    def test_sparse_graph_past_64(self):
        wide = tuple(range(2, 71))
        H = Hypergraph.from_edges(70, 2, [(i, i + 1) for i in range(60, 70)], vertices=wide)
        report = permutation_sampler(H, 3, 20_000, seed=11)
        assert report.exact_expectation == Fraction(34 * 10, binom(69, 2))
        assert abs(float(report.mean_Z - report.exact_expectation)) <= 5 * report.stderr
        assert report.max_Z <= matching_number(H).nu

    def test_deterministic_given_seed_and_workers(self):
        pairs = list(combinations(self.VERTICES, 2))[::3]
        H = Hypergraph.from_edges(9, 2, pairs, vertices=self.VERTICES)
        first = permutation_sampler(H, 3, 5000, seed=3, workers=2, chunk=700)
        again = permutation_sampler(H, 3, 5000, seed=3, workers=2, chunk=700)
        assert first == again


class TestCubicRange:
    def test_star_is_tight(self):
        report = check_cubic_range(KSumQuery(star_instance(16, 2), 2))
        assert report.status == HOLDS
        assert report.details["count"] == 15
        assert report.details["ratio"] == "4/5"

    def test_random_instances(self, rng):
        for k, n in ((2, 16), (3, 54)):
            for _ in range(5):
                report = check_cubic_range(KSumQuery(random_nonnegative(rng, n), k))
                assert report.status == HOLDS, report.details

    def test_precondition(self):
        report = check_cubic_range(KSumQuery(star_instance(15, 2), 2))
        assert report.status == PRECONDITION

    @pytest.mark.slow
    @pytest.mark.parametrize("k,n", [(2, 16), (3, 54)])
    def test_hundred_instances_at_threshold(self, rng, k, n):
        for _ in range(100):
            report = check_cubic_range(KSumQuery(random_nonnegative(rng, n), k))
            assert report.status == HOLDS, report.details


class TestMissingSetBound:
    def test_thirty_three(self):
        result = missing_set_bound(33, 132, 2)
        assert result.coefficient == Fraction(53, 858)
        assert result.coefficient >= Fraction(2, 33)
        assert result.bound == Fraction(53, 858) * 131
        assert not result.vacuous

    def test_degenerate_boundary(self):
        result = missing_set_bound(Fraction(13, 2), 26, 2)
        assert result.coefficient == 0
        assert result.vacuous

    def test_vacuous(self):
        assert missing_set_bound(1, 4, 2).vacuous

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            missing_set_bound(33, 100, 2)


class TestQuadraticRange:
    def test_star_k2(self):
        report = check_quadratic_range(KSumQuery(star_instance(132, 2), 2))
        assert report.status == HOLDS
        assert report.details["count"] == 131

    def test_star_k3(self):
        report = check_quadratic_range(KSumQuery(star_instance(297, 3), 3))
        assert report.status == HOLDS
        assert report.details["count"] == 43660

    def test_random_instances(self, rng):
        for _ in range(5):
            report = check_quadratic_range(KSumQuery(random_nonnegative(rng, 132), 2))
            assert report.status == HOLDS, report.details

    def test_precondition(self):
        report = check_quadratic_range(KSumQuery(star_instance(131, 2), 2))
        assert report.status == PRECONDITION

    @pytest.mark.slow
    @pytest.mark.parametrize("k,n", [(2, 132), (3, 297)])
    def test_hundred_instances_at_threshold(self, rng, k, n):
        for _ in range(100):
            report = check_quadratic_range(KSumQuery(random_nonnegative(rng, n), k))
            assert report.status == HOLDS, report.details


class TestHiltonMilner:
    def test_first_construction_k2(self):
        report = check_hilton_milner(KSumQuery(hm_construction_1(250, 2), 2), ratio=50)
        assert report.status == HOLDS
        assert report.details["count"] == hilton_milner_bound(250, 2) == 495
        assert report.details["diagnostics"]["t"] == 1

    def test_first_construction_k3_equality(self):
        q = KSumQuery(hm_construction_1(600, 3), 3)
        assert not is_large(q, 1)
        assert count_nonnegative_ksums(q) == binom(599, 2) + binom(596, 2) - 1

    def test_second_construction_equality(self):
        q = KSumQuery(hm_construction_2(600), 3)
        assert not is_large(q, 1)
        assert count_nonnegative_ksums(q) == binom(599, 2) + binom(596, 2) - 1

    def test_diagnostics_on_small_construction(self):
        report = check_hilton_milner(KSumQuery(hm_construction_1(20, 2), 2), ratio=5)
        diagnostics = report.details["diagnostics"]
        assert diagnostics["m"] == 1
        assert diagnostics["intersecting"]
        assert diagnostics["ekr_bound_holds"]

    def test_large_value_is_a_precondition(self):
        report = check_hilton_milner(KSumQuery(star_instance(250, 2), 2), ratio=50)
        assert report.status == PRECONDITION

    def test_default_ratio_needs_large_n(self):
        report = check_hilton_milner(KSumQuery(hm_construction_1(250, 2), 2))
        assert report.status == PRECONDITION

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [2, 3])
    def test_first_construction_at_600(self, k):
        report = check_hilton_milner(KSumQuery(hm_construction_1(600, k), k), ratio=50)
        assert report.status == HOLDS
        assert report.details["count"] == hilton_milner_bound(600, k)

    @pytest.mark.slow
    def test_second_construction_at_600(self):
        report = check_hilton_milner(KSumQuery(hm_construction_2(600), 3), ratio=50)
        assert report.status == HOLDS
        assert report.details["count"] == hilton_milner_bound(600, 3)

    @pytest.mark.slow
    def test_block_instances(self, rng):
        for _ in range(20):
            report = check_hilton_milner(KSumQuery(random_block_instance(rng, 250), 2), ratio=50)
            assert report.status == HOLDS, report.details
            assert report.details["count"] >= 495


class TestModerate:
    def test_constant(self):
        assert moderate_constant(Fraction(1, 2), 3) == Fraction(1, 168)
        assert moderate_constant(0, 5) == 0

    def test_block_instance(self, rng):
        q = KSumQuery(block_instance(rng, 300), 2)
        report = check_moderate(q, Fraction(1, 4), ratio=50)
        assert report.status == HOLDS
        assert report.details["count"] >= Fraction(3, 448) * binom(300, 2)

    def test_moderately_large_value_is_a_precondition(self):
        report = check_moderate(KSumQuery(star_instance(300, 2), 2), Fraction(1, 4), ratio=50)
        assert report.status == PRECONDITION

    @pytest.mark.slow
    def test_fifty_instances(self, rng):
        delta = Fraction(1, 4)
        checked = 0
        while checked < 50:
            q = KSumQuery(random_block_instance(rng, 300), 2)
            if is_moderately_large(q, 1, delta):
                continue
            report = check_moderate(q, delta, ratio=50)
            assert report.status == HOLDS, report.details
            assert report.details["count"] >= Fraction(3, 448) * binom(300, 2)
            checked += 1

    def test_zero_delta_is_vacuous(self, rng):
        q = KSumQuery(block_instance(rng, 300), 2)
        report = check_moderate(q, Fraction(0), ratio=50)
        assert report.status == HOLDS
