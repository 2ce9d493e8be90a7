from fractions import Fraction

import pytest

from mmskit.core.exceptions import BudgetExceededError, PreconditionError, ValidationError
from mmskit.core.rational import binom
from mmskit.services.baranyai import (
    PartitionSchedule,
    baranyai_partition,
    divisible_case_count,
    round_contributions,
    validate_schedule,
)
from mmskit.services.combinatorics import KSet
from mmskit.services.constructions import star_instance
from mmskit.services.ksum_analysis import Instance, KSumQuery, count_nonnegative_ksums

from .helpers import random_nonnegative

PAIRS = [(4, 2), (6, 2), (6, 3), (8, 2), (8, 4), (9, 3), (10, 2)]


class TestPartition:
    @pytest.mark.parametrize("n,k", PAIRS)
    def test_flow_schedule_is_valid(self, n, k):
        schedule = baranyai_partition(n, k, method="flow")
        assert schedule.method == "flow"
        assert len(schedule.rounds) == binom(n - 1, k - 1)
        assert validate_schedule(schedule)

    @pytest.mark.parametrize("n,k", [(4, 2), (6, 2), (6, 3)])
    def test_backtracking_schedule_is_valid(self, n, k):
        schedule = baranyai_partition(n, k, method="backtrack")
        assert schedule.method == "backtrack"
        assert validate_schedule(schedule)

    @pytest.mark.slow
    def test_triples_of_twelve(self):
        schedule = baranyai_partition(12, 3)
        assert len(schedule.rounds) == 55
        assert validate_schedule(schedule)

    def test_trivial_cases(self):
        assert validate_schedule(baranyai_partition(5, 5))
        assert len(baranyai_partition(5, 1).rounds) == 1

    def test_rounds_are_sorted(self):
        rounds = baranyai_partition(6, 2).to_lists()
        assert rounds == sorted(rounds)
        assert all(r == sorted(r) for r in rounds)

    def test_rejects(self):
        with pytest.raises(ValidationError):
            baranyai_partition(7, 2)
        with pytest.raises(ValidationError):
            baranyai_partition(6, 2, method="greedy")
        with pytest.raises(BudgetExceededError):
            baranyai_partition(12, 3, set_budget=100)


class TestValidateSchedule:
    def test_duplicated_round(self):
        schedule = baranyai_partition(6, 2)
        rounds = (schedule.rounds[0],) + schedule.rounds[:-1]
        assert not validate_schedule(PartitionSchedule(6, 2, rounds))

    def test_overlapping_round(self):
        schedule = baranyai_partition(4, 2)
        bad = (KSet.of(1, 2), KSet.of(2, 3))
        assert not validate_schedule(PartitionSchedule(4, 2, (bad,) + schedule.rounds[1:]))

    def test_wrong_size(self):
        assert not validate_schedule(PartitionSchedule(5, 2, ()))


class TestDivisibleCase:
    def test_star_has_one_per_round(self):
        inst = star_instance(6, 2)
        schedule = baranyai_partition(6, 2)
        assert round_contributions(inst, schedule) == [1] * 5
        assert divisible_case_count(inst, 2, schedule) == 5

    def test_zeros_fill_every_round(self):
        inst = Instance((Fraction(0),) * 6)
        schedule = baranyai_partition(6, 3)
        assert round_contributions(inst, schedule) == [2] * binom(5, 2)
        assert divisible_case_count(inst, 3, schedule) == binom(6, 3)

    def test_random_instances(self, rng):
        schedules = {(n, k): baranyai_partition(n, k) for n, k in [(6, 2), (6, 3), (8, 2), (8, 4)]}
        for trial in range(200):
            n, k = list(schedules)[trial % len(schedules)]
            inst = random_nonnegative(rng, n)
            total = divisible_case_count(inst, k, schedules[(n, k)])
            assert total == count_nonnegative_ksums(KSumQuery(inst, k))
            assert total >= binom(n - 1, k - 1)

    def test_builds_its_own_schedule(self, rng):
        assert divisible_case_count(random_nonnegative(rng, 8), 2) >= 7

    def test_rejects(self):
        with pytest.raises(PreconditionError):
            divisible_case_count(Instance.from_values([1, -2, 0, 0]), 2)
        with pytest.raises(ValidationError):
            divisible_case_count(star_instance(7, 2), 2)
        with pytest.raises(ValidationError):
            divisible_case_count(star_instance(6, 2), 2, baranyai_partition(6, 3))
