from fractions import Fraction

import pytest

from mmskit.core.claims import BUDGET, CLAIMS, HOLDS, PRECONDITION, TOOLKIT_REF
from mmskit.core.config import Budgets, RunConfig
from mmskit.core.exceptions import ValidationError
from mmskit.services.constructions import star_instance
from mmskit.services.harness import SUITES, HarnessSpec, run_harness, run_named_check
from mmskit.services.ksum_analysis import KSumQuery
from mmskit.utils import io

from .helpers import random_zero_sum

SMALL_PARAMS = {
    "lemmas": {"n": 12, "k": 3, "instances": 5, "trials": 200, "hypergraphs": 5},
    "constructions": {"instances": 5},
    "feige": {"queries": 30, "grid": 10},
    "baranyai": {"pairs": [(4, 2), (6, 3)], "instances": 5},
    "ank": {"n": 6, "k": 3},
    "erdos": {"ns": [4, 5]},
    "kk": {"n": 6, "m_max": 8},
}


def run(suite, config, **overrides):
    params = dict(SMALL_PARAMS.get(suite, {}), **overrides)
    return run_harness(HarnessSpec(suite, params), config)


class TestSuites:
    @pytest.mark.parametrize("suite", sorted(SMALL_PARAMS))
    def test_suite_holds(self, suite, config):
        result = run(suite, config)
        assert result.reports
        assert result.exit_code == 0, [r.to_dict() for r in result.reports if r.status != HOLDS]

    @pytest.mark.slow
    def test_theorems_suite(self, config):
        result = run("theorems", config, instances=4)
        assert result.exit_code == 0
        assert {r.claim for r in result.reports} >= {"cubic_range", "quadratic_range", "hilton_milner", "moderate"}
        by_claim = {r.claim: r for r in result.reports}
        assert "n=250" in by_claim["hilton_milner"].statement
        assert "= 495" in by_claim["hilton_milner"].statement
        assert "= 67275/224" in by_claim["moderate"].statement
        assert by_claim["hilton_milner"].details["statuses"] == {HOLDS: 1}
        assert by_claim["moderate"].details["statuses"] == {HOLDS: 1}

    def test_every_suite_is_registered(self):
        assert set(SUITES) == set(SMALL_PARAMS) | {"theorems"}

    def test_ank_reports_value(self, config):
        report = run("ank", config).reports[0]
        assert report.claim == "ank"
        assert "A(6,3) = 10" in report.statement
        assert all(report.details["checks"].values())

    def test_tight_two_point_case(self, config):
        reports = run("feige", config).reports
        assert any(r.details.get("tight") for r in reports)

    def test_reports_carry_statements(self, config):
        for report in run("constructions", config).reports:
            assert report.statement
            assert report.to_dict()["status"] == HOLDS


class TestDeterminism:
    @pytest.mark.parametrize("suite", ["lemmas", "feige", "baranyai"])
    def test_same_seed_same_output(self, suite, config):
        first = io.dumps(run(suite, config).to_dict())
        second = io.dumps(run(suite, config).to_dict())
        assert first == second

    def test_seed_is_recorded(self):
        result = run("kk", RunConfig(seed=9))
        assert result.seed == 9
        assert result.to_dict()["seed"] == 9


class TestBudgets:
    def test_unknown_suite(self, config):
        with pytest.raises(ValidationError):
            run_harness(HarnessSpec("everything"), config)

    def test_deadline(self):
        result = run("theorems", RunConfig(seed=1, budget_ms=1))
        last = result.reports[-1]
        assert last.claim == "deadline"
        assert last.status == BUDGET
        assert result.exit_code == 4

    def test_budget_overrun_becomes_report(self):
        config = RunConfig(seed=1, budgets=Budgets(baranyai_sets=5))
        result = run("baranyai", config)
        assert result.reports[-1].status == BUDGET
        assert "error" in result.reports[-1].details
        assert result.exit_code == 4


class TestNamedChecks:
    def test_random_zero_sum(self, rng, config):
        q = KSumQuery(random_zero_sum(rng, 9), 3)
        for name in ("matching", "density"):
            assert run_named_check(name, q, config).status == HOLDS

    def test_star(self, config):
        assert run_named_check("cubic", KSumQuery(star_instance(16, 2), 2), config).status == HOLDS
        assert run_named_check("quadratic", KSumQuery(star_instance(132, 2), 2), config).status == HOLDS

    def test_hypotheses_unmet(self, config):
        q = KSumQuery(star_instance(16, 2), 2)
        assert run_named_check("hm", q, config).status == PRECONDITION
        assert run_named_check("moderate", q, config, Fraction(1, 4)).status == PRECONDITION

    def test_unknown(self, config):
        with pytest.raises(ValidationError):
            run_named_check("everything", KSumQuery(star_instance(4, 2), 2), config)

    @pytest.mark.parametrize("alias, name", [("lemma1", "matching"), ("lemma2", "density"),
                                             ("thm5", "cubic"), ("thm10", "quadratic")])
    def test_aliases(self, alias, name, config):
        n = 16 if name == "cubic" else 132 if name == "quadratic" else 8
        q = KSumQuery(star_instance(n, 2), 2)
        assert run_named_check(alias, q, config).to_dict() == run_named_check(name, q, config).to_dict()


class TestReferences:
    def test_reports_carry_paper_ref(self, config):
        for report in run("constructions", config).reports:
            assert report.paper_ref == CLAIMS[report.claim].paper_ref
            assert report.paper_ref != TOOLKIT_REF
            assert report.to_dict()["paper_ref"] == report.paper_ref

    def test_every_claim_has_a_reference(self):
        for name, template in CLAIMS.items():
            assert template.name == name
            assert template.paper_ref
