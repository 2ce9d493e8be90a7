"""Falsification harness: named suites of checks over seeded random inputs."""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional

import numpy as np

from ..core.claims import BUDGET, HOLDS, PRECONDITION, VIOLATED, CheckReport, exit_code, make_report
from ..core.config import RunConfig
from ..core.exceptions import (
    BoundViolationError, BudgetExceededError, PreconditionError, SolverError, ValidationError,
)
from ..core.rational import binom, format_rational
from ..utils.logging import get_logger
from . import baranyai, combinatorics, constructions, deviations, hypergraphs, ksum_analysis as ka

logger = get_logger(__name__)

STATUS_ORDER = (VIOLATED, PRECONDITION, BUDGET, HOLDS)


@dataclass(frozen=True)
class HarnessSpec:
    """Which suite to run and its parameters (all optional)."""
    suite: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class HarnessResult:
    suite: str
    seed: int
    reports: List[CheckReport]

    @property
    def exit_code(self) -> int:
        return exit_code(self.reports)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "exit_code": self.exit_code,
            "reports": [r.to_dict() for r in self.reports],
        }


class _Deadline(Exception):
    pass


class _Context:
    """Seeded random inputs, the run configuration and the soft deadline."""

    def __init__(self, config: RunConfig, params: Dict[str, Any]):
        self.config = config
        self.params = params
        self.rng = np.random.default_rng(np.random.SeedSequence(config.seed))
        self.started = time.monotonic()

    def param(self, name: str, default):
        value = self.params.get(name)
        return default if value is None else value

    def tick(self) -> None:
        limit = self.config.budget_ms
        if limit and (time.monotonic() - self.started) * 1000 > limit:
            raise _Deadline()

    def rational_values(self, n: int, low: int = -10, high: int = 10) -> List[Fraction]:
        numerators = self.rng.integers(low, high + 1, size=n)
        denominators = self.rng.integers(1, 6, size=n)
        return [Fraction(int(a), int(b)) for a, b in zip(numerators, denominators)]

    def zero_sum_instance(self, n: int) -> ka.Instance:
        while True:
            values = self.rational_values(n)
            mean = sum(values, Fraction(0)) / n
            inst = ka.Instance(tuple(v - mean for v in values))
            if inst.values[0] > 0:
                return inst

    def nonnegative_instance(self, n: int) -> ka.Instance:
        values = self.rational_values(n)
        total = sum(values, Fraction(0))
        if total < 0:
            values = [v - total / n for v in values]
        return ka.Instance(tuple(values))

    def block_instance(self, n: int) -> ka.Instance:
        """Two thirds near 1, one third near -2, translated to total zero: no value is large."""
        positive = (2 * n) // 3
        noise = self.rng.integers(0, 10, size=n)
        values = [Fraction(100 + int(e), 100) for e in noise[:positive]]
        values += [Fraction(-200 - int(e), 100) for e in noise[positive:]]
        mean = sum(values, Fraction(0)) / n
        return ka.Instance(tuple(v - mean for v in values))

    def random_hypergraph(self, n: int, r: int) -> hypergraphs.Hypergraph:
        ksets = list(combinatorics.enumerate_ksets(n, r))
        keep = self.rng.random(len(ksets)) < 0.4
        return hypergraphs.Hypergraph.from_edges(n, r, [s.indices for s, kept in zip(ksets, keep) if kept])


def _aggregate(claim: str, reports: List[CheckReport], **params) -> CheckReport:
    """One report for a batch: worst status wins, first offending witness is kept."""
    counts = {status: sum(1 for r in reports if r.status == status) for status in STATUS_ORDER}
    worst = next((s for s in STATUS_ORDER if counts[s]), HOLDS)
    witness = next((r.witness for r in reports if r.status == worst and r.witness is not None), None)
    details = {"checked": len(reports), "statuses": {s: c for s, c in counts.items() if c}}
    return make_report(claim, worst, witness, details, **params)


def _lemmas(ctx: _Context) -> Iterator[CheckReport]:
    n, k = int(ctx.param("n", 12)), int(ctx.param("k", 3))
    instances = int(ctx.param("instances", 50))
    trials = int(ctx.param("trials", 2000))
    budgets = ctx.config.budgets

    matching, density, feige = [], [], []
    sample_H = None
    for _ in range(instances):
        ctx.tick()
        q = ka.KSumQuery(ctx.zero_sum_instance(n), k)
        matching.append(ka.check_matching_bounds(q, budgets.matching_nodes, budgets.count_ksets))
        reduced = ka.KSumQuery(ka.reduce_instance(q).instance, k)
        H = ka.negative_sum_hypergraph(reduced, 1)
        nu = hypergraphs.matching_number(H, budgets.matching_nodes)
        try:
            edge = ka.edge_density_bound(H, n, k, nu.nu)
        except PreconditionError as e:
            # nu(H) > n/k; already reported as a matching-bound violation
            density.append(make_report("edge_density", PRECONDITION, details={"error": str(e)}, bound="n/a"))
            continue
        density.append(make_report(
            "edge_density", HOLDS if edge.holds else VIOLATED,
            None if edge.holds else {"values": reduced.instance.to_strings()},
            {"edges": H.num_edges, "missing": edge.missing}, bound=format_rational(edge.bound)))
        if k >= 2:
            cover = hypergraphs.fractional_cover(H)
            weights = [cover.weights.get(v, Fraction(0)) for v in H.vertices]
            dq = deviations.cover_weight_query(weights, n, k)
            feige.append(deviations.feige_check(dq, budgets.convolution_support))
        if sample_H is None or H.num_edges > sample_H[0].num_edges:
            sample_H = (H, nu.nu)

    yield _aggregate("matching_bounds", matching, n=n, k=k)
    yield _aggregate("edge_density", density, bound=f"per instance (n={n}, k={k})")
    if feige:
        yield _aggregate("small_deviation", feige, m=k - 1, bound="min(delta/(1+delta), 1/13)")

    if sample_H is not None and k >= 2:
        ctx.tick()
        H, nu = sample_H
        report = ka.permutation_sampler(H, k, trials, ctx.config.seed, ctx.config.threads)
        close = abs(float(report.mean_Z - report.exact_expectation)) <= 5 * report.stderr \
            if report.stderr > 0 else report.mean_Z == report.exact_expectation
        holds = close and report.max_Z <= nu
        yield make_report("sampler", HOLDS if holds else VIOLATED, None, {
            "trials": report.trials, "mean_Z": report.mean_Z, "max_Z": report.max_Z,
            "nu": nu, "stderr": round(report.stderr, 12),
        }, expectation=format_rational(report.exact_expectation))

    duality = []
    for _ in range(int(ctx.param("hypergraphs", 20))):
        ctx.tick()
        H = ctx.random_hypergraph(int(ctx.rng.integers(4, 8)), int(ctx.rng.integers(2, 4)))
        try:
            hypergraphs.fractional_cover(H, check_duality=True)
            duality.append(make_report("strong_duality", HOLDS))
        except SolverError as e:
            duality.append(make_report("strong_duality", VIOLATED, {"edges": [list(e_.indices) for e_ in H.sorted_edges()]},
                                       {"error": str(e)}))
    yield _aggregate("strong_duality", duality)


def _falsification_ratio(configured: Fraction, n: int, k: int) -> Fraction:
    """The configured n/k^2 threshold, lowered to this n so the bound is still checked."""
    here = Fraction(n, k * k)
    if here < configured:
        logger.info(f"n = {n} is below {configured}k^2; checking the bound at ratio {here}")
        return here
    return Fraction(configured)


def _theorems(ctx: _Context) -> Iterator[CheckReport]:
    instances = int(ctx.param("instances", 20))
    thresholds = ctx.config.thresholds
    threads = ctx.config.threads
    count_budget = ctx.config.budgets.count_ksets

    for k, n in ((2, 16), (3, 54)):
        batch = []
        for _ in range(instances):
            ctx.tick()
            q = ka.KSumQuery(ctx.nonnegative_instance(n), k)
            batch.append(ka.check_cubic_range(q, thresholds.cubic_factor, threads, count_budget))
        yield _aggregate("cubic_range", batch, n=n, k=k, bound=binom(n - 1, k - 1))

    for k, n in ((2, 132), (3, 297)):
        batch = []
        for _ in range(instances):
            ctx.tick()
            q = ka.KSumQuery(ctx.nonnegative_instance(n), k)
            batch.append(ka.check_quadratic_range(q, thresholds.quadratic_ratio, threads, count_budget))
        yield _aggregate("quadratic_range", batch, n=n, k=k, bound=binom(n - 1, k - 1))

    constants = Fraction(1, 13) - Fraction(1, 66)
    yield make_report("quadratic_constants", HOLDS if constants == Fraction(53, 858) >= Fraction(2, 33) else VIOLATED,
                      details={"coefficient": format_rational(constants)})

    k = 2
    n = int(ctx.param("hm_n", 250))
    ratio = _falsification_ratio(thresholds.hilton_milner_ratio, n, k)
    batch = []
    for _ in range(max(1, instances // 4)):
        ctx.tick()
        batch.append(ka.check_hilton_milner(ka.KSumQuery(ctx.block_instance(n), k), ratio, threads, count_budget))
    yield _aggregate("hilton_milner", batch, n=n, k=k, bound=ka.hilton_milner_bound(n, k))

    delta = Fraction(1, 4)
    n = int(ctx.param("moderate_n", 300))
    ratio = _falsification_ratio(thresholds.moderate_ratio, n, k)
    batch = []
    for _ in range(max(1, instances // 4)):
        ctx.tick()
        batch.append(ka.check_moderate(ka.KSumQuery(ctx.block_instance(n), k), delta, ratio, threads, count_budget))
    bound = ka.moderate_constant(delta, k) * binom(n, k)
    yield _aggregate("moderate", batch, n=n, k=k, delta=format_rational(delta), bound=format_rational(bound))


def _constructions(ctx: _Context) -> Iterator[CheckReport]:
    for n, k in ((8, 3), (16, 2), (132, 2), (297, 3)):
        ctx.tick()
        count = ka.count_nonnegative_ksums(ka.KSumQuery(constructions.star_instance(n, k), k))
        bound = binom(n - 1, k - 1)
        yield make_report("star_tightness", HOLDS if count == bound else VIOLATED,
                          details={"count": count}, n=n, k=k, bound=bound)

    for k in (3, 4, 5):
        ctx.tick()
        count = ka.count_nonnegative_ksums(ka.KSumQuery(constructions.small_n_counterexample(k), k))
        bound = binom(3 * k, k - 1)
        holds = count == binom(3 * k - 2, k) and count < bound
        yield make_report("small_n_counterexample", HOLDS if holds else VIOLATED, count=count, bound=bound, k=k)

    hm_n = int(ctx.param("hm_n", 600))
    cases = [(constructions.hm_construction_1(hm_n, 2), 2), (constructions.hm_construction_1(hm_n, 3), 3),
             (constructions.hm_construction_2(hm_n), 3)]
    for inst, k in cases:
        ctx.tick()
        q = ka.KSumQuery(inst, k)
        count = ka.count_nonnegative_ksums(q, ctx.config.threads, ctx.config.budgets.count_ksets)
        bound = ka.hilton_milner_bound(hm_n, k)
        holds = count == bound and not ka.is_large(q, 1)
        yield make_report("hilton_milner", HOLDS if holds else VIOLATED,
                          details={"count": count, "equality": count == bound}, n=hm_n, k=k, bound=bound)

    batch = []
    for _ in range(int(ctx.param("instances", 20))):
        ctx.tick()
        n = int(ctx.rng.integers(4, 11))
        k = int(ctx.rng.integers(2, 4))
        inst = ctx.zero_sum_instance(n)
        q = ka.KSumQuery(inst, k)
        count = ka.count_nonnegative_ksums(q)
        witness = constructions.reals_to_cover_witness(inst, k)
        back = ka.count_nonnegative_ksums(ka.KSumQuery(constructions.cover_witness_to_reals(witness), k))
        holds = witness.hypergraph.num_edges == binom(n, k) - count and back <= count
        batch.append(make_report("cover_transform", HOLDS if holds else VIOLATED,
                                 None if holds else {"values": inst.to_strings(), "k": k}))
    yield _aggregate("cover_transform", batch)


def _feige(ctx: _Context) -> Iterator[CheckReport]:
    batch = []
    for _ in range(int(ctx.param("queries", 200))):
        ctx.tick()
        m = int(ctx.rng.integers(1, 5))
        dists = []
        for _slot in range(m):
            values = [Fraction(int(v), 4) for v in ctx.rng.integers(0, 13, size=3)]
            weights = [int(w) for w in ctx.rng.integers(1, 6, size=3)]
            probs = [Fraction(w, sum(weights)) for w in weights]
            dist = deviations.DiscreteDistribution(tuple(zip(values, probs)))
            if dist.expectation > 1:
                dist = dist.scaled(1 / dist.expectation)
            if dist.expectation == 0:
                dist = deviations.DiscreteDistribution(((Fraction(1), Fraction(1)),))
            dists.append(dist)
        delta = Fraction(int(ctx.rng.integers(1, 41)), 20)
        batch.append(deviations.feige_check(deviations.DeviationQuery(tuple(dists), m + delta)))
    yield _aggregate("small_deviation", batch, m="1..4", bound="min(delta/(1+delta), 1/13)")

    # the two-point law meets the bound only while delta <= 1/12
    delta = Fraction(1, 20)
    tight = deviations.DeviationQuery((deviations.DiscreteDistribution.two_point(1 + delta, Fraction(1)),), 1 + delta)
    report = deviations.feige_check(tight)
    if report.status == HOLDS and not report.details.get("tight"):
        report.details["note"] = "two-point case expected to be tight"
        report.status = VIOLATED
    yield report

    grid = int(ctx.param("grid", 50))
    for m in (1, 2):
        ctx.tick()
        threshold = m + Fraction(1, 2)
        found = deviations.samuels_search(m, [1] * m, threshold, grid, ctx.config.threads,
                                          ctx.config.budgets.samuels_points)
        bound = deviations.feige_bound(m, Fraction(1, 2))
        yield make_report("small_deviation", HOLDS if found.best_prob >= bound else VIOLATED,
                          {"distributions": [d.to_pairs() for d in found.best_distributions]},
                          {"best_tail": format_rational(found.best_prob), "points": found.points},
                          m=m, bound=format_rational(bound))


def _baranyai(ctx: _Context) -> Iterator[CheckReport]:
    pairs = ctx.param("pairs", [(4, 2), (6, 2), (6, 3), (8, 2), (8, 4), (9, 3)])
    instances = int(ctx.param("instances", 20))
    for n, k in pairs:
        ctx.tick()
        schedule = baranyai.baranyai_partition(n, k, set_budget=ctx.config.budgets.baranyai_sets)
        rounds = binom(n - 1, k - 1)
        yield make_report("baranyai_schedule", HOLDS if baranyai.validate_schedule(schedule) else VIOLATED,
                          details={"method": schedule.method}, n=n, k=k, rounds=rounds)
        batch = []
        for _ in range(instances):
            inst = ctx.nonnegative_instance(n)
            try:
                total = baranyai.divisible_case_count(inst, k, schedule)
                agrees = total == ka.count_nonnegative_ksums(ka.KSumQuery(inst, k))
                batch.append(make_report("divisible_case", HOLDS if agrees else VIOLATED,
                                         None if agrees else {"values": inst.to_strings()}, n=n, k=k, bound=rounds))
            except BoundViolationError as e:
                batch.append(make_report("divisible_case", VIOLATED, e.witness, {"error": str(e)}, n=n, k=k, bound=rounds))
        yield _aggregate("divisible_case", batch, n=n, k=k, bound=rounds)


def _ank(ctx: _Context) -> Iterator[CheckReport]:
    n, k = int(ctx.param("n", 6)), int(ctx.param("k", 3))
    budgets = ctx.config.budgets
    ctx.tick()
    primal = constructions.compute_ank(n, k, "instance", budgets.ank_sets, budgets.ank_upsets)
    ctx.tick()
    dual = constructions.compute_ank(n, k, "cover", budgets.ank_sets, budgets.ank_upsets)
    checks = {
        "encodings_agree": primal.value == dual.value,
        "at_most_star": primal.value <= binom(n - 1, k - 1),
    }
    if n % k == 0 or (k == 2 and n >= 8):
        checks["divisible_case_equality"] = primal.value == binom(n - 1, k - 1)
    holds = all(checks.values())
    yield make_report("ank", HOLDS if holds else VIOLATED,
                      {"values": primal.witness_instance.to_strings(),
                       "family": [list(s.indices) for s in primal.witness_family.sorted_members()]},
                      {"checks": checks, "candidates_tested": primal.families_tested},
                      n=n, k=k, value=primal.value)


def _erdos(ctx: _Context) -> Iterator[CheckReport]:
    r = int(ctx.param("r", 2))
    ns = ctx.param("ns", list(range(2 * r, 8)))
    for n in ns:
        ctx.tick()
        rows = hypergraphs.erdos_comparison(n, r, ctx.config.budgets.erdos_exhaustive_sets,
                                            ctx.config.budgets.ank_upsets)
        for row in rows:
            holds = row["formula"] == row["bruteforce"]
            yield make_report("erdos_matching", HOLDS if holds else VIOLATED, None,
                              {"bruteforce": row["bruteforce"],
                               "fractional_formula": format_rational(row["fractional_formula"])},
                              n=n, r=r, s=row["s"], formula=row["formula"])


def _kk(ctx: _Context) -> Iterator[CheckReport]:
    n = int(ctx.param("n", 6))
    for arity in (2, 3):
        ctx.tick()
        m_max = min(int(ctx.param("m_max", 12)), binom(n, arity))
        minima = combinatorics.exhaustive_shadow_minimum(n, arity, m_max)
        colex = {m: len(combinatorics.lower_shadow(combinatorics.colex_initial(n, arity, m)))
                 for m in range(1, m_max + 1)}
        exact_roots = all(
            combinatorics.kk_real_bound(binom(x, arity), arity, arity - 1) == binom(x, arity - 1)
            for x in range(arity, n + 1)
        )
        holds = minima == colex and exact_roots
        witness = None if holds else {"exhaustive": minima, "colex": colex}
        yield make_report("kruskal_katona", HOLDS if holds else VIOLATED, witness,
                          {"m_max": m_max, "exact_at_integer_roots": exact_roots}, n=n, arity=arity)


CHECKS = ("matching", "density", "cubic", "quadratic", "hm", "moderate")
CHECK_ALIASES = {"lemma1": "matching", "lemma2": "density", "thm5": "cubic", "thm10": "quadratic"}
CHECK_NAMES = CHECKS + tuple(CHECK_ALIASES)


def run_named_check(name: str, q: ka.KSumQuery, config: RunConfig,
                    delta: Fraction = Fraction(1, 4)) -> CheckReport:
    """Run one instance-level check by its short name (or alias) with the configured thresholds and budgets."""
    name = CHECK_ALIASES.get(name, name)
    if name not in CHECKS:
        raise ValidationError(f"Unknown check {name!r}; expected one of {CHECK_NAMES}")
    thresholds, budgets = config.thresholds, config.budgets
    if name == "matching":
        return ka.check_matching_bounds(q, budgets.matching_nodes, budgets.count_ksets)
    if name == "density":
        try:
            reduced = ka.KSumQuery(ka.reduce_instance(q).instance, q.k)
            H = ka.negative_sum_hypergraph(reduced, 1, budgets.count_ksets)
            result = ka.edge_density_bound(H, q.n, q.k, node_budget=budgets.matching_nodes)
        except PreconditionError as e:
            return make_report("edge_density", PRECONDITION, details={"error": str(e)}, bound="n/a")
        return make_report("edge_density", HOLDS if result.holds else VIOLATED,
                           None if result.holds else {"values": reduced.instance.to_strings()},
                           {"edges": H.num_edges, "missing": result.missing,
                            "missing_bound": result.missing_bound},
                           bound=format_rational(result.bound))
    if name == "cubic":
        return ka.check_cubic_range(q, thresholds.cubic_factor, config.threads, budgets.count_ksets)
    if name == "quadratic":
        return ka.check_quadratic_range(q, thresholds.quadratic_ratio, config.threads, budgets.count_ksets)
    if name == "hm":
        return ka.check_hilton_milner(q, thresholds.hilton_milner_ratio, config.threads, budgets.count_ksets)
    return ka.check_moderate(q, delta, thresholds.moderate_ratio, config.threads, budgets.count_ksets)


SUITES: Dict[str, Callable[[_Context], Iterator[CheckReport]]] = {
    "lemmas": _lemmas,
    "theorems": _theorems,
    "constructions": _constructions,
    "feige": _feige,
    "baranyai": _baranyai,
    "ank": _ank,
    "erdos": _erdos,
    "kk": _kk,
}


def run_harness(spec: HarnessSpec, config: Optional[RunConfig] = None) -> HarnessResult:
    """
    Run one suite and collect its reports.

    Budget overruns inside a check become ``budget`` reports; passing
    ``config.budget_ms`` stops the suite at the next check boundary.

    Raises:
        ValidationError: If the suite name is unknown
    """
    if spec.suite not in SUITES:
        raise ValidationError(f"Unknown suite {spec.suite!r}; expected one of {sorted(SUITES)}")
    config = config or RunConfig()
    ctx = _Context(config, spec.params)
    reports: List[CheckReport] = []
    logger.info(f"Running suite {spec.suite} with seed {config.seed}")
    try:
        for report in SUITES[spec.suite](ctx):
            if report.status != HOLDS:
                logger.warning(f"{report.claim}: {report.status}")
            reports.append(report)
    except BudgetExceededError as e:
        logger.warning(f"Suite {spec.suite} hit a budget: {str(e)}")
        reports.append(make_report("deadline", BUDGET, details={"error": str(e)},
                                   suite=spec.suite, budget_ms=config.budget_ms))
    except _Deadline:
        logger.warning(f"Suite {spec.suite} stopped at the {config.budget_ms} ms deadline")
        reports.append(make_report("deadline", BUDGET, suite=spec.suite, budget_ms=config.budget_ms))
    return HarnessResult(spec.suite, config.seed, reports)
