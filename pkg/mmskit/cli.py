"""Command-line entry point: ``mms``."""

import functools
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

import click

from .core.claims import BUDGET, EXIT_CODES, PRECONDITION, VIOLATED, CheckReport, exit_code
from .core.config import OUTPUT_FORMATS, RunConfig, load_config
from .core.exceptions import BoundViolationError, BudgetExceededError, MMSError, PreconditionError, ValidationError
from .core.lp import STRICT_RELATIONS, LpProblem, lp_solve, lp_strict_feasible
from .core.rational import binom, parse_rational
from .services import baranyai, constructions, deviations, hypergraphs, ksum_analysis as ka
from .services.harness import CHECK_NAMES, SUITES, HarnessSpec, run_harness, run_named_check
from .utils import io
from .utils.logging import get_logger, setup_logging
from .version import __version__

logger = get_logger(__name__)

CONSTRUCTIONS = ("star", "small-n", "hm1", "hm2")


def _rational(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_rational(value)
    except MMSError as e:
        raise click.BadParameter(str(e))


def _override_format(ctx, param, value):
    if value is not None:
        ctx.obj = ctx.obj.with_overrides(output_format=value)


format_option = click.option(
    "--format", "output_format", type=click.Choice(OUTPUT_FORMATS), default=None, expose_value=False,
    callback=_override_format, help="Output format for this command (overrides the global --format).")


def handle_errors(f):
    """Map toolkit errors onto the exit-code taxonomy."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except BoundViolationError as e:
            click.echo(f"Bound violated: {str(e)}", err=True)
            if e.witness is not None:
                click.echo(io.dumps(e.witness), err=True)
            sys.exit(EXIT_CODES[VIOLATED])
        except PreconditionError as e:
            click.echo(f"Precondition unmet: {str(e)}", err=True)
            sys.exit(EXIT_CODES[PRECONDITION])
        except BudgetExceededError as e:
            click.echo(f"Budget exceeded: {str(e)}", err=True)
            sys.exit(EXIT_CODES[BUDGET])
        except MMSError as e:
            raise click.ClickException(str(e))
    return wrapper


def _emit(config: RunConfig, payload: Any, rows: Optional[List[Dict[str, Any]]] = None) -> None:
    """JSON prints the payload; csv and table print ``rows`` (or the payload as one row)."""
    if config.output_format == "json":
        click.echo(io.dumps(payload))
    else:
        click.echo(io.render(rows if rows is not None else [payload], config.output_format))


def _report_rows(reports: List[CheckReport]) -> List[Dict[str, Any]]:
    return [{"claim": r.claim, "paper_ref": r.paper_ref, "status": r.status, "statement": r.statement}
            for r in reports]


@click.group()
@click.version_option(__version__, prog_name="mms")
@click.option("--seed", type=int, default=None, help="Seed for every randomized step.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")
@click.option("--format", "output_format", type=click.Choice(OUTPUT_FORMATS), default=None)
@click.option("--budget-ms", type=click.IntRange(min=0), default=None, help="Soft deadline for harness suites.")
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--log-file", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def cli(ctx, seed, threads, output_format, budget_ms, log_level, log_file):
    """Exact checks of nonnegative k-sum bounds and the structures behind them."""
    setup_logging(getattr(logging, log_level.upper()), log_file)
    ctx.obj = load_config().with_overrides(
        seed=seed, threads=threads, output_format=output_format, budget_ms=budget_ms)


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", "k", type=int, default=None, help="Subset size (overrides the file).")
@click.option("--pivot", type=int, default=None, help="Build the negative-sum hypergraph at this index.")
@click.option("--check", "checks", multiple=True, type=click.Choice(CHECK_NAMES))
@click.option("--delta", callback=_rational, default="1/4", show_default=True,
              help="delta for the moderate check.")
@format_option
@click.pass_obj
@handle_errors
def analyze(config: RunConfig, input_path, k, pivot, checks, delta):
    """Count nonnegative k-sums of an instance and run bound checks on it."""
    data = io.load_json(input_path)
    inst = io.instance_from_json(data)
    k = k if k is not None else data.get('k')
    if k is None:
        raise click.UsageError("k is required (--k or a \"k\" field in the input)")
    q = ka.KSumQuery(inst, k)
    count = ka.count_nonnegative_ksums(q, config.threads, config.budgets.count_ksets)
    summary: Dict[str, Any] = {
        "n": q.n,
        "k": k,
        "total": inst.total,
        "count": count,
        "bound": binom(q.n - 1, k - 1),
        "x1_large": ka.is_large(q, 1),
    }
    if pivot is not None:
        H = ka.negative_sum_hypergraph(q, pivot, config.budgets.count_ksets)
        nu = hypergraphs.matching_number(H, config.budgets.matching_nodes)
        nu_star = hypergraphs.fractional_matching(H)
        tau_star = hypergraphs.fractional_cover(H, nu_star)
        summary["hypergraph"] = {"pivot": pivot, "edges": H.num_edges, "nu": nu.nu,
                                 "nu_star": nu_star.value, "tau_star": tau_star.value}
    reports = [run_named_check(name, q, config, delta) for name in checks]
    summary["reports"] = [r.to_dict() for r in reports]
    _emit(config, summary, _report_rows(reports) if reports else None)
    sys.exit(exit_code(reports))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--encoding", type=click.Choice(constructions.ENCODINGS + ("both",)), default="instance",
              show_default=True)
@format_option
@click.pass_obj
@handle_errors
def ank(config: RunConfig, n, k, encoding):
    """Compute A(n, k) exactly by the upset search."""
    encodings = constructions.ENCODINGS if encoding == "both" else (encoding,)
    results = [constructions.compute_ank(n, k, e, config.budgets.ank_sets, config.budgets.ank_upsets)
               for e in encodings]
    if len({r.value for r in results}) > 1:
        raise BoundViolationError("Encodings disagree on A(n,k)",
                                  witness={r.encoding: r.value for r in results})
    best = results[0]
    payload = {
        "n": n, "k": k, "value": best.value,
        "encodings": list(encodings),
        "witness_instance": best.witness_instance.to_strings(),
        "witness_family": [list(s.indices) for s in best.witness_family.sorted_members()],
        "candidates_tested": best.families_tested,
    }
    _emit(config, payload, [{"n": n, "k": k, "value": best.value}])


def _lp_from_json(data: Dict[str, Any]):
    num_vars = data.get("num_vars")
    if not isinstance(num_vars, int) or num_vars < 1:
        raise ValidationError("LP input needs a positive integer num_vars")
    constraints = [(row[0], row[1], parse_rational(row[2])) for row in data.get("constraints", [])]
    bounds = [
        (None if lo is None else parse_rational(lo), None if hi is None else parse_rational(hi))
        for lo, hi in data.get("bounds", [])
    ] or None
    return num_vars, constraints, bounds


@cli.group()
def lp():
    """Exact LPs: matching numbers of a hypergraph file, or a raw LP."""


def _load_hypergraph(path: str) -> hypergraphs.Hypergraph:
    return io.hypergraph_from_json(io.load_json(path))


def _edge_weights(weights: Dict) -> List[Dict[str, Any]]:
    return [{"edge": list(e.indices), "weight": w} for e, w in weights.items() if w]


@lp.command("nu")
@click.option("--hypergraph", "hypergraph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@format_option
@click.pass_obj
@handle_errors
def lp_nu(config: RunConfig, hypergraph_path):
    """Matching number with a maximum matching as witness."""
    H = _load_hypergraph(hypergraph_path)
    result = hypergraphs.matching_number(H, config.budgets.matching_nodes)
    payload = {"nu": result.nu, "witness": [list(e.indices) for e in result.witness], "nodes": result.nodes}
    _emit(config, payload, [{"nu": result.nu, "witness": payload["witness"]}])


@lp.command("nu-star")
@click.option("--hypergraph", "hypergraph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@format_option
@click.pass_obj
@handle_errors
def lp_nu_star(config: RunConfig, hypergraph_path):
    """Fractional matching number with optimal edge weights."""
    result = hypergraphs.fractional_matching(_load_hypergraph(hypergraph_path))
    payload = {"nu_star": result.value, "witness": _edge_weights(result.weights)}
    _emit(config, payload, payload["witness"])


@lp.command("tau-star")
@click.option("--hypergraph", "hypergraph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@format_option
@click.pass_obj
@handle_errors
def lp_tau_star(config: RunConfig, hypergraph_path):
    """Fractional cover number with optimal vertex weights, certified against nu*."""
    result = hypergraphs.fractional_cover(_load_hypergraph(hypergraph_path))
    witness = [{"vertex": v, "weight": w} for v, w in result.weights.items()]
    payload = {"tau_star": result.value, "witness": witness}
    _emit(config, payload, witness)


@lp.command("solve")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@format_option
@click.pass_obj
@handle_errors
def lp_solve_command(config: RunConfig, input_path):
    """Solve an exact LP; strict rows turn it into a strict-feasibility question."""
    data = io.load_json(input_path)
    num_vars, constraints, bounds = _lp_from_json(data)
    strict = [c for c in constraints if c[1] in STRICT_RELATIONS]
    if strict:
        weak = [c for c in constraints if c[1] not in STRICT_RELATIONS]
        result = lp_strict_feasible(weak, strict, num_vars, bounds)
        payload = {"feasible": result.feasible, "witness": result.witness}
    else:
        problem = LpProblem(num_vars, [parse_rational(c) for c in data.get("objective", [0] * num_vars)],
                            data.get("sense", "maximize"), constraints, bounds)
        solution = lp_solve(problem)
        payload = {"status": solution.status, "value": solution.value,
                   "assignment": list(solution.assignment), "pivots": solution.pivots}
    _emit(config, payload)


@cli.group()
def feige():
    """Small-deviation probabilities."""


@feige.command("check")
@click.option("--query", "query_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mc-trials", type=click.IntRange(min=0), default=0,
              help="Also estimate the tail by sampling.")
@format_option
@click.pass_obj
@handle_errors
def feige_check(config: RunConfig, query_path, mc_trials):
    """Exact tail of a query against the small-deviation bound."""
    q = io.query_from_json(io.load_json(query_path))
    report = deviations.feige_check(q, config.budgets.convolution_support)
    payload = report.to_dict()
    if mc_trials:
        estimate = deviations.monte_carlo_tail(q, mc_trials, config.seed, config.threads)
        payload["monte_carlo"] = {"estimate": estimate.estimate, "stderr": estimate.stderr,
                                  "trials": estimate.trials}
    _emit(config, payload, _report_rows([report]))
    sys.exit(exit_code([report]))


@feige.command("search")
@click.option("--m", "m", type=int, required=True)
@click.option("--threshold", callback=_rational, required=True)
@click.option("--grid", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--means", default=None, help="Comma-separated means (default: all 1).")
@click.option("--refine", type=click.IntRange(min=0), default=0, help="Random refinements around the best point.")
@click.option("--seed", type=int, default=None, help="Overrides the global seed.")
@format_option
@click.pass_obj
@handle_errors
def feige_search(config: RunConfig, m, threshold, grid, means, refine, seed):
    """Grid search over two-point distributions for a small tail."""
    mean_list = [parse_rational(x) for x in means.split(",")] if means else [Fraction(1)] * m
    result = deviations.samuels_search(m, mean_list, threshold, grid, config.threads,
                                       config.budgets.samuels_points, refine,
                                       config.seed if seed is None else seed)
    payload = {
        "m": m,
        "threshold": threshold,
        "best_prob": result.best_prob,
        "best_distributions": [d.to_pairs() for d in result.best_distributions],
        "points": result.points,
    }
    if threshold > m:
        payload["feige_bound"] = deviations.feige_bound(m, threshold - m)
    _emit(config, payload, [{"m": m, "best_prob": result.best_prob, "points": result.points}])


@cli.command("baranyai")
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--validate", is_flag=True, help="Check the schedule independently.")
@click.option("--method", type=click.Choice(baranyai.METHODS), default="auto", show_default=True)
@format_option
@click.pass_obj
@handle_errors
def baranyai_command(config: RunConfig, n, k, validate, method):
    """Partition all k-subsets of [n] into perfect matchings."""
    schedule = baranyai.baranyai_partition(n, k, method, config.budgets.baranyai_sets,
                                           config.budgets.matching_nodes)
    payload: Dict[str, Any] = {"n": n, "k": k, "method": schedule.method, "rounds": schedule.to_lists()}
    if validate:
        payload["valid"] = baranyai.validate_schedule(schedule)
    rows = [{"round": i, "sets": r} for i, r in enumerate(schedule.to_lists(), start=1)]
    _emit(config, payload, rows)
    if validate and not payload["valid"]:
        sys.exit(EXIT_CODES[VIOLATED])


@cli.command()
@click.argument("kind", type=click.Choice(CONSTRUCTIONS))
@click.option("--n", "n", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@click.option("--count", "with_count", is_flag=True, help="Also count the nonnegative k-sums.")
@format_option
@click.pass_obj
@handle_errors
def construct(config: RunConfig, kind, n, k, with_count):
    """Print one of the extremal instances as instance JSON."""
    if kind == "small-n":
        if k is None:
            raise click.UsageError("small-n needs --k")
        inst = constructions.small_n_counterexample(k)
    elif kind == "hm2":
        if n is None:
            raise click.UsageError("hm2 needs --n")
        inst, k = constructions.hm_construction_2(n), 3
    else:
        if n is None or k is None:
            raise click.UsageError(f"{kind} needs --n and --k")
        inst = constructions.star_instance(n, k) if kind == "star" else constructions.hm_construction_1(n, k)
    payload = io.instance_to_json(inst)
    payload["k"] = k
    if with_count:
        payload["count"] = ka.count_nonnegative_ksums(ka.KSumQuery(inst, k), config.threads,
                                                      config.budgets.count_ksets)
    _emit(config, payload)


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--r", "r", type=int, required=True)
@format_option
@click.pass_obj
@handle_errors
def erdos(config: RunConfig, n, r):
    """Brute-force maximum edges with bounded matching number against the formula."""
    rows = hypergraphs.erdos_comparison(n, r, config.budgets.erdos_exhaustive_sets, config.budgets.ank_upsets)
    _emit(config, rows, rows)
    if any(row["formula"] != row["bruteforce"] for row in rows):
        sys.exit(EXIT_CODES[VIOLATED])


@cli.command()
@click.argument("direction", type=click.Choice(["to-cover", "to-reals"]))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", "k", type=int, default=None)
@format_option
@click.pass_obj
@handle_errors
def transform(config: RunConfig, direction, input_path, k):
    """Move between zero-sum instances and fractional covers below n/k."""
    data = io.load_json(input_path)
    if direction == "to-cover":
        k = k if k is not None else data.get('k')
        if k is None:
            raise click.UsageError("to-cover needs k")
        witness = constructions.reals_to_cover_witness(io.instance_from_json(data), k)
        _emit(config, io.cover_witness_to_json(witness))
    else:
        witness = io.cover_witness_from_json(data)
        payload = io.instance_to_json(constructions.cover_witness_to_reals(witness))
        payload["k"] = witness.k
        _emit(config, payload)


@cli.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.option("--n", "n", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--instances", type=int, default=None)
@click.option("--grid", type=int, default=None)
@click.option("--seed", type=int, default=None, help="Overrides the global seed.")
@format_option
@click.pass_obj
@handle_errors
def harness(config: RunConfig, suite, n, k, trials, instances, grid, seed):
    """Run a falsification suite and exit with its status code."""
    params = {"n": n, "k": k, "trials": trials, "instances": instances, "grid": grid}
    config = config.with_overrides(seed=seed)
    result = run_harness(HarnessSpec(suite, {key: v for key, v in params.items() if v is not None}), config)
    _emit(config, result.to_dict(), _report_rows(result.reports))
    sys.exit(result.exit_code)


def main() -> None:
    cli(prog_name="mms")


if __name__ == "__main__":
    main()
