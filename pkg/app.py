"""JSON service over the toolkit."""

from flask import Flask, jsonify, request

import config
from mmskit.core.claims import exit_code
from mmskit.core.config import load_config
from mmskit.core.exceptions import (
    BoundViolationError,
    BudgetExceededError,
    MMSError,
    PreconditionError,
    ValidationError,
)
from mmskit.core.lp import STRICT_RELATIONS, LpProblem, lp_solve, lp_strict_feasible
from mmskit.core.rational import binom, parse_rational
from mmskit.services import baranyai, constructions, deviations, ksum_analysis as ka
from mmskit.services.harness import CHECK_NAMES, run_named_check
from mmskit.utils import io
from mmskit.utils.logging import setup_logging, get_logger
from mmskit.utils.validation import validate_instance_input, validate_nk
from mmskit.version import __version__

# Initialize Flask app
app = Flask(__name__)
app.config['MAX_CONTENT_LENGTH'] = config.MAX_CONTENT_LENGTH

# Setup logging
setup_logging()
logger = get_logger(__name__)

RUN_CONFIG = load_config()


def _json_body() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValidationError("Request body must be a JSON object")
    return data


def _respond(payload, status: int = 200):
    return app.response_class(io.dumps(payload), status=status, mimetype='application/json')


@app.errorhandler(ValidationError)
def handle_validation_error(e):
    return jsonify({"error": str(e)}), 400


@app.errorhandler(PreconditionError)
def handle_precondition_error(e):
    return jsonify({"error": str(e), "status": "precondition"}), 422


@app.errorhandler(BoundViolationError)
def handle_violation(e):
    logger.warning(f"Bound violated: {str(e)}")
    return _respond({"error": str(e), "status": "violated", "witness": e.witness}, 422)


@app.errorhandler(BudgetExceededError)
def handle_budget_error(e):
    return jsonify({"error": str(e), "status": "budget"}), 507


@app.errorhandler(MMSError)
def handle_toolkit_error(e):
    logger.error(f"Toolkit error: {str(e)}")
    return jsonify({"error": str(e)}), 500


@app.route('/health')
def health():
    """Liveness probe."""
    return jsonify({"status": "ok", "version": __version__})


@app.route('/api/analyze', methods=['POST'])
def analyze():
    """
    Count nonnegative k-sums and run the requested checks.

    Body: {"values": [...], "k": K, "checks": [...], "delta": "1/4"}
    """
    data = _json_body()
    is_valid, error_message = validate_instance_input(data)
    if not is_valid:
        return jsonify({"error": error_message}), 400
    if 'k' not in data:
        return jsonify({"error": "k is required"}), 400
    checks = data.get('checks', [])
    unknown = [c for c in checks if c not in CHECK_NAMES]
    if unknown:
        return jsonify({"error": f"Unknown checks {unknown}; expected any of {list(CHECK_NAMES)}"}), 400

    q = ka.KSumQuery(io.instance_from_json(data), data['k'])
    delta = parse_rational(data.get('delta', '1/4'))
    count = ka.count_nonnegative_ksums(q, RUN_CONFIG.threads, RUN_CONFIG.budgets.count_ksets)
    reports = [run_named_check(name, q, RUN_CONFIG, delta) for name in checks]
    return _respond({
        "n": q.n,
        "k": q.k,
        "count": count,
        "bound": binom(q.n - 1, q.k - 1),
        "x1_large": ka.is_large(q, 1),
        "exit_code": exit_code(reports),
        "reports": [r.to_dict() for r in reports],
    })


@app.route('/api/lp', methods=['POST'])
def solve_lp():
    """Solve an exact LP, or decide strict feasibility when strict rows are present."""
    data = _json_body()
    num_vars = data.get('num_vars')
    if not isinstance(num_vars, int) or num_vars < 1:
        return jsonify({"error": "num_vars must be a positive integer"}), 400
    constraints = [(row[0], row[1], parse_rational(row[2])) for row in data.get('constraints', [])]
    bounds = [
        (None if lo is None else parse_rational(lo), None if hi is None else parse_rational(hi))
        for lo, hi in data.get('bounds', [])
    ] or None
    strict = [c for c in constraints if c[1] in STRICT_RELATIONS]
    if strict:
        weak = [c for c in constraints if c[1] not in STRICT_RELATIONS]
        result = lp_strict_feasible(weak, strict, num_vars, bounds)
        return _respond({"feasible": result.feasible, "witness": result.witness})
    objective = [parse_rational(c) for c in data.get('objective', [0] * num_vars)]
    solution = lp_solve(LpProblem(num_vars, objective, data.get('sense', 'maximize'), constraints, bounds))
    return _respond({"status": solution.status, "value": solution.value,
                     "assignment": list(solution.assignment)})


@app.route('/api/ank', methods=['POST'])
def ank():
    """A(n, k) by exhaustive upset search."""
    data = _json_body()
    is_valid, error_message = validate_nk(data.get('n'), data.get('k'))
    if not is_valid:
        return jsonify({"error": error_message}), 400
    result = constructions.compute_ank(data['n'], data['k'], data.get('encoding', 'instance'),
                                       RUN_CONFIG.budgets.ank_sets, RUN_CONFIG.budgets.ank_upsets)
    return _respond({
        "n": result.n,
        "k": result.k,
        "value": result.value,
        "witness_instance": result.witness_instance.to_strings(),
        "witness_family": [list(s.indices) for s in result.witness_family.sorted_members()],
    })


@app.route('/api/baranyai', methods=['POST'])
def partition():
    """Perfect-matching partition of all k-subsets of [n]."""
    data = _json_body()
    is_valid, error_message = validate_nk(data.get('n'), data.get('k'), divisible=True)
    if not is_valid:
        return jsonify({"error": error_message}), 400
    schedule = baranyai.baranyai_partition(data['n'], data['k'], set_budget=RUN_CONFIG.budgets.baranyai_sets)
    return _respond({
        "n": schedule.n,
        "k": schedule.k,
        "method": schedule.method,
        "valid": baranyai.validate_schedule(schedule),
        "rounds": schedule.to_lists(),
    })


@app.route('/api/construct/<kind>', methods=['POST'])
def construct(kind: str):
    """Extremal instances: star, small-n, hm1, hm2."""
    data = request.get_json(silent=True) or {}
    n, k = data.get('n'), data.get('k')
    try:
        if kind == 'star':
            inst = constructions.star_instance(n, k)
        elif kind == 'small-n':
            inst = constructions.small_n_counterexample(k)
        elif kind == 'hm1':
            inst = constructions.hm_construction_1(n, k)
        elif kind == 'hm2':
            inst, k = constructions.hm_construction_2(n), 3
        else:
            return jsonify({"error": f"Unknown construction {kind!r}"}), 404
    except TypeError:
        return jsonify({"error": "n and k must be integers"}), 400
    payload = io.instance_to_json(inst)
    payload['k'] = k
    return _respond(payload)


@app.route('/api/feige/check', methods=['POST'])
def feige_check():
    """Exact small-deviation check of a query."""
    q = io.query_from_json(_json_body())
    report = deviations.feige_check(q, RUN_CONFIG.budgets.convolution_support)
    return _respond(report.to_dict())


if __name__ == '__main__':
    app.run(host=config.HOST, port=config.PORT, debug=config.DEBUG)
