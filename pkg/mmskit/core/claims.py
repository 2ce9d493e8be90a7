"""Claim templates and check reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional

HOLDS = 'holds'
VIOLATED = 'violated'
PRECONDITION = 'precondition'
BUDGET = 'budget'

EXIT_CODES = {HOLDS: 0, VIOLATED: 2, PRECONDITION: 3, BUDGET: 4}

TOOLKIT_REF = "toolkit plumbing"


@dataclass
class ClaimTemplate:
    """Template for a checked statement with consistent wording.

    ``paper_ref`` names the published result the claim comes from; it is
    copied verbatim onto every report.
    """
    name: str
    statement: str
    paper_ref: str = TOOLKIT_REF

    def format(self, **kwargs) -> str:
        """Format the statement with the instance parameters."""
        return self.statement.format(**kwargs)


CLAIMS = {
    "star_tightness": ClaimTemplate(
        "star_tightness", "count(star(n={n}, k={k})) == C(n-1, k-1) = {bound}",
        "star construction: x_1 = n-1, all other x_i = -1"),
    "small_n_counterexample": ClaimTemplate(
        "small_n_counterexample", "count(3k+1 instance, k={k}) == C(3k-2, k) = {count} < C(3k, k-1) = {bound}",
        "n = 3k+1 counterexample: three values -(3k-2), the rest 3"),
    "divisible_case": ClaimTemplate(
        "divisible_case", "k | n (n={n}, k={k}) and total >= 0 imply count >= C(n-1, k-1) = {bound}",
        "divisible case via Baranyai's partition theorem"),
    "baranyai_schedule": ClaimTemplate(
        "baranyai_schedule", "k-subsets of [{n}] split into C(n-1, k-1) = {rounds} perfect {k}-matchings",
        "Baranyai's partition theorem"),
    "matching_bounds": ClaimTemplate(
        "matching_bounds", "nu(H) <= n/k and nu*(H) <= n/k for the negative-sum hypergraph (n={n}, k={k})",
        "matching number and fractional matching number of the negative-sum hypergraph are at most n/k"),
    "strong_duality": ClaimTemplate(
        "strong_duality", "nu*(H) == tau*(H) exactly",
        "LP duality of fractional matching and fractional cover"),
    "edge_density": ClaimTemplate(
        "edge_density", "e(H) <= (1-1/k) n/(n-k) C(n-1, k-1) = {bound}; missing >= C(n-1,k-1)/(k+1) when n > k^3",
        "edge bound on the negative-sum hypergraph from random permutation blocks"),
    "sampler": ClaimTemplate(
        "sampler", "random block count Z: mean within 5 stderr of m e(H)/C(n-1,k-1) = {expectation}; max Z <= nu(H)",
        "expected number of edge blocks in a random permutation"),
    "cubic_range": ClaimTemplate(
        "cubic_range", "n >= 2k^3 (n={n}, k={k}) implies count >= C(n-1, k-1) = {bound}",
        "conjecture holds for n >= 2k^3"),
    "quadratic_range": ClaimTemplate(
        "quadratic_range", "n >= 33k^2 (n={n}, k={k}) implies count >= C(n-1, k-1) = {bound}",
        "conjecture holds for n >= 33k^2"),
    "quadratic_constants": ClaimTemplate(
        "quadratic_constants", "1/13 - 1/66 = 53/858 >= 2/33",
        "missing-set bound (1/13 - 1/(2C)) (n-1)^(k-1)/(k-1)!"),
    "hilton_milner": ClaimTemplate(
        "hilton_milner", "no large value (n={n}, k={k}) implies count >= C(n-1,k-1) + C(n-k-1,k-1) - 1 = {bound}",
        "Hilton-Milner type bound without a large value"),
    "moderate": ClaimTemplate(
        "moderate", "no (1-delta)-moderately large value (delta={delta}) implies count >= delta(1-delta)/(14k) C(n,k) = {bound}",
        "g(delta, k) C(n, k) bound without a moderately large value"),
    "small_deviation": ClaimTemplate(
        "small_deviation", "Pr(sum of {m} nonnegative vars with means <= 1 < m + delta) >= min(delta/(1+delta), 1/13) = {bound}",
        "Feige's small-deviation inequality, constant 1/13"),
    "cover_transform": ClaimTemplate(
        "cover_transform", "zero-sum reals <-> fractional cover below n/k: e(H) = C(n,k) - count; reverse count <= original",
        "A(n,k) as maximum edges with fractional cover number below n/k"),
    "ank": ClaimTemplate(
        "ank", "A({n},{k}) = {value} by exhaustive upset search",
        "A(n,k): minimum number of nonnegative k-sums"),
    "erdos_matching": ClaimTemplate(
        "erdos_matching", "max e(H) with nu(H) <= {s} (n={n}, r={r}) equals max(C(r(s+1)-1, r), C(n,r) - C(n-s,r)) = {formula}",
        "Erdos matching conjecture"),
    "kruskal_katona": ClaimTemplate(
        "kruskal_katona", "colex-initial families minimize the lower shadow (n <= {n}, arity {arity})",
        "Kruskal-Katona theorem"),
    "deadline": ClaimTemplate(
        "deadline", "suite {suite} finished within {budget_ms} ms"),
}


@dataclass
class CheckReport:
    """Outcome of checking one claim on one input."""
    claim: str
    statement: str
    status: str
    witness: Optional[Any] = None
    details: Dict[str, Any] = field(default_factory=dict)
    paper_ref: str = TOOLKIT_REF

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "claim": self.claim,
            "paper_ref": self.paper_ref,
            "statement": self.statement,
            "status": self.status,
            "witness": self.witness,
            "details": self.details,
        }


def make_report(claim: str, status: str, witness: Any = None,
                details: Optional[Dict[str, Any]] = None, **params) -> CheckReport:
    """Build a report whose statement is rendered from the claim template."""
    template = CLAIMS[claim]
    return CheckReport(
        claim=claim,
        statement=template.format(**params),
        status=status,
        witness=witness,
        details=details or {},
        paper_ref=template.paper_ref,
    )


def exit_code(reports: Iterable[CheckReport]) -> int:
    """Violations dominate preconditions, which dominate budget overruns."""
    statuses = {r.status for r in reports}
    for status in (VIOLATED, PRECONDITION, BUDGET):
        if status in statuses:
            return EXIT_CODES[status]
    return 0
