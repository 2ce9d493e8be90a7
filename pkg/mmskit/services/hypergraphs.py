"""Integral and fractional matchings and covers of uniform hypergraphs."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..core.exceptions import BudgetExceededError, SolverError, ValidationError
from ..core.lp import GE, LE, MAXIMIZE, MINIMIZE, OPTIMAL, LpProblem, lp_solve
from ..core.rational import binom
from ..utils.logging import get_logger
from .combinatorics import KSet, SetFamily, enumerate_ksets, enumerate_upsets

logger = get_logger(__name__)

DEFAULT_NODE_BUDGET = 2 * 10**6


@dataclass(frozen=True)
class Hypergraph:
    """
    An r-uniform hypergraph. ``vertices`` defaults to {1..n}; hypergraphs
    built around a pivot index leave the pivot out.
    """
    n: int
    r: int
    edges: SetFamily
    vertices: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.edges.arity != self.r:
            raise ValidationError(f"Edges have arity {self.edges.arity}, expected {self.r}")
        if not self.vertices:
            object.__setattr__(self, 'vertices', tuple(range(1, self.n + 1)))
        allowed = set(self.vertices)
        for e in self.edges.members:
            if not set(e.indices) <= allowed:
                raise ValidationError(f"Edge {e.indices} leaves the vertex set")

    @classmethod
    def from_edges(cls, n: int, r: int, edges: Iterable[Iterable[int]],
                   vertices: Sequence[int] = ()) -> "Hypergraph":
        family = SetFamily(n, r, frozenset(KSet(tuple(e)) for e in edges))
        return cls(n, r, family, tuple(vertices))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[KSet]:
        return self.edges.sorted_members()

    def without_edge(self, edge: KSet) -> "Hypergraph":
        family = SetFamily(self.n, self.r, self.edges.members - {edge})
        return Hypergraph(self.n, self.r, family, self.vertices)


@dataclass(frozen=True)
class MatchingResult:
    nu: int
    witness: Tuple[KSet, ...]
    nodes: int = 0


@dataclass(frozen=True)
class FractionalResult:
    value: Fraction
    weights: Dict = field(default_factory=dict)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _greedy(masks: Sequence[int]) -> List[int]:
    used = 0
    chosen = []
    for e in masks:
        if not e & used:
            chosen.append(e)
            used |= e
    return chosen


def _branch_and_bound(masks: Sequence[int], r: int, budget: int,
                      upper: Optional[int] = None) -> Tuple[List[int], int]:
    """
    Maximum set of pairwise disjoint masks.

    Branches on the vertex of largest degree (smallest index on ties):
    either one of its edges is taken or the vertex is dropped. Subtrees are
    cut with min(#edges, |union| // r).
    """
    best = _greedy(masks)
    nodes = 0
    if upper is not None and len(best) >= upper:
        return best, nodes

    def bound(cands: List[int]) -> int:
        union = 0
        for e in cands:
            union |= e
        return min(len(cands), _popcount(union) // r)

    def search(cands: List[int], chosen: List[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(f"Matching search exceeded {budget} nodes")
        if len(chosen) > len(best):
            best = list(chosen)
        if not cands or len(chosen) + bound(cands) <= len(best):
            return
        if upper is not None and len(best) >= upper:
            return
        degree: Dict[int, int] = {}
        for e in cands:
            x = e
            while x:
                low = x & -x
                v = low.bit_length() - 1
                degree[v] = degree.get(v, 0) + 1
                x ^= low
        v = min(degree, key=lambda u: (-degree[u], u))
        bit = 1 << v
        for e in [e for e in cands if e & bit]:
            chosen.append(e)
            search([f for f in cands if not f & e], chosen)
            chosen.pop()
        search([f for f in cands if not f & bit], chosen)

    search(list(masks), [])
    return best, nodes


def matching_number(H: Hypergraph, node_budget: int = DEFAULT_NODE_BUDGET,
                    use_lp_bound: bool = True) -> MatchingResult:
    """
    Exact matching number by branch and bound.

    The greedy matching gives the first lower bound; with ``use_lp_bound``
    the search stops as soon as it reaches floor(nu*).

    Raises:
        BudgetExceededError: If the search visits more than node_budget nodes
    """
    if H.r < 1:
        raise ValidationError("matching_number requires r >= 1")
    masks = [e.mask for e in H.sorted_edges()]
    upper = None
    if use_lp_bound and masks:
        value = fractional_matching(H).value
        upper = value.numerator // value.denominator
    best, nodes = _branch_and_bound(masks, H.r, node_budget, upper)
    witness = tuple(sorted((KSet.from_mask(e) for e in best), key=KSet.colex_key))
    logger.debug(f"nu = {len(best)} on {H.num_edges} edges after {nodes} nodes")
    return MatchingResult(len(best), witness, nodes)


def fractional_matching(H: Hypergraph) -> FractionalResult:
    """nu*(H): maximize total edge weight with every vertex load <= 1."""
    edges = H.sorted_edges()
    if not edges:
        return FractionalResult(Fraction(0), {})
    rows = []
    for v in H.vertices:
        coefficients = [1 if v in e else 0 for e in edges]
        if any(coefficients):
            rows.append((coefficients, LE, 1))
    # w(e) <= 1 already follows from the row of any vertex of e
    problem = LpProblem(len(edges), [1] * len(edges), MAXIMIZE, rows)
    solution = lp_solve(problem)
    if solution.status != OPTIMAL:
        raise SolverError(f"Fractional matching LP returned {solution.status}")
    weights = {e: w for e, w in zip(edges, solution.assignment)}
    return FractionalResult(solution.value, weights)


def fractional_cover(H: Hypergraph, matching: Optional[FractionalResult] = None,
                     check_duality: bool = True) -> FractionalResult:
    """
    tau*(H): minimize total vertex weight with every edge covered to >= 1.

    With ``check_duality`` the value is compared against nu*(H) (computed
    unless supplied) and a mismatch raises SolverError.
    """
    vertices = list(H.vertices)
    rows = [([1 if v in e else 0 for v in vertices], GE, 1) for e in H.sorted_edges()]
    # v(i) > 1 is never optimal, so the upper bound 1 is left implicit
    problem = LpProblem(len(vertices), [1] * len(vertices), MINIMIZE, rows)
    solution = lp_solve(problem)
    if solution.status != OPTIMAL:
        raise SolverError(f"Fractional cover LP returned {solution.status}")
    result = FractionalResult(solution.value, dict(zip(vertices, solution.assignment)))
    if check_duality:
        matching = matching or fractional_matching(H)
        if matching.value != result.value:
            raise SolverError(f"Duality gap: nu* = {matching.value}, tau* = {result.value}")
    return result


def erdos_formula(n: int, r: int, s: int) -> int:
    """max{C(r(s+1)-1, r), C(n, r) - C(n-s, r)}: the conjectured maximum size."""
    if not 0 <= s < n // r:
        raise ValidationError(f"erdos_formula requires 0 <= s < n // r, got s={s}")
    return max(binom(r * (s + 1) - 1, r), binom(n, r) - binom(n - s, r))


def _exhaustive_range(masks: List[int], r: int, s: int, start: int, stop: int) -> int:
    best = 0
    for family in range(start, stop):
        size = _popcount(family)
        if size <= best:
            continue
        chosen = [masks[i] for i in range(len(masks)) if family >> i & 1]
        matching, _ = _branch_and_bound(chosen, r, DEFAULT_NODE_BUDGET, s + 1)
        if len(matching) <= s:
            best = size
    return best


def erdos_bruteforce(n: int, r: int, s: int, exhaustive_limit: int = 21,
                     upset_budget: int = 200_000, workers: int = 1) -> int:
    """
    True maximum number of edges of an r-uniform hypergraph on [n] with
    matching number <= s.

    Up to ``exhaustive_limit`` possible edges every subfamily is tried
    (ranges split across ``workers`` threads, merged by max). Beyond that
    only shifted families are searched: compressing toward smaller indices
    keeps the size and never raises the matching number, so some maximum is
    shifted.

    Raises:
        BudgetExceededError: If the shifted search exceeds upset_budget
    """
    if s < 0:
        raise ValidationError("erdos_bruteforce requires s >= 0")
    ksets = list(enumerate_ksets(n, r))
    masks = [e.mask for e in ksets]
    if len(masks) <= exhaustive_limit:
        total = 1 << len(masks)
        workers = max(1, workers)
        step = -(-total // workers)
        ranges = [(lo, min(total, lo + step)) for lo in range(0, total, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda rg: _exhaustive_range(masks, r, s, *rg), ranges))
        logger.info(f"Exhausted {total} families for n={n}, r={r}, s={s}")
        return max(results)

    best = 0
    for upset in enumerate_upsets(n, r, upset_budget):
        if len(upset) <= best:
            continue
        family = sorted((e.mask for e in upset))
        matching, _ = _branch_and_bound(family, r, DEFAULT_NODE_BUDGET, s + 1)
        if len(matching) <= s:
            best = len(upset)
    logger.info(f"Shifted-family search for n={n}, r={r}, s={s} found {best}")
    return best


def erdos_fractional_formula(n: int, r: int, x: Fraction) -> Fraction:
    """max{(rx)^r, 1-(1-x)^r} C(n, r), without any asymptotic correction."""
    x = Fraction(x)
    if not 0 <= x < Fraction(1, r):
        raise ValidationError(f"erdos_fractional_formula requires 0 <= x < 1/r, got {x}")
    return max((r * x) ** r, 1 - (1 - x) ** r) * binom(n, r)


def erdos_comparison(n: int, r: int, exhaustive_limit: int = 21,
                     upset_budget: int = 200_000) -> List[Dict[str, object]]:
    """
    Formula, brute force and fractional formula side by side for every
    valid s. The fractional column is informational only.
    """
    rows = []
    for s in range(n // r):
        rows.append({
            "n": n, "r": r, "s": s,
            "formula": erdos_formula(n, r, s),
            "bruteforce": erdos_bruteforce(n, r, s, exhaustive_limit, upset_budget),
            "fractional_formula": erdos_fractional_formula(n, r, Fraction(s, n)),
        })
    return rows
