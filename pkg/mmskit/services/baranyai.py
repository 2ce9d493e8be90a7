"""Partitions of all k-subsets of [n] (k | n) into perfect matchings."""

from collections import Counter
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from ..core.exceptions import BoundViolationError, BudgetExceededError, PreconditionError, ValidationError
from ..core.rational import binom
from ..utils.logging import get_logger
from .combinatorics import KSet, enumerate_ksets
from .ksum_analysis import Instance

logger = get_logger(__name__)

METHODS = ("auto", "flow", "backtrack")

Round = Tuple[KSet, ...]


@dataclass(frozen=True)
class PartitionSchedule:
    n: int
    k: int
    rounds: Tuple[Round, ...]
    method: str = "flow"

    def to_lists(self) -> List[List[List[int]]]:
        return [[list(s.indices) for s in r] for r in self.rounds]


def _check_divisible(n: int, k: int) -> None:
    if k < 1 or n < k or n % k:
        raise ValidationError(f"A perfect-matching partition needs k | n, got n={n}, k={k}")


def _canonical(rounds: List[List[KSet]]) -> Tuple[Round, ...]:
    ordered = [tuple(sorted(r, key=lambda s: s.indices)) for r in rounds]
    return tuple(sorted(ordered, key=lambda r: [s.indices for s in r]))


def _part_key(part: FrozenSet[int]) -> Tuple[int, Tuple[int, ...]]:
    return len(part), tuple(sorted(part))


def _flow_rounds(n: int, k: int) -> Optional[List[List[KSet]]]:
    """
    Add the vertices one at a time. Before vertex v arrives every round is a
    partition of [v-1] into n/k (possibly empty) parts and each A appears in
    C(n-v+1, k-|A|) rounds in total. An integral max flow decides which
    part of each round receives v; a fractional flow always exists, so the
    integral one saturates every round. Returns None if it ever does not.
    """
    rounds_count = binom(n - 1, k - 1)
    parts: List[List[FrozenSet[int]]] = [[frozenset()] * (n // k) for _ in range(rounds_count)]
    for v in range(1, n + 1):
        remaining = n - v
        G = nx.DiGraph()
        kinds = set()
        for i, round_parts in enumerate(parts):
            G.add_edge("source", ("round", i), capacity=1)
            for part, mult in sorted(Counter(round_parts).items(), key=lambda item: _part_key(item[0])):
                G.add_edge(("round", i), ("part", part), capacity=mult)
                kinds.add(part)
        for part in sorted(kinds, key=_part_key):
            need = k - len(part) - 1
            G.add_edge(("part", part), "sink", capacity=binom(remaining, need) if need >= 0 else 0)
        value, flow = nx.maximum_flow(G, "source", "sink", flow_func=edmonds_karp)
        if value != rounds_count:
            logger.warning(f"Flow rounding stalled at vertex {v}: {value} of {rounds_count}")
            return None
        for i, round_parts in enumerate(parts):
            targets = flow[("round", i)]
            chosen = next(node[1] for node, f in sorted(targets.items(), key=lambda t: _part_key(t[0][1])) if f > 0)
            j = round_parts.index(chosen)
            parts[i] = round_parts[:j] + [chosen | {v}] + round_parts[j + 1:]
    return [[KSet(tuple(p)) for p in round_parts] for round_parts in parts]


def _backtrack_rounds(n: int, k: int, node_budget: int) -> Optional[List[List[KSet]]]:
    """Exact-cover search: fill the rounds one perfect matching at a time."""
    rounds_count = binom(n - 1, k - 1)
    ksets = list(enumerate_ksets(n, k))
    by_vertex = {v: [s for s in ksets if v in s] for v in range(1, n + 1)}
    used = set()
    rounds: List[List[KSet]] = []
    nodes = 0
    full = (1 << (n + 1)) - 2

    def fill(current: List[KSet], covered: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(f"Backtracking exceeded {node_budget} nodes")
        if covered == full:
            rounds.append(list(current))
            if len(rounds) == rounds_count or fill([], 0):
                return True
            rounds.pop()
            return False
        v = next(u for u in range(1, n + 1) if not covered >> u & 1)
        if not current:
            # a fresh round starts from the smallest unused set through vertex 1
            candidates = [s for s in by_vertex[v] if s not in used][:1]
        else:
            candidates = [s for s in by_vertex[v] if s not in used and not s.mask & covered]
        for s in candidates:
            used.add(s)
            current.append(s)
            if fill(current, covered | s.mask):
                return True
            current.pop()
            used.discard(s)
        return False

    return rounds if fill([], 0) else None


def baranyai_partition(n: int, k: int, method: str = "auto", set_budget: int = 10**5,
                       node_budget: int = 2 * 10**6) -> PartitionSchedule:
    """
    Split all k-subsets of [n] into C(n-1, k-1) perfect matchings.

    The flow construction runs first; "auto" falls back to backtracking
    if it stalls. Rounds and the sets inside them come out sorted.

    Raises:
        ValidationError: If k does not divide n or the method is unknown
        BudgetExceededError: If C(n, k) exceeds ``set_budget`` or the search its node budget
        SolverError: If no method produced a schedule
    """
    _check_divisible(n, k)
    if method not in METHODS:
        raise ValidationError(f"Unknown method {method!r}; expected one of {METHODS}")
    if binom(n, k) > set_budget:
        raise BudgetExceededError(f"C({n},{k}) = {binom(n, k)} exceeds the set budget {set_budget}")
    rounds = None
    used_method = "flow"
    if method in ("auto", "flow"):
        rounds = _flow_rounds(n, k)
    if rounds is None and method in ("auto", "backtrack"):
        used_method = "backtrack"
        rounds = _backtrack_rounds(n, k, node_budget)
    if rounds is None:
        raise ValidationError(f"No partition found for n={n}, k={k} with method {method!r}")
    logger.info(f"Partition of the {k}-subsets of [{n}] built by {used_method}")
    return PartitionSchedule(n, k, _canonical(rounds), used_method)


def validate_schedule(s: PartitionSchedule) -> bool:
    """True iff every round is a perfect matching and every k-set appears exactly once."""
    n, k = s.n, s.k
    if k < 1 or n < k or n % k:
        return False
    if len(s.rounds) != binom(n - 1, k - 1):
        return False
    full = (1 << (n + 1)) - 2
    seen = set()
    for r in s.rounds:
        covered = 0
        for e in r:
            if len(e) != k or e.mask & covered or e.mask & ~full:
                return False
            covered |= e.mask
            seen.add(e)
        if covered != full or len(r) != n // k:
            return False
    return len(seen) == binom(n, k)


def round_contributions(inst: Instance, schedule: PartitionSchedule) -> List[int]:
    """Nonnegative members of each round, in round order."""
    x = inst.values
    return [
        sum(1 for e in r if sum(x[i - 1] for i in e) >= 0)
        for r in schedule.rounds
    ]


def divisible_case_count(inst: Instance, k: int, schedule: Optional[PartitionSchedule] = None) -> int:
    """
    Count nonnegative k-sums round by round. Each round is a partition of
    [n], so its sums add up to the total and one of them is nonnegative.

    Raises:
        ValidationError: If k does not divide n
        PreconditionError: If the total is negative
        BoundViolationError: If a round has no nonnegative member
    """
    n = inst.n
    _check_divisible(n, k)
    if inst.total < 0:
        raise PreconditionError(f"Instance total {inst.total} is negative")
    schedule = schedule or baranyai_partition(n, k)
    if (schedule.n, schedule.k) != (n, k):
        raise ValidationError("Schedule does not match the instance")
    contributions = round_contributions(inst, schedule)
    for r, c in zip(schedule.rounds, contributions):
        if c == 0:
            raise BoundViolationError(
                "A round of the partition has no nonnegative member",
                witness={"values": inst.to_strings(), "round": [list(e.indices) for e in r]},
            )
    total = sum(contributions)
    if total < binom(n - 1, k - 1):
        raise BoundViolationError(f"Count {total} is below C(n-1, k-1)", witness={"values": inst.to_strings()})
    return total
