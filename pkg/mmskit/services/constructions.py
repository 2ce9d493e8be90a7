"""Extremal instances, the reals/cover-weight transform and the exact A(n, k) oracle."""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple

from ..core.exceptions import BudgetExceededError, ValidationError
from ..core.lp import GE, LT, lp_strict_feasible
from ..core.rational import binom
from ..utils.logging import get_logger
from .combinatorics import KSet, SetFamily, enumerate_ksets, enumerate_upsets
from .hypergraphs import Hypergraph
from .ksum_analysis import Instance, KSumQuery, count_nonnegative_ksums, nonnegative_ksets

logger = get_logger(__name__)

ENCODINGS = ("instance", "cover")


def star_instance(n: int, k: int) -> Instance:
    """(n-1, -1, ..., -1): exactly C(n-1, k-1) nonnegative k-sums once n >= 2k."""
    if n < 2:
        raise ValidationError(f"star_instance requires n >= 2, got {n}")
    if not 1 <= k <= n:
        raise ValidationError(f"star_instance requires 1 <= k <= n, got k={k}")
    return Instance((Fraction(n - 1),) + (Fraction(-1),) * (n - 1))


def small_n_counterexample(k: int) -> Instance:
    """
    n = 3k+1 values: three equal to -(3k-2), the rest equal to 3.

    Only the C(3k-2, k) sums avoiding the negative values are nonnegative,
    which is below C(3k, k-1) for k > 2.
    """
    if k <= 2:
        raise ValidationError(f"small_n_counterexample needs k > 2, got {k}")
    return Instance((Fraction(3),) * (3 * k - 2) + (Fraction(-(3 * k - 2)),) * 3)


def hm_construction_1(n: int, k: int) -> Instance:
    """
    x1 = k(k-1)n, x2 = n-2, then n-k-1 values -1 and k-1 values -(kn+1).

    No value is large; the count meets the Hilton-Milner type bound with
    equality once n is large compared to k.
    """
    if k < 2 or n <= 2 * k:
        raise ValidationError(f"hm_construction_1 requires k >= 2 and n > 2k, got n={n}, k={k}")
    values = [Fraction(k * (k - 1) * n), Fraction(n - 2)]
    values += [Fraction(-1)] * (n - k - 1)
    values += [Fraction(-(k * n + 1))] * (k - 1)
    return Instance(tuple(values))


def hm_construction_2(n: int, positive_middle: bool = False) -> Instance:
    """
    k = 3 only: x1 = x2 = 1, x3..x_{n-1} = -1/(2(n-3)), x_n = -3/2.

    The total is 0 and the negative triples through x1 are exactly
    x1 + x_i + x_n, which gives equality in the Hilton-Milner type bound.
    ``positive_middle`` flips the sign of x3..x_{n-1} (total 1); every
    triple avoiding x_n is then nonnegative and the count is far above
    the bound.
    """
    if n < 6:
        raise ValidationError(f"hm_construction_2 requires n >= 6, got {n}")
    small = Fraction(1 if positive_middle else -1, 2 * (n - 3))
    return Instance((Fraction(1), Fraction(1)) + (small,) * (n - 3) + (Fraction(-3, 2),))


@dataclass(frozen=True)
class CoverWitness:
    """
    A k-uniform hypergraph on [n] with vertex weights (weights[i-1] is the
    weight of vertex i) covering every edge, of total weight below n/k.
    """
    hypergraph: Hypergraph
    weights: Tuple[Fraction, ...]
    total_weight: Fraction

    def __post_init__(self):
        H = self.hypergraph
        weights = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, 'weights', weights)
        if len(weights) != H.n:
            raise ValidationError(f"Expected {H.n} weights, got {len(weights)}")
        if any(w < 0 for w in weights):
            raise ValidationError("Cover weights must be nonnegative")
        if sum(weights, Fraction(0)) != self.total_weight:
            raise ValidationError("total_weight does not match the weights")
        limit = Fraction(H.n, H.r)
        if not self.total_weight < limit:
            raise ValidationError(f"Total weight {self.total_weight} is not below n/k = {limit}")
        for e in H.edges.members:
            if sum(weights[i - 1] for i in e) < 1:
                raise ValidationError(f"Edge {e.indices} is covered with weight below 1")

    @property
    def k(self) -> int:
        return self.hypergraph.r


@dataclass(frozen=True)
class AnkResult:
    n: int
    k: int
    value: int
    witness_instance: Instance
    witness_family: SetFamily
    encoding: str = "instance"
    families_tested: int = 0


def reals_to_cover_witness(inst: Instance, k: int) -> CoverWitness:
    """
    Turn a zero-sum instance into a fractional cover of its negative k-sets.

    Values are scaled into (-1/k, 1/k), then raised by half the binding slack
    so the total turns positive while every negative k-sum stays negative
    and every value stays below 1/k. With v(i) = 1/k - x'_i the edges
    (k-sets of weight >= 1) are exactly the negative k-sets.
    """
    if inst.total != 0:
        raise ValidationError(f"reals_to_cover_witness expects total 0, got {inst.total}")
    q = KSumQuery(inst, k)
    n = inst.n
    largest = max(abs(v) for v in inst.values)
    scale = Fraction(1) if largest == 0 else 1 / (2 * k * largest)
    scaled = [v * scale for v in inst.values]

    negative = [
        combo for combo in itertools.combinations(range(n), k)
        if sum(scaled[i] for i in combo) < 0
    ]
    slack = min(Fraction(1, k) - v for v in scaled)
    for combo in negative:
        slack = min(slack, -sum(scaled[i] for i in combo) / k)
    eps = slack / 2
    weights = tuple(Fraction(1, k) - (v + eps) for v in scaled)

    H = Hypergraph.from_edges(n, k, [tuple(i + 1 for i in combo) for combo in negative])
    witness = CoverWitness(H, weights, sum(weights, Fraction(0)))
    logger.debug(f"Cover witness: scale {scale}, eps {eps}, {H.num_edges} edges, weight {witness.total_weight}")
    expected = binom(n, k) - count_nonnegative_ksums(q)
    if H.num_edges != expected:
        raise ValidationError(f"Transform produced {H.num_edges} edges, expected {expected}")
    return witness


def cover_witness_to_reals(w: CoverWitness) -> Instance:
    """x_i = 1/k - delta/n - v(i) with delta = n/k - total weight; total is 0."""
    n, k = w.hypergraph.n, w.k
    delta = Fraction(n, k) - w.total_weight
    return Instance(tuple(Fraction(1, k) - delta / n - v for v in w.weights))


def _instance_system(n: int, k: int, family: FrozenSet[KSet], ksets: List[KSet]):
    weak = []
    for i in range(n - 1):
        row = [0] * n
        row[i], row[i + 1] = 1, -1
        weak.append((row, GE, 0))
    weak.append(([1] * n, GE, 0))
    strict = []
    for s in ksets:
        row = [1 if j in s else 0 for j in range(1, n + 1)]
        if s in family:
            weak.append((row, GE, 0))
        else:
            strict.append((row, LT, 0))
    bounds = [(Fraction(-1), Fraction(1))] * n
    return weak, strict, bounds


def _cover_system(n: int, k: int, family: FrozenSet[KSet], ksets: List[KSet]):
    weak = [([1 if j in s else 0 for j in range(1, n + 1)], GE, 1) for s in ksets if s not in family]
    strict = [([1] * n, LT, Fraction(n, k))]
    bounds = [(Fraction(0), Fraction(1))] * n
    return weak, strict, bounds


def realize_family(n: int, k: int, family: FrozenSet[KSet], ksets: List[KSet], encoding: str) -> Optional[Instance]:
    """An instance whose nonnegative k-sets number at most |family|, or None."""
    if encoding == "instance":
        weak, strict, bounds = _instance_system(n, k, family, ksets)
        result = lp_strict_feasible(weak, strict, n, bounds)
        return Instance(tuple(result.witness)) if result.feasible else None
    weak, strict, bounds = _cover_system(n, k, family, ksets)
    result = lp_strict_feasible(weak, strict, n, bounds)
    if not result.feasible:
        return None
    edges = [s.indices for s in ksets if s not in family]
    H = Hypergraph.from_edges(n, k, edges)
    witness = CoverWitness(H, tuple(result.witness), sum(result.witness, Fraction(0)))
    return cover_witness_to_reals(witness)


def compute_ank(n: int, k: int, encoding: str = "instance", set_budget: int = 60,
                upset_budget: int = 200_000) -> AnkResult:
    """
    A(n, k), the least number of nonnegative k-sums over instances with
    nonnegative total, by exhaustive search.

    The nonnegative k-sets of a sorted instance form an upset in dominance
    order, so every upset is a candidate. Candidates are tried by size
    (ties in colex order) and the first one realized by a strictly feasible
    LP gives the answer. The "instance" encoding asks for sorted values in
    [-1, 1] whose nonnegative k-sets are exactly the candidate; the "cover"
    encoding asks for weights in [0, 1] covering every other k-set with
    total weight below n/k.

    Raises:
        ValidationError: If the encoding is unknown or k is out of range
        BudgetExceededError: If C(n, k) or the number of upsets exceeds its budget
    """
    if encoding not in ENCODINGS:
        raise ValidationError(f"Unknown encoding {encoding!r}; expected one of {ENCODINGS}")
    if not 1 <= k <= n:
        raise ValidationError(f"compute_ank requires 1 <= k <= n, got n={n}, k={k}")
    if binom(n, k) > set_budget:
        raise BudgetExceededError(f"C({n},{k}) = {binom(n, k)} exceeds the A(n,k) set budget {set_budget}")

    ksets = list(enumerate_ksets(n, k))
    candidates = sorted(
        enumerate_upsets(n, k, upset_budget),
        key=lambda f: (len(f), sorted(s.colex_key() for s in f)),
    )
    logger.info(f"A({n},{k}): {len(candidates)} upsets, {encoding} encoding")
    for tested, family in enumerate(candidates, start=1):
        instance = realize_family(n, k, family, ksets, encoding)
        if instance is None:
            continue
        witness_family = nonnegative_ksets(KSumQuery(instance, k))
        value = len(witness_family)
        if value != len(family):
            raise ValidationError(f"Witness realizes {value} nonnegative k-sets, candidate had {len(family)}")
        logger.info(f"A({n},{k}) = {value} after {tested} candidates")
        return AnkResult(n, k, value, instance, witness_family, encoding, tested)
    raise ValidationError(f"No candidate family for A({n},{k}) was realizable")
