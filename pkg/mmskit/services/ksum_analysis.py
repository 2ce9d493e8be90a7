"""Nonnegative k-sums, the negative-sum hypergraph, and the bound checks built on them."""

import itertools
import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..core.claims import BUDGET, HOLDS, PRECONDITION, VIOLATED, CheckReport, make_report
from ..core.exceptions import BudgetExceededError, PreconditionError, ValidationError
from ..core.rational import RationalLike, binom, format_rational, parse_rational, to_integers
from ..utils.logging import get_logger
from .combinatorics import KSet, SetFamily
from .hypergraphs import Hypergraph, fractional_cover, fractional_matching, matching_number

logger = get_logger(__name__)

DEFAULT_COUNT_BUDGET = 10**8


@dataclass(frozen=True)
class Instance:
    """n exact rationals sorted in descending order, with their sum."""
    values: Tuple[Fraction, ...]
    total: Fraction = field(init=False)

    def __post_init__(self):
        values = tuple(sorted((Fraction(v) for v in self.values), reverse=True))
        if not values:
            raise ValidationError("An instance needs at least one value")
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'total', sum(values, Fraction(0)))

    @classmethod
    def from_values(cls, values: Iterable[RationalLike]) -> "Instance":
        return cls(tuple(parse_rational(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.values)

    def x(self, i: int) -> Fraction:
        """The i-th largest value (1-based)."""
        return self.values[i - 1]

    @cached_property
    def integers(self) -> Tuple[int, ...]:
        """Values scaled to integers by their common denominator (same order)."""
        scaled, _ = to_integers(self.values)
        return tuple(scaled)

    def scaled(self, factor: Fraction) -> "Instance":
        return Instance(tuple(v * factor for v in self.values))

    def shifted(self, amount: Fraction) -> "Instance":
        return Instance(tuple(v + amount for v in self.values))

    def to_strings(self) -> List[str]:
        return [format_rational(v) for v in self.values]


@dataclass(frozen=True)
class KSumQuery:
    instance: Instance
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.instance.n:
            raise ValidationError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.instance.n}")

    @property
    def n(self) -> int:
        return self.instance.n


@dataclass(frozen=True)
class PermutationSamplerReport:
    trials: int
    mean_Z: Fraction
    max_Z: int
    exact_expectation: Fraction
    stderr: float
    blocks: int


@dataclass(frozen=True)
class TSequence:
    t: int
    sets: Tuple[KSet, ...]


class EdgeDensity(NamedTuple):
    bound: Fraction
    holds: bool
    missing: int
    missing_bound: Optional[Fraction]


class MissingSetBound(NamedTuple):
    coefficient: Fraction
    bound: Fraction
    vacuous: bool


class Reduction(NamedTuple):
    instance: Instance
    shift: Fraction
    x1_large: bool


# ---------------------------------------------------------------------------
# Counting

def _count_at_least(a: Sequence[int], prefix: Sequence[int], k: int, target: int, lo: int) -> int:
    """Number of k-subsets of a[lo:] (a ascending) with sum >= target."""
    size = len(a) - lo
    if k == 0:
        return 1 if target <= 0 else 0
    if k > size:
        return 0
    if k == 1:
        return len(a) - bisect_left(a, target, lo)
    smallest = prefix[lo + k] - prefix[lo]
    if smallest >= target:
        return binom(size, k)
    largest = prefix[len(a)] - prefix[len(a) - k]
    if largest < target:
        return 0
    if k == 2:
        total = 0
        for i in range(lo, len(a) - 1):
            total += len(a) - bisect_left(a, target - a[i], i + 1)
        return total
    return sum(
        _count_at_least(a, prefix, k - 1, target - a[i], i + 1)
        for i in range(lo, len(a) - k + 1)
    )


def _count_values(values: Sequence[int], k: int, target: int = 0, threads: int = 1) -> int:
    """Count k-subsets of ``values`` with sum >= target, splitting the outer index across threads."""
    a = sorted(values)
    prefix = [0]
    for v in a:
        prefix.append(prefix[-1] + v)
    if k <= 1 or threads <= 1 or len(a) < 2 * threads:
        return _count_at_least(a, prefix, k, target, 0)
    outer = range(0, len(a) - k + 1)
    chunks = [outer[i::threads] for i in range(threads)]

    def work(indices) -> int:
        return sum(_count_at_least(a, prefix, k - 1, target - a[i], i + 1) for i in indices)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(work, chunks))


def _check_budget(n: int, k: int, budget: int) -> None:
    if binom(n, k) > budget:
        raise BudgetExceededError(f"C({n},{k}) = {binom(n, k)} exceeds the enumeration budget {budget}")


def count_nonnegative_ksums(q: KSumQuery, threads: int = 1, budget: int = DEFAULT_COUNT_BUDGET) -> int:
    """
    Exact number of k-subsets with nonnegative sum.

    The count runs on the integer-scaled values in ascending order: the
    smallest chosen element is fixed in turn, the last two by binary search,
    and whole subtrees are settled from prefix sums when every or no
    completion reaches the target. The result does not depend on ``threads``.

    Raises:
        BudgetExceededError: If C(n, k) exceeds ``budget``
    """
    _check_budget(q.n, q.k, budget)
    return _count_values(q.instance.integers, q.k, 0, threads)


def count_by_enumeration(q: KSumQuery, budget: int = DEFAULT_COUNT_BUDGET) -> int:
    """Plain enumeration of all k-subsets; an independent check of the fast count."""
    _check_budget(q.n, q.k, budget)
    return sum(1 for combo in itertools.combinations(q.instance.integers, q.k) if sum(combo) >= 0)


def count_containing(q: KSumQuery, i: int, exclude: Iterable[int] = ()) -> int:
    """Nonnegative k-sums that use index i and avoid the indices in ``exclude``."""
    banned = set(exclude) | {i}
    ints = q.instance.integers
    rest = [v for j, v in enumerate(ints, start=1) if j not in banned]
    return _count_values(rest, q.k - 1, -ints[i - 1])


def count_avoiding(q: KSumQuery, exclude: Iterable[int]) -> int:
    """Nonnegative k-sums using none of the indices in ``exclude``."""
    banned = set(exclude)
    rest = [v for j, v in enumerate(q.instance.integers, start=1) if j not in banned]
    return _count_values(rest, q.k, 0)


def nonnegative_ksets(q: KSumQuery, budget: int = DEFAULT_COUNT_BUDGET) -> SetFamily:
    """The nonnegative k-sets themselves, as a family over [n]."""
    _check_budget(q.n, q.k, budget)
    ints = q.instance.integers
    members = frozenset(
        KSet(tuple(i + 1 for i in combo))
        for combo in itertools.combinations(range(q.n), q.k)
        if sum(ints[i] for i in combo) >= 0
    )
    return SetFamily(q.n, q.k, members)


# ---------------------------------------------------------------------------
# Reduction and the negative-sum hypergraph

def reduce_instance(q: KSumQuery) -> Reduction:
    """
    Translate to total zero and flag whether x1 is large.

    Subtracting total/n from every value can only turn nonnegative sums
    negative, so lower bounds proved for the translate hold for the input.

    Raises:
        PreconditionError: If the total is negative
    """
    inst = q.instance
    if inst.total < 0:
        raise PreconditionError(f"Instance total {inst.total} is negative")
    shift = Fraction(0)
    if inst.total > 0:
        shift = -inst.total / inst.n
        inst = inst.shifted(shift)
        logger.info(f"Translated instance by {shift} to total zero")
    reduced = KSumQuery(inst, q.k)
    large = is_large(reduced, 1)
    if large:
        logger.info("x1 is large: every k-sum through x1 is nonnegative")
    return Reduction(inst, shift, large)


def negative_sum_hypergraph(q: KSumQuery, pivot: int = 1, budget: int = DEFAULT_COUNT_BUDGET) -> Hypergraph:
    """
    (k-1)-uniform hypergraph on the indices other than ``pivot`` whose edges
    are the (k-1)-sets I with x_pivot + sum_{i in I} x_i < 0.
    """
    n, k = q.n, q.k
    if k < 2:
        raise ValidationError("negative_sum_hypergraph requires k >= 2")
    if not 1 <= pivot <= n:
        raise ValidationError(f"Pivot {pivot} outside 1..{n}")
    _check_budget(n - 1, k - 1, budget)
    ints = q.instance.integers
    others = [j for j in range(1, n + 1) if j != pivot]
    base = ints[pivot - 1]
    edges = [
        combo for combo in itertools.combinations(others, k - 1)
        if base + sum(ints[j - 1] for j in combo) < 0
    ]
    return Hypergraph.from_edges(n, k - 1, edges, vertices=others)


def is_large(q: KSumQuery, i: int) -> bool:
    """x_i plus the k-1 smallest other values is nonnegative."""
    ints = q.instance.integers
    others = [v for j, v in enumerate(ints, start=1) if j != i]
    return ints[i - 1] + sum(sorted(others)[:q.k - 1]) >= 0


def is_moderately_large(q: KSumQuery, i: int, delta: Fraction) -> bool:
    """x_i is in at least (1-delta) C(n-1, k-1) nonnegative k-sums."""
    delta = Fraction(delta)
    if not 0 <= delta < 1:
        raise ValidationError(f"delta must lie in [0, 1), got {delta}")
    return count_containing(q, i) >= (1 - delta) * binom(q.n - 1, q.k - 1)


def find_t_sequence(q: KSumQuery, t_max: Optional[int] = None) -> TSequence:
    """
    Greedy deficient-prefix chain using suffix sets.

    For j = 1, 2, ... look for the shortest suffix S_j of [n] with at most
    j(k-1) elements, disjoint from {1..j}, such that x_1+...+x_j plus the
    suffix sum is negative. Stops at the first j with no such suffix or
    when t_max sets were found.
    """
    x = q.instance.integers
    n, k = q.n, q.k
    sets: List[KSet] = []
    prefix = 0
    for j in range(1, n + 1):
        if t_max is not None and len(sets) >= t_max:
            break
        prefix += x[j - 1]
        cap = min(j * (k - 1), n - j)
        suffix = 0
        found = None
        for s in range(cap + 1):
            if s:
                suffix += x[n - s]
            if prefix + suffix < 0:
                found = s
                break
        if found is None:
            break
        sets.append(KSet(tuple(range(n - found + 1, n + 1))))
    return TSequence(len(sets), tuple(sets))


# ---------------------------------------------------------------------------
# Matching bounds and edge density

def _fmt(value) -> object:
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def check_matching_bounds(q: KSumQuery, node_budget: int = 2 * 10**6,
                          count_budget: int = DEFAULT_COUNT_BUDGET) -> CheckReport:
    """
    nu(H) <= n/k and nu*(H) <= n/k for the negative-sum hypergraph at x1 of
    the zero-sum translate; tau*(H) is solved too and must equal nu*(H).
    """
    n, k = q.n, q.k
    try:
        reduction = reduce_instance(q)
    except PreconditionError as e:
        return make_report("matching_bounds", PRECONDITION, details={"error": str(e)}, n=n, k=k)
    reduced = KSumQuery(reduction.instance, k)
    try:
        H = negative_sum_hypergraph(reduced, 1, count_budget)
        nu = matching_number(H, node_budget)
        nu_star = fractional_matching(H)
        tau_star = fractional_cover(H, nu_star)
    except BudgetExceededError as e:
        return make_report("matching_bounds", BUDGET, details={"error": str(e)}, n=n, k=k)
    limit = Fraction(n, k)
    holds = nu.nu <= limit and nu_star.value <= limit
    details = {
        "edges": H.num_edges,
        "nu": nu.nu,
        "nu_star": _fmt(nu_star.value),
        "tau_star": _fmt(tau_star.value),
        "n_over_k": _fmt(limit),
        "x1_large": reduction.x1_large,
    }
    witness = None
    if not holds:
        logger.warning(f"Matching bound violated: nu={nu.nu}, nu*={nu_star.value}, n/k={limit}")
        witness = {"values": reduction.instance.to_strings(),
                   "matching": [list(e.indices) for e in nu.witness]}
    return make_report("matching_bounds", HOLDS if holds else VIOLATED, witness, details, n=n, k=k)


def edge_density_bound(H: Hypergraph, n: int, k: int, nu: Optional[int] = None,
                       node_budget: int = 2 * 10**6) -> EdgeDensity:
    """
    e(H) <= (1-1/k) n/(n-k) C(n-1, k-1), and when n > k^3 at least
    C(n-1, k-1)/(k+1) missing (k-1)-sets.

    Raises:
        ValidationError: If H is not (k-1)-uniform on n-1 vertices
        PreconditionError: If nu(H) > n/k
    """
    if H.r != k - 1 or len(H.vertices) != n - 1 or n <= k:
        raise ValidationError("edge_density_bound expects a (k-1)-uniform H on n-1 vertices with n > k")
    if nu is None:
        nu = matching_number(H, node_budget).nu
    if nu > Fraction(n, k):
        raise PreconditionError(f"nu(H) = {nu} exceeds n/k = {Fraction(n, k)}")
    total = binom(n - 1, k - 1)
    bound = (1 - Fraction(1, k)) * Fraction(n, n - k) * total
    missing = total - H.num_edges
    holds = H.num_edges <= bound
    missing_bound = None
    if n > k**3:
        missing_bound = Fraction(total, k + 1)
        holds = holds and missing >= missing_bound
    return EdgeDensity(bound, holds, missing, missing_bound)


def permutation_sampler(H: Hypergraph, k: int, trials: int, seed: int,
                        workers: int = 1, chunk: int = 10_000) -> PermutationSamplerReport:
    """
    Shuffle the vertices, cut them into floor((n-1)/(k-1)) blocks of k-1 and
    count how many blocks are edges.

    One numpy stream per worker comes from SeedSequence(seed).spawn(workers),
    so the result depends only on (seed, workers).
    """
    if trials < 1:
        raise ValidationError("permutation_sampler requires trials >= 1")
    r = k - 1
    if r < 1 or H.r != r:
        raise ValidationError(f"Sampler expects a {r}-uniform hypergraph with k >= 2")
    vertices = list(H.vertices)
    size = len(vertices)
    blocks = size // r
    position = {v: i for i, v in enumerate(vertices)}
    # a block is keyed by its sorted vertex positions read as base-`size` digits
    packed = size ** r < 2**62
    edge_keys = {tuple(sorted(position[v] for v in e)) for e in H.edges.members}
    if packed:
        weights = np.array([size ** j for j in range(r)], dtype=np.int64)
        edge_codes = np.array(sorted(sum(p * size ** j for j, p in enumerate(key)) for key in edge_keys),
                              dtype=np.int64)

    def block_hits(perms: np.ndarray) -> np.ndarray:
        cut = np.sort(perms[:, :blocks * r].reshape(len(perms), blocks, r), axis=2)
        if not edge_keys:
            return np.zeros(len(perms), dtype=np.int64)
        if packed:
            return np.isin(cut @ weights, edge_codes).sum(axis=1)
        return np.array([sum(tuple(b) in edge_keys for b in row.tolist()) for row in cut], dtype=np.int64)

    workers = max(1, workers)
    shares = [trials // workers + (1 if w < trials % workers else 0) for w in range(workers)]
    streams = np.random.SeedSequence(seed).spawn(workers)
    total = 0
    total_sq = 0
    max_z = 0
    for share, stream in zip(shares, streams):
        rng = np.random.default_rng(stream)
        done = 0
        while done < share:
            rows = min(chunk, share - done)
            perms = rng.permuted(np.tile(np.arange(size, dtype=np.int64), (rows, 1)), axis=1)
            z = block_hits(perms)
            total += int(z.sum())
            total_sq += int((z.astype(np.int64) ** 2).sum())
            max_z = max(max_z, int(z.max()))
            done += rows
    mean = Fraction(total, trials)
    variance = max(0.0, float(Fraction(total_sq, trials) - mean * mean))
    stderr = math.sqrt(variance / trials)
    expectation = Fraction(blocks * H.num_edges, binom(size, r))
    return PermutationSamplerReport(trials, mean, max_z, expectation, stderr, blocks)


# ---------------------------------------------------------------------------
# Range checks

def _precondition(claim: str, message: str, **params) -> CheckReport:
    logger.info(f"{claim}: precondition unmet: {message}")
    return make_report(claim, PRECONDITION, details={"error": message}, **params)


def check_cubic_range(q: KSumQuery, factor: int = 2, threads: int = 1,
                      budget: int = DEFAULT_COUNT_BUDGET) -> CheckReport:
    """
    For n >= 2k^3: count >= C(n-1, k-1), together with the exact steps that
    lead there (block bound avoiding x1, missing sets through x1, and the
    binomial-ratio inequality).
    """
    n, k = q.n, q.k
    bound = binom(n - 1, k - 1)
    params = dict(n=n, k=k, bound=bound)
    if n < factor * k**3:
        return _precondition("cubic_range", f"n = {n} < {factor}k^3 = {factor * k**3}", **params)
    if q.instance.total < 0:
        return _precondition("cubic_range", "instance total is negative", **params)
    try:
        count = count_nonnegative_ksums(q, threads, budget)
    except BudgetExceededError as e:
        return make_report("cubic_range", BUDGET, details={"error": str(e)}, **params)

    ratio = Fraction(binom(n - 2 * k, k - 1), bound)
    product = Fraction(1)
    for j in range(1, k):
        product *= 1 - Fraction(2 * k - 1, n - j)
    checks = {
        "count": count >= bound,
        "ratio": ratio >= 1 - Fraction(1, k + 1),
        "ratio_product_form": product == ratio,
        "cubic_polynomial": (2 * k - 1) * (k - 1) * (k + 1) <= 2 * k**3 - k + 1,
    }
    details = {"count": count, "ratio": _fmt(ratio)}
    reduction = reduce_instance(q)
    if not reduction.x1_large:
        reduced = KSumQuery(reduction.instance, k)
        avoiding = count_avoiding(reduced, [1])
        through = count_containing(reduced, 1)
        checks["avoiding_x1"] = avoiding >= binom(n - 2 * k, k - 1)
        checks["missing_through_x1"] = through >= Fraction(bound, k + 1)
        details.update(avoiding_x1=avoiding, through_x1=through)
    details["checks"] = checks
    holds = all(checks.values())
    witness = None if holds else {"values": q.instance.to_strings(), "k": k}
    return make_report("cubic_range", HOLDS if holds else VIOLATED, witness, details, **params)


def missing_set_bound(C: Fraction, n: int, k: int) -> MissingSetBound:
    """
    (1/13 - 1/(2C)) (n-1)^(k-1)/(k-1)!; vacuous when the coefficient is <= 0.

    Raises:
        PreconditionError: If C < 1 or n < C k^2
    """
    C = Fraction(C)
    if C < 1 or n < C * k * k:
        raise PreconditionError(f"missing_set_bound requires C >= 1 and n >= C k^2 (C={C}, n={n}, k={k})")
    coefficient = Fraction(1, 13) - 1 / (2 * C)
    bound = coefficient * Fraction((n - 1) ** (k - 1), math.factorial(k - 1))
    return MissingSetBound(coefficient, bound, coefficient <= 0)


def check_quadratic_range(q: KSumQuery, ratio: Fraction = Fraction(33), threads: int = 1,
                          budget: int = DEFAULT_COUNT_BUDGET) -> CheckReport:
    """
    For n >= 33k^2: count >= C(n-1, k-1), the through-x1 lower bound with
    C = n/k^2 on the zero-sum translate, and the exact constants of the
    closing estimate at this n.
    """
    n, k = q.n, q.k
    bound = binom(n - 1, k - 1)
    params = dict(n=n, k=k, bound=bound)
    ratio = Fraction(ratio)
    if n < ratio * k * k:
        return _precondition("quadratic_range", f"n = {n} < {ratio}k^2", **params)
    if q.instance.total < 0:
        return _precondition("quadratic_range", "instance total is negative", **params)
    try:
        count = count_nonnegative_ksums(q, threads, budget)
    except BudgetExceededError as e:
        return make_report("quadratic_range", BUDGET, details={"error": str(e)}, **params)

    reduction = reduce_instance(q)
    reduced = KSumQuery(reduction.instance, k)
    through = count_containing(reduced, 1)
    c_here = Fraction(n, k * k)
    corollary = missing_set_bound(c_here, n, k)
    scale = Fraction((n - 1) ** (k - 1), math.factorial(k - 1))
    checks = {
        "count": count >= bound,
        "through_x1": through >= corollary.bound,
        "constants": Fraction(1, 13) - Fraction(1, 66) == Fraction(53, 858) >= Fraction(2, 33),
        "deviation_floor": Fraction(ratio * k - 1, 2 * ratio * k - 1) >= Fraction(1, 13),
        "sampling_error": Fraction(binom(k - 1, 2), n - 1) <= 1 / (2 * ratio),
        "closing_estimate": Fraction(2, 33) * scale + binom(n - 2 * k, k - 1) >= bound,
    }
    details = {
        "count": count,
        "through_x1": through,
        "through_x1_bound": _fmt(corollary.bound),
        "checks": checks,
    }
    holds = all(checks.values())
    witness = None if holds else {"values": q.instance.to_strings(), "k": k}
    return make_report("quadratic_range", HOLDS if holds else VIOLATED, witness, details, **params)


# ---------------------------------------------------------------------------
# Hilton-Milner type bounds

def hilton_milner_bound(n: int, k: int) -> int:
    return binom(n - 1, k - 1) + binom(n - k - 1, k - 1) - 1


def _hilton_milner_diagnostics(q: KSumQuery, enumeration_limit: int = 10_000) -> dict:
    """Quantities of the t = 1 analysis; reported, never asserted."""
    n, k = q.n, q.k
    reduction = reduce_instance(q)
    reduced = KSumQuery(reduction.instance, k)
    tseq = find_t_sequence(reduced, t_max=30)
    n1 = count_containing(reduced, 1)
    m = binom(n - 1, k - 1) - n1
    n2 = count_containing(reduced, 2, exclude=[1]) if n >= 2 else 0
    info = {"t": tseq.t, "m": m, "N1": n1, "N2": n2}
    if tseq.t == 1 and k >= 2 and m <= enumeration_limit:
        H = negative_sum_hypergraph(reduced, 1)
        members = H.sorted_edges()
        info["intersecting"] = all(not a.isdisjoint(b) for a, b in itertools.combinations(members, 2))
        info["ekr_bound_holds"] = m <= binom(n - 3, k - 2)
        info["counting_inequality_holds"] = n2 >= binom(n - k - 1, k - 1) + m - 1
        info["kk_inequality_failures"] = [
            x for x in range(n - k - 1, n - 2)
            if binom(x, k - 1) < binom(n - k - 1, k - 1) + binom(x, n - k - 1) - 1
        ]
    return info


def check_hilton_milner(q: KSumQuery, ratio: Fraction = Fraction(500), threads: int = 1,
                        budget: int = DEFAULT_COUNT_BUDGET) -> CheckReport:
    """
    If no value is large (and n >= ratio k^2): count >= C(n-1,k-1) + C(n-k-1,k-1) - 1.
    """
    n, k = q.n, q.k
    bound = hilton_milner_bound(n, k)
    params = dict(n=n, k=k, bound=bound)
    if q.instance.total < 0:
        return _precondition("hilton_milner", "instance total is negative", **params)
    if is_large(q, 1):
        return _precondition("hilton_milner", "x1 is large", **params)
    if n < Fraction(ratio) * k * k:
        return _precondition("hilton_milner", f"n = {n} < {ratio}k^2", **params)
    try:
        count = count_nonnegative_ksums(q, threads, budget)
        details = {"count": count, "diagnostics": _hilton_milner_diagnostics(q)}
    except BudgetExceededError as e:
        return make_report("hilton_milner", BUDGET, details={"error": str(e)}, **params)
    holds = count >= bound
    witness = None if holds else {"values": q.instance.to_strings(), "k": k}
    return make_report("hilton_milner", HOLDS if holds else VIOLATED, witness, details, **params)


def moderate_constant(delta: Fraction, k: int) -> Fraction:
    """g(delta, k) = delta (1 - delta) / (14 k)."""
    delta = Fraction(delta)
    return delta * (1 - delta) / (14 * k)


def check_moderate(q: KSumQuery, delta: Fraction, ratio: Fraction = Fraction(500), threads: int = 1,
                   budget: int = DEFAULT_COUNT_BUDGET) -> CheckReport:
    """
    If no value is (1-delta)-moderately large: count >= g(delta, k) C(n, k).
    The suffix-greedy t is reported against n delta / k^2.
    """
    n, k = q.n, q.k
    delta = Fraction(delta)
    if not 0 <= delta < 1:
        raise ValidationError(f"delta must lie in [0, 1), got {delta}")
    bound = moderate_constant(delta, k) * binom(n, k)
    params = dict(n=n, k=k, delta=_fmt(delta), bound=_fmt(bound))
    if q.instance.total < 0:
        return _precondition("moderate", "instance total is negative", **params)
    if is_moderately_large(q, 1, delta):
        return _precondition("moderate", "x1 is (1-delta)-moderately large", **params)
    if n < Fraction(ratio) * k * k:
        return _precondition("moderate", f"n = {n} < {ratio}k^2", **params)
    try:
        count = count_nonnegative_ksums(q, threads, budget)
    except BudgetExceededError as e:
        return make_report("moderate", BUDGET, details={"error": str(e)}, **params)
    reduced = KSumQuery(reduce_instance(q).instance, k)
    t = find_t_sequence(reduced).t
    details = {"count": count, "t": t, "n_delta_over_k2": _fmt(n * delta / (k * k))}
    holds = count >= bound
    witness = None if holds else {"values": q.instance.to_strings(), "k": k}
    return make_report("moderate", HOLDS if holds else VIOLATED, witness, details, **params)
