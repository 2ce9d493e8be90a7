"""Small-deviation probabilities for sums of independent nonnegative variables."""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np

from ..core.claims import HOLDS, PRECONDITION, VIOLATED, CheckReport, make_report
from ..core.exceptions import BudgetExceededError, ValidationError
from ..core.rational import RationalLike, common_denominator, format_rational, parse_rational
from ..utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_SUPPORT_BUDGET = 10**7
MAX_SAMUELS_M = 4


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely many nonnegative atoms with positive probabilities summing to 1."""
    atoms: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        merged: Dict[Fraction, Fraction] = {}
        for value, prob in self.atoms:
            value, prob = Fraction(value), Fraction(prob)
            if value < 0:
                raise ValidationError(f"Atom value {value} is negative")
            if prob <= 0:
                raise ValidationError(f"Atom probability {prob} is not positive")
            merged[value] = merged.get(value, Fraction(0)) + prob
        if sum(merged.values(), Fraction(0)) != 1:
            raise ValidationError("Atom probabilities do not sum to 1")
        object.__setattr__(self, 'atoms', tuple(sorted(merged.items())))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[RationalLike]]) -> "DiscreteDistribution":
        return cls(tuple((parse_rational(v), parse_rational(p)) for v, p in pairs))

    @classmethod
    def two_point(cls, high: Fraction, mean: Fraction) -> "DiscreteDistribution":
        """Atoms 0 and ``high`` with expectation ``mean`` (requires high >= mean > 0)."""
        high, mean = Fraction(high), Fraction(mean)
        if not 0 < mean <= high:
            raise ValidationError(f"two_point requires 0 < mean <= high, got mean={mean}, high={high}")
        p = mean / high
        atoms = [(high, p)]
        if p < 1:
            atoms.append((Fraction(0), 1 - p))
        return cls(tuple(atoms))

    @classmethod
    def uniform(cls, values: Sequence[Fraction]) -> "DiscreteDistribution":
        if not values:
            raise ValidationError("uniform needs at least one value")
        p = Fraction(1, len(values))
        return cls(tuple((Fraction(v), p) for v in values))

    @property
    def expectation(self) -> Fraction:
        return sum((v * p for v, p in self.atoms), Fraction(0))

    def scaled(self, factor: Fraction) -> "DiscreteDistribution":
        return DiscreteDistribution(tuple((v * factor, p) for v, p in self.atoms))

    def to_pairs(self) -> List[List[str]]:
        return [[format_rational(v), format_rational(p)] for v, p in self.atoms]


@dataclass(frozen=True)
class DeviationQuery:
    distributions: Tuple[DiscreteDistribution, ...]
    threshold: Fraction
    means: Tuple[Fraction, ...] = field(init=False)

    def __post_init__(self):
        if not self.distributions:
            raise ValidationError("A deviation query needs at least one distribution")
        object.__setattr__(self, 'distributions', tuple(self.distributions))
        object.__setattr__(self, 'threshold', Fraction(self.threshold))
        object.__setattr__(self, 'means', tuple(d.expectation for d in self.distributions))

    @property
    def m(self) -> int:
        return len(self.distributions)

    @property
    def delta(self) -> Fraction:
        return self.threshold - self.m


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class SamuelsResult:
    best_prob: Fraction
    best_distributions: Tuple[DiscreteDistribution, ...]
    points: int


def feige_bound(m: int, delta: Fraction) -> Fraction:
    """min{delta/(1+delta), 1/13}; independent of m."""
    delta = Fraction(delta)
    if m < 1:
        raise ValidationError(f"feige_bound requires m >= 1, got {m}")
    if delta <= 0:
        raise ValidationError(f"feige_bound requires delta > 0, got {delta}")
    return min(delta / (1 + delta), Fraction(1, 13))


def exact_tail(q: DeviationQuery, budget: int = DEFAULT_SUPPORT_BUDGET) -> Fraction:
    """
    Pr(X_1 + ... + X_m < threshold), by exact convolution.

    Partial sums already at or above the threshold can never come back
    below it, so their mass is dropped as soon as it appears.

    Raises:
        BudgetExceededError: If an intermediate support exceeds ``budget``
    """
    partial: Dict[Fraction, Fraction] = {Fraction(0): Fraction(1)}
    for dist in q.distributions:
        nxt: Dict[Fraction, Fraction] = {}
        for s, ps in partial.items():
            for v, pv in dist.atoms:
                t = s + v
                if t < q.threshold:
                    nxt[t] = nxt.get(t, Fraction(0)) + ps * pv
        if len(nxt) > budget:
            raise BudgetExceededError(f"Convolution support {len(nxt)} exceeds budget {budget}")
        partial = nxt
    return sum(partial.values(), Fraction(0))


def feige_check(q: DeviationQuery, budget: int = DEFAULT_SUPPORT_BUDGET) -> CheckReport:
    """
    Exact tail against min{delta/(1+delta), 1/13}; expectations above 1 or
    a threshold not above m leave the hypothesis unmet.
    """
    m, delta = q.m, q.delta
    if delta <= 0:
        return make_report("small_deviation", PRECONDITION,
                           details={"error": f"threshold {q.threshold} is not above m = {m}"}, m=m, bound="n/a")
    bound = feige_bound(m, delta)
    params = dict(m=m, bound=format_rational(bound))
    if any(mu > 1 for mu in q.means):
        return make_report("small_deviation", PRECONDITION,
                           details={"error": "an expectation exceeds 1"}, **params)
    tail = exact_tail(q, budget)
    details = {
        "tail": format_rational(tail),
        "delta": format_rational(delta),
        "tight": tail == bound,
        "at_least_one_over_e": float(tail) >= math.exp(-1),
    }
    if tail >= bound:
        return make_report("small_deviation", HOLDS, details=details, **params)
    logger.warning(f"Small-deviation bound violated: tail {tail} < {bound}")
    witness = {"distributions": [d.to_pairs() for d in q.distributions],
               "threshold": format_rational(q.threshold)}
    return make_report("small_deviation", VIOLATED, witness, details, **params)


def monte_carlo_tail(q: DeviationQuery, trials: int, seed: int, workers: int = 1,
                     chunk: int = 100_000) -> MonteCarloEstimate:
    """
    Sampled estimate of the tail with its binomial standard error.

    Atoms are scaled to integers so the comparison with the threshold is
    exact; one numpy stream per worker comes from SeedSequence(seed).
    """
    if trials < 1:
        raise ValidationError("monte_carlo_tail requires trials >= 1")
    numbers = [v for d in q.distributions for v, _ in d.atoms] + [q.threshold]
    scale = common_denominator(numbers)
    threshold = int(q.threshold * scale)
    tables = [
        (np.array([int(v * scale) for v, _ in d.atoms], dtype=np.int64),
         np.array([float(p) for _, p in d.atoms]))
        for d in q.distributions
    ]

    workers = max(1, workers)
    shares = [trials // workers + (1 if w < trials % workers else 0) for w in range(workers)]
    hits = 0
    for share, stream in zip(shares, np.random.SeedSequence(seed).spawn(workers)):
        rng = np.random.default_rng(stream)
        done = 0
        while done < share:
            rows = min(chunk, share - done)
            total = np.zeros(rows, dtype=np.int64)
            for values, probs in tables:
                total += rng.choice(values, size=rows, p=probs / probs.sum())
            hits += int((total < threshold).sum())
            done += rows
    estimate = hits / trials
    stderr = math.sqrt(estimate * (1 - estimate) / trials)
    return MonteCarloEstimate(estimate, stderr, trials)


def _grid(mean: Fraction, threshold: Fraction, grid: int) -> List[Fraction]:
    if threshold <= mean:
        return [mean]
    return [mean + (threshold - mean) * j / grid for j in range(grid + 1)]


def samuels_search(m: int, means: Sequence[RationalLike], threshold: RationalLike, grid: int,
                   workers: int = 1, budget: int = 10**6, refine: int = 0,
                   seed: int = 0) -> SamuelsResult:
    """
    Smallest tail found over independent two-point variables {0, a_i} with
    the given means, a_i ranging over a grid on [mean_i, threshold].

    Exploratory: the minimum over the grid says nothing about the infimum
    over all distributions. With ``refine`` > 0 that many random upper-atom
    vectors around the best grid point are tried as well.

    Raises:
        ValidationError: If m is out of range or the means do not match m
        BudgetExceededError: If the grid has more than ``budget`` points
    """
    means = [parse_rational(mu) for mu in means]
    threshold = parse_rational(threshold)
    if not 1 <= m <= MAX_SAMUELS_M:
        raise ValidationError(f"samuels_search handles 1 <= m <= {MAX_SAMUELS_M}, got {m}")
    if len(means) != m or any(mu <= 0 for mu in means):
        raise ValidationError(f"Expected {m} positive means, got {len(means)}")
    if grid < 1:
        raise ValidationError("grid must be at least 1")
    axes = [_grid(mu, threshold, grid) for mu in means]
    points = math.prod(len(a) for a in axes)
    if points > budget:
        raise BudgetExceededError(f"Grid of {points} points exceeds budget {budget}")

    def evaluate(highs: Sequence[Fraction]) -> Tuple[Fraction, Tuple[DiscreteDistribution, ...]]:
        dists = tuple(DiscreteDistribution.two_point(a, mu) for a, mu in zip(highs, means))
        return exact_tail(DeviationQuery(dists, threshold)), dists

    def block(first: Fraction):
        best = None
        for rest in itertools.product(*axes[1:]):
            result = evaluate((first,) + rest)
            if best is None or result[0] < best[0]:
                best = result
        return best

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(block, axes[0]))
    # first minimum in grid order, regardless of worker count
    best = min(results, key=lambda r: r[0])

    if refine > 0:
        rng = np.random.default_rng(seed)
        width = max(((threshold - mu) / grid for mu in means), default=Fraction(0))
        centre = [d.atoms[-1][0] for d in best[1]]
        for _ in range(refine):
            offsets = rng.integers(-100, 101, size=m)
            highs = tuple(
                min(threshold, max(mu, c + width * Fraction(int(o), 100)))
                for c, mu, o in zip(centre, means, offsets)
            )
            result = evaluate(highs)
            if result[0] < best[0]:
                best = result
        points += refine
    logger.info(f"Samuels search m={m}: best tail {best[0]} over {points} points")
    return SamuelsResult(best[0], best[1], points)


def cover_weight_query(weights: Sequence[Fraction], n: int, k: int) -> DeviationQuery:
    """
    k-1 independent copies of Y = X k(n-1)/n, X uniform on the n-1 vertex
    weights of a fractional cover of total at most n/k; each mean is at most
    1 and the threshold k(n-1)/n sits at m + (n-k)/n.
    """
    if k < 2 or len(weights) != n - 1:
        raise ValidationError("cover_weight_query expects k >= 2 and n-1 vertex weights")
    if sum(weights, Fraction(0)) > Fraction(n, k):
        raise ValidationError("Cover weights exceed n/k in total")
    factor = Fraction(k * (n - 1), n)
    y = DiscreteDistribution.uniform([Fraction(w) for w in weights]).scaled(factor)
    return DeviationQuery(tuple([y] * (k - 1)), factor)
