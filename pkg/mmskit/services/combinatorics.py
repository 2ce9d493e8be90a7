"""k-subsets, colex order, dominance order and lower shadows."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from ..core.exceptions import BudgetExceededError, ValidationError
from ..core.rational import binom, gen_binom
from ..utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class KSet:
    """A set of 1-based indices, stored sorted, with its bitmask."""
    indices: Tuple[int, ...]
    mask: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        indices = tuple(sorted(self.indices))
        if len(set(indices)) != len(indices):
            raise ValidationError(f"Repeated index in {self.indices}")
        if indices and indices[0] < 1:
            raise ValidationError(f"Indices are 1-based, got {self.indices}")
        object.__setattr__(self, 'indices', indices)
        object.__setattr__(self, 'mask', sum(1 << i for i in indices))

    @classmethod
    def of(cls, *indices: int) -> "KSet":
        return cls(tuple(indices))

    @classmethod
    def from_mask(cls, mask: int) -> "KSet":
        return cls(tuple(i for i in range(mask.bit_length()) if mask >> i & 1))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def isdisjoint(self, other: "KSet") -> bool:
        return not self.mask & other.mask

    def colex_key(self) -> Tuple[int, ...]:
        return tuple(reversed(self.indices))


@dataclass(frozen=True)
class SetFamily:
    """A family of equal-size subsets of {1..ground_n}."""
    ground_n: int
    arity: int
    members: FrozenSet[KSet]

    def __post_init__(self):
        object.__setattr__(self, 'members', frozenset(self.members))
        for s in self.members:
            if len(s) != self.arity:
                raise ValidationError(f"Member {s.indices} does not have arity {self.arity}")
            if s.indices and s.indices[-1] > self.ground_n:
                raise ValidationError(f"Member {s.indices} exceeds ground set [{self.ground_n}]")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[KSet]:
        return iter(self.sorted_members())

    def sorted_members(self) -> List[KSet]:
        return sorted(self.members, key=KSet.colex_key)


def colex_rank(s: KSet) -> int:
    """Position of s among all |s|-sets in colex order (0-based)."""
    return sum(binom(a - 1, i) for i, a in enumerate(s.indices, start=1))


def colex_unrank(rank: int, k: int) -> KSet:
    """Inverse of colex_rank."""
    if rank < 0:
        raise ValidationError(f"Rank must be nonnegative, got {rank}")
    indices = []
    for i in range(k, 0, -1):
        a = i
        while binom(a, i) <= rank:
            a += 1
        indices.append(a)
        rank -= binom(a - 1, i)
    return KSet(tuple(indices))


def enumerate_ksets(n: int, k: int, start: int = 0, stop: Optional[int] = None) -> Iterator[KSet]:
    """
    Yield the k-subsets of [n] in colex order.

    ``start``/``stop`` select a rank range so that independent consumers can
    split the stream; each range restarts from its own unranked position.
    """
    if not 0 <= k <= n:
        raise ValidationError(f"enumerate_ksets requires 0 <= k <= n, got n={n}, k={k}")
    total = binom(n, k)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    if k == 0:
        yield KSet(())
        return
    current = list(colex_unrank(start, k).indices)
    for _ in range(start, stop):
        yield KSet(tuple(current))
        # colex successor: bump the first entry that has room, reset those below it
        i = 0
        while i < k - 1 and current[i] + 1 == current[i + 1]:
            i += 1
        current[i] += 1
        for j in range(i):
            current[j] = j + 1


def dominance_leq(s: KSet, t: KSet) -> bool:
    """True iff the l-th smallest index of s is <= that of t for every l."""
    if len(s) != len(t):
        raise ValidationError("dominance_leq compares sets of equal size only")
    return all(a <= b for a, b in zip(s.indices, t.indices))


def lower_shadow(family: SetFamily) -> SetFamily:
    """All (arity-1)-sets contained in some member."""
    if family.arity < 1:
        raise ValidationError("lower_shadow requires arity >= 1")
    shadow = {
        KSet(s.indices[:i] + s.indices[i + 1:])
        for s in family.members
        for i in range(family.arity)
    }
    return SetFamily(family.ground_n, family.arity - 1, frozenset(shadow))


def colex_initial(n: int, a: int, m: int) -> SetFamily:
    """The first m a-subsets of [n] in colex order."""
    if m > binom(n, a):
        raise ValidationError(f"Only {binom(n, a)} {a}-subsets of [{n}] exist")
    return SetFamily(n, a, frozenset(enumerate_ksets(n, a, 0, m)))


def shift_family(family: SetFamily, i: int, j: int) -> SetFamily:
    """
    The (i, j)-compression: replace j by i in each member containing j but
    not i, unless the result is already a member.
    """
    if not i < j:
        raise ValidationError("shift_family requires i < j")
    members = set(family.members)
    out = set()
    for s in family.members:
        if j in s and i not in s:
            moved = KSet(tuple(i if x == j else x for x in s.indices))
            if moved not in members:
                out.add(moved)
                continue
        out.add(s)
    return SetFamily(family.ground_n, family.arity, frozenset(out))


def exhaustive_shadow_minimum(n: int, a: int, m_max: int) -> Dict[int, int]:
    """
    Minimum lower-shadow size of a family of m a-subsets of [n], for every
    m <= m_max, by exhaustion.

    Every candidate shadow G (a family of (a-1)-sets with |G| below the
    colex value) is enumerated depth-first; the number of a-sets whose whole
    boundary lies in G is tracked incrementally. A shadow of size s is
    achievable for m sets iff some G of size s supports at least m a-sets.
    """
    if a < 1 or m_max > binom(n, a):
        raise ValidationError(f"Cannot choose {m_max} {a}-subsets of [{n}]")
    faces = list(enumerate_ksets(n, a - 1))
    face_index = {f: i for i, f in enumerate(faces)}
    cells = list(enumerate_ksets(n, a))
    cofaces: List[List[int]] = [[] for _ in faces]
    for c, cell in enumerate(cells):
        for i in range(a):
            cofaces[face_index[KSet(cell.indices[:i] + cell.indices[i + 1:])]].append(c)

    s_limit = max(len(lower_shadow(colex_initial(n, a, m))) for m in range(1, m_max + 1)) - 1
    best = [0] * (s_limit + 1)
    present = [0] * len(cells)

    def extend(next_face: int, size: int, supported: int) -> None:
        if supported > best[size]:
            best[size] = supported
        if size == s_limit:
            return
        for f in range(next_face, len(faces)):
            gained = 0
            for c in cofaces[f]:
                present[c] += 1
                if present[c] == a:
                    gained += 1
            extend(f + 1, size + 1, supported + gained)
            for c in cofaces[f]:
                present[c] -= 1

    logger.debug(f"Shadow exhaustion n={n}, a={a}: {len(faces)} faces, shadows up to {s_limit}")
    extend(0, 0, 0)
    for s in range(1, s_limit + 1):
        best[s] = max(best[s], best[s - 1])

    result = {}
    for m in range(1, m_max + 1):
        colex_size = len(lower_shadow(colex_initial(n, a, m)))
        result[m] = next((s for s in range(colex_size) if s <= s_limit and best[s] >= m), colex_size)
    return result


def _bisect_root(m: int, a: int) -> Tuple[Fraction, Fraction]:
    """Bracket the x >= a with C(x, a) = m to relative width 2^-64."""
    lo, hi = Fraction(a), Fraction(a + m)
    target = Fraction(m)
    width = Fraction(1, 2**64)
    while hi - lo > lo * width:
        mid = (lo + hi) / 2
        if gen_binom((mid, a)) <= target:
            lo = mid
        else:
            hi = mid
    return lo, hi


def kk_real_bound(m: int, a: int, b: int) -> Fraction:
    """
    Certified lower bound on C(x, b) where x >= a solves C(x, a) = m.

    Integer roots are detected and answered exactly; otherwise x is
    bracketed by bisection and C(lo, b) is returned, which is a lower bound
    because C(., b) increases on [b-1, inf) and lo <= x.

    Raises:
        ValidationError: If m < 1, a < 1, b < 1 or b > a + 1
    """
    if m < 1:
        raise ValidationError(f"kk_real_bound requires m >= 1, got {m}")
    if a < 1 or b < 1:
        raise ValidationError("kk_real_bound requires a >= 1 and b >= 1")
    if b > a + 1:
        raise ValidationError("kk_real_bound requires b <= a + 1 so C(x, b) is monotone for x >= a")
    x = a
    while binom(x, a) < m:
        x += 1
    if binom(x, a) == m:
        return Fraction(binom(x, b))
    lo, _ = _bisect_root(m, a)
    return gen_binom((lo, b))


def enumerate_upsets(n: int, k: int, budget: int) -> Iterator[FrozenSet[KSet]]:
    """
    Yield every family of k-subsets of [n] closed toward smaller indices
    (if S is a member and T <= S componentwise then T is a member).

    Sets are visited in a linear extension (index sum, then colex); a set may
    join only when all its immediate dominators are already in.

    Raises:
        BudgetExceededError: If more than ``budget`` upsets are produced
    """
    order = sorted(enumerate_ksets(n, k), key=lambda s: (sum(s.indices), s.colex_key()))
    position = {s: i for i, s in enumerate(order)}
    parents: List[List[int]] = []
    for s in order:
        ps = []
        for x in s.indices:
            if x > 1 and (x - 1) not in s:
                ps.append(position[KSet(tuple(x - 1 if y == x else y for y in s.indices))])
        parents.append(ps)

    chosen = [False] * len(order)
    produced = 0

    def walk(i: int) -> Iterator[FrozenSet[KSet]]:
        nonlocal produced
        if i == len(order):
            produced += 1
            if produced > budget:
                raise BudgetExceededError(f"More than {budget} upsets of {k}-subsets of [{n}]")
            yield frozenset(order[j] for j in range(len(order)) if chosen[j])
            return
        yield from walk(i + 1)
        if all(chosen[p] for p in parents[i]):
            chosen[i] = True
            yield from walk(i + 1)
            chosen[i] = False

    yield from walk(0)
