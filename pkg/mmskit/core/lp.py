"""Exact rational linear programming.

A dictionary-form simplex over ``fractions.Fraction``: only the nonbasic
columns are stored, basic variables are written as ``b_i - sum_l A_il x_l``
and the objective as ``z0 + sum_l c_l x_l``. Pivoting follows Bland's rule
(smallest label enters, ties in the ratio test broken by smallest label),
which terminates on degenerate problems and makes every run deterministic.
Infeasible starting dictionaries go through the single-auxiliary-variable
phase one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

from .exceptions import SolverError, ValidationError
from ..utils.logging import get_logger

logger = get_logger(__name__)

LE, GE, EQ, LT, GT = '<=', '>=', '=', '<', '>'
WEAK_RELATIONS = (LE, GE, EQ)
STRICT_RELATIONS = (LT, GT)

MAXIMIZE, MINIMIZE = 'maximize', 'minimize'
OPTIMAL, INFEASIBLE, UNBOUNDED = 'optimal', 'infeasible', 'unbounded'

Bound = Tuple[Optional[Fraction], Optional[Fraction]]


@dataclass(frozen=True)
class Constraint:
    """A single linear constraint ``coefficients . x  relation  rhs``."""
    coefficients: Tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in WEAK_RELATIONS + STRICT_RELATIONS:
            raise ValidationError(f"Unknown relation {self.relation!r}")
        object.__setattr__(self, 'coefficients', tuple(Fraction(a) for a in self.coefficients))
        object.__setattr__(self, 'rhs', Fraction(self.rhs))

    def lhs(self, point: Sequence[Fraction]) -> Fraction:
        return sum((a * x for a, x in zip(self.coefficients, point) if a), Fraction(0))

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        value = self.lhs(point)
        return {
            LE: value <= self.rhs,
            GE: value >= self.rhs,
            EQ: value == self.rhs,
            LT: value < self.rhs,
            GT: value > self.rhs,
        }[self.relation]


ConstraintLike = Union[Constraint, Tuple[Sequence, str, object]]


def as_constraint(c: ConstraintLike) -> Constraint:
    """Accept either a Constraint or a (coefficients, relation, rhs) triple."""
    if isinstance(c, Constraint):
        return c
    coefficients, relation, rhs = c
    return Constraint(tuple(coefficients), relation, Fraction(rhs))


@dataclass
class LpProblem:
    """
    A linear program over rationals.

    ``bounds[j]`` is ``(lo, hi)``; ``lo=None`` means unbounded below and
    ``hi=None`` unbounded above. Default bounds are ``(0, None)``.
    """
    num_vars: int
    objective: Sequence[Fraction]
    sense: str = MAXIMIZE
    constraints: List[Constraint] = field(default_factory=list)
    bounds: Optional[List[Bound]] = None

    def __post_init__(self):
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise ValidationError(f"Unknown sense {self.sense!r}")
        self.objective = tuple(Fraction(c) for c in self.objective)
        if len(self.objective) != self.num_vars:
            raise ValidationError("Objective length does not match num_vars")
        self.constraints = [as_constraint(c) for c in self.constraints]
        for c in self.constraints:
            if len(c.coefficients) != self.num_vars:
                raise ValidationError("Constraint length does not match num_vars")
            if c.relation in STRICT_RELATIONS:
                raise ValidationError("Strict constraints need lp_strict_feasible")
        if self.bounds is None:
            self.bounds = [(Fraction(0), None)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise ValidationError("Bounds length does not match num_vars")
        self.bounds = [
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
            for lo, hi in self.bounds
        ]
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError(f"Empty bound interval [{lo}, {hi}]")


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Optional[Fraction] = None
    assignment: Tuple[Fraction, ...] = ()
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _Dictionary:
    """Simplex dictionary with Bland pivoting."""

    def __init__(self, A: List[List[Fraction]], b: List[Fraction], c: List[Fraction]):
        self.m = len(b)
        self.n = len(c)
        self.A = A
        self.b = b
        self.c = c
        self.z0 = Fraction(0)
        self.nonbasic = list(range(self.n))
        self.basic = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        row = self.A[i]
        p = row[j]
        new_row = [a / p for a in row]
        new_row[j] = 1 / p
        bi = self.b[i] / p
        support = [l for l, a in enumerate(new_row) if a and l != j]
        for k in range(self.m):
            if k == i:
                continue
            rk = self.A[k]
            f = rk[j]
            if not f:
                continue
            for l in support:
                rk[l] -= f * new_row[l]
            rk[j] = -f / p
            self.b[k] -= f * bi
        f = self.c[j]
        if f:
            for l in support:
                self.c[l] -= f * new_row[l]
            self.c[j] = -f / p
            self.z0 += f * bi
        self.A[i] = new_row
        self.b[i] = bi
        self.basic[i], self.nonbasic[j] = self.nonbasic[j], self.basic[i]
        self.pivots += 1

    def primal(self) -> str:
        while True:
            entering = [(self.nonbasic[l], l) for l in range(self.n) if self.c[l] > 0]
            if not entering:
                return OPTIMAL
            _, j = min(entering)
            candidates = [
                (self.b[i] / self.A[i][j], self.basic[i], i)
                for i in range(self.m) if self.A[i][j] > 0
            ]
            if not candidates:
                return UNBOUNDED
            _, _, i = min(candidates)
            self.pivot(i, j)

    def drop_column(self, j: int) -> None:
        for row in self.A:
            del row[j]
        del self.c[j]
        del self.nonbasic[j]
        self.n -= 1

    def values(self, count: int) -> List[Fraction]:
        out = [Fraction(0)] * count
        for i, label in enumerate(self.basic):
            if label < count:
                out[label] = self.b[i]
        return out


def _standard_form(p: LpProblem):
    """
    Rewrite p as max c.y s.t. A y <= b, y >= 0.

    Returns the dictionary data plus the affine map y -> x.
    """
    columns = 0
    maps: List[Tuple[Fraction, List[Tuple[int, Fraction]]]] = []
    extra_rows: List[Tuple[int, Fraction]] = []
    for lo, hi in p.bounds:
        if lo is not None:
            maps.append((lo, [(columns, Fraction(1))]))
            if hi is not None:
                extra_rows.append((columns, hi - lo))
            columns += 1
        elif hi is not None:
            maps.append((hi, [(columns, Fraction(-1))]))
            columns += 1
        else:
            maps.append((Fraction(0), [(columns, Fraction(1)), (columns + 1, Fraction(-1))]))
            columns += 2

    def transform(coefficients: Sequence[Fraction]) -> Tuple[List[Fraction], Fraction]:
        row = [Fraction(0)] * columns
        shift = Fraction(0)
        for a, (offset, terms) in zip(coefficients, maps):
            if not a:
                continue
            shift += a * offset
            for col, coeff in terms:
                row[col] += a * coeff
        return row, shift

    A: List[List[Fraction]] = []
    b: List[Fraction] = []
    for con in p.constraints:
        row, shift = transform(con.coefficients)
        rhs = con.rhs - shift
        if con.relation in (LE, EQ):
            A.append(list(row))
            b.append(rhs)
        if con.relation in (GE, EQ):
            A.append([-a for a in row])
            b.append(-rhs)
    for col, width in extra_rows:
        row = [Fraction(0)] * columns
        row[col] = Fraction(1)
        A.append(row)
        b.append(width)

    sign = 1 if p.sense == MAXIMIZE else -1
    c, constant = transform(p.objective)
    c = [sign * a for a in c]
    return A, b, c, sign * constant, maps


def _phase_one(d: _Dictionary) -> bool:
    """Drive the dictionary to a feasible basis; False if none exists."""
    aux = d.n + d.m
    for row in d.A:
        row.append(Fraction(-1))
    original_c = d.c
    d.c = [Fraction(0)] * d.n + [Fraction(-1)]
    d.nonbasic.append(aux)
    d.n += 1
    _, _, i = min((d.b[i], d.basic[i], i) for i in range(d.m))
    d.pivot(i, d.n - 1)
    d.primal()
    if d.z0 < 0:
        return False
    if aux in d.basic:
        i = d.basic.index(aux)
        options = [(d.nonbasic[l], l) for l in range(d.n) if d.A[i][l] and d.nonbasic[l] != aux]
        if options:
            _, j = min(options)
            d.pivot(i, j)
        else:
            # the row reads x0 = 0: a redundant constraint
            del d.A[i], d.b[i], d.basic[i]
            d.m -= 1
    d.drop_column(d.nonbasic.index(aux))

    # Re-express the original objective over the current nonbasic labels
    n_struct = len(original_c)
    c = [Fraction(0)] * d.n
    z0 = Fraction(0)
    for l, label in enumerate(d.nonbasic):
        if label < n_struct:
            c[l] += original_c[label]
    for i, label in enumerate(d.basic):
        if label < n_struct and original_c[label]:
            weight = original_c[label]
            z0 += weight * d.b[i]
            for l in range(d.n):
                if d.A[i][l]:
                    c[l] -= weight * d.A[i][l]
    d.c = c
    d.z0 = z0
    return True


def lp_solve(p: LpProblem) -> LpSolution:
    """
    Solve p exactly.

    Returns:
        LpSolution with status optimal, infeasible or unbounded. Optimal
        assignments are re-substituted into every constraint with exact
        arithmetic before being returned.

    Raises:
        SolverError: If re-substitution fails (an internal defect)
    """
    A, b, c, constant, maps = _standard_form(p)
    d = _Dictionary(A, b, c)
    if any(v < 0 for v in d.b):
        if not _phase_one(d):
            logger.debug(f"LP infeasible after {d.pivots} pivots")
            return LpSolution(INFEASIBLE, pivots=d.pivots)
    status = d.primal()
    if status == UNBOUNDED:
        logger.debug(f"LP unbounded after {d.pivots} pivots")
        return LpSolution(UNBOUNDED, pivots=d.pivots)

    y = d.values(len(c))
    assignment = tuple(
        offset + sum((coeff * y[col] for col, coeff in terms), Fraction(0))
        for offset, terms in maps
    )
    value = sum((a * x for a, x in zip(p.objective, assignment)), Fraction(0))
    sign = 1 if p.sense == MAXIMIZE else -1
    if sign * value != d.z0 + constant:
        raise SolverError(f"Objective mismatch: {value} vs dictionary {sign * (d.z0 + constant)}")
    for con in p.constraints:
        if not con.satisfied_by(assignment):
            raise SolverError(f"Optimal point violates {con}")
    for x, (lo, hi) in zip(assignment, p.bounds):
        if (lo is not None and x < lo) or (hi is not None and x > hi):
            raise SolverError(f"Optimal point leaves bounds [{lo}, {hi}]")
    logger.debug(f"LP optimal value {value} after {d.pivots} pivots")
    return LpSolution(OPTIMAL, value, assignment, d.pivots)


class StrictFeasibility(NamedTuple):
    feasible: bool
    witness: Optional[Tuple[Fraction, ...]]


def lp_strict_feasible(
    constraints_weak: Sequence[ConstraintLike],
    constraints_strict: Sequence[ConstraintLike],
    num_vars: Optional[int] = None,
    bounds: Optional[List[Bound]] = None,
) -> StrictFeasibility:
    """
    Decide whether a point satisfies every weak constraint and every strict
    constraint strictly.

    A margin variable eps in [0, 1] is added to each strict row
    (``a.x + eps <= b`` for ``<``, ``a.x - eps >= b`` for ``>``) and
    maximized; the system is strictly feasible iff the optimum is positive.
    Free variables must be declared through ``bounds``; the default bound
    is ``(None, None)`` for every variable.

    Returns:
        StrictFeasibility(feasible, witness); the witness is the
        margin-maximizing vertex, or None when infeasible
    """
    weak = [as_constraint(c) for c in constraints_weak]
    strict = [as_constraint(c) for c in constraints_strict]
    if num_vars is None:
        sample = weak or strict
        if not sample:
            raise ValidationError("Cannot infer num_vars from an empty system")
        num_vars = len(sample[0].coefficients)
    if bounds is None:
        bounds = [(None, None)] * num_vars
    for con in weak:
        if con.relation not in WEAK_RELATIONS:
            raise ValidationError(f"Weak list holds strict relation {con.relation!r}")
    rows: List[Constraint] = [Constraint(con.coefficients + (Fraction(0),), con.relation, con.rhs) for con in weak]
    for con in strict:
        if con.relation == LT:
            rows.append(Constraint(con.coefficients + (Fraction(1),), LE, con.rhs))
        elif con.relation == GT:
            rows.append(Constraint(con.coefficients + (Fraction(-1),), GE, con.rhs))
        else:
            raise ValidationError(f"Strict list holds weak relation {con.relation!r}")
    problem = LpProblem(
        num_vars=num_vars + 1,
        objective=[Fraction(0)] * num_vars + [Fraction(1)],
        sense=MAXIMIZE,
        constraints=rows,
        bounds=list(bounds) + [(Fraction(0), Fraction(1))],
    )
    solution = lp_solve(problem)
    if solution.status != OPTIMAL or solution.value <= 0:
        return StrictFeasibility(False, None)
    return StrictFeasibility(True, solution.assignment[:num_vars])
