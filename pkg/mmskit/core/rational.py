"""Exact rational scalars and generalized binomial coefficients."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

from .exceptions import ValidationError

RationalLike = Union[int, str, Fraction]


def parse_rational(value: RationalLike) -> Fraction:
    """
    Parse a rational from an int, a Fraction, or a "p/q" / decimal string.

    Decimal strings are converted exactly ("0.1" is 1/10). Floats are
    rejected because their binary expansion is rarely what the user meant.

    Raises:
        ValidationError: If the value cannot be parsed exactly
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"Refusing inexact value {value!r}; pass a string like '1/3'")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"Invalid rational {value!r}: {str(e)}")
    raise ValidationError(f"Unsupported rational type: {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q" (denominator always present)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def binom(n: int, t: int) -> int:
    """
    Ordinary binomial coefficient with C(n, t) = 0 whenever n < t or n < 0.

    Raises:
        ValidationError: If t is negative
    """
    if t < 0:
        raise ValidationError(f"binom requires t >= 0, got {t}")
    if n < 0 or n < t:
        return 0
    return math.comb(n, t)


@dataclass(frozen=True)
class GeneralizedBinomialQuery:
    """C(x, t) for rational x and integer t >= 0."""
    x: Fraction
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise ValidationError(f"generalized binomial requires t >= 0, got {self.t}")
        object.__setattr__(self, 'x', Fraction(self.x))


def gen_binom(q: Union[GeneralizedBinomialQuery, Tuple[RationalLike, int]]) -> Fraction:
    """
    Evaluate x(x-1)...(x-t+1)/t! exactly.

    Args:
        q: A GeneralizedBinomialQuery or an (x, t) pair

    Returns:
        The falling-factorial binomial as a Fraction
    """
    if not isinstance(q, GeneralizedBinomialQuery):
        x, t = q
        q = GeneralizedBinomialQuery(parse_rational(x), t)
    numerator = Fraction(1)
    for j in range(q.t):
        numerator *= q.x - j
    return numerator / math.factorial(q.t)


def common_denominator(values: Iterable[Fraction]) -> int:
    """Least common multiple of the denominators."""
    result = 1
    for v in values:
        result = math.lcm(result, Fraction(v).denominator)
    return result


def to_integers(values: Iterable[Fraction]) -> Tuple[List[int], int]:
    """
    Scale rationals by their common denominator.

    Signs of all linear combinations with integer coefficients are
    preserved, so counting by sign can run on machine-friendly ints.

    Returns:
        Tuple of (scaled integers, scale factor)
    """
    values = [Fraction(v) for v in values]
    scale = common_denominator(values)
    return [int(v * scale) for v in values], scale
