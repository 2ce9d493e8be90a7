"""Random instances shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from mmskit.services.ksum_analysis import Instance


def random_values(rng, n, low=-10, high=10):
    nums = rng.integers(low, high + 1, size=n)
    dens = rng.integers(1, 6, size=n)
    return [Fraction(int(a), int(b)) for a, b in zip(nums, dens)]


def random_zero_sum(rng, n):
    """Zero-sum instance with x1 > 0."""
    while True:
        values = random_values(rng, n)
        mean = sum(values, Fraction(0)) / n
        inst = Instance(tuple(v - mean for v in values))
        if inst.values[0] > 0:
            return inst


def random_nonnegative(rng, n):
    values = random_values(rng, n)
    total = sum(values, Fraction(0))
    if total < 0:
        values = [v - total / n for v in values]
    return Instance(tuple(values))


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def instances(draw, min_n=2, max_n=9):
    values = draw(st.lists(rationals, min_size=min_n, max_size=max_n))
    return Instance(tuple(values))


def block_instance(rng, n):
    """Two thirds near 1, one third near -2, translated to total zero; no value is large."""
    positive = (2 * n) // 3
    noise = rng.integers(0, 10, size=n)
    values = [Fraction(100 + int(e), 100) for e in noise[:positive]]
    values += [Fraction(-200 - int(e), 100) for e in noise[positive:]]
    mean = sum(values, Fraction(0)) / n
    return Instance(tuple(v - mean for v in values))


def random_block_instance(rng, n):
    """Like block_instance, with the positive share drawn from [0.55, 0.70]."""
    positive = int(Fraction(int(rng.integers(55, 71)), 100) * n)
    scale = Fraction(positive, n - positive)
    noise = rng.integers(0, 10, size=n)
    values = [Fraction(100 + int(e), 100) for e in noise[:positive]]
    values += [-scale * Fraction(100 + int(e), 100) for e in noise[positive:]]
    mean = sum(values, Fraction(0)) / n
    return Instance(tuple(v - mean for v in values))
