"""
Error-free transformations and double-double accumulation on numpy arrays.
"""

import math
from typing import Iterable, Tuple

import numpy as np

# Dekker splitting constant 2^27 + 1
_SPLITTER = 134217729.0


def two_sum(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """Return (s, e) with s = fl(a + b) and a + b = s + e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def split(a) -> Tuple[np.ndarray, np.ndarray]:
    """Dekker split of a double into two 26-bit halves."""
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """Return (p, e) with p = fl(a * b) and a * b = p + e exactly."""
    p = a * b
    a_hi, a_lo = split(a)
    b_hi, b_lo = split(b)
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def sqrt_product(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """
    Square root of a*b as an unevaluated sum hi + lo.

    Args:
        a: First factor (array or scalar)
        b: Second factor (array or scalar)

    Returns:
        (hi, lo) with sqrt(a*b) = hi + lo to about 2^-100 relative
    """
    p, p_err = two_prod(a, b)
    hi = np.sqrt(p)
    sq, sq_err = two_prod(hi, hi)
    residual = ((p - sq) - sq_err) + p_err
    return hi, residual / (2.0 * hi)


def reduced_turns(hi, lo) -> np.ndarray:
    """
    Fractional part of 2*(hi + lo) - 1/8, i.e. the phase of
    cos(4*pi*sqrt(x) - pi/4) measured in full turns.
    """
    doubled = 2.0 * hi
    frac = doubled - np.floor(doubled)
    return (frac + 2.0 * lo) - 0.125


def compensated_row_sum(values: np.ndarray) -> float:
    """Correctly rounded sum of a 1-D array (order independent)."""
    return math.fsum(values)


class DoubleDoubleAccumulator:
    """
    Running sum kept as an unevaluated pair hi + lo.

    Adding the same sequence of values always yields the same bits.
    """

    def __init__(self, value: float = 0.0):
        self.hi = float(value)
        self.lo = 0.0

    def __repr__(self) -> str:
        return f"<DoubleDoubleAccumulator(hi={self.hi!r}, lo={self.lo!r})>"

    def add(self, value: float) -> None:
        s, e = two_sum(self.hi, float(value))
        e += self.lo
        self.hi, self.lo = two_sum(s, e)

    def add_array(self, values: np.ndarray) -> None:
        """Add the correctly rounded sum of an array plus its rounding error."""
        if len(values) == 0:
            return
        total = math.fsum(values)
        self.add(total)
        self.add(math.fsum(np.concatenate([np.asarray(values, dtype = np.float64), [-total]])))

    def add_all(self, values: Iterable[float]) -> None:
        for value in values:
            self.add(value)

    @property
    def value(self) -> float:
        return self.hi + self.lo
