"""
Exact piecewise integration of squared error terms.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from app.config import Config
from app.constants import BasisTag, Precision
from app.errors import DomainError, ResourceLimitError
from app.models import MainTermModel
from app.services.arith_sieve import SieveService
from app.services.analytic.double_double import DoubleDoubleAccumulator
from app.services.meansquare.antiderivatives import exact_piece, taylor_pieces

logger = logging.getLogger(__name__)


class _PlainAccumulator:
    """Double-precision running sum used when Precision.DOUBLE is configured."""

    def __init__(self):
        self.value = 0.0

    def add_array(self, values: np.ndarray) -> None:
        self.value += float(np.sum(values))


class PiecewiseIntegrator:
    """
    Integrates (scale * (A(x) - P(x)))^2 where A is an exact summatory
    step function and P a main-term model.

    The range is cut at every integer and every requested stop; each piece
    is integrated in closed form, and pieces are summed in chunks whose
    boundaries depend only on the configuration, never on the worker count.
    """

    def __init__(self, sieve: SieveService, config_class = Config):
        self.sieve = sieve
        self.small_piece_limit = config_class.SMALL_PIECE_LIMIT
        self.taylor_terms = config_class.TAYLOR_TERMS
        self.chunk = config_class.INTEGRATION_CHUNK
        self.precision = Precision(config_class.PRECISION)
        self.dps = config_class.MPMATH_DPS

    def __repr__(self) -> str:
        return f"<PiecewiseIntegrator(small_piece_limit={self.small_piece_limit}, precision={self.precision.value})>"

    def _piece_values(self, model: MainTermModel, counts: np.ndarray, a: np.ndarray,
                      b: np.ndarray, scale: float) -> np.ndarray:
        values = np.empty(len(a), dtype = np.float64)
        small = a < self.small_piece_limit

        if small.any():
            with mpmath.workdps(self.dps):
                exact_coefficients = (
                    model.coefficient(BasisTag.X_LOG_X),
                    model.coefficient(BasisTag.X),
                    model.coefficient(BasisTag.X_POW_1_OVER_K),
                    mpmath.mpf(1) / model.k if model.k else mpmath.mpf(0)
                )
                factor = mpmath.mpf(scale) ** 2
                values[small] = [
                    float(factor * exact_piece(exact_coefficients, int(count), left, right))
                    for count, left, right in zip(counts[small], a[small], b[small])
                ]

        large = ~small
        if large.any():
            values[large] = taylor_pieces(model.float_coefficients(), counts[large].astype(np.float64),
                                          a[large], b[large], self.taylor_terms, scale)
        return values

    def _new_accumulator(self):
        if self.precision == Precision.DOUBLE:
            return _PlainAccumulator()
        return DoubleDoubleAccumulator()

    def _add(self, accumulator, values: np.ndarray) -> None:
        for start in range(0, len(values), self.chunk):
            accumulator.add_array(values[start:start + self.chunk])

    def integrate(self, model: MainTermModel, summand: str, k: Optional[int], lower: float,
                  upper: float, stops: Sequence[float] = (), scale: float = 1.0) -> Tuple[float, List[float]]:
        """
        Integral of (scale * (A - P))^2 over [lower, upper].

        Args:
            model: Main term P
            summand: Sieve table whose prefix sums give A ('d', 'dk' or 'd11k')
            k: k for the k-dependent tables
            lower: Left end >= 1
            upper: Right end > lower
            stops: Points in (lower, upper] where the running integral is recorded
            scale: Constant factor applied to A - P

        Returns:
            (integral over [lower, upper], running integrals at the sorted stops)
        """
        if lower < 1 or upper <= lower:
            raise DomainError(f"Integration needs 1 <= lower < upper, got [{lower}, {upper}]")
        m_min = int(math.floor(lower))
        m_max = int(math.ceil(upper)) - 1
        if m_max > self.sieve.max_limit:
            raise ResourceLimitError(f"Integration to T={upper} needs sieve coverage beyond {self.sieve.max_limit}")

        stop_points = sorted({float(s) for s in stops if lower < s <= upper})
        recorded: List[float] = []
        pending = 0
        accumulator = self._new_accumulator()
        carry = 0

        for table in self.sieve.sieve_segments(1, m_max + 1, k):
            lo, hi = table.range.lo, table.range.hi
            prefix = carry + np.cumsum(getattr(table, summand), dtype = np.int64)
            carry = int(prefix[-1])

            seg_lo = max(lo, m_min)
            seg_hi = min(hi - 1, m_max)
            if seg_lo > seg_hi:
                continue

            points = np.clip(np.arange(seg_lo, seg_hi + 2, dtype = np.float64), lower, upper)
            inside = [s for s in stop_points[pending:] if seg_lo <= math.floor(s) <= seg_hi]
            points = np.unique(np.concatenate([points, np.asarray(inside, dtype = np.float64)]))
            a, b = points[:-1], points[1:]
            keep = b > a
            a, b = a[keep], b[keep]
            if len(a) == 0:
                continue
            counts = prefix[np.floor(a).astype(np.int64) - lo]
            values = self._piece_values(model, counts, a, b, scale)

            position = 0
            while pending < len(stop_points) and stop_points[pending] <= b[-1]:
                end = int(np.searchsorted(b, stop_points[pending], side = 'right'))
                self._add(accumulator, values[position:end])
                position = end
                recorded.append(accumulator.value)
                pending += 1
            self._add(accumulator, values[position:])
            logger.debug(f"Integrated pieces of [{lo}, {hi}): running total {accumulator.value:.17g}")

        return accumulator.value, recorded
