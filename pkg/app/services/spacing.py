"""
Near-resonance counting for the spacing problem of sqrt(n / d^k).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

import numpy as np
import pandas as pd

from app.config import Config
from app.constants import SPACING_CSV_COLUMNS
from app.errors import DomainError, ResourceLimitError
from app.models import DyadicBox
from app.services.arith_sieve import SieveService

logger = logging.getLogger(__name__)

# Float comparisons closer than this many ulps to a threshold are redone exactly
GUARD_ULPS = 16


class _Side:
    """All (d, n) on one side of a box with v = sqrt(n / d^k), sorted by v."""

    def __init__(self, d: np.ndarray, n: np.ndarray, k: int):
        values = np.sqrt(n.astype(np.float64) / d.astype(np.float64) ** k)
        order = np.argsort(values, kind = 'stable')
        self.values = values[order]
        self.d = d[order]
        self.n = n[order]
        self.k = k

    @classmethod
    def dyadic(cls, D: int, N: int, k: int) -> '_Side':
        d = np.repeat(np.arange(D + 1, 2 * D + 1, dtype = np.int64), N)
        n = np.tile(np.arange(N + 1, 2 * N + 1, dtype = np.int64), D)
        return cls(d, n, k)

    @classmethod
    def initial(cls, d_max: int, n_max: int, k: int) -> '_Side':
        d = np.repeat(np.arange(1, d_max + 1, dtype = np.int64), n_max)
        n = np.tile(np.arange(1, n_max + 1, dtype = np.int64), d_max)
        return cls(d, n, k)

    def __len__(self) -> int:
        return len(self.values)

    def pair(self, index: int) -> Tuple[int, int]:
        """(n, d^k) as Python integers."""
        return int(self.n[index]), int(self.d[index]) ** self.k


def within_exact(first: Tuple[int, int], second: Tuple[int, int], delta: Fraction) -> bool:
    """
    Exact test of |sqrt(n1/q1) - sqrt(n2/q2)| <= delta.

    With A = n1 q2, B = n2 q1, Q = q1 q2 and delta = p/r the condition is
    L <= 0 or L^2 <= 4 A B r^4 where L = (A + B) r^2 - p^2 Q.
    """
    n1, q1 = first
    n2, q2 = second
    p, r = delta.numerator, delta.denominator
    A, B = n1 * q2, n2 * q1
    L = (A + B) * r * r - p * p * q1 * q2
    return L <= 0 or L * L <= 4 * A * B * r ** 4


def _expand(starts: np.ndarray, stops: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Flatten the index ranges [starts[i], stops[i]) into (row, column) pairs."""
    lengths = np.maximum(stops - starts, 0)
    total = int(lengths.sum())
    if total == 0:
        empty = np.zeros(0, dtype = np.int64)
        return empty, empty
    rows = np.repeat(np.arange(len(starts), dtype = np.int64), lengths)
    offsets = np.arange(total, dtype = np.int64) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return rows, np.repeat(starts, lengths) + offsets


class SpacingService:
    """Service class for near-resonance counts, their envelope and the E_k aggregate."""

    def __init__(self, sieve: SieveService, config_class = Config):
        self.sieve = sieve
        self.budget = config_class.SPACING_BUDGET
        self.max_side = config_class.SPACING_MAX_SIDE
        self.chunk = config_class.SPACING_PAIR_CHUNK
        self.threads = max(1, int(config_class.THREADS))

    def __repr__(self) -> str:
        return f"<SpacingService(budget={self.budget}, max_side={self.max_side})>"

    def _check_box(self, box: DyadicBox) -> None:
        side1, side2 = box.side_sizes
        if max(side1, side2) > self.max_side:
            raise ResourceLimitError(f"{box!r} has a side of {max(side1, side2)} points, "
                                     f"limit {self.max_side}; use a smaller box")
        if box.candidates > self.budget:
            raise ResourceLimitError(f"{box!r} has {box.candidates} quadruples, "
                                     f"budget {self.budget}; use a smaller box")

    # ------------------------------------------------------------------
    # Near-resonance counts
    # ------------------------------------------------------------------

    def _count_chunk(self, side1: _Side, side2: _Side, start: int, stop: int,
                     delta: Fraction, tolerance: float) -> int:
        v2 = side2.values[start:stop]
        width = float(delta)
        outer_lo = np.searchsorted(side1.values, v2 - width - tolerance, side = 'left')
        outer_hi = np.searchsorted(side1.values, v2 + width + tolerance, side = 'right')

        if width > 2.0 * tolerance:
            inner_lo = np.searchsorted(side1.values, v2 - width + tolerance, side = 'left')
            inner_hi = np.searchsorted(side1.values, v2 + width - tolerance, side = 'right')
            certain = int(np.maximum(inner_hi - inner_lo, 0).sum())
            bands = [(outer_lo, inner_lo), (inner_hi, outer_hi)]
        else:
            certain = 0
            bands = [(outer_lo, outer_hi)]

        rechecked = 0
        for band_start, band_stop in bands:
            rows, columns = _expand(band_start, band_stop)
            rechecked += sum(
                within_exact(side1.pair(int(column)), side2.pair(start + int(row)), delta)
                for row, column in zip(rows, columns)
            )
        return certain + rechecked

    def count_near_resonances(self, box: DyadicBox) -> int:
        """
        Number of quadruples (d1, n1, d2, n2) in the box with
        |sqrt(n1/d1^k) - sqrt(n2/d2^k)| <= delta, equal values included.

        Side 1 is sorted once and side 2 is matched against it by binary
        search, so the work is O(M log M) plus the exact rechecks of pairs
        lying within a few ulps of the threshold.
        """
        self._check_box(box)
        side1 = _Side.dyadic(box.D1, box.N1, box.k)
        side2 = _Side.dyadic(box.D2, box.N2, box.k)
        delta = Fraction(box.delta)
        vmax = max(side1.values[-1], side2.values[-1])
        tolerance = GUARD_ULPS * (float(np.spacing(vmax)) + float(np.spacing(float(box.delta))))

        bounds = [(start, min(start + self.chunk, len(side2))) for start in range(0, len(side2), self.chunk)]
        job = lambda span: self._count_chunk(side1, side2, span[0], span[1], delta, tolerance)
        if self.threads == 1 or len(bounds) == 1:
            counts = [job(span) for span in bounds]
        else:
            with ThreadPoolExecutor(max_workers = self.threads) as pool:
                counts = list(pool.map(job, bounds))

        total = sum(counts)
        logger.debug(f"Near resonances in {box!r}: {total}")
        return total

    def count_near_resonances_naive(self, box: DyadicBox) -> int:
        """O(M^2) reference count over every pair of the box."""
        self._check_box(box)
        side1 = _Side.dyadic(box.D1, box.N1, box.k)
        side2 = _Side.dyadic(box.D2, box.N2, box.k)
        delta = Fraction(box.delta)
        width = float(box.delta)
        tolerance = GUARD_ULPS * (float(np.spacing(max(side1.values[-1], side2.values[-1])))
                                  + float(np.spacing(width)))

        total = 0
        for i in range(len(side1)):
            gaps = np.abs(side2.values - side1.values[i])
            total += int(np.count_nonzero(gaps < width - tolerance))
            for j in np.flatnonzero(np.abs(gaps - width) <= tolerance):
                total += within_exact(side1.pair(i), side2.pair(int(j)), delta)
        return total

    @staticmethod
    def lemma51_envelope(box: DyadicBox) -> float:
        """
        delta (D1 D2)^(1 + k/4) (N1 N2)^(3/4) + (D1 D2 N1 N2)^(1/2) log(2 D1 D2 N1 N2),
        the near-resonance bound with implied constant 1.
        """
        dd = float(box.D1) * box.D2
        nn = float(box.N1) * box.N2
        return (box.delta * dd ** (1.0 + box.k / 4.0) * nn ** 0.75
                + math.sqrt(dd * nn) * math.log(2.0 * dd * nn))

    def sweep(self, boxes: Iterable[DyadicBox]) -> pd.DataFrame:
        """
        Count and envelope for each box.

        Returns:
            DataFrame with the spacing CSV columns
        """
        rows = []
        for box in boxes:
            count = self.count_near_resonances(box)
            envelope = self.lemma51_envelope(box)
            rows.append({**box.to_dict(), 'count': count, 'envelope': envelope, 'ratio': count / envelope})
        frame = pd.DataFrame(rows, columns = SPACING_CSV_COLUMNS)
        if len(frame):
            logger.info(f"Swept {len(frame)} boxes, largest count/envelope {frame['ratio'].max():.6g}")
        return frame

    # ------------------------------------------------------------------
    # E_k(y, z)
    # ------------------------------------------------------------------

    def _initial_side(self, y: float, z: float, k: int) -> Tuple[_Side, np.ndarray]:
        if int(k) != k or k < 2:
            raise DomainError(f"k must be an integer >= 2, got {k}")
        if y < 1 or z < 1:
            raise DomainError(f"E_k needs y >= 1 and z >= 1, got y={y}, z={z}")
        d_max, n_max = int(math.floor(y)), int(math.floor(z))
        size = d_max * n_max
        if size * size > self.budget:
            raise ResourceLimitError(f"E_k with y={y}, z={z} needs {size * size} pairs, budget {self.budget}")
        side = _Side.initial(d_max, n_max, int(k))
        divisors = self.sieve.prefix_table(n_max).d.astype(np.float64)
        weights = (divisors[side.n - 1] * side.d.astype(np.float64) ** (-k / 4.0)
                   * side.n.astype(np.float64) ** -0.75)
        return side, weights

    def e_k_estimate(self, y: float, z: float, k: int, T: float, weighted: bool = True) -> float:
        """
        E_k(y, z): sum over d1, d2 <= y and n1, n2 <= z with n1 d2^k != n2 d1^k of
        d(n1) d(n2) (d1 d2)^(-k/4) (n1 n2)^(-3/4) min(T^(1/2), 1/|sqrt(n1/d1^k) - sqrt(n2/d2^k)|).

        Args:
            y: Cutoff for d
            z: Cutoff for n
            k: Power k >= 2
            T: Height T >= 1
            weighted: False drops the arithmetic weights

        Returns:
            The sum over ordered pairs
        """
        if T < 1:
            raise DomainError(f"E_k needs T >= 1, got {T}")
        side, weights = self._initial_side(y, z, k)
        if not weighted:
            weights = np.ones_like(weights)
        cap = math.sqrt(T)
        size = len(side)
        tolerance = GUARD_ULPS * float(np.spacing(side.values[-1]))
        rows_per_block = max(1, self.chunk // max(size, 1))

        partial = []
        for start in range(0, size, rows_per_block):
            stop = min(start + rows_per_block, size)
            # sorted values: columns j > i carry nonnegative gaps
            gaps = side.values[None, start:] - side.values[start:stop, None]
            upper = np.arange(start, size)[None, :] > np.arange(start, stop)[:, None]
            with np.errstate(divide = 'ignore'):
                kernel = np.minimum(cap, 1.0 / gaps)
            terms = np.where(upper, weights[start:stop, None] * weights[None, start:] * kernel, 0.0)

            for row, column in zip(*np.nonzero(upper & (gaps <= tolerance))):
                i, j = start + int(row), start + int(column)
                (n1, q1), (n2, q2) = side.pair(i), side.pair(j)
                if n1 * q2 == n2 * q1:
                    terms[row, column] = 0.0
            partial.append(math.fsum(terms.ravel()))

        value = 2.0 * math.fsum(partial)
        logger.debug(f"E_{k}(y={y}, z={z}) at T={T}: {value:.6g}")
        return value

    def e_k_naive(self, y: float, z: float, k: int, T: float, weighted: bool = True) -> float:
        """O(M^2) reference for e_k_estimate: a plain loop over ordered pairs with exact resonance tests."""
        if T < 1:
            raise DomainError(f"E_k needs T >= 1, got {T}")
        if int(k) != k or k < 2:
            raise DomainError(f"k must be an integer >= 2, got {k}")
        if y < 1 or z < 1:
            raise DomainError(f"E_k needs y >= 1 and z >= 1, got y={y}, z={z}")
        k = int(k)
        d_max, n_max = int(math.floor(y)), int(math.floor(z))
        if (d_max * n_max) ** 2 > self.budget:
            raise ResourceLimitError(f"E_k reference with y={y}, z={z} exceeds the pair budget {self.budget}")
        divisors = self.sieve.prefix_table(n_max).d
        cap = math.sqrt(T)

        points = []
        for d in range(1, d_max + 1):
            for n in range(1, n_max + 1):
                weight = int(divisors[n - 1]) * d ** (-k / 4.0) * n ** -0.75 if weighted else 1.0
                points.append((d, n, math.sqrt(n / d ** k), weight))

        terms = []
        for d1, n1, v1, w1 in points:
            for d2, n2, v2, w2 in points:
                if n1 * d2 ** k == n2 * d1 ** k:
                    continue
                gap = abs(v1 - v2)
                terms.append(w1 * w2 * (cap if gap == 0.0 else min(cap, 1.0 / gap)))
        return math.fsum(terms)

    def e_k_bound_shape(self, y: float, z: float, k: int, T: float, epsilon: float = 0.0) -> Dict[str, float]:
        """The two terms y^2 z^eps log^4 T and T^((k+1)/3k) z^eps log^4 T of the E_k bound."""
        log_t = math.log(T) if T > 1 else 0.0
        z_eps = float(z) ** epsilon
        first = float(y) ** 2 * z_eps * log_t ** 4
        second = float(T) ** ((k + 1) / (3.0 * k)) * z_eps * log_t ** 4
        return {'small_y': first, 'large_y': second, 'total': first + second}
