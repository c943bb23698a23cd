"""
Truncated Voronoi series for the Dirichlet divisor problem and its k-free aggregate.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.config import Config
from app.constants import Precision, Problem, VORONOI_CSV_COLUMNS
from app.errors import DomainError, ResourceLimitError
from app.models import TruncationParams, CosSumTerm
from app.services.arith_sieve import SieveService, log_power_saving
from app.services.analytic.double_double import sqrt_product, reduced_turns
from app.services.summatory import SummatoryService

logger = logging.getLogger(__name__)

PREFACTOR = 1.0 / (math.pi * math.sqrt(2.0))


class VoronoiService:
    """
    Service class evaluating Delta_1(u; z) = u^(1/4)/(pi sqrt 2) *
    sum_{n <= z} d(n) n^(-3/4) cos(4 pi sqrt(n u) - pi/4) and friends.

    Every evaluation, batched or pointwise, runs the same per-point kernel
    over ascending n, so both agree bit for bit.
    """

    def __init__(self, sieve: SieveService, summatory: SummatoryService, config_class = Config):
        self.sieve = sieve
        self.summatory = summatory
        self.max_z = config_class.VORONOI_MAX_Z
        self.chunk = config_class.VORONOI_CHUNK
        self.phase_threshold = config_class.PHASE_DD_THRESHOLD
        self.precision = Precision(config_class.PRECISION)
        self.threads = max(1, int(config_class.THREADS))
        self._tables: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def __repr__(self) -> str:
        return f"<VoronoiService(max_z={self.max_z}, precision={self.precision.value})>"

    # ------------------------------------------------------------------
    # Tables and kernel
    # ------------------------------------------------------------------

    def _amplitude_table(self, z: int) -> Tuple[np.ndarray, np.ndarray]:
        """(n, d(n) n^(-3/4)) for n <= z, built once per cutoff."""
        if int(z) != z or z < 1:
            raise DomainError(f"Voronoi cutoff z must be a positive integer, got {z}")
        z = int(z)
        if z > self.max_z:
            raise ResourceLimitError(f"Voronoi cutoff z={z} exceeds the limit {self.max_z}")
        if z not in self._tables:
            n = np.arange(1, z + 1, dtype = np.float64)
            divisors = self.sieve.prefix_table(z).d.astype(np.float64)
            self._tables[z] = (n, divisors * n ** -0.75)
            logger.debug(f"Built Voronoi amplitude table for z={z}")
        return self._tables[z]

    def cos_sum_terms(self, z: int, d: int = 1, k: int = 2) -> List[CosSumTerm]:
        """
        The terms of the inner sum at d as explicit cosine terms in sqrt(x):
        amplitude d(n) n^(-3/4), frequency 4 pi sqrt(n / d^k).
        """
        n, amplitude = self._amplitude_table(z)
        scale = float(d) ** (-k / 2.0)
        return [CosSumTerm(amplitude = float(a), frequency = 4.0 * math.pi * math.sqrt(float(m)) * scale)
                for m, a in zip(n, amplitude)]

    def _oscillating_sum(self, u: float, n: np.ndarray, amplitude: np.ndarray) -> float:
        """sum_n amplitude[n] cos(4 pi sqrt(n u) - pi/4) for one point u."""
        products = n * u
        phase = 4.0 * math.pi * np.sqrt(products) - 0.25 * math.pi
        if products[-1] > self.phase_threshold:
            hi, lo = sqrt_product(n, u)
            reduced = 2.0 * math.pi * reduced_turns(hi, lo)
            phase = np.where(products > self.phase_threshold, reduced, phase)
        terms = amplitude * np.cos(phase)
        if self.precision == Precision.DOUBLE:
            return float(np.sum(terms))
        return math.fsum(terms)

    def _evaluate_chunk(self, us: np.ndarray, z: int) -> np.ndarray:
        n, amplitude = self._amplitude_table(z)
        return np.array([PREFACTOR * u ** 0.25 * self._oscillating_sum(u, n, amplitude) for u in us],
                        dtype = np.float64)

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def delta1_grid(self, us, z: int) -> np.ndarray:
        """
        Delta_1(u; z) on a grid of points.

        Args:
            us: Points u >= 1
            z: Voronoi cutoff

        Returns:
            float64 array aligned with us
        """
        us = np.asarray(us, dtype = np.float64)
        if len(us) == 0:
            return np.zeros(0, dtype = np.float64)
        if us.min() < 1:
            raise DomainError("Delta_1 needs u >= 1")
        self._amplitude_table(z)

        chunks = [us[start:start + self.chunk] for start in range(0, len(us), self.chunk)]
        if self.threads == 1 or len(chunks) == 1:
            results = [self._evaluate_chunk(chunk, z) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers = self.threads) as pool:
                results = list(pool.map(lambda chunk: self._evaluate_chunk(chunk, z), chunks))
        return np.concatenate(results)

    def delta1(self, u: float, z: int) -> float:
        """Delta_1(u; z) at a single point."""
        return float(self.delta1_grid([u], z)[0])

    def delta2_samples(self, grid, z: int) -> np.ndarray:
        """Delta(u) - Delta_1(u; z) at each grid point."""
        grid = np.asarray(grid, dtype = np.float64)
        if len(grid) == 0:
            raise DomainError("delta2_samples needs a nonempty grid")
        exact = self.summatory.delta_grid(Problem.DIRICHLET, grid)['delta'].to_numpy()
        return exact - self.delta1_grid(grid, z)

    def grid_frame(self, V: float, z: int, n_points: int) -> pd.DataFrame:
        """Uniform grid on [V, 2V] with columns u, delta, delta1, delta2."""
        grid = np.linspace(V, 2.0 * V, int(n_points))
        delta = self.summatory.delta_grid(Problem.DIRICHLET, grid)['delta'].to_numpy()
        delta1 = self.delta1_grid(grid, z)
        return pd.DataFrame({'u': grid, 'delta': delta, 'delta1': delta1, 'delta2': delta - delta1},
                            columns = VORONOI_CSV_COLUMNS)

    def _outer_weights(self, params: TruncationParams, signed: bool) -> List[Tuple[int, int]]:
        mu = self.sieve.prefix_table(max(params.d_max, 1)).mu
        weights = []
        for d in range(1, params.d_max + 1):
            weight = int(mu[d - 1]) if signed else 1
            if weight:
                weights.append((d, weight))
        return weights

    def r1_kfree(self, x: float, params: TruncationParams, signed: bool = True) -> float:
        """
        x^(1/4)/(pi sqrt 2) sum_{d <= y} w(d) d^(-k/4) sum_{n <= z} d(n) n^(-3/4)
        cos(4 pi sqrt(n x / d^k) - pi/4), with w = mu (signed) or w = 1.
        """
        if x < 1:
            raise DomainError(f"r1_kfree needs x >= 1, got {x}")
        n, amplitude = self._amplitude_table(params.z)
        k = params.k
        outer = [weight * d ** (-k / 4.0) * self._oscillating_sum(x / d ** k, n, amplitude)
                 for d, weight in self._outer_weights(params, signed)]
        return PREFACTOR * x ** 0.25 * math.fsum(outer)

    def decomposition_residual(self, x: float, params: TruncationParams,
                               c: Optional[float] = None) -> Dict[str, Any]:
        """
        Delta^(k)(x) - R_1(x) - sum_{d <= y} mu(d) Delta_2(x/d^k; z), the part of
        the k-free error term left after the hyperbola split and truncation.

        Args:
            x: Point x >= 1
            params: Cutoffs y, z and the power k
            c: Decay constant of the envelope x y^(1-k) exp(-c delta(y)) log x;
               fitted to the residual when omitted

        Returns:
            Dictionary with residual, its pieces, envelope and c
        """
        k = params.k
        target = self.summatory.delta_kfree(x, k).value
        r1 = self.r1_kfree(x, params)

        truncated = []
        for d, weight in self._outer_weights(params, signed = True):
            point = Fraction(x) / d ** k
            if point < 1:
                continue
            exact = self.summatory.delta(Problem.DIRICHLET, point).value
            truncated.append(weight * (exact - self.delta1(float(point), params.z)))
        second = math.fsum(truncated)
        residual = target - r1 - second

        shape = x * params.y ** (1 - k) * math.log(x)
        saving = log_power_saving(params.y) if params.y > math.e else 0.0
        if c is None:
            c = 0.0
            if saving > 0 and 0 < abs(residual) < shape:
                c = -math.log(abs(residual) / shape) / saving
        envelope = shape * math.exp(-c * saving)

        logger.info(f"Decomposition residual at x={x}, {params!r}: {residual:.6g} (envelope {envelope:.6g})")
        return {
            'x': float(x),
            'truncation': params.to_dict(),
            'delta_kfree': target,
            'r1': r1,
            'delta2_sum': second,
            'residual': residual,
            'envelope': envelope,
            'c': c
        }

    def lemma31_check(self, V: float, z: int, n_points: int) -> Dict[str, Any]:
        """
        Mean of Delta_2(u; z)^2 over a uniform grid on [V, 2V], the implied
        integral V * mean and its ratio to V^(3/2) z^(-1/2) log^3 V + V log^5 V.
        """
        if V < 2:
            raise DomainError(f"Residual check needs V >= 2, got {V}")
        if n_points < 2:
            raise DomainError(f"Residual check needs at least 2 points, got {n_points}")
        grid = np.linspace(V, 2.0 * V, int(n_points))
        residuals = self.delta2_samples(grid, z)
        mean_square = math.fsum(residuals ** 2) / len(residuals)
        log_v = math.log(V)
        envelope = V ** 1.5 * z ** -0.5 * log_v ** 3 + V * log_v ** 5
        integral = V * mean_square
        return {
            'V': float(V),
            'z': int(z),
            'n_points': int(n_points),
            'mean_square': mean_square,
            'integral_estimate': integral,
            'envelope': envelope,
            'fitted_constant': integral / envelope
        }
