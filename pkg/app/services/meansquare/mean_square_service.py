"""
Mean-square service: integrals of squared error terms against their predicted main terms.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import mpmath
import numpy as np

from app.config import Config
from app.constants import Problem, ConstantKind
from app.errors import DomainError
from app.models import MeanSquareReport, ConstantEstimate
from app.services.arith_sieve import SieveService, log_power_saving
from app.services.summatory import SummatoryService, SUMMAND_TABLE
from app.services.analytic.series_constants import ConstantsService
from app.services.meansquare.integrator import PiecewiseIntegrator

logger = logging.getLogger(__name__)

# Checkpoints below this T are too noisy for the residual slope fit
_SLOPE_MIN_T = 16.0

NUMERATOR_KIND = {
    Problem.DIRICHLET: None,
    Problem.KFREE: ConstantKind.BK,
    Problem.THREEDIM: ConstantKind.CK
}


class MeanSquareService:
    """Service class for mean-square integrals and their asymptotic comparison."""

    def __init__(self, sieve: SieveService, summatory: SummatoryService,
                 constants: ConstantsService, config_class = Config):
        self.sieve = sieve
        self.summatory = summatory
        self.constants = constants
        self.integrator = PiecewiseIntegrator(sieve, config_class)
        self.dps = config_class.MPMATH_DPS
        self._numerators: Dict[Tuple[Problem, Optional[int]], ConstantEstimate] = {}

    def __repr__(self) -> str:
        return f"<MeanSquareService(integrator={self.integrator!r})>"

    @staticmethod
    def _normalise_k(problem: Problem, k: Optional[int]) -> Optional[int]:
        if problem == Problem.DIRICHLET:
            return None
        if k is None or int(k) != k or k < 2:
            raise DomainError(f"{problem.value} needs an integer k >= 2, got {k}")
        return int(k)

    def numerator(self, problem: Problem, k: Optional[int]) -> ConstantEstimate:
        """Constant c of the predicted main term c/(6 pi^2) T^(3/2)."""
        k = self._normalise_k(problem, k)
        key = (problem, k)
        if key not in self._numerators:
            self._numerators[key] = self.constants.mean_square_numerator(NUMERATOR_KIND[problem], k)
        return self._numerators[key]

    def predicted_main(self, problem: Problem, k: Optional[int], T: float) -> float:
        """c/(6 pi^2) T^(3/2)."""
        with mpmath.workdps(self.dps):
            value = self.numerator(problem, k).value / (6 * mpmath.pi ** 2) * mpmath.power(mpmath.mpf(T), 1.5)
        return float(value)

    def integrate(self, problem: Problem, k: Optional[int], lower: float, upper: float,
                  scale: float = 1.0) -> float:
        """Integral of (scale * Delta)^2 over [lower, upper]."""
        k = self._normalise_k(problem, k)
        model = self.summatory.main_term_model(problem, k)
        total, _ = self.integrator.integrate(model, SUMMAND_TABLE[problem], k, lower, upper, scale = scale)
        return total

    def _running_integrals(self, problem: Problem, k: Optional[int], T: float,
                           stops: List[float]) -> Tuple[float, List[float]]:
        model = self.summatory.main_term_model(problem, k)
        return self.integrator.integrate(model, SUMMAND_TABLE[problem], k, 1.0, T, stops = stops)

    @staticmethod
    def predicted_error_exponent(problem: Problem, k: Optional[int] = None) -> float:
        """
        Exponent of the error term in the mean-square asymptotic.

        Dirichlet: 1. KFree: k = 4 -> 3/2 (saving only by exp(-c delta(T))),
        k = 5 -> 75/52, k >= 6 -> 3/2 - 1/(2k) + 1/k^2. ThreeDim: k = 3 -> 53/36,
        k = 4 -> 29/20, k = 5 -> 75/52, k >= 6 as for KFree.
        """
        if problem == Problem.DIRICHLET:
            return 1.0
        if k is None or int(k) != k:
            raise DomainError(f"{problem.value} needs an integer k, got {k}")
        k = int(k)
        general = 1.5 - 1.0 / (2 * k) + 1.0 / k ** 2
        if problem == Problem.KFREE:
            table = {4: 1.5, 5: 75 / 52}
            if k < 4:
                raise DomainError(f"No error exponent for the k-free problem with k={k} (need k >= 4)")
        else:
            table = {3: 53 / 36, 4: 29 / 20, 5: 75 / 52}
            if k < 3:
                raise DomainError(f"No error exponent for the three-dimensional problem with k={k} (need k >= 3)")
        return table.get(k, general)

    def _safe_exponent(self, problem: Problem, k: Optional[int]) -> Optional[float]:
        try:
            return self.predicted_error_exponent(problem, k)
        except DomainError:
            return None

    def integrate_delta_squared(self, problem: Problem, k: Optional[int], T: float) -> MeanSquareReport:
        """
        Integral of Delta^2 over [1, T] with checkpoints at T/2^j.

        Args:
            problem: Divisor problem
            k: Required for KFree and ThreeDim
            T: Upper limit T >= 2

        Returns:
            MeanSquareReport
        """
        if T < 2:
            raise DomainError(f"Mean square needs T >= 2, got {T}")
        k = self._normalise_k(problem, k)
        T = float(T)

        checkpoints = []
        point = T / 2.0
        while point >= 2.0:
            checkpoints.append(point)
            point /= 2.0
        checkpoints = sorted(checkpoints) + [T]

        numerator = self.numerator(problem, k)
        logger.info(f"Integrating {problem.value} (k={k}) squared error up to T={T}")
        integral, running = self._running_integrals(problem, k, T, checkpoints)

        samples = []
        residuals = []
        for t, value in zip(checkpoints, running):
            predicted = self.predicted_main(problem, k, t)
            samples.append((t, value / predicted))
            residuals.append((t, value - predicted))

        predicted_main = self.predicted_main(problem, k, T)
        report = MeanSquareReport(
            problem = problem,
            T = T,
            integral = integral,
            predicted_main = predicted_main,
            residual = integral - predicted_main,
            constant = numerator.value,
            predicted_error_exponent = self._safe_exponent(problem, k),
            samples = samples,
            k = k,
            residual_slope = self._residual_slope(residuals),
            delta_T = log_power_saving(T) if problem == Problem.KFREE and k == 4 and T > math.e else None
        )
        logger.info(f"Mean square result {report!r}")
        return report

    @staticmethod
    def _residual_slope(residuals: List[Tuple[float, float]]) -> Optional[float]:
        """Least-squares slope of log|residual| against log T."""
        points = [(math.log(t), math.log(abs(r))) for t, r in residuals if t >= _SLOPE_MIN_T and r != 0]
        if len(points) < 2:
            return None
        xs, ys = zip(*points)
        slope, _ = np.polyfit(xs, ys, 1)
        return float(slope)

    def ratio_trace(self, problem: Problem, k: Optional[int], T_max: float, n_checkpoints: int,
                    T_min: Optional[float] = None) -> List[Dict[str, Any]]:
        """
        Ratio of the running integral to its predicted main term on a
        geometric checkpoint grid, from one incremental pass.

        Returns:
            Rows with keys T, integral, predicted, ratio, ascending in T
        """
        if n_checkpoints < 2:
            raise DomainError(f"ratio_trace needs at least 2 checkpoints, got {n_checkpoints}")
        if T_max <= 2:
            raise DomainError(f"ratio_trace needs T_max > 2, got {T_max}")
        k = self._normalise_k(problem, k)
        T_min = float(T_min) if T_min is not None else min(100.0, T_max / 2.0)
        if not 1 < T_min < T_max:
            raise DomainError(f"ratio_trace needs 1 < T_min < T_max, got T_min={T_min}")

        grid = list(np.geomspace(T_min, T_max, int(n_checkpoints)))
        grid[-1] = float(T_max)
        _, running = self._running_integrals(problem, k, float(T_max), grid)

        rows = []
        for t, value in zip(grid, running):
            predicted = self.predicted_main(problem, k, t)
            rows.append({'T': float(t), 'integral': value, 'predicted': predicted, 'ratio': value / predicted})
        return rows

    def omega_witness(self, k: int, X: float) -> Tuple[float, float]:
        """
        Largest |Delta^(k)(x)| / x^(1/4) over x <= X, looking at both sides
        of every integer jump and at X itself when X is not an integer.

        Returns:
            (x_star, score)
        """
        if k is None or int(k) != k or k < 4:
            raise DomainError(f"omega_witness needs k >= 4, got {k}")
        if X < 2:
            raise DomainError(f"omega_witness needs X >= 2, got {X}")
        k = int(k)
        model = self.summatory.main_term_model(Problem.KFREE, k)
        last = int(math.floor(X))

        best_x, best_score = 1.0, -1.0
        carry = 0
        for table in self.sieve.sieve_segments(1, last + 1, k):
            m = table.n.astype(np.float64)
            prefix = carry + np.cumsum(table.dk, dtype = np.int64)
            main = model.evaluate_array(m)
            weight = m ** -0.25
            after = np.abs(prefix - main) * weight
            before = np.abs(np.concatenate([[carry], prefix[:-1]]) - main) * weight
            carry = int(prefix[-1])
            if table.range.lo == 1:
                before[0] = 0.0

            for scores in (after, before):
                index = int(np.argmax(scores))
                if scores[index] > best_score:
                    best_score = float(scores[index])
                    best_x = float(m[index])

        if X > last:
            # D^(k) stays at its value at floor(X) on the partial piece (floor(X), X]
            end = float(X)
            score = abs(carry - float(model.evaluate_array(np.array([end]))[0])) * end ** -0.25
            if score > best_score:
                best_x, best_score = end, float(score)

        logger.info(f"Largest |Delta^({k})(x)|/x^(1/4) up to X={X}: {best_score:.6g} at x={best_x}")
        return best_x, best_score
