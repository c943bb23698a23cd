"""
Summatory functions, main terms and error terms of the three divisor problems.
"""

import logging
import math
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import mpmath
import numpy as np
import pandas as pd

from app.config import Config
from app.constants import Problem, BasisTag, MAX_BIG_D_ARGUMENT, DELTA_CSV_COLUMNS
from app.errors import DomainError, ResourceLimitError
from app.models import MainTermModel, ErrorTermSample
from app.services.arith_sieve import SieveService, iroot, iroot_array
from app.services.analytic.special_functions import SpecialFunctions

logger = logging.getLogger(__name__)

# Arrays of quotients n // i are summed in blocks of this length
_HYPERBOLA_BLOCK = 1 << 20

# Table names holding the summands of each problem
SUMMAND_TABLE = {
    Problem.DIRICHLET: 'd',
    Problem.KFREE: 'dk',
    Problem.THREEDIM: 'd11k'
}


def exact_floor(x) -> int:
    """Floor of an int, float, Fraction or mpf without rounding surprises."""
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, mpmath.mpf):
        return int(mpmath.floor(x))
    return math.floor(Fraction(x))


def as_mpf(x) -> mpmath.mpf:
    """Exact conversion of an int, float or Fraction to mpf."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


class SummatoryService:
    """Service class for summatory functions and error terms."""

    def __init__(self, sieve: SieveService, special: SpecialFunctions, config_class = Config):
        self.sieve = sieve
        self.special = special
        self.dps = config_class.MPMATH_DPS
        self._models: Dict[Tuple[Problem, Optional[int]], MainTermModel] = {}
        self._tables: Dict[Optional[int], Any] = {}

    def __repr__(self) -> str:
        return f"<SummatoryService(dps={self.dps})>"

    @staticmethod
    def _check_k(k: Optional[int]) -> int:
        if k is None or int(k) != k or k < 2:
            raise DomainError(f"k must be an integer >= 2, got {k}")
        return int(k)

    # ------------------------------------------------------------------
    # Cached prefix tables
    # ------------------------------------------------------------------

    def _table(self, n_max: int, k: Optional[int] = None):
        """Monolithic table over [1, N] with N >= n_max, reused between calls."""
        n_max = max(int(n_max), 1)
        cached = self._tables.get(k)
        if cached is None or cached.range.hi - 1 < n_max:
            size = n_max if cached is None else max(n_max, 2 * (cached.range.hi - 1))
            size = min(size, max(n_max, self.sieve.max_limit))
            logger.debug(f"Building prefix table up to {size} (k={k})")
            cached = self.sieve.prefix_table(size, k)
            self._tables[k] = cached
        return cached

    def summatory_prefix(self, problem: Problem, n_max: int, k: Optional[int] = None) -> np.ndarray:
        """
        Exact prefix sums of the problem's summand.

        Args:
            problem: Divisor problem
            n_max: Largest n covered
            k: Required for KFree and ThreeDim

        Returns:
            int64 array S with S[0] = 0 and S[n] the summatory value at n
        """
        if problem != Problem.DIRICHLET:
            k = self._check_k(k)
        table = self._table(n_max, k if problem != Problem.DIRICHLET else None)
        values = getattr(table, SUMMAND_TABLE[problem])[:n_max]
        prefix = np.zeros(n_max + 1, dtype = np.int64)
        np.cumsum(values, dtype = np.int64, out = prefix[1:])
        return prefix

    # ------------------------------------------------------------------
    # Main terms
    # ------------------------------------------------------------------

    def _constant_record(self, value: mpmath.mpf) -> dict:
        return {'value': mpmath.nstr(value, self.dps), 'dps': self.dps}

    def kfree_coefficients(self, k: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
        """
        Coefficients of C1 x log x + C2 x in D^(k)(x).

        C1 = 1/zeta(k), C2 = (2 gamma - 1)/zeta(k) - k zeta'(k)/zeta(k)^2.
        """
        k = self._check_k(k)
        with mpmath.workdps(self.dps):
            zeta_k = self.special.zeta(k)
            zeta_prime_k = self.special.zeta_prime(k)
            gamma = self.special.euler_gamma()
            c1 = 1 / zeta_k
            c2 = (2 * gamma - 1) / zeta_k - k * zeta_prime_k / zeta_k ** 2
        return c1, c2

    def main_term_model(self, problem: Problem, k: Optional[int] = None) -> MainTermModel:
        """Build (and memoise) the main-term model of a problem."""
        if problem == Problem.DIRICHLET:
            k = None
        else:
            k = self._check_k(k)
        key = (problem, k)
        if key in self._models:
            return self._models[key]

        with mpmath.workdps(self.dps):
            gamma = self.special.euler_gamma()
            used = {'gamma': self._constant_record(gamma)}

            if problem == Problem.DIRICHLET:
                coefficients = [(BasisTag.X_LOG_X, mpmath.mpf(1)), (BasisTag.X, 2 * gamma - 1)]
            elif problem == Problem.KFREE:
                c1, c2 = self.kfree_coefficients(k)
                used['zeta(k)'] = self._constant_record(self.special.zeta(k))
                used['zeta_prime(k)'] = self._constant_record(self.special.zeta_prime(k))
                coefficients = [(BasisTag.X_LOG_X, c1), (BasisTag.X, c2)]
            else:
                zeta_k = self.special.zeta(k)
                zeta_prime_k = self.special.zeta_prime(k)
                zeta_root = self.special.zeta(mpmath.mpf(1) / k)
                used['zeta(k)'] = self._constant_record(zeta_k)
                used['zeta_prime(k)'] = self._constant_record(zeta_prime_k)
                used['zeta(1/k)'] = self._constant_record(zeta_root)
                coefficients = [
                    (BasisTag.X_LOG_X, zeta_k),
                    (BasisTag.X, k * zeta_prime_k + (2 * gamma - 1) * zeta_k),
                    (BasisTag.X_POW_1_OVER_K, zeta_root ** 2)
                ]

        model = MainTermModel(problem = problem, coefficients = coefficients, constants_used = used, k = k)
        self._models[key] = model
        logger.debug(f"Built main term model {model!r}")
        return model

    # ------------------------------------------------------------------
    # Exact summatory values
    # ------------------------------------------------------------------

    @staticmethod
    def big_d(x) -> int:
        """
        Divisor summatory function D(x) by the hyperbola method
        D(x) = 2 sum_{i <= sqrt x} floor(x/i) - floor(sqrt x)^2.
        """
        if x < 1:
            raise DomainError(f"big_d needs x >= 1, got {x}")
        n = exact_floor(x)
        if n > MAX_BIG_D_ARGUMENT:
            raise ResourceLimitError(f"D({n}) would overflow the 64-bit accumulator")

        root = math.isqrt(n)
        total = 0
        for start in range(1, root + 1, _HYPERBOLA_BLOCK):
            i = np.arange(start, min(start + _HYPERBOLA_BLOCK, root + 1), dtype = np.int64)
            total += int((n // i).sum())
        return 2 * total - root * root

    def kfree_summatory(self, x, k: int) -> int:
        """D^(k)(x) = sum_{d <= x^(1/k)} mu(d) D(x/d^k), exact."""
        k = self._check_k(k)
        n = exact_floor(x)
        if n < 1:
            return 0
        limit = iroot(n, k)
        mu = self._table(limit).mu
        return sum(int(mu[d - 1]) * self.big_d(n // d ** k)
                   for d in range(1, limit + 1) if mu[d - 1] != 0)

    def threedim_summatory(self, x, k: int) -> int:
        """D(1,1,k;x) = sum_{d <= x^(1/k)} D(x/d^k), exact."""
        k = self._check_k(k)
        n = exact_floor(x)
        if n < 1:
            return 0
        return sum(self.big_d(n // d ** k) for d in range(1, iroot(n, k) + 1))

    def summatory(self, problem: Problem, x, k: Optional[int] = None) -> int:
        """Exact summatory value of a problem at x."""
        if problem == Problem.DIRICHLET:
            return self.big_d(x) if x >= 1 else 0
        if problem == Problem.KFREE:
            return self.kfree_summatory(x, k)
        return self.threedim_summatory(x, k)

    # ------------------------------------------------------------------
    # Error terms
    # ------------------------------------------------------------------

    def delta(self, problem: Problem, x, k: Optional[int] = None) -> ErrorTermSample:
        """
        Error term sample: exact summatory value minus high-precision main term.

        Args:
            problem: Divisor problem
            x: Real x >= 1 (int, float or Fraction)
            k: Required for KFree and ThreeDim

        Returns:
            ErrorTermSample at x
        """
        if x < 1:
            raise DomainError(f"Error terms need x >= 1, got {x}")
        model = self.main_term_model(problem, k)
        summatory = self.summatory(problem, x, k)
        with mpmath.workdps(self.dps):
            main = model.evaluate(as_mpf(x))
            value = float(summatory - main)
        return ErrorTermSample(x = float(x), value = value, summatory = summatory, main = main)

    def delta_dirichlet(self, x) -> ErrorTermSample:
        """Delta(x) = D(x) - x log x - (2 gamma - 1) x."""
        return self.delta(Problem.DIRICHLET, x)

    def delta_kfree(self, x, k: int) -> ErrorTermSample:
        """Delta^(k)(x) = D^(k)(x) - C1 x log x - C2 x."""
        return self.delta(Problem.KFREE, x, k)

    def delta_threedim(self, x, k: int) -> ErrorTermSample:
        """Delta(1,1,k;x) = D(1,1,k;x) minus its three-term main part."""
        return self.delta(Problem.THREEDIM, x, k)

    def delta_grid(self, problem: Problem, xs, k: Optional[int] = None) -> pd.DataFrame:
        """
        Vectorised error terms through sieve prefix sums.

        Main terms are evaluated in double precision here; use delta for
        single points that need the high-precision main term.

        Returns:
            DataFrame with columns x, summatory, main, delta
        """
        xs = np.asarray(xs, dtype = np.float64)
        if len(xs) == 0:
            return pd.DataFrame(columns = DELTA_CSV_COLUMNS)
        if xs.min() < 1:
            raise DomainError("Error terms need x >= 1")
        floors = np.floor(xs).astype(np.int64)
        prefix = self.summatory_prefix(problem, int(floors.max()), k)
        summatory = prefix[floors]
        main = self.main_term_model(problem, k).evaluate_array(xs)
        return pd.DataFrame({
            'x': xs,
            'summatory': summatory,
            'main': main,
            'delta': summatory - main
        }, columns = DELTA_CSV_COLUMNS)

    # ------------------------------------------------------------------
    # Hyperbola decompositions
    # ------------------------------------------------------------------

    def hyperbola_identity_check(self, x: int, y, k: int) -> Tuple[int, int]:
        """
        Evaluate both sides of
        D^(k)(x) = sum_{d <= y} mu(d) D(x/d^k)
                   + sum_{n <= x/y^k} d(n) M((x/n)^(1/k)) - D(x/y^k) M(y).

        Args:
            x: Integer x >= 1
            y: Real split point with 10 <= y <= x^(1/k)
            k: Integer k >= 2

        Returns:
            (lhs, rhs) as Python ints; they are equal
        """
        k = self._check_k(k)
        x = int(x)
        y_exact = Fraction(y)
        if y_exact < 10 or y_exact ** k > x:
            raise DomainError(f"Split point y={y} must satisfy 10 <= y <= x^(1/k) for x={x}, k={k}")

        lhs = int(self.summatory_prefix(Problem.KFREE, x, k)[x])

        y_floor = math.floor(y_exact)
        n_split = math.floor(Fraction(x) / y_exact ** k)
        table = self._table(max(iroot(x, k), n_split, y_floor))
        mertens = np.zeros(len(table) + 1, dtype = np.int64)
        np.cumsum(table.mu, dtype = np.int64, out = mertens[1:])

        sum1 = sum(int(table.mu[d - 1]) * self.big_d(x // d ** k)
                   for d in range(1, y_floor + 1) if table.mu[d - 1] != 0)

        sum2 = 0
        if n_split >= 1:
            n = np.arange(1, n_split + 1, dtype = np.int64)
            roots = iroot_array(x // n, k)
            sum2 = int((table.d[:n_split].astype(np.int64) * mertens[roots]).sum())

        sum3 = (self.big_d(n_split) if n_split >= 1 else 0) * int(mertens[y_floor])
        rhs = sum1 + sum2 - sum3
        logger.debug(f"Hyperbola identity x={x}, y={y}, k={k}: lhs={lhs}, rhs={rhs}")
        return lhs, rhs

    def psi_sum(self, x, k: int, y) -> float:
        """
        S(x) = sum_{n <= x/y^k} d(n) psi((x/n)^(1/k)) with psi(u) = {u} - 1/2,
        summed directly.
        """
        k = self._check_k(k)
        x_exact = Fraction(x)
        y_exact = Fraction(y)
        if y_exact < 1:
            raise DomainError(f"psi_sum needs y >= 1, got {y}")
        if x_exact < y_exact ** k:
            return 0.0

        n_split = math.floor(x_exact / y_exact ** k)
        x_floor = math.floor(x_exact)
        n = np.arange(1, n_split + 1, dtype = np.int64)
        floors = iroot_array(x_floor // n, k)

        u = np.power(float(x) / n.astype(np.float64), 1.0 / k)
        fractional = np.clip(u - floors, 0.0, np.nextafter(1.0, 0.0))
        if x_exact.denominator == 1:
            exact_power = (x_floor % n == 0) & (floors ** k == x_floor // n)
            fractional[exact_power] = 0.0

        weights = self._table(n_split).d[:n_split].astype(np.float64)
        return math.fsum(weights * (fractional - 0.5))

    def lemma71_decomposition(self, x, k: int, y) -> Dict[str, float]:
        """
        Split Delta(1,1,k;x) into sum_{d <= y} Delta(x/d^k) minus the psi-sum.

        Returns:
            Dictionary with sum_delta, psi_part, residual, envelope
            (x y^(-k-1) log x + y) and fitted_constant = |residual| / envelope
        """
        k = self._check_k(k)
        x_exact = Fraction(x)
        y_exact = Fraction(y)
        if y_exact < 2 or y_exact ** k > x_exact:
            raise DomainError(f"Split point y={y} must satisfy 2 <= y <= x^(1/k)")

        with mpmath.workdps(self.dps):
            sum_delta = mpmath.mpf(0)
            for d in range(1, math.floor(y_exact) + 1):
                point = x_exact / d ** k
                sample = self.delta(Problem.DIRICHLET, point)
                sum_delta += sample.summatory - sample.main

            psi_part = self.psi_sum(x, k, y)
            target = self.delta(Problem.THREEDIM, x_exact, k)
            residual = (target.summatory - target.main) - (sum_delta - psi_part)

        envelope = float(x) * float(y) ** (-k - 1) * math.log(float(x)) + float(y)
        result = {
            'x': float(x),
            'k': k,
            'y': float(y),
            'sum_delta': float(sum_delta),
            'psi_part': psi_part,
            'residual': float(residual),
            'envelope': envelope,
            'fitted_constant': abs(float(residual)) / envelope
        }
        logger.info(f"psi-sum split at x={x}, y={y}, k={k}: residual={result['residual']:.6g}")
        return result
