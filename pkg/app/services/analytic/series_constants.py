"""
Mean-square series constants B_k, C_k, the divisor-square series and Tong's constant.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from app.config import Config
from app.constants import ConstantKind, SummationMethod, DEFAULT_ALPHA_MAX
from app.errors import DomainError, ResourceLimitError
from app.models import ConstantEstimate
from app.services.arith_sieve import SieveService, iroot
from app.services.analytic.special_functions import SpecialFunctions

logger = logging.getLogger(__name__)

DEFAULT_DIRECT_TERMS = 10 ** 6
DEFAULT_PRIME_BOUND = 10 ** 4

# Local-factor terms below this size are dropped
_NEGLIGIBLE_TERM = 1e-22


def _factorize(m: int) -> Dict[int, int]:
    """Trial-division factorisation of a small integer."""
    factors: Dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    return factors


def _divisor_count(n: int) -> int:
    return math.prod(alpha + 1 for alpha in _factorize(n).values())


def _mobius(n: int) -> int:
    factors = _factorize(n)
    if any(alpha > 1 for alpha in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


class ConstantsService:
    """Service class for the series constants and their tail control."""

    def __init__(self, sieve: SieveService, special: SpecialFunctions, config_class = Config):
        self.sieve = sieve
        self.special = special
        self.dps = config_class.MPMATH_DPS

    def __repr__(self) -> str:
        return f"<ConstantsService(dps={self.dps})>"

    # ------------------------------------------------------------------
    # Coefficients g_k and f_k
    # ------------------------------------------------------------------

    @staticmethod
    def _check_k(k: int) -> int:
        if int(k) != k or k < 2:
            raise DomainError(f"k must be an integer >= 2, got {k}")
        return int(k)

    def _coefficient(self, m: int, k: int, signed: bool) -> mpmath.mpf:
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        k = self._check_k(k)
        with mpmath.workdps(self.dps):
            total = mpmath.mpf(0)
            for t in range(1, iroot(m, k) + 1):
                power = t ** k
                if m % power:
                    continue
                weight = _mobius(t) if signed else 1
                if weight:
                    total += weight * _divisor_count(m // power) * mpmath.sqrt(power)
        return total

    def g_k(self, m: int, k: int) -> mpmath.mpf:
        """g_k(m) = sum over m = n d^k of mu(d) d(n) d^(k/2)."""
        return self._coefficient(m, k, signed = True)

    def f_k(self, m: int, k: int) -> mpmath.mpf:
        """f_k(m) = sum over m = n d^k of d(n) d^(k/2)."""
        return self._coefficient(m, k, signed = False)

    def coefficient_table(self, kind: Optional[ConstantKind], k: Optional[int], m_max: int) -> np.ndarray:
        """
        Coefficients for every m <= m_max as float64, by scattering
        weight(t) t^(k/2) d(n) onto m = n t^k.

        Args:
            kind: BK for g_k, CK for f_k, None for d(m) itself
            k: Power (ignored when kind is None)
            m_max: Table length

        Returns:
            Array c with c[m - 1] the coefficient of m
        """
        if m_max > self.sieve.max_limit:
            raise ResourceLimitError(f"Coefficient table up to {m_max} exceeds the sieve limit")
        table = self.sieve.prefix_table(m_max)
        divisors = table.d.astype(np.float64)
        if kind is None:
            return divisors

        k = self._check_k(k)
        values = np.zeros(m_max, dtype = np.float64)
        for t in range(1, iroot(m_max, k) + 1):
            weight = int(table.mu[t - 1]) if kind == ConstantKind.BK else 1
            if weight == 0:
                continue
            step = t ** k
            values[step - 1::step] += weight * math.sqrt(step) * divisors[:m_max // step]
        return values

    def partial_sums(self, kind: Optional[ConstantKind], k: Optional[int],
                     bounds: Sequence[int]) -> List[float]:
        """Partial sums sum_{m <= M} c(m)^2 m^(-3/2) for each M in bounds."""
        m_max = int(max(bounds))
        coefficients = self.coefficient_table(kind, k, m_max)
        m = np.arange(1, m_max + 1, dtype = np.float64)
        terms = coefficients ** 2 * m ** -1.5
        return [math.fsum(terms[:int(bound)]) for bound in bounds]

    # ------------------------------------------------------------------
    # Summation routes
    # ------------------------------------------------------------------

    def _direct_sum(self, kind: Optional[ConstantKind], k: Optional[int], m_max: int) -> Tuple[float, float, dict]:
        if m_max < 64:
            raise DomainError(f"DirectSum needs M >= 64, got {m_max}")
        theta = 0.5 - (1.0 / k if kind is not None else 0.0)
        quarter, half, full = self.partial_sums(kind, k, [m_max // 4, m_max // 2, m_max])
        ratio = 2.0 ** theta - 1.0
        extrapolated = full + (full - half) / ratio
        previous = half + (half - quarter) / ratio
        tail_bound = 2.0 * abs(extrapolated - full) + abs(extrapolated - previous)
        parameters = {'M': m_max, 'partial_sum': full, 'tail_exponent': theta}
        return extrapolated, tail_bound, parameters

    def _local_deficits(self, kind: ConstantKind, k: int, primes: np.ndarray,
                        alpha_max: int) -> Tuple[np.ndarray, int, float]:
        """
        sum_{alpha >= k} (c(p^alpha)^2 - (alpha+1)^2) p^(-3 alpha/2) per prime.

        Each c(p^alpha) p^(-3 alpha/4) is assembled from scaled summands so
        that no intermediate overflows for large alpha.
        """
        log_p = np.log(primes.astype(np.float64))
        deficits = np.zeros(len(primes), dtype = np.float64)
        last = 0.0
        alpha_used = k
        for alpha in range(k, alpha_max + 1):
            base = (alpha + 1) * np.exp(-0.75 * alpha * log_p)
            if kind == ConstantKind.BK:
                shift = -(alpha - k + 1) * np.exp((0.5 * k - 0.75 * alpha) * log_p)
            else:
                shift = np.zeros(len(primes), dtype = np.float64)
                for j in range(1, alpha // k + 1):
                    shift += (alpha - j * k + 1) * np.exp((0.5 * j * k - 0.75 * alpha) * log_p)
            term = shift * (2.0 * base + shift)
            deficits += term
            alpha_used = alpha
            last = float(np.abs(term).max())
            if last < _NEGLIGIBLE_TERM:
                break
        # Terms decay at least like 2^(-alpha/2) at p = 2
        alpha_tail = last / (1.0 - 2.0 ** -0.5) if last >= _NEGLIGIBLE_TERM else 0.0
        return deficits, alpha_used, alpha_tail

    @staticmethod
    def _square_factor(primes: np.ndarray) -> np.ndarray:
        """Local factor (1 - p^-3) / (1 - p^-3/2)^4 of sum d(m)^2 m^(-3/2)."""
        p = primes.astype(np.float64)
        return -np.expm1(-3.0 * np.log(p)) / (-np.expm1(-1.5 * np.log(p))) ** 4

    def _euler_product(self, kind: ConstantKind, k: int, prime_bound: int,
                       alpha_max: int) -> Tuple[mpmath.mpf, float, dict]:
        if prime_bound < 100:
            raise DomainError(f"EulerProduct needs P >= 100, got {prime_bound}")
        primes = self.sieve.primes_upto(prime_bound)
        deficits, alpha_used, alpha_tail = self._local_deficits(kind, k, primes, alpha_max)
        log_ratios = np.log1p(deficits / self._square_factor(primes))

        # Fit log(F_p/E_p) ~ c1 p^(-k/2) + c2 p^(-k) on the top quarter of the primes
        window = primes > prime_bound // 4
        p_window = primes[window].astype(np.float64)
        design = np.column_stack([np.ones(len(p_window)), p_window ** (-0.5 * k)])
        fit, *_ = np.linalg.lstsq(design, log_ratios[window] * p_window ** (0.5 * k), rcond = None)
        c1, c2 = float(fit[0]), float(fit[1])

        with mpmath.workdps(self.dps):
            tail_half = self.special.prime_zeta_tail(mpmath.mpf(k) / 2, primes)
            tail_full = self.special.prime_zeta_tail(k, primes)
            tail_next = self.special.prime_zeta_tail(mpmath.mpf(k + 3) / 2, primes)
            log_tail = c1 * tail_half + c2 * tail_full

            zeta_half = self.special.zeta(mpmath.mpf(3) / 2)
            base = zeta_half ** 4 / self.special.zeta(3)
            value = base * mpmath.exp(math.fsum(log_ratios) + log_tail)

        relative = (abs(float(c2 * tail_full)) + 10.0 * float(tail_next) + alpha_tail
                    + len(primes) * np.finfo(np.float64).eps)
        parameters = {
            'P': prime_bound,
            'alpha_max': alpha_max,
            'alpha_used': alpha_used,
            'tail_fit': [c1, c2],
            'log_tail': float(log_tail)
        }
        return value, float(value) * relative, parameters

    def series_constant(self, kind: ConstantKind, k: int, method: SummationMethod,
                        M: Optional[int] = None, P: Optional[int] = None,
                        alpha_max: Optional[int] = None) -> ConstantEstimate:
        """
        Evaluate B_k = sum g_k(m)^2 m^(-3/2) or C_k = sum f_k(m)^2 m^(-3/2).

        Args:
            kind: BK or CK
            k: Integer k >= 3 (both series diverge for k = 2)
            method: DIRECT_SUM (parameter M) or EULER_PRODUCT (P, alpha_max)

        Returns:
            ConstantEstimate with its tail bound
        """
        k = self._check_k(k)
        if k == 2:
            raise DomainError(f"{kind.value} diverges for k = 2: the prime-square terms decay like 1/p")

        if method == SummationMethod.DIRECT_SUM:
            value, tail_bound, parameters = self._direct_sum(kind, k, int(M or DEFAULT_DIRECT_TERMS))
            value = mpmath.mpf(value)
        elif method == SummationMethod.EULER_PRODUCT:
            value, tail_bound, parameters = self._euler_product(
                kind, k, int(P or DEFAULT_PRIME_BOUND), int(alpha_max or DEFAULT_ALPHA_MAX))
        else:
            raise DomainError(f"Unsupported summation method {method}")

        estimate = ConstantEstimate(value = value, tail_bound = tail_bound, method = method,
                                    parameters = parameters, kind = kind, k = k)
        if estimate.converged:
            logger.info(f"Computed {estimate!r}")
        else:
            logger.warning(f"{kind.value} (k={k}) by {method.value} not converged: tail bound {tail_bound:.3g}")
        return estimate

    def divisor_square_constant(self, method: SummationMethod, M: Optional[int] = None,
                                P: Optional[int] = None) -> ConstantEstimate:
        """
        sum d(m)^2 m^(-3/2), the k -> infinity limit of B_k and C_k.

        The Euler product sums each local factor numerically and closes the
        prime tail with prime zeta values, so it does not assume the
        closed form zeta(3/2)^4 / zeta(3).
        """
        if method == SummationMethod.DIRECT_SUM:
            value, tail_bound, parameters = self._direct_sum(None, None, int(M or DEFAULT_DIRECT_TERMS))
            return ConstantEstimate(value = mpmath.mpf(value), tail_bound = tail_bound, method = method,
                                    parameters = parameters, label = 'divisor-square')

        prime_bound = int(P or DEFAULT_PRIME_BOUND)
        primes = self.sieve.primes_upto(prime_bound)
        log_p = np.log(primes.astype(np.float64))
        local = np.ones(len(primes), dtype = np.float64)
        alpha = 1
        while True:
            term = (alpha + 1) ** 2 * np.exp(-1.5 * alpha * log_p)
            local += term
            if term.max() < _NEGLIGIBLE_TERM:
                break
            alpha += 1

        with mpmath.workdps(self.dps):
            log_tail = mpmath.mpf(0)
            j = 1
            # log E_p = sum_j (4/j) p^(-3j/2) - (1/j) p^(-3j)
            while prime_bound ** (1.0 - 1.5 * j) > 1e-25:
                log_tail += 4 * self.special.prime_zeta_tail(mpmath.mpf(3 * j) / 2, primes) / j
                log_tail -= self.special.prime_zeta_tail(3 * j, primes) / j
                j += 1
            value = mpmath.exp(math.fsum(np.log(local)) + log_tail)

        tail_bound = float(value) * (len(primes) * np.finfo(np.float64).eps + 1e-24)
        parameters = {'P': prime_bound, 'alpha_used': alpha, 'log_tail': float(log_tail)}
        return ConstantEstimate(value = value, tail_bound = tail_bound, method = SummationMethod.EULER_PRODUCT,
                                parameters = parameters, label = 'divisor-square')

    def tong_constant(self) -> ConstantEstimate:
        """zeta(3/2)^4 / (6 pi^2 zeta(3))."""
        with mpmath.workdps(self.dps):
            value = self.special.zeta(mpmath.mpf(3) / 2) ** 4 / (6 * mpmath.pi ** 2 * self.special.zeta(3))
        return ConstantEstimate(value = value, tail_bound = 10.0 ** (5 - self.dps),
                                method = SummationMethod.CLOSED_FORM, label = 'tong')

    def mean_square_numerator(self, kind: Optional[ConstantKind], k: Optional[int],
                              P: Optional[int] = None) -> ConstantEstimate:
        """Constant multiplying T^(3/2)/(6 pi^2): the divisor-square series or B_k / C_k."""
        if kind is None:
            with mpmath.workdps(self.dps):
                value = self.special.zeta(mpmath.mpf(3) / 2) ** 4 / self.special.zeta(3)
            return ConstantEstimate(value = value, tail_bound = 10.0 ** (5 - self.dps),
                                    method = SummationMethod.CLOSED_FORM, label = 'divisor-square')
        return self.series_constant(kind, k, SummationMethod.EULER_PRODUCT, P = P)

    # ------------------------------------------------------------------
    # Truncated constants and k-full structure
    # ------------------------------------------------------------------

    def truncated_constant(self, kind: ConstantKind, k: int, y: float, z: int) -> ConstantEstimate:
        """
        B_k(y, z) (or its f-version): sum over m <= z y^k of g(m; y, z)^2 m^(-3/2)
        where g(m; y, z) keeps only the factorisations m = n d^k with n <= z, d <= y.
        """
        k = self._check_k(k)
        if y < 1 or z < 1:
            raise DomainError(f"Truncation needs y >= 1 and z >= 1, got y={y}, z={z}")
        d_max = int(math.floor(y))
        z = int(z)
        m_max = z * d_max ** k
        if m_max > self.sieve.max_limit:
            raise ResourceLimitError(f"Truncated constant needs {m_max} coefficients, limit {self.sieve.max_limit}")

        table = self.sieve.prefix_table(max(z, d_max))
        divisors = table.d[:z].astype(np.float64)
        values = np.zeros(m_max, dtype = np.float64)
        for t in range(1, d_max + 1):
            weight = int(table.mu[t - 1]) if kind == ConstantKind.BK else 1
            if weight == 0:
                continue
            step = t ** k
            values[step - 1:step * z:step] += weight * math.sqrt(step) * divisors

        m = np.arange(1, m_max + 1, dtype = np.float64)
        value = math.fsum(values ** 2 * m ** -1.5)
        return ConstantEstimate(value = mpmath.mpf(value), tail_bound = m_max * np.finfo(np.float64).eps * value,
                                method = SummationMethod.DIRECT_SUM, parameters = {'y': y, 'z': z},
                                kind = kind, k = k, label = f"{kind.value}(y,z)")

    def kfree_kfull_split(self, m: int, k: int) -> Tuple[int, int]:
        """
        Write m = n * l with gcd(n, l) = 1, n k-free and l k-full.

        Returns:
            (n, l)
        """
        k = self._check_k(k)
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        kfree, kfull = 1, 1
        for p, alpha in _factorize(m).items():
            if alpha >= k:
                kfull *= p ** alpha
            else:
                kfree *= p ** alpha
        return kfree, kfull

    def kfull_moment(self, u: int, k: int) -> int:
        """sum of d(n)^4 over k-full n <= u (n = 1 included)."""
        k = self._check_k(k)
        u = int(u)
        if u < 1:
            return 0
        primes = [int(p) for p in self.sieve.primes_upto(max(iroot(u, k), 2))]
        total = 1
        stack = [(0, 1, 1)]
        while stack:
            start, value, weight = stack.pop()
            for index in range(start, len(primes)):
                p = primes[index]
                power = p ** k
                if value * power > u:
                    break
                alpha = k
                while value * power <= u:
                    child_weight = weight * (alpha + 1) ** 4
                    total += child_weight
                    stack.append((index + 1, value * power, child_weight))
                    power *= p
                    alpha += 1
        return total
