"""
High-precision zeta values, zeta derivatives and Euler's constant.
"""

import logging
from typing import Iterable

import mpmath

from app.config import Config
from app.errors import DomainError, PoleError

logger = logging.getLogger(__name__)

# Euler-Maclaurin cut point and number of Bernoulli corrections (B_2 .. B_20)
EM_CUTOFF = 20
EM_CORRECTIONS = 10

# Terms in Borwein's acceleration of the alternating zeta series
BORWEIN_TERMS = 60


class SpecialFunctions:
    """Service class for zeta-type special functions at fixed working precision."""

    def __init__(self, config_class = Config):
        self.dps = config_class.MPMATH_DPS
        with mpmath.workdps(self.dps + 10):
            self._bernoulli = [
                mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j)
                for j in range(1, EM_CORRECTIONS + 1)
            ]
            self._borwein_d = self._borwein_weights(BORWEIN_TERMS)

    def __repr__(self) -> str:
        return f"<SpecialFunctions(dps={self.dps})>"

    @staticmethod
    def _check_pole(s) -> mpmath.mpf:
        s = mpmath.mpf(s)
        if s == 1:
            raise PoleError("zeta has a pole at s = 1")
        return s

    def zeta(self, s) -> mpmath.mpf:
        """
        Riemann zeta function by Euler-Maclaurin summation.

        Args:
            s: Real argument, s != 1 (0 < s < 1 handled by the same
               formula, which continues analytically)

        Returns:
            zeta(s) to about the working precision
        """
        with mpmath.workdps(self.dps + 10):
            s = self._check_pole(s)
            n_cut = mpmath.mpf(EM_CUTOFF)
            total = mpmath.fsum(mpmath.power(n, -s) for n in range(1, EM_CUTOFF))
            total += mpmath.power(n_cut, 1 - s) / (s - 1) + mpmath.power(n_cut, -s) / 2

            rising = s
            for j, coefficient in enumerate(self._bernoulli, start = 1):
                total += coefficient * rising * mpmath.power(n_cut, -s - 2 * j + 1)
                rising *= (s + 2 * j - 1) * (s + 2 * j)
        return +total

    def zeta_prime(self, s) -> mpmath.mpf:
        """
        Derivative of zeta for s > 1, by differentiating the Euler-Maclaurin
        formula term by term.
        """
        s = mpmath.mpf(s)
        if s <= 1:
            raise DomainError(f"zeta_prime is provided for s > 1, got s={s}")

        with mpmath.workdps(self.dps + 10):
            n_cut = mpmath.mpf(EM_CUTOFF)
            log_cut = mpmath.log(n_cut)
            total = -mpmath.fsum(mpmath.log(n) * mpmath.power(n, -s) for n in range(2, EM_CUTOFF))
            head = mpmath.power(n_cut, 1 - s)
            total += -log_cut * head / (s - 1) - head / (s - 1) ** 2
            total += -log_cut * mpmath.power(n_cut, -s) / 2

            for j, coefficient in enumerate(self._bernoulli, start = 1):
                factors = [s + i for i in range(2 * j - 1)]
                rising = mpmath.fprod(factors)
                rising_prime = rising * mpmath.fsum(1 / f for f in factors)
                tail = mpmath.power(n_cut, -s - 2 * j + 1)
                total += coefficient * tail * (rising_prime - rising * log_cut)
        return +total

    def euler_gamma(self) -> mpmath.mpf:
        """Euler's constant at the working precision."""
        with mpmath.workdps(self.dps):
            return +mpmath.euler

    @staticmethod
    def _borwein_weights(n: int) -> list:
        weights = []
        partial = mpmath.mpf(0)
        for i in range(n + 1):
            partial += (mpmath.factorial(n + i - 1) * mpmath.power(4, i)
                        / (mpmath.factorial(n - i) * mpmath.factorial(2 * i)))
            weights.append(n * partial)
        return weights

    def zeta_alternating(self, s) -> mpmath.mpf:
        """
        Zeta through Borwein's accelerated alternating (eta) series.

        Independent of the Euler-Maclaurin route; valid for s > 0, s != 1.
        """
        s = self._check_pole(s)
        if s <= 0:
            raise DomainError(f"Alternating series route needs s > 0, got s={s}")

        with mpmath.workdps(self.dps + 10):
            d = self._borwein_d
            n = BORWEIN_TERMS
            eta = -mpmath.fsum(
                (-1) ** j * (d[j] - d[n]) / mpmath.power(j + 1, s) for j in range(n)
            ) / d[n]
            value = eta / (1 - mpmath.power(2, 1 - s))
        return +value

    def apery_constant(self) -> mpmath.mpf:
        """zeta(3) from the central binomial series 5/2 * sum (-1)^(n+1) / (n^3 C(2n, n))."""
        with mpmath.workdps(self.dps + 10):
            value = mpmath.mpf(5) / 2 * mpmath.fsum(
                (-1) ** (n + 1) / (mpmath.mpf(n) ** 3 * mpmath.binomial(2 * n, n))
                for n in range(1, 80)
            )
        return +value

    def prime_zeta_tail(self, s, primes: Iterable[int]) -> mpmath.mpf:
        """
        Sum of p^(-s) over primes beyond the given list.

        Args:
            s: Real exponent > 1
            primes: Every prime up to some bound P, ascending

        Returns:
            sum_{p > P} p^(-s), clamped at zero
        """
        s = mpmath.mpf(s)
        if s <= 1:
            raise DomainError(f"Prime zeta tail needs s > 1, got s={s}")
        with mpmath.workdps(self.dps + 10):
            head = mpmath.fsum(mpmath.power(int(p), -s) for p in primes)
            tail = mpmath.primezeta(s) - head
        if tail < 0:
            logger.debug(f"Prime zeta tail at s={s} below working precision, clamped to zero")
            return mpmath.mpf(0)
        return +tail
