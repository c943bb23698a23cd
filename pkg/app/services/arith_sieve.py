"""
Segmented sieve for d(n), mu(n), d^(k)(n) and d(1,1,k;n).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, Optional, Tuple

import numpy as np

from app.config import Config
from app.errors import DomainError, ResourceLimitError
from app.models import SieveRange, SieveTable

logger = logging.getLogger(__name__)


def iroot(n: int, k: int) -> int:
    """Largest integer r with r^k <= n (n >= 0)."""
    if n < 1:
        return 0
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def iroot_array(values: np.ndarray, k: int) -> np.ndarray:
    """Elementwise integer k-th root of a nonnegative int64 array."""
    values = np.asarray(values, dtype = np.int64)
    roots = np.floor(np.power(values.astype(np.float64), 1.0 / k)).astype(np.int64)
    roots = np.where(roots ** k > values, roots - 1, roots)
    roots = np.where((roots + 1) ** k <= values, roots + 1, roots)
    return roots


def prime_table(limit: int) -> np.ndarray:
    """All primes p <= limit as int64."""
    if limit < 2:
        return np.zeros(0, dtype = np.int64)
    is_prime = np.ones(limit + 1, dtype = bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


class SieveService:
    """
    Service class producing exact multiplicative-function tables.

    Segments are sieved independently; small auxiliary tables (d and mu
    below hi/2^k) are built once and shared read-only between workers.
    """

    def __init__(self, config_class = Config, cache = None):
        self.segment_size = config_class.SEGMENT_SIZE
        self.max_limit = config_class.MAX_SIEVE_LIMIT
        self.threads = max(1, int(config_class.THREADS))
        self.cache = cache
        self._primes = np.zeros(0, dtype = np.int64)
        self._prime_limit = 1
        self._small_d = np.ones(2, dtype = np.int32)
        self._small_mu = np.ones(2, dtype = np.int8)

    def __repr__(self) -> str:
        return f"<SieveService(segment_size={self.segment_size}, threads={self.threads})>"

    # ------------------------------------------------------------------
    # Prime and auxiliary tables
    # ------------------------------------------------------------------

    def primes_upto(self, limit: int) -> np.ndarray:
        """Primes p <= limit, extending the internal prime table on demand."""
        if limit > self._prime_limit:
            self._primes = prime_table(limit)
            self._prime_limit = limit
        return self._primes[:np.searchsorted(self._primes, limit, side = 'right')]

    def _ensure_small_tables(self, limit: int) -> None:
        if limit < len(self._small_d):
            return
        limit = max(limit, 2 * (len(self._small_d) - 1))
        logger.debug(f"Building auxiliary divisor/mobius tables up to {limit}")
        d, mu = self._divisor_and_mobius(1, limit + 1)
        self._small_d = np.concatenate([[0], d]).astype(np.int32)
        self._small_mu = np.concatenate([[0], mu]).astype(np.int8)

    def _prepare(self, hi: int, k: Optional[int]) -> None:
        self.primes_upto(math.isqrt(hi - 1) + 1)
        if k:
            top = hi - 1
            self._ensure_small_tables(max(top >> k, iroot(top, k), 1))

    # ------------------------------------------------------------------
    # Segment kernels
    # ------------------------------------------------------------------

    def _divisor_and_mobius(self, lo: int, hi: int) -> Tuple[np.ndarray, np.ndarray]:
        size = hi - lo
        remaining = np.arange(lo, hi, dtype = np.int64)
        d = np.ones(size, dtype = np.int32)
        mu = np.ones(size, dtype = np.int8)

        for p in self.primes_upto(math.isqrt(hi - 1)):
            p = int(p)
            start = (-lo) % p
            if start >= size:
                continue
            quotient = remaining[start::p] // p
            exponent = np.ones(len(quotient), dtype = np.int32)
            divisible = quotient % p == 0
            while divisible.any():
                exponent += divisible
                quotient = np.where(divisible, quotient // p, quotient)
                divisible = quotient % p == 0
            remaining[start::p] = quotient
            d[start::p] *= exponent + 1
            mu[start::p] = np.where(exponent == 1, -mu[start::p], 0)

        # One prime factor above sqrt(hi) may remain
        large = remaining > 1
        d[large] *= 2
        mu[large] = -mu[large]
        return d, mu

    def _kfree_counts(self, lo: int, hi: int, d: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
        dk = np.zeros(hi - lo, dtype = np.int32)
        d11k = np.zeros(hi - lo, dtype = np.int32)
        t = 1
        while t ** k < hi:
            step = t ** k
            m_lo = -(-lo // step)
            m_hi = (hi - 1) // step
            if m_lo <= m_hi:
                start = step * m_lo - lo
                values = d if t == 1 else self._small_d[m_lo:m_hi + 1]
                d11k[start::step] += values
                sign = 1 if t == 1 else int(self._small_mu[t])
                if sign:
                    dk[start::step] += sign * values
            t += 1
        return dk, d11k

    def _compute(self, sieve_range: SieveRange, k: Optional[int]) -> SieveTable:
        lo, hi = sieve_range.lo, sieve_range.hi
        d, mu = self._divisor_and_mobius(lo, hi)
        dk = d11k = None
        if k:
            dk, d11k = self._kfree_counts(lo, hi, d, k)
        return SieveTable(range = sieve_range, d = d, mu = mu, dk = dk, d11k = d11k, k = k)

    # ------------------------------------------------------------------
    # Public operations
    # ------------------------------------------------------------------

    def sieve_range(self, sieve_range: SieveRange, k: Optional[int] = None) -> SieveTable:
        """
        Tabulate d, mu and optionally d^(k), d(1,1,k;.) on one segment.

        Args:
            sieve_range: Half-open range [lo, hi) within the segment size
            k: Optional k >= 2

        Returns:
            Immutable SieveTable
        """
        if k is not None and k < 2:
            raise DomainError(f"k must be >= 2, got {k}")
        if len(sieve_range) > self.segment_size:
            raise ResourceLimitError(
                f"Range {sieve_range!r} exceeds the segment size {self.segment_size}; "
                f"use sieve_segments for longer ranges")
        if sieve_range.hi - 1 > self.max_limit:
            raise ResourceLimitError(f"Range {sieve_range!r} exceeds the sieve limit {self.max_limit}")

        if self.cache is not None:
            cached = self.cache.load(sieve_range, k)
            if cached is not None:
                logger.debug(f"Loaded {sieve_range!r} from cache")
                return cached

        self._prepare(sieve_range.hi, k)
        table = self._compute(sieve_range, k)
        if self.cache is not None:
            self.cache.store(table)
        return table

    def sieve_segments(self, lo: int, hi: int, k: Optional[int] = None) -> Iterator[SieveTable]:
        """
        Yield consecutive tables covering [lo, hi) in ascending order.

        Segments are computed by a thread pool; the order of the yielded
        tables never depends on the number of workers.
        """
        if hi <= lo:
            return
        if hi - 1 > self.max_limit:
            raise ResourceLimitError(
                f"Sieve coverage up to {hi - 1} requested, limit is {self.max_limit}")

        self._prepare(hi, k)
        ranges = [SieveRange(start, min(start + self.segment_size, hi))
                  for start in range(lo, hi, self.segment_size)]
        logger.debug(f"Sieving [{lo}, {hi}) in {len(ranges)} segments with {self.threads} threads")

        if self.threads == 1:
            for sieve_range in ranges:
                yield self.sieve_range(sieve_range, k)
            return

        with ThreadPoolExecutor(max_workers = self.threads) as pool:
            yield from pool.map(lambda r: self.sieve_range(r, k), ranges)

    def prefix_table(self, n_max: int, k: Optional[int] = None) -> SieveTable:
        """Monolithic table over [1, n_max] assembled from segments."""
        if n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {n_max}")
        tables = list(self.sieve_segments(1, n_max + 1, k))

        def join(name: str) -> Optional[np.ndarray]:
            if getattr(tables[0], name) is None:
                return None
            return np.concatenate([getattr(table, name) for table in tables])

        return SieveTable(range = SieveRange(1, n_max + 1), d = join('d'), mu = join('mu'),
                          dk = join('dk'), d11k = join('d11k'), k = k)

    def summatory_prefix(self, name: str, n_max: int, k: Optional[int] = None) -> np.ndarray:
        """
        Cumulative sums of a tabulated function.

        Returns:
            int64 array S with S[0] = 0 and S[n] = sum_{m <= n} f(m)
        """
        table = self.prefix_table(n_max, k)
        values = getattr(table, name)
        if values is None:
            raise DomainError(f"'{name}' needs k")
        prefix = np.zeros(n_max + 1, dtype = np.int64)
        np.cumsum(values, dtype = np.int64, out = prefix[1:])
        return prefix

    def mertens(self, u: int) -> int:
        """Exact M(u) = sum_{n <= u} mu(n)."""
        if u < 1:
            raise DomainError(f"mertens needs u >= 1, got {u}")
        return MertensCounter(self).advance(int(u))

    def mertens_table(self, u: int) -> np.ndarray:
        """int64 array M with M[0] = 0 and M[n] the Mertens function."""
        if u < 1:
            return np.zeros(1, dtype = np.int64)
        return self.summatory_prefix('mu', int(u))

    @staticmethod
    def mertens_envelope(u: float, c: float) -> float:
        """
        Bound shape u * exp(-c * delta(u)) with
        delta(u) = (log u)^(3/5) (log log u)^(-1/5).

        Returns u itself for 2 <= u <= e, where log log u <= 0.
        """
        if c <= 0:
            raise DomainError(f"Envelope constant must be positive, got c={c}")
        if u < 2:
            raise DomainError(f"Envelope needs u >= 2, got u={u}")
        if u <= math.e:
            return float(u)
        return float(u * math.exp(-c * log_power_saving(u)))


def log_power_saving(u: float) -> float:
    """delta(u) = (log u)^(3/5) (log log u)^(-1/5), defined for u > e."""
    log_u = math.log(u)
    return log_u ** 0.6 * math.log(log_u) ** -0.2


class MertensCounter:
    """
    Incremental Mertens function over an increasing sequence of arguments.

    Each call to advance sieves only the integers beyond the previous
    argument, so a whole increasing sequence costs one sieve pass.
    """

    def __init__(self, sieve: SieveService):
        self.sieve = sieve
        self.position = 0
        self.value = 0

    def __repr__(self) -> str:
        return f"<MertensCounter(M({self.position})={self.value})>"

    def advance(self, u: int) -> int:
        """Return M(u); u must not be smaller than the previous argument."""
        if u < self.position:
            raise DomainError(f"MertensCounter moves forward only: {u} < {self.position}")
        if u > self.position:
            for table in self.sieve.sieve_segments(self.position + 1, u + 1):
                self.value += int(table.mu.sum(dtype = np.int64))
            self.position = u
        return self.value
