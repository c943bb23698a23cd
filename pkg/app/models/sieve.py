"""
Sieve range and table models.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.errors import DomainError


@dataclass(frozen = True)
class SieveRange:
    """
    Half-open integer range [lo, hi) handled by one sieve call.
    """

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 1:
            raise DomainError(f"Sieve range must start at 1 or later, got lo={self.lo}")
        if self.hi <= self.lo:
            raise DomainError(f"Sieve range is empty: [{self.lo}, {self.hi})")

    def __len__(self) -> int:
        return self.hi - self.lo

    def __repr__(self) -> str:
        return f"<SieveRange([{self.lo}, {self.hi}))>"

    def to_dict(self) -> dict:
        """Convert range to dictionary representation."""
        return {'lo': self.lo, 'hi': self.hi}


@dataclass(frozen = True, eq = False)
class SieveTable:
    """
    Exact arithmetic-function values for every n in a SieveRange.

    Arrays are indexed by n - range.lo and are read-only once built.
    """

    range: SieveRange
    d: np.ndarray
    mu: np.ndarray
    dk: Optional[np.ndarray] = None
    d11k: Optional[np.ndarray] = None
    k: Optional[int] = None

    def __post_init__(self):
        for array in (self.d, self.mu, self.dk, self.d11k):
            if array is not None:
                array.setflags(write = False)

    def __repr__(self) -> str:
        return f"<SieveTable(range=[{self.range.lo}, {self.range.hi}), k={self.k})>"

    def __len__(self) -> int:
        return len(self.range)

    @property
    def n(self) -> np.ndarray:
        """The integers covered by the table."""
        return np.arange(self.range.lo, self.range.hi, dtype = np.int64)

    def value(self, name: str, n: int) -> int:
        """
        Look up a single tabulated value.

        Args:
            name: One of 'd', 'mu', 'dk', 'd11k'
            n: Integer inside the table's range

        Returns:
            The tabulated value as a Python int
        """
        array = getattr(self, name)
        if array is None:
            raise DomainError(f"Table was built without '{name}' (k={self.k})")
        if not self.range.lo <= n < self.range.hi:
            raise DomainError(f"{n} lies outside {self.range!r}")
        return int(array[n - self.range.lo])

    def to_dict(self) -> dict:
        """Convert table to dictionary representation."""
        return {
            'range': self.range.to_dict(),
            'k': self.k,
            'd': self.d.tolist(),
            'mu': self.mu.tolist(),
            'dk': self.dk.tolist() if self.dk is not None else None,
            'd11k': self.d11k.tolist() if self.d11k is not None else None
        }
