"""
Truncation parameters and cosine-sum terms for the Voronoi series.
"""

import math
from dataclasses import dataclass

from app.errors import DomainError


@dataclass(frozen = True)
class TruncationParams:
    """
    Cutoffs for Voronoi truncation (z) and hyperbola splitting (y).
    """

    z: int
    y: float
    k: int

    def __post_init__(self):
        if self.z < 1:
            raise DomainError(f"Voronoi cutoff z must be >= 1, got {self.z}")
        if self.y < 1:
            raise DomainError(f"Hyperbola cutoff y must be >= 1, got {self.y}")
        if self.k < 2:
            raise DomainError(f"k must be >= 2, got {self.k}")

    def __repr__(self) -> str:
        return f"<TruncationParams(z={self.z}, y={self.y}, k={self.k})>"

    @property
    def d_max(self) -> int:
        """Largest d with d <= y."""
        return int(math.floor(self.y))

    def to_dict(self) -> dict:
        """Convert parameters to dictionary representation."""
        return {'z': self.z, 'y': self.y, 'k': self.k}


@dataclass(frozen = True)
class CosSumTerm:
    """
    One term amplitude * cos(frequency * sqrt(x) + phase) of a Voronoi-type sum.
    """

    amplitude: float
    frequency: float
    phase: float = -math.pi / 4

    def __post_init__(self):
        if self.amplitude <= 0 or self.frequency <= 0:
            raise DomainError(f"Cosine term needs positive amplitude and frequency, got {self!r}")

    def __call__(self, x: float) -> float:
        return self.amplitude * math.cos(self.frequency * math.sqrt(x) + self.phase)

    def to_dict(self) -> dict:
        """Convert term to dictionary representation."""
        return {'amplitude': self.amplitude, 'frequency': self.frequency, 'phase': self.phase}
