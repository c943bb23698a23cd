"""
Dyadic box model for near-resonance counting.
"""

from dataclasses import dataclass

from app.errors import DomainError


@dataclass(frozen = True)
class DyadicBox:
    """
    Parameter box d_j in (D_j, 2D_j], n_j in (N_j, 2N_j] with spacing delta.
    """

    D1: int
    D2: int
    N1: int
    N2: int
    k: int
    delta: float

    def __post_init__(self):
        for name in ('D1', 'D2', 'N1', 'N2'):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.k < 2:
            raise DomainError(f"k must be >= 2, got {self.k}")
        if self.delta < 0:
            raise DomainError(f"delta must be >= 0, got {self.delta}")

    def __repr__(self) -> str:
        return (f"<DyadicBox(D1={self.D1}, D2={self.D2}, N1={self.N1}, N2={self.N2}, "
                f"k={self.k}, delta={self.delta})>")

    @property
    def side_sizes(self) -> tuple:
        """Number of (d, n) pairs on each side."""
        return self.D1 * self.N1, self.D2 * self.N2

    @property
    def candidates(self) -> int:
        """Number of quadruples in the box."""
        side1, side2 = self.side_sizes
        return side1 * side2

    def swapped(self) -> 'DyadicBox':
        """The box with sides 1 and 2 exchanged."""
        return DyadicBox(self.D2, self.D1, self.N2, self.N1, self.k, self.delta)

    def to_dict(self) -> dict:
        """Convert box to dictionary representation."""
        return {
            'D1': self.D1, 'D2': self.D2, 'N1': self.N1, 'N2': self.N2,
            'k': self.k, 'delta': self.delta
        }
