"""
Numerical estimate of a mean-square constant with its tail control.
"""

from dataclasses import dataclass, field
from typing import Optional

import mpmath

from app.constants import ConstantKind, SummationMethod, CONVERGENCE_TOLERANCE


@dataclass(frozen = True)
class ConstantEstimate:
    """
    Value of B_k, C_k or Tong's constant plus the error budget behind it.

    The kind is None for constants that are not one of the series B_k, C_k
    (Tong's constant, the divisor-square series).
    """

    value: mpmath.mpf
    tail_bound: float
    method: SummationMethod
    parameters: dict = field(default_factory = dict)
    kind: Optional[ConstantKind] = None
    k: Optional[int] = None
    label: Optional[str] = None

    def __repr__(self) -> str:
        name = self.label or (self.kind.value if self.kind else 'constant')
        return (f"<ConstantEstimate({name}, k={self.k}, value={mpmath.nstr(self.value, 15)}, "
                f"tail_bound={self.tail_bound:.3g}, method={self.method.value})>")

    @property
    def converged(self) -> bool:
        """Whether the tail bound is below the convergence tolerance."""
        return self.tail_bound < CONVERGENCE_TOLERANCE

    def agrees_with(self, other: 'ConstantEstimate') -> bool:
        """Agreement within the sum of both tail bounds."""
        return abs(float(self.value - other.value)) <= self.tail_bound + other.tail_bound

    def to_dict(self) -> dict:
        """Convert estimate to its JSON representation."""
        return {
            'kind': self.label or (self.kind.value if self.kind else None),
            'k': self.k,
            'value': mpmath.nstr(self.value, mpmath.mp.dps, strip_zeros = False),
            'tail_bound': self.tail_bound,
            'method': self.method.value,
            'converged': self.converged,
            'parameters': self.parameters
        }
