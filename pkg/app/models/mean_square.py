"""
Mean-square report model.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import mpmath

from app.constants import Problem


@dataclass(frozen = True)
class MeanSquareReport:
    """
    Exact integral of the squared error term over [1, T] next to the
    predicted main term  constant / (6 pi^2) * T^(3/2).
    """

    problem: Problem
    T: float
    integral: float
    predicted_main: float
    residual: float
    constant: mpmath.mpf
    predicted_error_exponent: Optional[float]
    samples: List[Tuple[float, float]] = field(default_factory = list)
    k: Optional[int] = None
    residual_slope: Optional[float] = None
    delta_T: Optional[float] = None

    def __repr__(self) -> str:
        return (f"<MeanSquareReport(problem={self.problem.value}, k={self.k}, T={self.T}, "
                f"ratio={self.ratio:.6f})>")

    @property
    def ratio(self) -> float:
        """Integral divided by the predicted main term."""
        return self.integral / self.predicted_main

    def to_dict(self) -> dict:
        """Convert report to dictionary representation."""
        return {
            'problem': self.problem.value,
            'k': self.k,
            'T': self.T,
            'integral': self.integral,
            'predicted_main': self.predicted_main,
            'residual': self.residual,
            'ratio': self.ratio,
            'constant': mpmath.nstr(self.constant, mpmath.mp.dps, strip_zeros = False),
            'predicted_error_exponent': self.predicted_error_exponent,
            'residual_slope': self.residual_slope,
            'delta_T': self.delta_T,
            'samples': [{'T': t, 'ratio': r} for t, r in self.samples]
        }
