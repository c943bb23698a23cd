"""
Main-term models for the three divisor problems and error-term samples.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np

from app.constants import Problem, BasisTag


@dataclass(frozen = True)
class MainTermModel:
    """
    Analytic main term  alpha*x*log(x) + beta*x + eta*x^(1/k).

    Each problem uses a subset of the basis; missing coefficients are zero.
    """

    problem: Problem
    coefficients: List[Tuple[BasisTag, mpmath.mpf]]
    constants_used: Dict[str, dict] = field(default_factory = dict)
    k: Optional[int] = None

    def __repr__(self) -> str:
        terms = ', '.join(f"{tag.value}: {mpmath.nstr(value, 12)}" for tag, value in self.coefficients)
        return f"<MainTermModel(problem={self.problem.value}, k={self.k}, {terms})>"

    def coefficient(self, tag: BasisTag) -> mpmath.mpf:
        """Coefficient of a basis function (zero when absent)."""
        for basis, value in self.coefficients:
            if basis == tag:
                return value
        return mpmath.mpf(0)

    @property
    def theta(self) -> float:
        """Exponent of the x^(1/k) basis function (zero when unused)."""
        return 1.0 / self.k if self.k else 0.0

    def float_coefficients(self) -> Tuple[float, float, float, float]:
        """Return (alpha, beta, eta, theta) rounded to doubles."""
        return (
            float(self.coefficient(BasisTag.X_LOG_X)),
            float(self.coefficient(BasisTag.X)),
            float(self.coefficient(BasisTag.X_POW_1_OVER_K)),
            self.theta
        )

    def evaluate(self, x) -> mpmath.mpf:
        """
        Evaluate the main term at the working mpmath precision.

        Args:
            x: Point of evaluation, x >= 1

        Returns:
            Main term value as mpf
        """
        x = mpmath.mpf(x)
        total = mpmath.mpf(0)
        for tag, value in self.coefficients:
            if tag == BasisTag.X_LOG_X:
                total += value * x * mpmath.log(x)
            elif tag == BasisTag.X:
                total += value * x
            else:
                total += value * mpmath.power(x, mpmath.mpf(1) / self.k)
        return total

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate the main term in double precision on an array."""
        xs = np.asarray(xs, dtype = np.float64)
        alpha, beta, eta, theta = self.float_coefficients()
        values = alpha * xs * np.log(xs) + beta * xs
        if eta != 0.0:
            values = values + eta * np.power(xs, theta)
        return values

    def to_dict(self) -> dict:
        """Convert model to dictionary representation."""
        return {
            'problem': self.problem.value,
            'k': self.k,
            'coefficients': [
                {'basis': tag.value, 'value': mpmath.nstr(value, mpmath.mp.dps)}
                for tag, value in self.coefficients
            ],
            'constants_used': self.constants_used
        }


@dataclass(frozen = True)
class ErrorTermSample:
    """
    One value of an error term: exact summatory value minus main term.
    """

    x: float
    value: float
    summatory: int
    main: mpmath.mpf

    def __repr__(self) -> str:
        return f"<ErrorTermSample(x={self.x}, summatory={self.summatory}, value={self.value:.12g})>"

    def to_dict(self) -> dict:
        """Convert sample to dictionary representation."""
        return {
            'x': self.x,
            'summatory': self.summatory,
            'main': float(self.main),
            'delta': self.value
        }
