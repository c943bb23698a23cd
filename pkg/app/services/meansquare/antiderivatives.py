"""
Antiderivatives of (A - P(x))^2 on one piece where the summatory value A is constant.

P(x) = alpha x log x + beta x + eta x^theta. Short pieces near x = 1 use the
closed forms below in mpmath; long-range pieces expand P around the left
endpoint, where the closed forms would cancel catastrophically in doubles.
"""

from typing import Tuple

import mpmath
import numpy as np


class ClosedForms:
    """Antiderivatives of the basis products appearing in (A - P)^2."""

    @staticmethod
    def x_log_x(x):
        return x ** 2 / 2 * mpmath.log(x) - x ** 2 / 4

    @staticmethod
    def power(x, a):
        """Antiderivative of x^a, a != -1."""
        return mpmath.power(x, a + 1) / (a + 1)

    @staticmethod
    def power_log(x, a):
        """Antiderivative of x^a log x, a != -1."""
        return mpmath.power(x, a + 1) * (mpmath.log(x) / (a + 1) - 1 / (a + 1) ** 2)

    @staticmethod
    def x2_log2(x):
        log_x = mpmath.log(x)
        return x ** 3 * (log_x ** 2 / 3 - 2 * log_x / 9 + mpmath.mpf(2) / 27)


def exact_piece(coefficients: Tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf, mpmath.mpf],
                count, a, b) -> mpmath.mpf:
    """
    Integral of (count - P(x))^2 over [a, b] by closed forms.

    Args:
        coefficients: (alpha, beta, eta, theta) as mpf; eta = 0 drops the power term
        count: Summatory value on the piece
        a: Left endpoint >= 1
        b: Right endpoint

    Returns:
        The integral as mpf at the current working precision
    """
    alpha, beta, eta, theta = coefficients
    a, b, count = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(count)
    forms = ClosedForms

    def linear(x):
        value = alpha * forms.x_log_x(x) + beta * forms.power(x, 1)
        if eta:
            value += eta * forms.power(x, theta)
        return value

    def square(x):
        value = (alpha ** 2 * forms.x2_log2(x)
                 + 2 * alpha * beta * forms.power_log(x, 2)
                 + beta ** 2 * forms.power(x, 2))
        if eta:
            value += (2 * alpha * eta * forms.power_log(x, 1 + theta)
                      + 2 * beta * eta * forms.power(x, 1 + theta)
                      + eta ** 2 * forms.power(x, 2 * theta))
        return value

    return (count ** 2 * (b - a)
            - 2 * count * (linear(b) - linear(a))
            + (square(b) - square(a)))


def _generalised_binomial(theta: float, j: int) -> float:
    value = 1.0
    for i in range(j):
        value *= (theta - i) / (i + 1)
    return value


def taylor_pieces(coefficients: Tuple[float, float, float, float], counts: np.ndarray,
                  a: np.ndarray, b: np.ndarray, terms: int, scale: float = 1.0) -> np.ndarray:
    """
    Vectorised integrals of (scale * (count - P(x)))^2 over pieces [a, b].

    With u = x - a, P(a + u) - P(a) = sum_{j >= 1} q_j u^j where
      q_1 = alpha (log a + 1) + beta + eta theta a^(theta - 1)
      q_j = alpha (-1)^j / (j (j - 1) a^(j - 1)) + eta C(theta, j) a^(theta - j)
    and the square of c - Q(u), c = count - P(a), integrates term by term.
    """
    alpha, beta, eta, theta = coefficients
    h = b - a
    log_a = np.log(a)
    main_at_a = alpha * a * log_a + beta * a
    if eta:
        main_at_a = main_at_a + eta * np.power(a, theta)
    c = scale * (counts - main_at_a)

    q = []
    first = alpha * (log_a + 1.0) + beta
    if eta:
        first = first + eta * theta * np.power(a, theta - 1.0)
    q.append(scale * first)
    for j in range(2, terms + 1):
        coefficient = alpha * (-1.0) ** j / (j * (j - 1)) * np.power(a, 1.0 - j)
        if eta:
            coefficient = coefficient + eta * _generalised_binomial(theta, j) * np.power(a, theta - j)
        q.append(scale * coefficient)

    h_powers = [np.ones_like(h)]
    for _ in range(2 * terms + 1):
        h_powers.append(h_powers[-1] * h)

    linear = np.zeros_like(h)
    for j, qj in enumerate(q, start = 1):
        linear += qj * h_powers[j + 1] / (j + 1)

    quadratic = np.zeros_like(h)
    for i, qi in enumerate(q, start = 1):
        quadratic += qi * qi * h_powers[2 * i + 1] / (2 * i + 1)
        for j in range(i + 1, terms + 1):
            quadratic += 2.0 * qi * q[j - 1] * h_powers[i + j + 1] / (i + j + 1)

    return c * c * h - 2.0 * c * linear + quadratic
