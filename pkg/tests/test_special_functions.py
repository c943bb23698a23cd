"""
Tests for zeta values, derivatives and the double-double helpers.
"""

import math

import mpmath
import numpy as np
import pytest

from app.errors import DomainError, PoleError
from app.services.analytic.double_double import (
    DoubleDoubleAccumulator, two_sum, two_prod, sqrt_product, reduced_turns
)


def test_zeta_two(toolkit):
    value = toolkit.special.zeta(2)
    assert abs(value - mpmath.pi ** 2 / 6) < mpmath.mpf(10) ** -25


def test_zeta_half(toolkit):
    assert float(toolkit.special.zeta(0.5)) == pytest.approx(-1.4603545088095868, abs = 1e-14)


def test_zeta_pole(toolkit):
    with pytest.raises(PoleError):
        toolkit.special.zeta(1)
    with pytest.raises(PoleError):
        toolkit.special.zeta_alternating(1)


def test_two_routes_agree(toolkit):
    for s in (mpmath.mpf(3) / 2, 3, mpmath.mpf(1) / 3, 4):
        difference = toolkit.special.zeta(s) - toolkit.special.zeta_alternating(s)
        assert abs(difference) < mpmath.mpf(10) ** -25
    assert abs(toolkit.special.zeta_alternating(3) - toolkit.special.apery_constant()) < mpmath.mpf(10) ** -25


def test_zeta_prime(toolkit):
    for s in (2, 3, mpmath.mpf(5) / 2):
        expected = mpmath.zeta(s, derivative = 1)
        assert abs(toolkit.special.zeta_prime(s) - expected) < mpmath.mpf(10) ** -25
    with pytest.raises(DomainError):
        toolkit.special.zeta_prime(1)


def test_euler_gamma(toolkit):
    assert float(toolkit.special.euler_gamma()) == pytest.approx(0.5772156649015329)


def test_prime_zeta_tail(toolkit):
    primes = toolkit.sieve.primes_upto(100)
    expected = mpmath.primezeta(2) - mpmath.fsum(mpmath.mpf(int(p)) ** -2 for p in primes)
    tail = toolkit.special.prime_zeta_tail(2, primes)
    assert abs(tail - expected) < mpmath.mpf(10) ** -20
    assert 0 < tail < 0.003
    with pytest.raises(DomainError):
        toolkit.special.prime_zeta_tail(1, primes)


def test_two_sum_and_two_prod_are_exact():
    s, e = two_sum(1.0, 1e-20)
    assert s == 1.0
    assert e == 1e-20
    a = 1.0 + 2.0 ** -30
    p, e = two_prod(a, a)
    assert p == 1.0 + 2.0 ** -29
    assert e == 2.0 ** -60


def test_sqrt_product():
    hi, lo = sqrt_product(2.0, 8.0)
    assert hi == 4.0
    assert lo == 0.0
    hi, lo = sqrt_product(np.array([2.0, 3.0]), 1e13)
    expected = [mpmath.sqrt(mpmath.mpf(2) * 10 ** 13), mpmath.sqrt(mpmath.mpf(3) * 10 ** 13)]
    for h, l, value in zip(hi, lo, expected):
        assert abs((mpmath.mpf(h) + mpmath.mpf(l)) - value) < value * mpmath.mpf(2) ** -95


def test_reduced_turns_matches_direct_phase():
    u = 12.75
    hi, lo = sqrt_product(np.array([1.0]), u)
    turns = float(reduced_turns(hi, lo)[0])
    assert math.cos(2 * math.pi * turns) == pytest.approx(math.cos(4 * math.pi * math.sqrt(u) - math.pi / 4))


def test_double_double_accumulator():
    accumulator = DoubleDoubleAccumulator(1.0)
    for _ in range(10):
        accumulator.add(1e-17)
    assert accumulator.hi == 1.0
    assert accumulator.lo == pytest.approx(1e-16, rel = 1e-12)

    bulk = DoubleDoubleAccumulator()
    bulk.add_array(np.array([1e16, 1.0, -1e16, 1.0]))
    assert bulk.value == 2.0
