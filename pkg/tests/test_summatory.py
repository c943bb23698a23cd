"""
Tests for summatory functions, error terms and the hyperbola decompositions.
"""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from app.constants import Problem, BasisTag
from app.errors import DomainError, ResourceLimitError
from tests.oracles import divisor_count, kfree_divisor_count, d11k


def test_big_d_small_values(toolkit):
    assert toolkit.summatory.big_d(1) == 1
    assert toolkit.summatory.big_d(10) == 27
    assert toolkit.summatory.big_d(10.7) == 27
    assert toolkit.summatory.big_d(Fraction(43, 4)) == 27


def test_big_d_matches_prefix_sums(toolkit):
    prefix = toolkit.sieve.summatory_prefix('d', 5000)
    for x in (2, 99, 100, 101, 1024, 4999, 5000):
        assert toolkit.summatory.big_d(x) == prefix[x]


def test_big_d_limits(toolkit):
    with pytest.raises(DomainError):
        toolkit.summatory.big_d(0.5)
    with pytest.raises(ResourceLimitError):
        toolkit.summatory.big_d(10 ** 17)


def test_kfree_and_threedim_summatory_brute_force(toolkit):
    for k in (2, 3):
        running_kfree = 0
        running_threedim = 0
        for n in range(1, 401):
            running_kfree += kfree_divisor_count(n, k)
            running_threedim += d11k(n, k)
            if n % 50 == 0:
                assert toolkit.summatory.kfree_summatory(n, k) == running_kfree
                assert toolkit.summatory.threedim_summatory(n, k) == running_threedim


def test_summatory_prefix_agrees_with_hyperbola_sums(toolkit):
    prefix = toolkit.summatory.summatory_prefix(Problem.KFREE, 3000, 3)
    assert prefix[3000] == toolkit.summatory.kfree_summatory(3000, 3)
    prefix = toolkit.summatory.summatory_prefix(Problem.THREEDIM, 3000, 2)
    assert prefix[2999] == toolkit.summatory.threedim_summatory(2999.5, 2)


def test_main_term_models(toolkit):
    gamma = mpmath.euler
    dirichlet = toolkit.summatory.main_term_model(Problem.DIRICHLET)
    assert dirichlet.coefficient(BasisTag.X_LOG_X) == 1
    assert float(dirichlet.coefficient(BasisTag.X)) == pytest.approx(float(2 * gamma - 1))

    c1, c2 = toolkit.summatory.kfree_coefficients(3)
    zeta3 = mpmath.zeta(3)
    assert float(c1) == pytest.approx(float(1 / zeta3), rel = 1e-14)
    expected_c2 = (2 * gamma - 1) / zeta3 - 3 * mpmath.zeta(3, derivative = 1) / zeta3 ** 2
    assert float(c2) == pytest.approx(float(expected_c2), rel = 1e-12)

    threedim = toolkit.summatory.main_term_model(Problem.THREEDIM, 3)
    assert float(threedim.coefficient(BasisTag.X_POW_1_OVER_K)) == pytest.approx(
        float(mpmath.zeta(mpmath.mpf(1) / 3) ** 2), rel = 1e-12)
    assert threedim.theta == pytest.approx(1 / 3)


def test_delta_dirichlet_at_one(toolkit):
    sample = toolkit.summatory.delta_dirichlet(1)
    assert sample.summatory == 1
    assert sample.value == pytest.approx(2 - 2 * float(mpmath.euler), abs = 1e-15)


def test_delta_named_problems(toolkit):
    x = 500.5
    threedim = toolkit.summatory.delta_threedim(x, 3)
    assert threedim.summatory == sum(d11k(n, 3) for n in range(1, 501))
    assert threedim.value == toolkit.summatory.delta(Problem.THREEDIM, x, 3).value

    kfree = toolkit.summatory.delta_kfree(x, 3)
    assert kfree.summatory == sum(kfree_divisor_count(n, 3) for n in range(1, 501))
    assert kfree.x == x


def test_delta_problems_match_definition(toolkit):
    x = 12345.5
    for problem, k in ((Problem.DIRICHLET, None), (Problem.KFREE, 4), (Problem.THREEDIM, 3)):
        sample = toolkit.summatory.delta(problem, x, k)
        model = toolkit.summatory.main_term_model(problem, k)
        assert sample.summatory == toolkit.summatory.summatory(problem, x, k)
        assert sample.value == pytest.approx(float(sample.summatory - model.evaluate(x)), abs = 1e-9)


@pytest.mark.parametrize('m, k', [(12, 2), (720, 2), (1000, 3), (4096, 4)])
def test_kfree_error_term_jumps_by_dk(toolkit, m, k):
    after = toolkit.summatory.delta_kfree(m, k)
    before = toolkit.summatory.delta_kfree(Fraction(m) - Fraction(1, 10 ** 9), k)
    assert after.summatory - before.summatory == kfree_divisor_count(m, k)
    assert after.value - before.value == pytest.approx(kfree_divisor_count(m, k), abs = 1e-6)


def test_kfree_summatory_equals_divisor_sum_below_two_to_k(toolkit):
    for k in (3, 4, 6):
        for x in list(range(1, 2 ** k)) + [2 ** k - 0.5]:
            assert toolkit.summatory.kfree_summatory(x, k) == toolkit.summatory.big_d(x)
        assert toolkit.summatory.kfree_summatory(2 ** k, k) == toolkit.summatory.big_d(2 ** k) - 1


def test_delta_grid_matches_pointwise(toolkit):
    xs = np.linspace(1.0, 20000.0, 37)
    frame = toolkit.summatory.delta_grid(Problem.KFREE, xs, 2)
    assert list(frame.columns) == ['x', 'summatory', 'main', 'delta']
    for x, value in zip(frame['x'], frame['delta']):
        assert value == pytest.approx(toolkit.summatory.delta_kfree(x, 2).value, abs = 1e-8)


def test_delta_domain(toolkit):
    with pytest.raises(DomainError):
        toolkit.summatory.delta(Problem.DIRICHLET, 0.5)
    with pytest.raises(DomainError):
        toolkit.summatory.delta(Problem.KFREE, 10, None)
    assert len(toolkit.summatory.delta_grid(Problem.DIRICHLET, [])) == 0


@pytest.mark.parametrize('x,y,k', [
    (10 ** 5, 10.5, 2),
    (10 ** 5, 316, 2),
    (10 ** 5, 12.3, 3),
    (987654, 10, 4),
    (10 ** 6, 11.0, 5)
])
def test_hyperbola_identity(toolkit, x, y, k):
    lhs, rhs = toolkit.summatory.hyperbola_identity_check(x, y, k)
    assert lhs == rhs


def test_hyperbola_identity_rejects_bad_split(toolkit):
    with pytest.raises(DomainError):
        toolkit.summatory.hyperbola_identity_check(10 ** 5, 5, 2)
    with pytest.raises(DomainError):
        toolkit.summatory.hyperbola_identity_check(10 ** 5, 400, 2)


def test_psi_sum_brute_force(toolkit):
    x, k, y = 10 ** 4, 2, 10
    expected = 0.0
    for n in range(1, x // y ** k + 1):
        root = math.isqrt(x // n)
        fractional = 0.0 if (x % n == 0 and root * root == x // n) else math.sqrt(x / n) - root
        expected += divisor_count(n) * (fractional - 0.5)
    assert toolkit.summatory.psi_sum(x, k, y) == pytest.approx(expected, abs = 1e-9)
    assert toolkit.summatory.psi_sum(50, 2, 10) == 0.0


def test_psi_sum_split_report(toolkit):
    result = toolkit.summatory.lemma71_decomposition(50000, 3, 6)
    assert set(result) >= {'sum_delta', 'psi_part', 'residual', 'envelope', 'fitted_constant'}
    expected_envelope = 50000 * 6.0 ** -4 * math.log(50000) + 6
    assert result['envelope'] == pytest.approx(expected_envelope)
    assert result['fitted_constant'] == pytest.approx(abs(result['residual']) / expected_envelope)
    with pytest.raises(DomainError):
        toolkit.summatory.lemma71_decomposition(50000, 3, 1.5)


def test_psi_sum_at_the_boundary(toolkit):
    # x = y^k leaves the single term n = 1 with (x/1)^(1/k) = y an integer
    assert toolkit.summatory.psi_sum(1000, 3, 10) == -0.5
    assert toolkit.summatory.psi_sum(64, 2, 8) == -0.5
    assert toolkit.summatory.psi_sum(Fraction(1999, 2), 3, 10) == 0.0


def test_psi_sum_split_residual_shrinks_with_y(toolkit):
    x, k = 10 ** 6, 3
    ys = (4.5, 9.5, 19.5)
    results = [toolkit.summatory.lemma71_decomposition(x, k, y) for y in ys]
    for y, result in zip(ys, results):
        assert result['fitted_constant'] < 5
        uncancelled_tail = x * y ** (1 - k) * math.log(x)
        assert abs(result['residual']) < 0.1 * uncancelled_tail

    slope, _ = np.polyfit(np.log(ys), np.log([abs(r['residual']) for r in results]), 1)
    assert slope < -1


def test_kfree_linear_coefficient_matches_least_squares_fit(toolkit):
    c1, c2 = toolkit.summatory.kfree_coefficients(2)
    prefix = toolkit.summatory.summatory_prefix(Problem.KFREE, 10 ** 6, 2)
    xs = np.arange(10 ** 5, 10 ** 6 + 1, 500)
    remainder = prefix[xs].astype(np.float64) - float(c1) * xs * np.log(xs)
    slope, _ = np.polyfit(xs.astype(np.float64), remainder, 1)
    # three significant digits
    assert slope == pytest.approx(float(c2), rel = 5e-3)
