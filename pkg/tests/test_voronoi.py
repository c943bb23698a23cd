"""
Tests for the truncated Voronoi series and the k-free decomposition residual.
"""

import math

import numpy as np
import pytest

from app import create_app
from app.config import TestingConfig
from app.errors import DomainError, ResourceLimitError
from app.models import TruncationParams
from app.services.arith_sieve import log_power_saving
from app.services.voronoi import PREFACTOR
from tests.oracles import mobius


def test_single_term_closed_form(toolkit):
    for u in (1.0, 2.5, 1234.5678):
        expected = PREFACTOR * u ** 0.25 * math.cos(4 * math.pi * math.sqrt(u) - math.pi / 4)
        assert toolkit.voronoi.delta1(u, 1) == pytest.approx(expected, abs = 1e-12)


def test_cos_sum_terms_reproduce_delta1(toolkit):
    x = 777.7
    terms = toolkit.voronoi.cos_sum_terms(25)
    assert len(terms) == 25
    assert terms[0].amplitude == 1.0
    assert terms[1].frequency == pytest.approx(4 * math.pi * math.sqrt(2))
    total = PREFACTOR * x ** 0.25 * math.fsum(term(x) for term in terms)
    assert total == pytest.approx(toolkit.voronoi.delta1(x, 25), abs = 1e-10)


def test_batched_equals_pointwise(toolkit):
    us = np.linspace(1.0, 5000.0, 600)
    batched = toolkit.voronoi.delta1_grid(us, 200)
    for index in (0, 1, 255, 256, 257, 599):
        assert batched[index] == toolkit.voronoi.delta1(us[index], 200)


def test_thread_count_does_not_change_bits(toolkit, threaded_config):
    us = np.linspace(10.0, 20000.0, 1000)
    threaded = create_app(threaded_config)
    assert np.array_equal(threaded.voronoi.delta1_grid(us, 150), toolkit.voronoi.delta1_grid(us, 150))


def test_double_double_phase_matches_plain_phase(toolkit):
    class ExtendedPhaseConfig(TestingConfig):
        PHASE_DD_THRESHOLD = 1.0

    extended = create_app(ExtendedPhaseConfig)
    us = np.array([1.5, 99.25, 12345.0, 1e5])
    assert np.allclose(extended.voronoi.delta1_grid(us, 300), toolkit.voronoi.delta1_grid(us, 300),
                       rtol = 0, atol = 1e-7)


def test_delta2_and_grid_frame(toolkit):
    frame = toolkit.voronoi.grid_frame(1000.0, 50, 101)
    assert list(frame.columns) == ['u', 'delta', 'delta1', 'delta2']
    assert len(frame) == 101
    assert frame['u'].iloc[0] == 1000.0
    assert frame['u'].iloc[-1] == 2000.0
    assert np.allclose(frame['delta2'], frame['delta'] - frame['delta1'], rtol = 0, atol = 0)
    samples = toolkit.voronoi.delta2_samples(frame['u'].to_numpy(), 50)
    assert np.array_equal(samples, frame['delta2'].to_numpy())


def test_longer_truncation_shrinks_residual(toolkit):
    short = toolkit.voronoi.lemma31_check(1e4, 10, 2000)
    long = toolkit.voronoi.lemma31_check(1e4, 1000, 2000)
    assert short['mean_square'] > long['mean_square']
    assert long['integral_estimate'] == pytest.approx(1e4 * long['mean_square'])
    assert long['fitted_constant'] == pytest.approx(long['integral_estimate'] / long['envelope'])


def test_r1_reduces_to_delta1_for_small_y(toolkit):
    params = TruncationParams(z = 80, y = 1.5, k = 3)
    for x in (10.0, 4321.0):
        assert toolkit.voronoi.r1_kfree(x, params) == pytest.approx(toolkit.voronoi.delta1(x, 80), abs = 1e-12)


@pytest.mark.parametrize('x, y, k', [(1234.5, 7.5, 2), (4321.25, 5.0, 3), (98765.4, 8.0, 3)])
def test_r1_is_mobius_weighted_delta1(toolkit, x, y, k):
    params = TruncationParams(z = 60, y = y, k = k)
    expected = math.fsum(mobius(d) * toolkit.voronoi.delta1(x / d ** k, 60)
                         for d in range(1, int(y) + 1) if mobius(d))
    assert toolkit.voronoi.r1_kfree(x, params) == pytest.approx(expected, rel = 1e-9, abs = 1e-9)


def test_r1_unsigned_weights_every_d(toolkit):
    params = TruncationParams(z = 60, y = 6.0, k = 2)
    expected = math.fsum(toolkit.voronoi.delta1(2000.5 / d ** 2, 60) for d in range(1, 7))
    assert toolkit.voronoi.r1_kfree(2000.5, params, signed = False) == pytest.approx(expected, rel = 1e-9, abs = 1e-9)


def test_decomposition_residual_identity(toolkit):
    params = TruncationParams(z = 100, y = 3, k = 3)
    result = toolkit.voronoi.decomposition_residual(1e5, params, c = 0.5)
    assert result['residual'] == result['delta_kfree'] - result['r1'] - result['delta2_sum']
    shape = 1e5 * 3.0 ** -2 * math.log(1e5)
    assert result['envelope'] == pytest.approx(shape * math.exp(-0.5 * log_power_saving(3)))
    assert result['truncation'] == {'z': 100, 'y': 3, 'k': 3}

    fitted = toolkit.voronoi.decomposition_residual(1e5, params)
    assert fitted['c'] >= 0
    assert fitted['residual'] == result['residual']


def test_domain_and_resource_errors(toolkit):
    with pytest.raises(DomainError):
        toolkit.voronoi.delta1(10.0, 0)
    with pytest.raises(DomainError):
        toolkit.voronoi.delta1(0.5, 10)
    with pytest.raises(ResourceLimitError):
        toolkit.voronoi.delta1(10.0, TestingConfig.VORONOI_MAX_Z + 1)
    with pytest.raises(DomainError):
        toolkit.voronoi.lemma31_check(1.0, 10, 100)
    with pytest.raises(DomainError):
        TruncationParams(z = 10, y = 0.5, k = 3)
