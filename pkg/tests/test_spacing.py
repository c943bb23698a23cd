"""
Tests for near-resonance counts, the envelope sweep and E_k.
"""

import math
from fractions import Fraction

import pytest

from app.errors import DomainError, ResourceLimitError
from app.models import DyadicBox
from app.services.spacing import SpacingService, within_exact
from tests.oracles import sqrt_gap


def brute_count(box):
    total = 0
    for d1 in range(box.D1 + 1, 2 * box.D1 + 1):
        for n1 in range(box.N1 + 1, 2 * box.N1 + 1):
            for d2 in range(box.D2 + 1, 2 * box.D2 + 1):
                for n2 in range(box.N2 + 1, 2 * box.N2 + 1):
                    total += sqrt_gap(n1, d1 ** box.k, n2, d2 ** box.k) <= box.delta
    return total


def test_within_exact():
    assert within_exact((1, 1), (4, 4), Fraction(0))
    assert not within_exact((1, 1), (2, 1), Fraction(0))
    # sqrt(4) - sqrt(1) = 1 exactly
    assert within_exact((4, 1), (1, 1), Fraction(1))
    assert not within_exact((4, 1), (1, 1), Fraction(999, 1000))
    assert within_exact((2, 1), (1, 1), Fraction(415, 1000))
    assert not within_exact((2, 1), (1, 1), Fraction(414, 1000))


@pytest.mark.parametrize('box', [
    DyadicBox(2, 3, 5, 7, 3, 0.0123),
    DyadicBox(1, 4, 12, 3, 2, 0.05),
    DyadicBox(3, 3, 6, 6, 4, 0.0007),
    DyadicBox(5, 2, 4, 9, 2, 0.6)
])
def test_windowed_count_matches_brute_force(toolkit, box):
    expected = brute_count(box)
    assert toolkit.spacing.count_near_resonances(box) == expected
    assert toolkit.spacing.count_near_resonances_naive(box) == expected


def test_exact_coincidences_with_zero_delta(toolkit):
    box = DyadicBox(1, 1, 4, 4, 2, 0.0)
    assert toolkit.spacing.count_near_resonances(box) == 4
    assert toolkit.spacing.count_near_resonances_naive(box) == 4


def test_wide_delta_counts_every_quadruple(toolkit):
    box = DyadicBox(2, 3, 5, 7, 3, 10.0)
    assert toolkit.spacing.count_near_resonances(box) == box.candidates == 210


def test_count_is_symmetric(toolkit):
    box = DyadicBox(4, 2, 30, 50, 2, 0.003)
    assert toolkit.spacing.count_near_resonances(box) == toolkit.spacing.count_near_resonances(box.swapped())


def test_count_grows_with_delta(toolkit):
    counts = [toolkit.spacing.count_near_resonances(DyadicBox(4, 4, 40, 40, 3, delta))
              for delta in (0.0, 1e-4, 1e-3, 1e-2)]
    assert counts == sorted(counts)


def test_envelope_value():
    box = DyadicBox(2, 3, 5, 7, 3, 0.01)
    expected = 0.01 * 6.0 ** 1.75 * 35.0 ** 0.75 + math.sqrt(210.0) * math.log(420.0)
    assert SpacingService.lemma51_envelope(box) == pytest.approx(expected)


def test_sweep_frame(toolkit):
    boxes = [DyadicBox(1, 2, 8, 8, 2, 1e-3), DyadicBox(2, 2, 16, 16, 3, 1e-4)]
    frame = toolkit.spacing.sweep(boxes)
    assert list(frame.columns) == ['D1', 'D2', 'N1', 'N2', 'k', 'delta', 'count', 'envelope', 'ratio']
    assert len(frame) == 2
    for box, (_, row) in zip(boxes, frame.iterrows()):
        assert row['count'] == toolkit.spacing.count_near_resonances(box)
        assert row['ratio'] == pytest.approx(row['count'] / row['envelope'])


def test_box_limits(toolkit):
    with pytest.raises(ResourceLimitError):
        toolkit.spacing.count_near_resonances(DyadicBox(1000, 1, 10 ** 5, 1, 2, 0.1))
    with pytest.raises(DomainError):
        DyadicBox(0, 1, 1, 1, 2, 0.1)
    with pytest.raises(DomainError):
        DyadicBox(1, 1, 1, 1, 1, 0.1)
    with pytest.raises(DomainError):
        DyadicBox(1, 1, 1, 1, 2, -0.1)


def test_e_k_matches_reference(toolkit):
    fast = toolkit.spacing.e_k_estimate(3, 20, 2, 100.0)
    reference = toolkit.spacing.e_k_naive(3, 20, 2, 100.0)
    assert fast == pytest.approx(reference, rel = 1e-10)
    assert fast > 0


@pytest.mark.parametrize('y, z, k, T, weighted', [
    (4, 16, 2, 1e4, True),
    (2, 4, 2, 1e6, False),
    (3, 12, 3, 50.0, False),
    (5.5, 9, 4, 2e3, True)
])
def test_e_k_matches_pair_loop(toolkit, y, z, k, T, weighted):
    fast = toolkit.spacing.e_k_estimate(y, z, k, T, weighted = weighted)
    assert fast == pytest.approx(toolkit.spacing.e_k_naive(y, z, k, T, weighted = weighted), rel = 1e-10)


def test_e_k_pair_loop_skips_exact_resonances(toolkit):
    # k = 2, d <= 2, n <= 4: (1, 1) ~ (2, 4) is the only resonant pair
    T = 1e6
    values = {(d, n): math.sqrt(n / d ** 2) for d in (1, 2) for n in range(1, 5)}
    expected = 0.0
    for (d1, n1), v1 in values.items():
        for (d2, n2), v2 in values.items():
            if (d1, n1) != (d2, n2) and {(d1, n1), (d2, n2)} != {(1, 1), (2, 4)}:
                expected += min(math.sqrt(T), 1.0 / abs(v1 - v2))
    assert toolkit.spacing.e_k_naive(2, 4, 2, T, weighted = False) == pytest.approx(expected, rel = 1e-12)


def test_e_k_unweighted_single_d(toolkit):
    T = 50.0
    expected = 0.0
    for n1 in range(1, 11):
        for n2 in range(1, 11):
            if n1 != n2:
                expected += min(math.sqrt(T), 1.0 / abs(math.sqrt(n1) - math.sqrt(n2)))
    assert toolkit.spacing.e_k_estimate(1.5, 10, 3, T, weighted = False) == pytest.approx(expected, rel = 1e-12)


def test_e_k_monotone_in_T(toolkit):
    values = [toolkit.spacing.e_k_estimate(4, 12, 3, T) for T in (1.0, 10.0, 1000.0, 1e6)]
    assert values == sorted(values)


def test_e_k_bound_shape(toolkit):
    shape = toolkit.spacing.e_k_bound_shape(10, 100, 3, 1e4)
    log_t = math.log(1e4)
    assert shape['small_y'] == pytest.approx(100 * log_t ** 4)
    assert shape['large_y'] == pytest.approx(1e4 ** (4 / 9) * log_t ** 4)
    assert shape['total'] == pytest.approx(shape['small_y'] + shape['large_y'])


def test_e_k_domain(toolkit):
    with pytest.raises(DomainError):
        toolkit.spacing.e_k_estimate(3, 10, 2, 0.5)
    with pytest.raises(DomainError):
        toolkit.spacing.e_k_estimate(0.5, 10, 2, 10.0)
    with pytest.raises(ResourceLimitError):
        toolkit.spacing.e_k_estimate(1000, 1000, 2, 10.0)
