"""
Tests for the segmented sieve, integer roots and the Mertens function.
"""

import math

import numpy as np
import pytest

from app.config import TestingConfig
from app.errors import DomainError, ResourceLimitError
from app.models import SieveRange
from app.services.arith_sieve import SieveService, MertensCounter, iroot, iroot_array, prime_table
from tests.oracles import divisor_count, mobius, kfree_divisor_count, d11k, mertens, is_kfree


def test_iroot_exact_powers_and_neighbours():
    assert iroot(10 ** 18, 3) == 10 ** 6
    assert iroot(10 ** 18 - 1, 3) == 10 ** 6 - 1
    assert iroot(2 ** 40, 4) == 2 ** 10
    assert iroot(0, 3) == 0
    assert iroot(99, 2) == 9


def test_iroot_array_matches_scalar():
    values = np.array([1, 7, 8, 9, 26, 27, 28, 10 ** 12, 10 ** 12 - 1], dtype = np.int64)
    for k in (2, 3, 5):
        assert iroot_array(values, k).tolist() == [iroot(int(v), k) for v in values]


def test_prime_table_small():
    assert prime_table(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(prime_table(1)) == 0


def test_sieve_range_matches_brute_force(toolkit):
    table = toolkit.sieve.sieve_range(SieveRange(1, 301), k = 2)
    for n in range(1, 301):
        assert table.value('d', n) == divisor_count(n)
        assert table.value('mu', n) == mobius(n)
        assert table.value('dk', n) == kfree_divisor_count(n, 2)
        assert table.value('d11k', n) == d11k(n, 2)


def test_sieve_range_away_from_one(toolkit):
    table = toolkit.sieve.sieve_range(SieveRange(5000, 5400), k = 3)
    for n in range(5000, 5400, 7):
        assert table.value('d', n) == divisor_count(n)
        assert table.value('mu', n) == mobius(n)
        assert table.value('dk', n) == kfree_divisor_count(n, 3)
        assert table.value('d11k', n) == d11k(n, 3)


def test_known_values(toolkit):
    table = toolkit.sieve.sieve_range(SieveRange(1, 13), k = 2)
    assert table.value('dk', 12) == 4
    assert table.value('d11k', 4) == 4


def test_segments_cover_range_in_order(toolkit):
    tables = list(toolkit.sieve.sieve_segments(1, 10001, 3))
    assert tables[0].range.lo == 1
    assert tables[-1].range.hi == 10001
    for left, right in zip(tables, tables[1:]):
        assert left.range.hi == right.range.lo
    joined = np.concatenate([table.dk for table in tables])
    for n in (1, 4095, 4096, 4097, 8192, 8193, 9999, 10000):
        assert joined[n - 1] == kfree_divisor_count(n, 3)


def test_segments_independent_of_thread_count(toolkit, threaded_config):
    threaded = SieveService(threaded_config)
    single = list(toolkit.sieve.sieve_segments(1, 20001, 4))
    parallel = list(threaded.sieve_segments(1, 20001, 4))
    assert len(single) == len(parallel)
    for left, right in zip(single, parallel):
        assert left.range == right.range
        assert np.array_equal(left.d11k, right.d11k)
        assert np.array_equal(left.mu, right.mu)


def test_prefix_table_and_summatory_prefix(toolkit):
    prefix = toolkit.sieve.summatory_prefix('d', 10)
    assert prefix[0] == 0
    assert prefix[10] == 27
    with pytest.raises(DomainError):
        toolkit.sieve.summatory_prefix('dk', 10)


def test_mertens_values(toolkit):
    assert toolkit.sieve.mertens(10) == -1
    assert toolkit.sieve.mertens(5) == -2
    assert toolkit.sieve.mertens(1000) == mertens(1000)
    table = toolkit.sieve.mertens_table(100)
    assert table[0] == 0
    assert table[100] == mertens(100)


@pytest.mark.parametrize('k', [2, 3, 4])
def test_sieved_functions_are_multiplicative(toolkit, k):
    table = toolkit.sieve.sieve_range(SieveRange(1, 2001), k = k)
    for a, b in ((8, 125), (12, 35), (16, 81), (36, 49), (27, 64), (9, 200)):
        assert math.gcd(a, b) == 1
        for name in ('d', 'dk', 'd11k'):
            assert table.value(name, a * b) == table.value(name, a) * table.value(name, b)
        assert table.value('mu', a * b) == table.value('mu', a) * table.value('mu', b)


def test_squarefree_count(toolkit):
    table = toolkit.sieve.prefix_table(10000)
    squares = np.asarray(table.mu, dtype = np.int64) ** 2
    assert int(squares[:100].sum()) == 61
    assert int(squares.sum()) == sum(1 for n in range(1, 10001) if is_kfree(n, 2))


def test_mertens_counter_moves_forward(toolkit):
    counter = MertensCounter(toolkit.sieve)
    values = [counter.advance(u) for u in (1, 10, 10, 500, 9000)]
    assert values == [1, -1, -1, mertens(500), toolkit.sieve.mertens(9000)]
    with pytest.raises(DomainError):
        counter.advance(100)


def test_mertens_envelope(toolkit):
    assert toolkit.sieve.mertens_envelope(2.5, 1.0) == 2.5
    u = 1e6
    log_u = math.log(u)
    expected = u * math.exp(-0.5 * log_u ** 0.6 * math.log(log_u) ** -0.2)
    assert toolkit.sieve.mertens_envelope(u, 0.5) == pytest.approx(expected)
    with pytest.raises(DomainError):
        toolkit.sieve.mertens_envelope(10.0, 0.0)


def test_tables_are_read_only(toolkit):
    table = toolkit.sieve.sieve_range(SieveRange(1, 50))
    with pytest.raises(ValueError):
        table.d[0] = 7
    with pytest.raises(DomainError):
        table.value('dk', 3)
    with pytest.raises(DomainError):
        table.value('d', 50)


def test_domain_and_resource_errors(toolkit):
    with pytest.raises(DomainError):
        SieveRange(0, 10)
    with pytest.raises(DomainError):
        SieveRange(10, 10)
    with pytest.raises(DomainError):
        toolkit.sieve.sieve_range(SieveRange(1, 10), k = 1)
    with pytest.raises(ResourceLimitError):
        toolkit.sieve.sieve_range(SieveRange(1, TestingConfig.SEGMENT_SIZE + 2))
    with pytest.raises(ResourceLimitError):
        list(toolkit.sieve.sieve_segments(1, TestingConfig.MAX_SIEVE_LIMIT + 10))
