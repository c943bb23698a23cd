"""
Brute-force reference implementations used by the tests.
"""

import math


def factorize(n):
    factors = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def divisors(n):
    return [e for e in range(1, n + 1) if n % e == 0]


def divisor_count(n):
    return len(divisors(n))


def mobius(n):
    factors = factorize(n)
    if any(alpha > 1 for alpha in factors.values()):
        return 0
    return (-1) ** len(factors)


def is_kfree(n, k):
    return all(alpha < k for alpha in factorize(n).values())


def is_kfull(n, k):
    return all(alpha >= k for alpha in factorize(n).values())


def kfree_divisor_count(n, k):
    """Number of k-free divisors of n."""
    return sum(1 for e in divisors(n) if is_kfree(e, k))


def d11k(n, k):
    """Number of (a, b, c) with a b c^k = n."""
    total = 0
    c = 1
    while c ** k <= n:
        if n % c ** k == 0:
            total += divisor_count(n // c ** k)
        c += 1
    return total


def mertens(u):
    return sum(mobius(n) for n in range(1, u + 1))


def sqrt_gap(n1, q1, n2, q2):
    return abs(math.sqrt(n1 / q1) - math.sqrt(n2 / q2))
