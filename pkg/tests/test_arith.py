import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cmdecomp.arith import (FixedPoint, NotInvertible, factor, fixed_add, is_prime, kronecker,
                            legendre, mod_inv, next_prime, scaled_quotient, sqrt_mod)

SMALL_PRIMES = [p for p in range(2, 2000) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_is_prime_matches_trial_division():
    assert [n for n in range(2000) if is_prime(n)] == SMALL_PRIMES


def test_is_prime_large_and_carmichael():
    assert is_prime(2**127 - 1)
    assert not is_prime(561) and not is_prime(3215031751)
    assert not is_prime((2**61 - 1) * (2**31 - 1))


def test_next_prime():
    assert next_prime(1029160) == 1029167
    assert next_prime(2) == 3 and next_prime(1) == 2


@given(st.integers(1, 10**6), st.sampled_from(SMALL_PRIMES[1:]))
def test_mod_inv(a, p):
    if a % p == 0:
        with pytest.raises(NotInvertible):
            mod_inv(a, p)
    else:
        assert a * mod_inv(a, p) % p == 1


@given(st.integers(-10**6, 10**6), st.sampled_from(SMALL_PRIMES[1:60]))
def test_legendre_euler(a, p):
    expect = pow(a, (p - 1) // 2, p)
    expect = -1 if expect == p - 1 else expect
    assert legendre(a, p) == expect
    assert kronecker(a, p) == expect


def test_kronecker_at_two():
    # (D/2) = 0 for even D, 1 for D = +-1 mod 8, -1 for D = +-3 mod 8
    assert [kronecker(d, 2) for d in (-971, -23, -4, -3, -15)] == [-1, 1, 0, -1, 1]


@settings(max_examples=200)
@given(st.integers(0, 10**9), st.sampled_from([3, 5, 13, 17, 1009, 65537, 1029167, 2**61 - 1]))
def test_sqrt_mod(a, p):
    r = sqrt_mod(a, p)
    if legendre(a, p) == -1:
        assert r is None
    else:
        assert r * r % p == a % p


@settings(max_examples=60)
@given(st.integers(2, 10**12))
def test_factor_roundtrip(n):
    fac, rest = factor(n)
    assert rest == 1
    assert math.prod(p**e for p, e in fac.items()) == n
    assert all(is_prime(p) for p in fac)


@given(st.integers(-10**30, 10**30), st.integers(1, 10**20))
def test_scaled_quotient_close(num, den):
    fp = fixed_add(FixedPoint(0), num, den)
    assert abs(fp.as_fraction() - Fraction(num, den)) <= Fraction(1, 2**100)
    assert abs(scaled_quotient(num, den) - Fraction(num * 2**128, den)) <= 1
