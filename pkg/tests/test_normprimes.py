import math

import pytest
from hypothesis import given, settings, strategies as st

from cmdecomp.arith import is_prime
from cmdecomp.normprimes import (InsufficientPrimes, admissible_v, candidates_upto, in_PD,
                                 random_cm_prime, select_primes, solve_norm)


def brute_norm(D, p):
    for t in range(1, 2 * math.isqrt(p) + 2):
        rest = 4 * p - t * t
        if rest > 0 and rest % -D == 0 and math.isqrt(rest // -D) ** 2 == rest // -D:
            return t, math.isqrt(rest // -D)
    return None


def test_known_solutions():
    assert solve_norm(-971, 263) == (9, 1)
    assert solve_norm(-971, 5) is None
    assert solve_norm(-971, 1029167) == (2028, 2)


@settings(max_examples=150)
@given(st.sampled_from([-7, -15, -23, -71, -971, -1555, -4027, -84, -420]),
       st.integers(5, 300000))
def test_solve_norm_vs_brute(D, n):
    p = n if is_prime(n) else None
    if p is None:
        return
    got = solve_norm(D, p)
    want = brute_norm(D, p)
    assert (got is None) == (want is None)
    if got:
        t, v = got
        assert t > 0 and v > 0 and t * t - v * v * D == 4 * p


def test_admissible_v():
    assert admissible_v(-15) == [2]      # -15 = 1 mod 8
    assert admissible_v(-15, max_v=1) == []
    assert admissible_v(-971) == [1]
    assert admissible_v(-84) == [1]


def test_candidates_sorted_and_valid():
    cs = candidates_upto(-971, 20000, [1])
    assert [c.p for c in cs] == sorted(c.p for c in cs)
    assert cs[0].p == 263
    for c in cs:
        assert is_prime(c.p) and c.t ** 2 + 971 * c.v ** 2 == 4 * c.p


def test_select_primes_971():
    S = select_primes(-971, 340, [3, 5])
    assert len(S) == 25
    assert S.moduli[:3] == [263, 353, 1433]
    assert S.product_bits > 342
    assert sum(math.log2(p) for p in S.moduli[:-1]) <= 342
    assert select_primes(-971, 1).moduli == [263]


def test_select_excludes():
    S = select_primes(-971, 50, [3, 5], exclude={263})
    assert 263 not in S.moduli
    with pytest.raises(ValueError):
        select_primes(-971, 0)


def test_insufficient():
    with pytest.raises(InsufficientPrimes):
        select_primes(-971, 10**6, max_limit=10**5)


def test_in_PD():
    assert in_PD(-971, 1029167) and in_PD(-971, 263)
    assert not in_PD(-971, 1029169) and not in_PD(-971, 5)


@pytest.mark.parametrize("D", [-7, -15, -20, -971, -4004, -9998259])
@pytest.mark.parametrize("bits", [16, 64, 256])
def test_random_cm_prime(D, bits):
    sp = random_cm_prime(D, bits, seed=bits)
    assert is_prime(sp.p) and 4 * sp.p == sp.t ** 2 - sp.v ** 2 * D
    if bits > (-D).bit_length():
        assert abs(sp.p.bit_length() - bits) <= 2
    assert in_PD(D, sp.p)


def test_random_cm_prime_impossible_v():
    with pytest.raises(ValueError):
        random_cm_prime(-15, 64, v=1)
