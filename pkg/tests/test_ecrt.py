import random

import pytest
from hypothesis import given, settings, strategies as st

from cmdecomp.arith import NotInvertible, next_prime
from cmdecomp.ecrt import (CrtAccumulator, CrtContext, crt_to_integer, crt_vectors, finalize,
                           product_tree, remainder_tree, update)

PRIMES = []
_x = 10**4
while len(PRIMES) < 60:
    _x = next_prime(_x + random.Random(_x).randrange(1, 5000))
    PRIMES.append(_x)


def explicit(c, S, q, mode="B", order=None):
    ctx = CrtContext(S, q, mode)
    acc = CrtAccumulator()
    idx = range(len(S)) if order is None else order
    for i in idx:
        update(acc, ctx, i, c % S[i])
    return finalize(acc, ctx)


def test_small_example():
    ctx = CrtContext([3, 5, 7], 11, "A")
    assert ctx.a == [2, 1, 1] and ctx.M_i == [35 % 11, 21 % 11, 15 % 11]
    assert explicit(23, [3, 5, 7], 11) == 1
    assert explicit(-9, [3, 5, 7], 11) == 2


def test_crt_to_integer():
    assert crt_to_integer([2, 3, 2], [3, 5, 7]) == 23
    assert crt_to_integer([2, 4, 6], [3, 5, 7]) == -1
    assert crt_to_integer([0, 0, 0], [3, 5, 7]) == 0
    with pytest.raises(ValueError):
        crt_to_integer([1], [3, 5])


def test_trees():
    levels = product_tree([3, 5, 7, 11, 13])
    assert levels[-1][0] == 15015
    assert remainder_tree(10**9 + 7, levels) == [(10**9 + 7) % p for p in (3, 5, 7, 11, 13)]


def test_mode_b_has_no_table():
    ctx = CrtContext(PRIMES[:5], 2**61 - 1, "B")
    assert ctx.M_i is None
    ctxA = CrtContext(PRIMES[:5], 2**61 - 1, "A")
    assert [ctx.Mi(i) for i in range(5)] == ctxA.M_i


def test_bad_inputs():
    with pytest.raises(ValueError):
        CrtContext([3, 3], 11)
    with pytest.raises(ValueError):
        CrtContext([3, 5], 11, mode="C")
    with pytest.raises(NotInvertible):
        CrtContext([3, 11], 11, mode="B")


@settings(max_examples=300)
@given(st.integers(1, 60), st.data())
def test_roundtrip_modes_permutation(k, data):
    S = PRIMES[:k]
    M = 1
    for p in S:
        M *= p
    lim = (M - 1) // 4
    c = data.draw(st.integers(-lim, lim))
    q = data.draw(st.sampled_from([2, 3, 1029167, 2**61 - 1, 2**127 - 1]))
    if q in S:
        return
    want = c % q
    assert explicit(c, S, q, "B") == want
    assert explicit(c, S, q, "A") == want
    perm = list(range(k))
    random.Random(k).shuffle(perm)
    assert explicit(c, S, q, "B", perm) == want


def test_crt_vectors():
    rng = random.Random(5)
    S = PRIMES[:20]
    cs = [rng.randrange(-10**60, 10**60) for _ in range(7)]
    rows = [[c % p for c in cs] for p in S]
    assert crt_vectors(rows, S) == cs


def test_accumulator_counters():
    base = CrtAccumulator.live
    CrtAccumulator.reset_peak()
    accs = [CrtAccumulator() for _ in range(4)]
    assert CrtAccumulator.live == base + 4 and CrtAccumulator.peak == base + 4
    del accs
    assert CrtAccumulator.live == base
