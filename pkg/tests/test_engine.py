import json

import pytest

from cmdecomp import engine
from cmdecomp.engine import InvalidInput, RunConfig
from cmdecomp.fppoly import evaluate, roots

Q = 1029167
V_Q = [760884, 829791, 947907, 1]
U_Q = [95575, 363260, 849678, 556976, 336976, 1]


@pytest.fixture(scope="module")
def golden():
    return engine.construct(RunConfig(-971, Q, "A1", order=5, s_policy="minus_e1"))


def test_golden_a1(golden):
    r = golden
    assert r.V == V_Q and r.y == 336976 and r.U == U_Q and r.x == 590272
    assert (r.curve.a, r.curve.b) == (886249, 247777)
    assert r.certified and r.N in (Q + 1 - 2028, Q + 1 + 2028)
    assert r.stats.peak_accumulators["A1"] <= 15


def test_x_is_root_of_hilbert(golden):
    H = engine.hilbert_mod(-971, Q)
    assert evaluate(H, golden.x, Q) == 0
    # U divides H_D mod q
    assert set(roots(golden.U, Q)) <= set(roots(H, Q))


@pytest.mark.parametrize("alg", ["A2", "A2L"])
def test_two_stage_agree(golden, alg):
    r = engine.construct(RunConfig(-971, Q, alg, order=5, s_policy="minus_e1"))
    assert r.U == golden.U and r.x == golden.x
    assert r.w == [180694, 270105, 92440, 110998]


def test_modes_and_threads_agree(golden):
    a = engine.construct(RunConfig(-971, Q, "A1", order=5, s_policy="minus_e1", crt_mode="A"))
    b = engine.construct(RunConfig(-971, Q, "A1", order=5, s_policy="minus_e1", threads=2))
    assert a.U == b.U == golden.U


def test_json_deterministic():
    cfg = RunConfig(-971, Q, "A2", order=5, seed=4)
    j1 = json.dumps(engine.construct(cfg).to_json())
    j2 = json.dumps(engine.construct(cfg).to_json())
    assert j1 == j2
    assert "t_find" not in j1


def test_random_symfunc():
    r = engine.construct(RunConfig(-971, Q, "A1", order=5, s_policy="random", seed=2))
    H = engine.hilbert_mod(-971, Q)
    assert r.s.kind == "random"
    assert evaluate(H, r.x, Q) == 0


def test_auto_subgroup():
    r = engine.construct(RunConfig(-971, Q))
    assert r.n == 5 and r.stats.bound_bits == 340


def test_hilbert_small():
    assert engine.hilbert_over_Z(-23) == [12771880859375, -5151296875, 3491750, 1]
    assert engine.hilbert_over_Z(-3) == [0, 1]
    assert engine.hilbert_over_Z(-4) == [-1728, 1]
    assert engine.hilbert_over_Z(-15) == [-121287375, 191025, 1]


@pytest.mark.parametrize("kw", [
    dict(D=-972, q=Q), dict(D=-971 * 4, q=Q), dict(D=-971, q=Q + 2),
    dict(D=-971, q=1029169), dict(D=-971, q=Q, order=3), dict(D=5, q=Q),
])
def test_invalid_inputs(kw):
    with pytest.raises(InvalidInput):
        engine.construct(RunConfig(**kw))


def test_bad_config():
    with pytest.raises(InvalidInput):
        RunConfig(-971, Q, algorithm="A9")
    with pytest.raises(InvalidInput):
        RunConfig(-971, Q, s_policy="e2")
