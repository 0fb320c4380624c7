import pytest
from hypothesis import given, settings, strategies as st

from cmdecomp import decomp as Dc
from cmdecomp.fppoly import derivative, evaluate, poly_from_roots, poly_mul, roots

p = 263
ORBITS = [[252, 38, 151, 121, 258], [70, 112, 182, 198, 140], [202, 130, 183, 196, 136]]
THETAS = [[158, 208, 159, 32, 232], [21, 103, 139, 252, 87], [116, 121, 113, 86, 205]]
# the printed constant term of W_2 (277) is not reduced mod 263; 227 is the correct residue
W263 = [[152, 259, 32], [153, 41, 169], [227, 117, 148], [244, 115, 107]]


def test_orbit_thetas():
    assert [Dc.orbit_to_theta(o, p) for o in ORBITS] == THETAS


def test_y_values():
    s = Dc.SymFunc("minus_e1")
    assert [Dc.y_from_theta(th, s, p) for th in THETAS] == [232, 87, 205]
    e1 = Dc.SymFunc("e1")
    assert [Dc.y_from_theta(th, e1, p) for th in THETAS] == [(-232) % p, (-87) % p, (-205) % p]


def test_V_and_W_mod_263():
    ys = [232, 87, 205]
    assert Dc.build_V(ys, p) == [59, 104, 2, 1]
    W = Dc.build_W(THETAS, ys, p, skip_top=True)
    assert len(W) == 4
    assert W == W263
    # W_k = sum_i theta_ik V / (Y - y_i), straight from the definition
    for k in range(4):
        naive = [0, 0, 0]
        for i, y in enumerate(ys):
            cof = poly_from_roots([x for x in ys if x != y], p)
            naive = [(a + THETAS[i][k] * b) % p for a, b in zip(naive, cof)]
        assert W[k] == naive


def test_eval_w_at_73():
    ys = [232, 87, 205]
    assert Dc.eval_w(THETAS, ys, 73, p, skip_top=True) == [227, 79, 44, 242]
    W = Dc.build_W(THETAS, ys, p, skip_top=True)
    assert [evaluate(w, 73, p) for w in W] == [227, 79, 44, 242]


@pytest.mark.parametrize("kind", ["e1", "minus_e1"])
def test_U_recovers_orbit_polynomials(kind):
    s = Dc.SymFunc(kind)
    ys = [Dc.y_from_theta(th, s, p) for th in THETAS]
    V = Dc.build_V(ys, p)
    W = Dc.build_W(THETAS, ys, p, skip_top=True)
    for y, orb in zip(ys, ORBITS):
        U = Dc.assemble_U(evaluate(derivative(V, p), y, p), y,
                          [evaluate(w, y, p) for w in W], s, p, 5)
        assert U == poly_from_roots(orb, p)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_random_symfunc_recovers_U(seed):
    s = Dc.choose_symfunc(5, 3, attempt=1, seed=seed)
    assert s.kind == "random" and len(s.coeffs) == 4
    assert all(0 <= c <= 17 for c in s.coeffs)
    ys = [Dc.y_from_theta(th, s, p) for th in THETAS]
    if len(set(ys)) < 3:
        return
    V = Dc.build_V(ys, p)
    W = Dc.build_W(THETAS, ys, p)
    for y, orb in zip(ys, ORBITS):
        U = Dc.assemble_U(evaluate(derivative(V, p), y, p), y,
                          [evaluate(w, y, p) for w in W], s, p)
        assert U == poly_from_roots(orb, p)


def test_choose_symfunc_deterministic():
    assert Dc.choose_symfunc(5, 3) == Dc.SymFunc("e1")
    assert Dc.choose_symfunc(5, 3, first="minus_e1") == Dc.SymFunc("minus_e1")
    assert Dc.choose_symfunc(1, 15, attempt=3) == Dc.SymFunc("e1")
    assert Dc.choose_symfunc(5, 3, 2, 9) == Dc.choose_symfunc(5, 3, 2, 9)
    with pytest.raises(ValueError):
        Dc.SymFunc("e2")
    with pytest.raises(ValueError):
        Dc.SymFunc("e1", (1,))


def test_assemble_U_zero_derivative():
    with pytest.raises(ZeroDivisionError):
        Dc.assemble_U(0, 1, [1, 2], Dc.SymFunc("e1"), p, 3)


def test_random_needs_full_W():
    with pytest.raises(ValueError):
        Dc.assemble_U(1, 1, [1, 2], Dc.SymFunc("random", (1, 2)), p, 3)
