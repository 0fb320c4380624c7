import mpmath
import pytest

from cmdecomp import modpoly as M

PHI2 = {(3, 0): 1, (0, 3): 1, (2, 2): -1, (2, 1): 1488, (1, 2): 1488,
        (2, 0): -162000, (0, 2): -162000, (1, 1): 40773375,
        (1, 0): 8748000000, (0, 1): 8748000000, (0, 0): -157464000000000}


def test_phi2_generated_and_bundled():
    assert {k: v for k, v in M.generate(2).items() if v} == PHI2
    assert M.load_modpoly(2) == PHI2


def test_q_expansion_of_j():
    # q j(q) = 1 + 744 q + 196884 q^2 + 21493760 q^3 + ...
    assert M.qj_series(4)[:4] == [1, 744, 196884, 21493760]


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_phi_vanishes_on_isogenous_pair(ell):
    mpmath.mp.dps = 400
    tau = mpmath.mpc("0.1234", "1.1")
    j1 = 1728 * mpmath.kleinj(tau)
    j2 = 1728 * mpmath.kleinj(ell * tau)
    coeffs = M.load_modpoly(ell)
    val = sum(c * j1**i * j2**k for (i, k), c in coeffs.items())
    scale = max(abs(c) for c in coeffs.values()) * max(abs(j1), abs(j2)) ** (ell + 1)
    assert abs(val) / scale < mpmath.mpf(10) ** -300


def test_bundled_levels_validate():
    levels = M.available_levels()
    assert {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31} <= set(levels)
    for ell in levels:
        M.validate(ell, M.load_modpoly(ell))


def test_roundtrip():
    c = M.generate(5)
    ell, back = M.loads(M.dumps(5, c))
    assert ell == 5 and back == {k: v for k, v in c.items() if v}


def test_asymmetric_file_rejected(tmp_path):
    f = tmp_path / "phi_2.txt"
    f.write_text(M.dumps(2, PHI2) + "[0,1] 7\n")
    with pytest.raises(M.ValidationError):
        M.load_modpoly(2, f)


def test_kronecker_congruence_checked():
    bad = dict(PHI2)
    bad[(1, 1)] += 1
    with pytest.raises(M.ValidationError):
        M.validate(2, bad)


@pytest.mark.parametrize("text", ["", "lvl 2\n", "level x\n", "level 2\n[3,0 1\n", "level 2\n3,0 1\n"])
def test_format_errors(text):
    with pytest.raises(M.FormatError):
        M.loads(text)


def test_level_mismatch(tmp_path):
    (tmp_path / "phi_3.txt").write_text(M.dumps(2, PHI2))
    with pytest.raises(M.FormatError):
        M.load_modpoly(3, tmp_path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        M.load_modpoly(3, tmp_path)


def test_generator_cli(tmp_path):
    assert M.main(["2", "3", "--out", str(tmp_path)]) == 0
    assert M.available_levels(tmp_path) == [2, 3]
    assert M.load_modpoly(3, tmp_path) == M.load_modpoly(3)
