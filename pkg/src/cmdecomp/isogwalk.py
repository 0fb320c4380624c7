"""Curves over F_p with prescribed trace, and walks along l-isogeny cycles.

The search for a first j-invariant runs a batched x-only ladder over many
random curves at once.  When one of p + 1 -+ t is divisible by a small N
with a rational X_1(N) parametrisation, curves are drawn from that family,
which raises the hit rate by about phi(N).  Each hit is confirmed with an
order check that is exact whenever the group order can be factored.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .arith import factor, mod_inv, sqrt_mod
from .clgroup import Presentation, SubgroupSpec, coset_of, position_in_coset
from .fppoly import Poly, _frobenius_gcd, _linear_part, degree, exact_div, roots
from .modpoly import load_modpoly
from .normprimes import SplitPrime
from .qform import compose, kronecker, principal_form

EXHAUSTIVE_LIMIT = 20_000
BATCH_MIN = 256
BATCH_MAX = 8192


class NotFound(RuntimeError):
    """No curve with the requested trace exists (or the search gave up)."""


class WalkError(RuntimeError):
    """An isogeny step produced an unexpected number of neighbours."""


class MissingModPoly(FileNotFoundError):
    """A presentation norm has no bundled modular polynomial."""


# ------------------------------------------------------------------ modular polynomials

@dataclass
class ModPoly:
    level: int
    coeffs: Mapping[tuple[int, int], int]
    _rows: dict[int, list[list[int]]] = field(default_factory=dict, repr=False)

    def rows_mod(self, p: int) -> list[list[int]]:
        """rows[i][k]: coefficient of X^i Y^k reduced mod p."""
        rows = self._rows.get(p)
        if rows is None:
            n = self.level + 2
            rows = [[0] * n for _ in range(n)]
            for (i, k), c in self.coeffs.items():
                rows[i][k] = c % p
            self._rows[p] = rows
        return rows

    def rows_np(self, p: int) -> np.ndarray:
        key = -p  # shares the cache dict with rows_mod
        arr = self._rows.get(key)
        if arr is None:
            arr = np.array(self.rows_mod(p), dtype=np.uint64)
            self._rows[key] = arr
        return arr

    def specialize(self, j: int, p: int) -> Poly:
        """Phi(X, j) mod p as a polynomial in X."""
        rows = self.rows_mod(p)
        jp = [1]
        for _ in range(self.level + 1):
            jp.append(jp[-1] * j % p)
        out = [sum(c * w for c, w in zip(row, jp)) % p for row in rows]
        while out and out[-1] == 0:
            out.pop()
        return out

    def __call__(self, x: int, y: int, p: int) -> int:
        return sum(c * pow(x, i, p) * pow(y, k, p) for (i, k), c in self.coeffs.items()) % p


def load_modpolys(levels, source=None) -> dict[int, ModPoly]:
    out = {}
    for ell in sorted(set(levels)):
        try:
            out[ell] = ModPoly(ell, load_modpoly(ell, source))
        except FileNotFoundError as exc:
            raise MissingModPoly(str(exc)) from None
    return out


# ------------------------------------------------------------------ curves

@dataclass(frozen=True)
class CurveFp:
    a: int
    b: int
    p: int

    def __post_init__(self):
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise ValueError("singular curve")

    @property
    def j(self) -> int:
        a, b, p = self.a, self.b, self.p
        a3 = 4 * a * a * a
        return 1728 * a3 * mod_inv(a3 + 27 * b * b, p) % p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def twist(self, nonresidue: int | None = None) -> "CurveFp":
        p = self.p
        c = nonresidue if nonresidue is not None else _nonresidue(p)
        return CurveFp(self.a * c * c % p, self.b * c * c * c % p, p)


def _nonresidue(p: int) -> int:
    c = 2
    while kronecker(c, p) != -1:
        c += 1
    return c


def curve_from_j(j: int, p: int) -> CurveFp:
    """y^2 = x^3 + 3k x + 2k with k = j/(1728 - j); special models at 0 and 1728."""
    j %= p
    if j == 0:
        return CurveFp(0, 1, p)
    if j == 1728 % p:
        return CurveFp(1, 0, p)
    k = j * mod_inv(1728 - j, p) % p
    return CurveFp(3 * k % p, 2 * k % p, p)


def full_two_torsion(E: CurveFp) -> bool:
    """Whether x^3 + a x + b splits completely over F_p."""
    return degree(_linear_part([E.b % E.p, E.a % E.p, 0, 1], E.p)) == 3


def count_points(E: CurveFp) -> int:
    """#E(F_p) by summing Legendre symbols (numpy, O(p) memory)."""
    p = E.p
    x = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    rhs = ((x * x % p) * x % p + E.a * x % p + E.b) % p
    return int(p + 1 + chi[rhs].sum())


# affine arithmetic; None is the point at infinity

def _add(P, Q, E: CurveFp):
    if P is None:
        return Q
    if Q is None:
        return P
    p = E.p
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + E.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def scalar_mul(k: int, P, E: CurveFp):
    if k < 0:
        k = -k
        P = None if P is None else (P[0], (-P[1]) % E.p)
    R = None
    while k:
        if k & 1:
            R = _add(R, P, E)
        k >>= 1
        if k:
            P = _add(P, P, E)
    return R


def random_point(E: CurveFp, rng: random.Random):
    while True:
        x = rng.randrange(E.p)
        y = sqrt_mod(E.rhs(x), E.p)
        if y is not None:
            return x, y


def point_order(P, E: CurveFp, N: int, fac: Mapping[int, int]) -> int:
    """Order of P given that [N]P = O and the full factorisation of N."""
    n = N
    for q, e in fac.items():
        for _ in range(e):
            if scalar_mul(n // q, P, E) is None:
                n //= q
            else:
                break
    return n


@dataclass(frozen=True)
class OrderCheck:
    matches: bool
    certified: bool


def verify_order(E: CurveFp, N: int, seed: int = 0, tries: int = 30) -> OrderCheck:
    """Decide #E(F_p) = N; certified unless N could not be factored."""
    p = E.p
    if (N - p - 1) ** 2 > 4 * p:
        return OrderCheck(False, True)
    if p <= EXHAUSTIVE_LIMIT:
        return OrderCheck(count_points(E) == N, True)
    rng = random.Random(seed)
    fac, cof = factor(N)
    other = 2 * p + 2 - N
    separated = False
    for _ in range(tries):
        P = random_point(E, rng)
        if scalar_mul(N, P, E) is not None:
            return OrderCheck(False, True)
        if cof == 1:
            # Mestre: an order above 4 sqrt(p) has one multiple in the Hasse interval
            if point_order(P, E, N, fac) ** 2 > 16 * p:
                return OrderCheck(True, True)
        elif scalar_mul(other, P, E) is not None:
            separated = True
    return OrderCheck(separated or N == other, False)


def curve_order_matches(E: CurveFp, N: int) -> bool:
    return verify_order(E, N).matches


def has_trace(E: CurveFp, t: int) -> int:
    """+1 if #E = p+1-t, -1 if #E = p+1+t, 0 otherwise."""
    p = E.p
    if p <= EXHAUSTIVE_LIMIT:
        n = count_points(E)
        return 1 if n == p + 1 - t else (-1 if n == p + 1 + t else 0)
    if curve_order_matches(E, p + 1 - t):
        return 1
    if curve_order_matches(E, p + 1 + t):
        return -1
    return 0


# ------------------------------------------------------------------ batched ladder

def _ladder_zero(N: int, a, b, x0, p: int):
    """Mask of lanes where [N](x0) is the point at infinity, x-only ladder.

    Works on numpy uint64 arrays (p < 2^32) or plain ints.  Differential
    addition uses the Brier-Joye formulas with affine difference x0 != 0.
    """
    def dbl(X, Z):
        XX = X * X % p
        ZZ = Z * Z % p
        aZZ = a * ZZ % p
        t = (XX + p - aZZ) % p
        bZ3 = b * (ZZ * Z % p) % p
        X2 = (t * t % p + p - 8 * (bZ3 * X % p) % p) % p
        Z2 = 4 * (Z * ((XX * X % p + aZZ * X % p + bZ3) % p) % p) % p
        return X2, Z2

    def dadd(X1, Z1, X2, Z2):
        x1x2 = X1 * X2 % p
        z1z2 = Z1 * Z2 % p
        u = (x1x2 + p - a * z1z2 % p) % p
        s = (X1 * Z2 % p + X2 * Z1 % p) % p
        X3 = (u * u % p + p - 4 * (b * z1z2 % p) * s % p) % p
        d = (X1 * Z2 % p + p - X2 * Z1 % p) % p
        Z3 = x0 * (d * d % p) % p
        return X3, Z3

    one = x0 * 0 + 1
    R0 = (x0, one)
    R1 = dbl(x0, one)
    for bit in bin(N)[3:]:
        # every lane shares the scalar, so one branch serves the whole batch
        if bit == "1":
            R0, R1 = dadd(*R0, *R1), dbl(*R1)
        else:
            R0, R1 = dbl(*R0), dadd(*R0, *R1)
    return R0[1] == 0


def _pick_family(N1: int, N2: int, surface2: bool = False) -> tuple[int, int, int]:
    """(N, target order, other order) with N | target and phi(N) largest.

    With v = 1 the groups are cyclic, so any N dividing the order is fine.
    Surface curves for v = 2 have full 2-torsion, so their exponent divides
    half the order and N must too.
    """
    best = (0, 1, N1, N2)
    div = 2 if surface2 else 1
    for N in kernels.FAMILIES:
        for tgt, oth in ((N1, N2), (N2, N1)):
            if (tgt // div) % N == 0:
                key = (_phi(N), N)
                if key > best[:2]:
                    best = (key[0], N, tgt, oth)
    return best[1], best[2], best[3]


def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def _j_of(a: int, b: int, p: int) -> int | None:
    a3 = 4 * a * a * a % p
    den = (a3 + 27 * b * b) % p
    if den == 0:
        return None
    return 1728 * a3 * mod_inv(den, p) % p


def _accept(j: int, D: int, sp: SplitPrime, surface2: bool) -> bool:
    p = sp.p
    if j in (0, 1728 % p):
        return False
    E = curve_from_j(j, p)
    if surface2 and not full_two_torsion(E):
        return False
    return has_trace(E, sp.t) != 0


def find_j1(D: int, sp: SplitPrime, seed: int = 0, surface2: bool | None = None,
            max_trials: int | None = None, h_hint: int | None = None) -> int:
    """A j-invariant in Ell_O(F_p) for the fundamental discriminant D."""
    p, t = sp.p, sp.t
    if surface2 is None:
        surface2 = sp.v == 2
    if D == -3:
        return 0
    if D == -4:
        return 1728 % p
    if max_trials is None:
        max_trials = 200 * p + 10_000
    N1 = p + 1 - t
    rng = np.random.default_rng([seed, p])
    h_est = max(1, h_hint or 1)
    if kernels.usable_mont(p):
        return _find_j1_family(D, sp, rng, surface2, max_trials, h_est)
    trials = 0
    use_numpy = p < (1 << 32)
    # roughly one expected hit per batch, clamped
    batch = int(min(BATCH_MAX, max(BATCH_MIN, p // h_est)))
    while trials < max_trials:
        if use_numpy:
            k = rng.integers(1, p - 1, size=batch, dtype=np.uint64)
            x0 = rng.integers(1, p, size=batch, dtype=np.uint64)
            a = 3 * k % np.uint64(p)
            b = 2 * k % np.uint64(p)
            hits = np.nonzero(_ladder_zero(N1, a, b, x0, p))[0]
            ks = [int(k[i]) for i in hits]
            trials += batch
        else:
            kk = int(rng.integers(1, p - 1))
            xx = int(rng.integers(1, p))
            ks = [kk] if _ladder_zero(N1, 3 * kk % p, 2 * kk % p, xx, p) else []
            trials += 1
        for kk in ks:
            if (kk + 1) % p == 0:
                continue
            j = 1728 * kk * mod_inv(kk + 1, p) % p
            if _accept(j, D, sp, surface2):
                return j
    raise NotFound(f"no curve with trace +-{t} found over F_{p}")


def _find_j1_family(D: int, sp: SplitPrime, rng, surface2: bool, max_trials: int,
                    h_est: int) -> int:
    p, t = sp.p, sp.t
    N, target, other = _pick_family(p + 1 - t, p + 1 + t, surface2)
    gain = _phi(N)
    batch = int(min(4 * BATCH_MAX, max(BATCH_MIN, p // (h_est * gain))))
    mb = kernels.MontBatch(p)
    trials = 0
    while trials < max_trials:
        ts = rng.integers(0, p, size=batch, dtype=np.uint64)
        us = rng.integers(0, p, size=batch, dtype=np.uint64)
        A, B = mb.family(N, ts, us)
        live = np.nonzero((A | B) != 0)[0]
        trials += batch
        if live.size == 0:
            continue
        x0 = mb.to_mont(rng.integers(1, p, size=live.size, dtype=np.uint64))
        hits = mb.hits(target, other, A[live], B[live], x0)
        for i in live[np.nonzero(hits)[0]]:
            j = _j_of(mb.from_mont(A[i]), mb.from_mont(B[i]), p)
            if j is not None and _accept(j, D, sp, surface2):
                return j
    raise NotFound(f"no curve with trace +-{t} found over F_{p}")


# ------------------------------------------------------------------ orbit enumeration

OrbitTable = list[list[int]]


def _expected_first(P: Presentation, i: int) -> int:
    g = P.generators[i]
    if kronecker(P.D, g.norm) == 0 or compose(g.form, g.form) == principal_form(P.D):
        return 1
    return 2


def _surface_roots(rs: Sequence[int], p: int) -> list[int]:
    return [r for r in rs if full_two_torsion(curve_from_j(r, p))]


def _unique_root(g: Poly, p: int, surface: bool) -> int:
    lin = _frobenius_gcd(g, p)
    if surface:
        cand = _surface_roots(roots(lin, p), p)
        if len(cand) != 1:
            raise WalkError(f"expected one surface neighbour, found {len(cand)}")
        return cand[0]
    if degree(lin) != 1:
        raise WalkError(f"expected one new neighbour, found {degree(lin)}")
    return (-lin[0]) % p


def walk_cycle(j: int, phi: ModPoly, steps: int, p: int, expected: int,
               surface: bool = False) -> list[int]:
    """[j, l j, l^2 j, ...] of length steps + 1 with a fixed direction."""
    out = [j]
    if steps == 0:
        return out
    filtered = surface and phi.level == 2
    fast = kernels.usable_poly(p)
    rs = None
    if filtered or not fast:
        rs = roots(phi.specialize(j, p), p)
        if surface:
            rs = _surface_roots(rs, p)
        if len(rs) != expected:
            raise WalkError(f"Phi_{phi.level}({j}, X) has {len(rs)} usable roots mod {p}, "
                            f"expected {expected}")
    if fast:
        # for odd l every neighbour of a surface curve is on the surface, so
        # the 2-torsion filter only runs for l = 2
        status, cyc = kernels.walk_cycle_fast(phi.rows_np(p), j, steps, p, expected,
                                              first=rs[0] if filtered else None,
                                              surface=filtered)
        if status == 1:
            raise WalkError(f"Phi_{phi.level}({j}, X) does not have {expected} usable "
                            f"roots mod {p}")
        if status:
            raise WalkError(f"expected one new neighbour on the Phi_{phi.level} walk mod {p}")
        return cyc
    prev, cur = j, rs[0]
    out.append(cur)
    for _ in range(steps - 1):
        g = exact_div(phi.specialize(cur, p), [(-prev) % p, 1], p)
        nxt = _unique_root(g, p, surface)
        prev, cur = cur, nxt
        out.append(cur)
    return out


def enumerate_vectors(j1: int, P: Presentation, modpolys: Mapping[int, ModPoly], p: int,
                      surface2: bool = False) -> dict[tuple[int, ...], int]:
    """Map each exponent vector to a j-invariant, walking the last generator first."""
    k = len(P.generators)
    level = {(): j1}
    for i in range(k - 1, -1, -1):
        g = P.generators[i]
        if g.norm not in modpolys:
            raise MissingModPoly(f"no modular polynomial of level {g.norm}")
        phi = modpolys[g.norm]
        exp = _expected_first(P, i)
        nxt = {}
        for suffix, j in level.items():
            cyc = walk_cycle(j, phi, g.relative_order - 1, p, exp,
                             surface=surface2 and g.norm == 2)
            for e, jj in enumerate(cyc):
                nxt[(e,) + suffix] = jj
        level = nxt
    if len(set(level.values())) != P.h:
        raise WalkError(f"walk visited {len(set(level.values()))} distinct j, expected {P.h}")
    return level


def enumerate_orbits(j1: int, P: Presentation, G: SubgroupSpec,
                     modpolys: Mapping[int, ModPoly], p: int,
                     surface2: bool = False) -> OrbitTable:
    """Rows of G-orbits in coset order (row 0 contains j1)."""
    vecs = enumerate_vectors(j1, P, modpolys, p, surface2)
    rows: list[list[int]] = [[0] * G.n for _ in range(G.m)]
    for vec, j in vecs.items():
        rows[coset_of(vec, G, P)][position_in_coset(vec, G, P)] = j
    return rows


def ell_O_census(D: int, sp: SplitPrime, surface2: bool | None = None) -> set[int]:
    """Ell_O(F_p) by counting points on every curve y^2 = x^3 + 3k x + 2k (small p only)."""
    p, t = sp.p, sp.t
    if surface2 is None:
        surface2 = sp.v == 2
    if D == -3:
        return {0}
    if D == -4:
        return {1728 % p}
    x = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    x3 = x * x % p * x % p
    lin = (3 * x + 2) % p
    out: set[int] = set()
    ks = np.arange(1, p - 1, dtype=np.int64)  # k = -1 and k = 0 are singular or j = 0
    chunk = max(1, (1 << 22) // p)
    for lo in range(0, len(ks), chunk):
        kk = ks[lo:lo + chunk]
        rhs = (x3[None, :] + kk[:, None] * lin[None, :]) % p
        traces = -chi[rhs].sum(axis=1)
        sel = np.abs(traces) == t
        if surface2:
            sel &= (rhs == 0).sum(axis=1) == 3
        for k in kk[sel]:
            k = int(k)
            out.add(1728 * k * mod_inv(k + 1, p) % p)
    return out
