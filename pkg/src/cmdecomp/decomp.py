"""Splitting H_D along a subgroup G: orbit polynomials P_i, values y_i, V, W_k, U."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .fppoly import Poly, complements, hecke_combine_all, poly_from_roots

KINDS = ("e1", "minus_e1", "random")


@dataclass(frozen=True)
class SymFunc:
    """s = sign * (e_1 + c_2 e_2 + ... + c_n e_n); ``coeffs`` holds c_2..c_n."""

    kind: str
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetric function kind {self.kind!r}")
        if self.kind != "random" and self.coeffs:
            raise ValueError("e1 kinds take no coefficients")

    @property
    def shortcut(self) -> bool:
        """True when y is read off theta_{n-1}, so W_{n-1} is never needed."""
        return self.kind != "random"

    def to_json(self) -> dict:
        return {"kind": self.kind, "coeffs": list(self.coeffs)}


def choose_symfunc(n: int, m: int, attempt: int = 0, seed: int = 0,
                   first: str = "e1") -> SymFunc:
    """e1 (or ``first``) on the first attempt, random coefficients afterwards."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return SymFunc("e1")
    if attempt == 0 and first != "random":
        return SymFunc(first)
    rng = random.Random(f"symfunc:{seed}:{attempt}:{n}:{m}")
    hi = 2 * m * m - 1
    return SymFunc("random", tuple(rng.randint(0, hi) for _ in range(n - 1)))


def orbit_to_theta(orbit: Sequence[int], p: int) -> list[int]:
    """theta_0..theta_{n-1} of prod (X - j) over the orbit."""
    return poly_from_roots(list(orbit), p)[:-1]


def y_from_theta(theta: Sequence[int], s: SymFunc, p: int) -> int:
    n = len(theta)
    # e_k = (-1)^k theta_{n-k}
    def e(k: int) -> int:
        v = theta[n - k] % p
        return (-v) % p if k % 2 else v
    if s.kind == "e1":
        return e(1)
    if s.kind == "minus_e1":
        return (-e(1)) % p
    if len(s.coeffs) != n - 1:
        raise ValueError("symmetric function has the wrong number of coefficients")
    acc = e(1)
    for k, c in enumerate(s.coeffs, start=2):
        acc += c * e(k)
    return acc % p


def build_V(ys: Sequence[int], p: int) -> Poly:
    return poly_from_roots(list(ys), p)


def build_W(thetas: Sequence[Sequence[int]], ys: Sequence[int], p: int,
            skip_top: bool = False) -> list[Poly]:
    """W_k(Y) = sum_i theta_ik V(Y)/(Y - y_i), for k < n (or k < n-1 with skip_top)."""
    n = len(thetas[0])
    upto = n - 1 if skip_top else n
    cols = [[th[k] for th in thetas] for k in range(upto)]
    return hecke_combine_all(cols, ys, p)


def eval_w(thetas: Sequence[Sequence[int]], ys: Sequence[int], z: int, p: int,
           skip_top: bool = False) -> list[int]:
    """W_k(z) via the complements prod_{j != i}(z - y_j)."""
    zs = complements(z, ys, p)
    n = len(thetas[0])
    upto = n - 1 if skip_top else n
    return [sum(th[k] * zi for th, zi in zip(thetas, zs)) % p for k in range(upto)]


def assemble_U(vprime_at_y: int, y: int, wvals: Sequence[int], s: SymFunc, q: int,
               n: int | None = None) -> Poly:
    """Monic U_y(X) = X^n + sum_k W_k(y)/V'(y) X^k."""
    if vprime_at_y % q == 0:
        raise ZeroDivisionError("V'(y) vanishes; y is a repeated root of V")
    inv = pow(vprime_at_y, -1, q)
    coeffs = [w * inv % q for w in wvals]
    if n is None:
        n = len(wvals) + (1 if s.shortcut else 0)
    if len(coeffs) == n - 1:
        if not s.shortcut:
            raise ValueError("the X^(n-1) slot can only be inferred for s = +-e1")
        # theta_{n-1} = -e_1: equals y for -e1 and -y for e1
        coeffs.append(y % q if s.kind == "minus_e1" else (-y) % q)
    if len(coeffs) != n:
        raise ValueError("wrong number of W values")
    return coeffs + [1]
