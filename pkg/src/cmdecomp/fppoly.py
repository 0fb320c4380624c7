"""Dense univariate polynomials over a prime field.

A polynomial is a list of ints in ``[0, p)``, constant term first, with no
trailing zeros; ``[]`` is the zero polynomial.  Every function takes the
modulus ``p`` explicitly.  Large products go through Kronecker substitution
on gmpy2 integers, small ones stay schoolbook.
"""

from __future__ import annotations

import random
from typing import Sequence

import gmpy2

from .arith import mod_inv, sqrt_mod

Poly = list  # list[int], low degree first

KRONECKER_THRESHOLD = 32


class DuplicateRoots(ValueError):
    """The interpolation points passed to :func:`hecke_combine` repeat."""


def trim(f: Poly) -> Poly:
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Poly) -> int:
    return len(f) - 1


def poly_add(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    r = list(f)
    for i, c in enumerate(g):
        r[i] = (r[i] + c) % p
    return trim(r)


def poly_sub(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    r = [0] * n
    for i, c in enumerate(f):
        r[i] = c
    for i, c in enumerate(g):
        r[i] = (r[i] - c) % p
    return trim(r)


def poly_scale(f: Poly, c: int, p: int) -> Poly:
    c %= p
    if c == 0:
        return []
    return [a * c % p for a in f]


def poly_monic(f: Poly, p: int) -> Poly:
    if not f or f[-1] == 1:
        return list(f)
    return poly_scale(f, mod_inv(f[-1], p), p)


def _mul_school(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    r = [0] * (len(f) + len(g) - 1)
    for j, b in enumerate(g):
        if b:
            for i, a in enumerate(f):
                r[i + j] += a * b
    return trim([c % p for c in r])


def _pack(f: Poly, width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in f), "little")


def _unpack(x: int, width: int, count: int, p: int) -> Poly:
    raw = x.to_bytes(width * count, "little")
    return trim([int.from_bytes(raw[i:i + width], "little") % p
                 for i in range(0, width * count, width)])


def _mul_kronecker(f: Poly, g: Poly, p: int) -> Poly:
    bound = min(len(f), len(g)) * (p - 1) ** 2
    width = (bound.bit_length() + 7) // 8
    prod = gmpy2.mpz(_pack(f, width)) * gmpy2.mpz(_pack(g, width))
    return _unpack(int(prod), width, len(f) + len(g) - 1, p)


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return []
    if min(len(f), len(g)) < KRONECKER_THRESHOLD:
        return _mul_school(f, g, p)
    return _mul_kronecker(f, g, p)


def _divrem_school(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    dg = len(g) - 1
    r = list(f)
    if len(r) <= dg:
        return [], trim(r)
    inv = mod_inv(g[-1], p)
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] % p
        if c:
            c = c * inv % p
            q[i - dg] = c
            base = i - dg
            for j in range(dg):
                r[base + j] -= c * g[j]
        r[i] = 0
    return trim(q), trim([c % p for c in r[:dg]])


def series_inverse(a: Poly, n: int, p: int) -> Poly:
    """First ``n`` coefficients of the power series 1/a (a[0] != 0)."""
    b = [mod_inv(a[0], p)]
    k = 1
    while k < n:
        k = min(2 * k, n)
        ab = poly_mul(a[:k], b, p)[:k]
        # b <- b (2 - a b)
        t = [(-c) % p for c in ab]
        t += [0] * (k - len(t))
        t[0] = (t[0] + 2) % p
        b = poly_mul(b, trim(t), p)[:k]
    return b + [0] * (n - len(b))


class Reducer:
    """Reduction modulo a fixed polynomial, Newton-accelerated when large."""

    def __init__(self, g: Poly, p: int):
        if not g:
            raise ZeroDivisionError("reduction modulo the zero polynomial")
        self.p = p
        self.g = poly_monic(g, p)
        self.d = len(self.g) - 1
        self.fast = self.d >= KRONECKER_THRESHOLD
        if self.fast:
            rev = self.g[::-1]
            self.inv = series_inverse(rev, self.d, p)

    def reduce(self, f: Poly) -> Poly:
        d, p = self.d, self.p
        if len(f) <= d:
            return f
        k = len(f) - 1 - d
        if not self.fast or k >= d:
            return _divrem_school(f, self.g, p)[1]
        frev = f[::-1][:k + 1]
        qrev = poly_mul(frev, trim(self.inv[:k + 1]), p)[:k + 1]
        qrev += [0] * (k + 1 - len(qrev))
        q = trim(qrev[::-1])
        qg = poly_mul(q, self.g, p)[:d]
        return poly_sub(f[:d], qg, p)


def poly_divrem(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    df, dg = len(f) - 1, len(g) - 1
    if df < dg:
        return [], list(f)
    k = df - dg
    if dg < KRONECKER_THRESHOLD or k < KRONECKER_THRESHOLD:
        return _divrem_school(f, g, p)
    lead_inv = mod_inv(g[-1], p)
    gm = poly_scale(g, lead_inv, p)
    inv = series_inverse(gm[::-1], k + 1, p)
    qrev = poly_mul(f[::-1][:k + 1], trim(inv), p)[:k + 1]
    qrev += [0] * (k + 1 - len(qrev))
    q = trim(qrev[::-1])
    r = poly_sub(f, poly_mul(q, gm, p), p)
    return poly_scale(q, lead_inv, p), r


def poly_rem(f: Poly, g: Poly, p: int) -> Poly:
    return poly_divrem(f, g, p)[1]


def exact_div(f: Poly, g: Poly, p: int) -> Poly:
    q, r = poly_divrem(f, g, p)
    if r:
        raise ArithmeticError("division is not exact")
    return q


def poly_gcd(f: Poly, g: Poly, p: int) -> Poly:
    """Monic gcd (the zero polynomial if both inputs are zero)."""
    a, b = trim(list(f)), trim(list(g))
    while b:
        a, b = b, poly_rem(a, b, p)
    return poly_monic(a, p)


def derivative(f: Poly, p: int) -> Poly:
    return trim([i * c % p for i, c in enumerate(f)][1:])


def evaluate(f: Poly, x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def poly_powmod(base: Poly, e: int, modulus: Poly | Reducer, p: int) -> Poly:
    red = modulus if isinstance(modulus, Reducer) else Reducer(modulus, p)
    result: Poly = [1] if red.d > 0 else []
    b = red.reduce(list(base))
    for bit in bin(e)[2:]:
        result = red.reduce(poly_mul(result, result, p))
        if bit == "1":
            result = red.reduce(poly_mul(result, b, p))
    return result


def subproduct_tree(points: Sequence[int], p: int) -> list[list[Poly]]:
    """Levels of the product tree of the linear factors (X - point)."""
    level = [[(-y) % p, 1] for y in points]
    levels = [level]
    while len(level) > 1:
        nxt = [poly_mul(level[i], level[i + 1], p) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        levels.append(nxt)
        level = nxt
    return levels


def poly_from_roots(roots: Sequence[int], p: int) -> Poly:
    """Monic polynomial with the given multiset of roots."""
    if not roots:
        return [1]
    return subproduct_tree(roots, p)[-1][0]


def _combine_up(levels: list[list[Poly]], leaves: list[Poly], p: int) -> Poly:
    comb = leaves
    for lvl in levels[:-1]:
        nxt = []
        for i in range(0, len(lvl) - 1, 2):
            left = poly_mul(comb[i], lvl[i + 1], p)
            right = poly_mul(comb[i + 1], lvl[i], p)
            nxt.append(poly_add(left, right, p))
        if len(lvl) % 2:
            nxt.append(comb[-1])
        comb = nxt
    return comb[0]


def hecke_combine_all(theta_cols: Sequence[Sequence[int]], ys: Sequence[int], p: int) -> list[Poly]:
    """All sums  sum_i theta[k][i] * prod_{j != i} (Y - y_j),  one per column k.

    Shares a single product tree across the columns.  Repeated ``ys`` are
    allowed here; the result is still the polynomial identity mod p.
    """
    if not ys:
        return [[] for _ in theta_cols]
    levels = subproduct_tree(ys, p)
    out = []
    for col in theta_cols:
        if len(col) != len(ys):
            raise ValueError("theta column length must match the number of points")
        leaves = [[c % p] if c % p else [] for c in col]
        out.append(_combine_up(levels, leaves, p))
    return out


def hecke_combine(thetas: Sequence[int], ys: Sequence[int], V: Poly, p: int) -> Poly:
    """W(Y) = sum_i thetas[i] * V(Y) / (Y - ys[i]).

    The result has degree below ``len(ys)`` and satisfies
    ``W(y_i) = thetas[i] * V'(y_i)``.
    """
    if len(thetas) != len(ys) or len(ys) != len(V) - 1:
        raise ValueError("need one theta per root of V")
    if len(set(y % p for y in ys)) != len(ys):
        raise DuplicateRoots("interpolation points are not distinct")
    return hecke_combine_all([thetas], ys, p)[0]


def complements(z: int, ys: Sequence[int], p: int) -> list[int]:
    """``[prod_{j != i} (z - y_j) for i]``, valid even when z hits some y_j."""
    diffs = [(z - y) % p for y in ys]
    m = len(diffs)
    prefix = [1] * (m + 1)
    for i, d in enumerate(diffs):
        prefix[i + 1] = prefix[i] * d % p
    out = [0] * m
    suffix = 1
    for i in range(m - 1, -1, -1):
        out[i] = prefix[i] * suffix % p
        suffix = suffix * diffs[i] % p
    return out


def _frobenius_gcd(f: Poly, p: int) -> Poly:
    """gcd(X^p - X, f): the product of the distinct linear factors of f."""
    red = Reducer(f, p)
    xp = poly_powmod([0, 1], p, red, p)
    return poly_gcd(poly_sub(xp, [0, 1], p), f, p)


def _split_once(g: Poly, p: int, rng: random.Random) -> tuple[Poly, Poly]:
    """Split a product of >= 2 distinct linear factors into two nonconstant parts."""
    red = Reducer(g, p)
    while True:
        delta = rng.randrange(p)
        h = poly_powmod([delta, 1], (p - 1) // 2, red, p)
        h = poly_gcd(poly_sub(h, [1], p), g, p)
        if 0 < len(h) - 1 < len(g) - 1:
            return h, exact_div(g, h, p)


def _linear_part(f: Poly, p: int) -> Poly:
    f = poly_monic(trim(list(f)), p)
    if len(f) <= 1:
        return [1]
    if p == 2:
        return poly_from_roots([r for r in (0, 1) if evaluate(f, r, p) == 0], p)
    return _frobenius_gcd(f, p)


def _quadratic_roots(g: Poly, p: int) -> list[int]:
    c, b = g[0], g[1]
    disc = (b * b - 4 * c) % p
    s = sqrt_mod(disc, p)
    inv2 = mod_inv(2, p)
    return sorted({(-b + s) * inv2 % p, (-b - s) * inv2 % p})


def find_root(f: Poly, p: int, seed: int = 0) -> int | None:
    """A root of ``f`` in F_p chosen by seeded equal-degree splitting, or None."""
    if not trim(list(f)):
        raise ValueError("the zero polynomial has every element as a root")
    g = _linear_part(f, p)
    if len(g) == 1:
        return None
    rng = random.Random(seed)
    while len(g) > 2:
        a, b = _split_once(g, p, rng)
        if len(a) == len(b):
            g = a if rng.random() < 0.5 else b
        else:
            g = a if len(a) < len(b) else b
    return (-g[0]) % p


def roots(f: Poly, p: int, seed: int = 0) -> list[int]:
    """All distinct roots of ``f`` in F_p, sorted."""
    g = _linear_part(f, p)
    if len(g) == 1:
        return []
    rng = random.Random(seed)
    out: list[int] = []
    stack = [g]
    while stack:
        h = stack.pop()
        if len(h) == 2:
            out.append((-h[0]) % p)
        elif len(h) == 3 and p != 2:
            out.extend(_quadratic_roots(h, p))
        else:
            stack.extend(_split_once(h, p, rng))
    return sorted(out)


def split_check(f: Poly, p: int) -> bool:
    """True iff ``f`` is a product of linear factors over F_p (repeats allowed)."""
    r = poly_monic(trim(list(f)), p)
    if not r:
        raise ValueError("split_check of the zero polynomial")
    while len(r) > 1:
        g = _linear_part(r, p)
        if len(g) == 1:
            return False
        r = exact_div(r, g, p)
    return True
