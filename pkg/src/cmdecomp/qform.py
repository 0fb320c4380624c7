"""Positive definite binary quadratic forms Ax^2 + Bxy + Cy^2 of discriminant D < 0."""

from __future__ import annotations

from math import gcd, isqrt
from typing import NamedTuple

from .arith import is_prime, kronecker, sqrt_mod

DESK_LIMIT = 10**10


class LimitExceeded(RuntimeError):
    """The discriminant is beyond what brute-force enumeration will attempt."""


class Form(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 if (abs(b) == a or a == c) else True

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1


def check_discriminant(D: int) -> int:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    return D


def fundamental_part(D: int) -> tuple[int, int]:
    """Split D = f^2 * D0 with D0 fundamental; returns (D0, f)."""
    check_discriminant(D)
    f = 1
    d = D
    p = 2
    while p * p <= abs(d):
        while d % (p * p) == 0:
            cand = d // (p * p)
            if cand % 4 in (0, 1):
                d = cand
                f *= p
            else:
                break
        p += 1 if p == 2 else 2
    return d, f


def conductor(D: int) -> int:
    return fundamental_part(D)[1]


def principal_form(D: int) -> Form:
    check_discriminant(D)
    b = D % 2
    return Form(1, b, (b * b - D) // 4)


def reduce_form(f: Form | tuple[int, int, int]) -> Form:
    """Gauss reduction to the unique reduced representative."""
    a, b, c = f
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form must be positive definite")
    while True:
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * k * a
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return Form(a, b, c)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(d, u, v) with u*a + v*b = d = gcd(a, b)."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -a, -u0, -v0
    return a, u0, v0


def compose(f: Form, g: Form) -> Form:
    """Dirichlet composition followed by reduction."""
    if f.disc != g.disc:
        raise ValueError("forms have different discriminants")
    a1, b1, c1 = f
    a2, b2, c2 = g
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form(Form(a3, b3, c3))


def inverse(f: Form) -> Form:
    return reduce_form(Form(f.a, -f.b, f.c))


def power(f: Form, e: int) -> Form:
    result = principal_form(f.disc)
    if e < 0:
        f, e = inverse(f), -e
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        e >>= 1
        if e:
            base = compose(base, base)
    return result


def enumerate_reduced(D: int, limit: int = DESK_LIMIT) -> list[Form]:
    """All primitive reduced forms of discriminant D, ordered by (A, B)."""
    check_discriminant(D)
    if -D > limit:
        raise LimitExceeded(f"|D| = {-D} exceeds the enumeration limit {limit}")
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        b0 = -a + 1
        if (b0 - D) % 2:
            b0 += 1
        for b in range(b0, a + 1, 2):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(Form(a, b, c))
    return out


def class_number(D: int, limit: int = DESK_LIMIT) -> int:
    return len(enumerate_reduced(D, limit))


def prime_form(D: int, ell: int) -> Form | None:
    """Reduced form of the class of an invertible ideal of norm ``ell``.

    Picks the smallest B >= 0 with B^2 = D mod 4*ell.  Returns None when
    ``ell`` is inert or the resulting form is not primitive (ell divides the
    conductor).
    """
    check_discriminant(D)
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell == 2:
        r = D % 8
        if r == 1:
            b = 1
        elif r == 0:
            b = 0
        elif r == 4:
            b = 2
        else:
            return None
    else:
        if kronecker(D, ell) == -1:
            return None
        r = sqrt_mod(D % ell, ell)
        cands = [x for x in (r, ell - r) if (x - D) % 2 == 0]
        b = min(cands)
    c = (b * b - D) // (4 * ell)
    f = Form(ell, b, c)
    if not f.is_primitive():
        return None
    return reduce_form(f)
