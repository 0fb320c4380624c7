"""Primes that split completely in the ring class field: 4p = t^2 + v^2 |D|."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Sequence

from .arith import is_prime, is_square, sqrt_mod
from .qform import check_discriminant, conductor


class InsufficientPrimes(RuntimeError):
    """The search range was exhausted before the bound was met."""


@dataclass(frozen=True)
class SplitPrime:
    p: int
    t: int
    v: int


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[SplitPrime, ...]
    product_bits: float

    def __len__(self) -> int:
        return len(self.primes)

    @property
    def moduli(self) -> list[int]:
        return [sp.p for sp in self.primes]


def _cornacchia4(d: int, p: int) -> tuple[int, int] | None:
    """Solve x^2 + d y^2 = 4p (d > 0, d = 0 or 3 mod 4, p odd prime)."""
    r = sqrt_mod(-d, p)
    if r is None:
        return None
    if (r - d) % 2:
        r = p - r
    a, b = 2 * p, r
    lim = isqrt(4 * p)
    while b > lim:
        a, b = b, a % b
    rest = 4 * p - b * b
    if rest < 0 or rest % d:
        return None
    y2 = rest // d
    if not is_square(y2):
        return None
    return b, isqrt(y2)


def solve_norm(D: int, p: int) -> tuple[int, int] | None:
    """(t, v) with 4p = t^2 - v^2 D and t, v > 0, or None."""
    check_discriminant(D)
    d = -D
    if p > 2 and d % p:
        sol = _cornacchia4(d, p)
        if sol is not None and sol[0] > 0 and sol[1] > 0:
            return sol
    # small p, ramified p, or an imprimitive solution
    for t in range(1, isqrt(4 * p) + 1):
        rest = 4 * p - t * t
        if rest > 0 and rest % d == 0 and is_square(rest // d):
            return t, isqrt(rest // d)
    return None


def admissible_v(D: int, max_v: int = 2) -> list[int]:
    """Values of v the rest of the pipeline can handle.

    v = 1 always; v = 2 only when D = 1 mod 8, where it is the sole option
    (odd v forces p even) and the surface can be recognised by full
    rational 2-torsion.
    """
    if D % 8 == 1 and conductor(D) % 2 == 1:
        return [2] if max_v >= 2 else []
    return [1]


def candidates_upto(D: int, limit: int, vs: Sequence[int]) -> list[SplitPrime]:
    """Every (p, t, v) with p <= limit, v in vs, sorted by (p, t)."""
    d = -D
    out = []
    for v in vs:
        base = v * v * d
        tmax = isqrt(max(4 * limit - base, 0))
        for t in range(1, tmax + 1):
            num = t * t + base
            if num % 4:
                continue
            p = num // 4
            if p <= limit and is_prime(p):
                out.append(SplitPrime(p, t, v))
    out.sort(key=lambda s: (s.p, s.t, s.v))
    return out


def select_primes(D: int, bound_bits: float, norms: Iterable[int] = (),
                  max_v: int = 2, exclude: Iterable[int] = (),
                  max_limit: int | None = None) -> PrimeSet:
    """Smallest primes (by p, then t) whose product exceeds 2^(bound_bits + 2)."""
    if bound_bits < 1:
        raise ValueError("bound_bits must be at least 1")
    check_discriminant(D)
    vs = admissible_v(D, max_v)
    if not vs:
        raise InsufficientPrimes(f"no admissible v for D = {D}")
    banned = set(norms) | set(exclude)
    target = bound_bits + 2
    d = -D
    limit = max(v * v * d for v in vs) // 4 + 1000
    if max_limit is None:
        max_limit = max(limit, 1) << 40
    while True:
        chosen: list[SplitPrime] = []
        bits = 0.0
        for sp in candidates_upto(D, limit, vs):
            p = sp.p
            if p <= 3 or d % p == 0 or p in banned:
                continue
            chosen.append(sp)
            bits += math.log2(p)
            if bits > target:
                return PrimeSet(tuple(chosen), bits)
        if limit >= max_limit:
            raise InsufficientPrimes(
                f"only {bits:.1f} of {target:.1f} bits below {limit}")
        limit = min(2 * limit, max_limit)


def in_PD(D: int, q: int) -> bool:
    """Whether q is a prime splitting completely (norm equation solvable)."""
    return is_prime(q) and solve_norm(D, q) is not None


def random_cm_prime(D: int, bits: int, seed: int = 0, v: int | None = None) -> SplitPrime:
    """A random prime q of about `bits` bits with 4q = t^2 - v^2 D.

    v defaults to 2 when D = 1 mod 8 (where v = 1 only yields even q) and to 1
    otherwise.
    """
    import random

    check_discriminant(D)
    if bits < 8:
        raise ValueError("bits must be at least 8")
    if v is None:
        v = 2 if D % 8 == 1 else 1
    if v < 1:
        raise ValueError("v must be positive")
    d = -D
    if v % 2 and D % 8 == 1:
        raise ValueError(f"no odd q has 4q = t^2 + {v * v * d} with odd v")
    rng = random.Random(seed)
    half = max(3, (bits + 2) // 2)
    parity = (v * d) % 2  # t^2 = v^2 D mod 4 forces t = v D mod 2
    while True:
        t = rng.getrandbits(half) | (1 << (half - 1))
        t += (t - parity) % 2
        n = t * t + v * v * d
        if n % 4 == 0 and is_prime(n // 4):
            return SplitPrime(n // 4, t, v)
