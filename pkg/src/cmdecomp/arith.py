"""Integer, modular and fixed-point helpers shared by the rest of the package.

Residues are plain Python ints in ``[0, modulus)``; the modulus travels
alongside as a separate argument.  Only :class:`FixedPoint` gets its own
type, because its scale has to stay attached to the value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd, isqrt

FRACBITS = 128

# Deterministic Miller-Rabin: the first 13 primes are a complete witness set
# for every n < 3317044064679887385961981.
_DET_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DET_LIMIT = 3317044064679887385961981
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


class NotInvertible(ArithmeticError):
    """Raised when a residue shares a factor with its modulus."""


def mod_inv(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m``."""
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {m} (gcd={gcd(a, m)})") from None


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int, rounds: int = 40) -> bool:
    """Miller-Rabin primality test.

    Deterministic below 3.3e24; above that ``rounds`` random bases are added
    to the fixed witness set, giving error probability below 4**-rounds.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _DET_WITNESSES:
        if not _mr_round(n, d, s, a):
            return False
    if n < _DET_LIMIT:
        return True
    # seeded from n so the answer is reproducible
    rng = random.Random(n)
    for _ in range(rounds):
        if not _mr_round(n, d, s, rng.randrange(2, n - 1)):
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    n += 1
    while not is_prime(n):
        n += 1
    return n


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n <= 0:
        raise ValueError("kronecker symbol needs n > 0")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of ``a`` modulo the prime ``p`` (Tonelli-Shanks), or None."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def factor(n: int, rho_budget: int = 200_000) -> tuple[dict[int, int], int]:
    """Factor ``n`` as far as trial division and Pollard rho allow.

    Returns ``(factors, cofactor)``; ``cofactor`` is 1 when the factorisation
    is complete, otherwise an unfactored composite.
    """
    factors: dict[int, int] = {}

    def add(p: int) -> None:
        factors[p] = factors.get(p, 0) + 1

    n = abs(n)
    for p in (2, 3, 5):
        while n % p == 0:
            add(p)
            n //= p
    # 6k +- 1 wheel
    f, step = 7, 4
    while f <= 10_000 and f * f <= n:
        while n % f == 0:
            add(f)
            n //= f
        f += step
        step = 6 - step
    stack = [n] if n > 1 else []
    leftover = 1
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            add(m)
            continue
        d = _pollard_rho(m, rho_budget)
        if d is None:
            leftover *= m
        else:
            stack.extend((d, m // d))
    return factors, leftover


def _pollard_rho(n: int, budget: int) -> int | None:
    if n % 2 == 0:
        return 2
    r = isqrt(n)
    if r * r == n:
        return r
    for c in range(1, 20):
        x = y = 2
        d = 1
        steps = 0
        while d == 1 and steps < budget:
            # Brent-style batching of the gcds
            prod = 1
            for _ in range(64):
                x = (x * x + c) % n
                y = (y * y + c) % n
                y = (y * y + c) % n
                prod = prod * abs(x - y) % n
            steps += 64
            d = gcd(prod, n)
        if 1 < d < n:
            return d
        if d == n:
            continue
        if steps >= budget:
            return None
    return None


@dataclass(frozen=True)
class FixedPoint:
    """Binary fixed-point real ``scaled * 2**-fracbits``."""

    scaled: int = 0
    fracbits: int = FRACBITS

    def __post_init__(self) -> None:
        if self.fracbits < 96:
            raise ValueError("fracbits must be at least 96")

    def nearest_integer(self) -> int:
        """Round half up to the nearest integer."""
        return (self.scaled + (1 << (self.fracbits - 1))) >> self.fracbits

    def as_fraction(self):
        from fractions import Fraction
        return Fraction(self.scaled, 1 << self.fracbits)


def scaled_quotient(num: int, den: int, fracbits: int = FRACBITS) -> int:
    """round(num * 2**fracbits / den), ties away from -infinity."""
    return ((num << (fracbits + 1)) + den) // (den << 1)


def fixed_add(acc: FixedPoint, num: int, den: int) -> FixedPoint:
    """Return ``acc + num/den`` with the quotient rounded to the grid."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    if num == 0:
        return acc
    return FixedPoint(acc.scaled + scaled_quotient(num, den, acc.fracbits), acc.fracbits)
