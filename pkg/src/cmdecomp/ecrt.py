"""Explicit CRT modulo q, plus plain CRT lifting to Z.

For c with 4|c| < M = prod p_i and residues c_i = c mod p_i,

    c = sum c_i a_i M_i - r M,   a_i = (M/p_i)^-1 mod p_i,

where r is the integer nearest to sum c_i a_i / p_i.  Reducing the first
sum mod q while approximating the second in fixed point gives c mod q
without ever forming c.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2

from .arith import FRACBITS, FixedPoint, NotInvertible


def product_tree(moduli: Sequence[int]) -> list[list[int]]:
    level = [gmpy2.mpz(x) for x in moduli]
    levels = [level]
    while len(level) > 1:
        nxt = [level[i] * level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        levels.append(nxt)
        level = nxt
    return levels


def remainder_tree(x: int, levels: list[list[int]]) -> list[int]:
    """x mod each leaf of a product tree."""
    rems = [gmpy2.mpz(x) % levels[-1][0]]
    for lvl in reversed(levels[:-1]):
        nxt = []
        for i, node in enumerate(lvl):
            nxt.append(rems[i // 2] % node)
        rems = nxt
    return [int(r) for r in rems]


class CrtContext:
    """Per-run constants: a_i, M mod q and, in mode "A", the table of M_i mod q."""

    def __init__(self, primes: Sequence[int], q: int, mode: str = "B",
                 fracbits: int = FRACBITS):
        if mode not in ("A", "B"):
            raise ValueError("mode must be 'A' or 'B'")
        if len(set(primes)) != len(primes):
            raise ValueError("primes must be distinct")
        self.primes = [int(p) for p in primes]
        self.q = int(q)
        self.mode = mode
        self.fracbits = fracbits
        tree = product_tree(self.primes)
        self.M = int(tree[-1][0])
        self.M_mod_q = self.M % self.q
        # (M/p_i) mod p_i = (M mod p_i^2) / p_i
        sq_tree = product_tree([p * p for p in self.primes])
        rems = remainder_tree(self.M, sq_tree)
        self.a = []
        for p, r in zip(self.primes, rems):
            cof = r // p
            try:
                self.a.append(pow(cof, -1, p))
            except ValueError:
                raise NotInvertible(f"{p} divides M/{p}") from None
        self.M_i: list[int] | None = None
        self._pinv: dict[int, int] = {}
        if mode == "A":
            self.M_i = [int(gmpy2.mpz(self.M) // p % self.q) for p in self.primes]
        else:
            for p in self.primes:
                if p % self.q == 0:
                    raise NotInvertible(f"{p} is not invertible modulo q")

    def __len__(self) -> int:
        return len(self.primes)

    def Mi(self, i: int) -> int:
        """(M / p_i) mod q."""
        if self.M_i is not None:
            return self.M_i[i]
        pinv = self._pinv.get(i)
        if pinv is None:
            pinv = pow(self.primes[i], -1, self.q)
        return self.M_mod_q * pinv % self.q

    def prime_weights(self, i: int) -> tuple[int, int, int]:
        """(p_i, a_i, M_i mod q) for one prime, computed once per prime per stage."""
        return self.primes[i], self.a[i], self.Mi(i)


class CrtAccumulator:
    """Running pair (sum c_i a_i M_i mod q, sum c_i a_i / p_i) for one target."""

    __slots__ = ("sum_mod_q", "scaled", "fracbits", "count", "__weakref__")
    live = 0
    peak = 0

    def __init__(self, fracbits: int = FRACBITS):
        self.sum_mod_q = 0
        self.scaled = 0
        self.fracbits = fracbits
        self.count = 0
        CrtAccumulator.live += 1
        CrtAccumulator.peak = max(CrtAccumulator.peak, CrtAccumulator.live)

    def __del__(self):
        CrtAccumulator.live -= 1

    @classmethod
    def reset_peak(cls) -> None:
        cls.peak = cls.live

    @property
    def real_sum(self) -> FixedPoint:
        return FixedPoint(self.scaled, self.fracbits)

    def add(self, c: int, p: int, a: int, Mi: int, q: int) -> None:
        u = c * a % p
        if u:
            self.sum_mod_q = (self.sum_mod_q + u * Mi) % q
            f = self.fracbits
            self.scaled += ((u << (f + 1)) + p) // (p << 1)
        self.count += 1


def update(acc: CrtAccumulator, ctx: CrtContext, i: int, c: int) -> None:
    p, a, Mi = ctx.prime_weights(i)
    acc.add(c % p, p, a, Mi, ctx.q)


def finalize(acc: CrtAccumulator, ctx: CrtContext) -> int:
    r = acc.real_sum.nearest_integer()
    return (acc.sum_mod_q - r * ctx.M_mod_q) % ctx.q


def crt_to_integer(residues: Sequence[int], primes: Sequence[int]) -> int:
    """The c with |c| < M/2 and c = residues[i] mod primes[i]."""
    if len(residues) != len(primes):
        raise ValueError("one residue per prime")
    tree = product_tree(primes)
    M = tree[-1][0]
    total = _crt_combine([r % p for r, p in zip(residues, primes)], tree)
    c = int(total % M)
    return c - int(M) if 2 * c > M else c


def _crt_combine(res: Sequence[int], levels: list[list[int]]) -> int:
    # bottom-up Garner-free combination: x_node = x_L + m_L * ((x_R - x_L) / m_L mod m_R)
    vals = [gmpy2.mpz(r) for r in res]
    for lvl in levels[:-1]:
        nxt = []
        for i in range(0, len(lvl) - 1, 2):
            mL, mR = lvl[i], lvl[i + 1]
            xL, xR = vals[i], vals[i + 1]
            t = (xR - xL) * gmpy2.invert(mL, mR) % mR
            nxt.append(xL + mL * t)
        if len(lvl) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def crt_vectors(rows: Sequence[Sequence[int]], primes: Sequence[int]) -> list[int]:
    """Lift many coefficient positions at once; rows[i] holds the residues mod primes[i]."""
    tree = product_tree(primes)
    M = tree[-1][0]
    half = M // 2
    width = len(rows[0])
    out = []
    for k in range(width):
        c = _crt_combine([row[k] % p for row, p in zip(rows, primes)], tree) % M
        out.append(int(c - M if c > half else c))
    return out
