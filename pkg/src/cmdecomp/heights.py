"""Height bounds (in bits) for the coefficients of V and the W_k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .clgroup import (Presentation, SubgroupSpec, coset_decomposition)
from .qform import Form

J_CONSTANT = 2114.567
_LG_E = math.log2(math.e)


def bik(D: int, A: int) -> float:
    """lg(exp(pi*sqrt|D|/A) + 2114.567), computed without overflow."""
    if A < 1:
        raise ValueError("A must be positive")
    x = math.pi * math.sqrt(-D) / A
    if x > 50:
        return x * _LG_E + math.log1p(J_CONSTANT * math.exp(-x)) * _LG_E
    return math.log2(math.exp(x) + J_CONSTANT)


@dataclass(frozen=True)
class HeightProfile:
    sums: tuple[float, ...]    # s_i = sum_k b_ik
    maxima: tuple[float, ...]  # t_i = max_k b_ik
    m: int
    n: int

    @classmethod
    def from_cosets(cls, D: int, cosets: Sequence[Sequence[Form]]) -> "HeightProfile":
        sums, maxima = [], []
        for row in cosets:
            bs = [bik(D, f.a) for f in row]
            sums.append(sum(bs))
            maxima.append(max(bs))
        return cls(tuple(sums), tuple(maxima), len(cosets), len(cosets[0]))

    @property
    def h(self) -> int:
        return self.m * self.n

    @property
    def total(self) -> float:
        return sum(self.sums)


def height_bound_opt_real(prof: HeightProfile) -> float:
    m, n = prof.m, prof.n
    spread = max(s - t for s, t in zip(prof.sums, prof.maxima))
    return math.log2(m) + m + n + m * math.log2(n) + sum(prof.maxima) + spread


def height_bound_opt(prof: HeightProfile) -> int:
    """Bound for s = +-e1, rounded up to whole bits."""
    return math.ceil(height_bound_opt_real(prof))


def height_bound_general(prof: HeightProfile) -> int:
    """Bound valid for any random s with coefficients in [0, 2m^2 - 1]."""
    h = prof.h
    return math.ceil(5 * h + 2 * h * math.log2(h) + 2 * prof.total)


def profile_for(P: Presentation, G: SubgroupSpec) -> HeightProfile:
    return HeightProfile.from_cosets(P.D, coset_decomposition(P, G))


def best_subgroup(P: Presentation, candidates: Sequence[SubgroupSpec],
                  q: int | None = None) -> tuple[SubgroupSpec, int]:
    """Candidate with the smallest optimised bound (ties: larger n, then smaller d).

    With ``q`` given, only subgroups with 2n^2 <= q are admissible.
    """
    best = None
    for G in candidates:
        if q is not None and 2 * G.n * G.n > q:
            continue
        b = height_bound_opt(profile_for(P, G))
        key = (b, -G.n, G.d)
        if best is None or key < best[0]:
            best = (key, G, b)
    if best is None:
        raise ValueError("no admissible subgroup candidate")
    return best[1], best[2]


def stage_bound(b: int, m: int, q: int, variant: str) -> int:
    """Bits needed for Algorithm 2 ("A2": m q^(m-1) B) or its large-q form ("A2L": m q B)."""
    lgq = math.log2(q)
    if variant == "A2":
        return math.ceil(b + math.log2(m) + (m - 1) * lgq)
    if variant == "A2L":
        return math.ceil(b + math.log2(m) + lgq)
    if variant == "A1":
        return b
    raise ValueError(f"unknown variant {variant!r}")
