"""Polycyclic presentations of cl(O) and the subgroups whose orbits walks can find.

Relative orders come from brute-force discrete logs over the enumerated
group, which is fine at the class numbers this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .arith import next_prime
from .qform import (DESK_LIMIT, Form, compose, conductor, enumerate_reduced,
                    power, prime_form, principal_form)


@dataclass(frozen=True)
class Generator:
    form: Form
    norm: int
    relative_order: int
    relation: tuple[int, ...]  # exponents over the earlier generators of form**relative_order


@dataclass
class Presentation:
    D: int
    generators: list[Generator]
    h: int
    # reduced form -> exponent vector
    vectors: dict[Form, tuple[int, ...]] = field(repr=False)

    @property
    def norms(self) -> list[int]:
        return [g.norm for g in self.generators]

    @property
    def orders(self) -> list[int]:
        return [g.relative_order for g in self.generators]

    def element(self, vec: Sequence[int]) -> Form:
        f = principal_form(self.D)
        for g, e in zip(self.generators, vec):
            f = compose(f, power(g.form, e))
        return f

    def exponent_vectors(self) -> list[tuple[int, ...]]:
        """All exponent vectors in mixed-radix order, first coordinate fastest."""
        out = [()]
        for r in self.orders:
            out = [v + (e,) for v in out for e in range(r)]
        # re-sort so that the first coordinate varies fastest
        return sorted(out, key=lambda v: tuple(reversed(v)))


@dataclass(frozen=True)
class SubgroupSpec:
    """G = <l_1, ..., l_{d-1}, l_d^e>; d = 0 denotes the trivial subgroup."""

    d: int
    e: int
    n: int
    m: int


def build_presentation(D: int, limit: int = DESK_LIMIT) -> Presentation:
    """Presentation by prime forms of increasing norm, skipping relative order 1."""
    forms = enumerate_reduced(D, limit)
    h = len(forms)
    f_cond = conductor(D)
    ident = principal_form(D)
    vectors: dict[Form, tuple[int, ...]] = {ident: ()}
    gens: list[Generator] = []
    ell = 1
    while len(vectors) < h:
        ell = next_prime(ell)
        if f_cond % ell == 0:
            continue
        g = prime_form(D, ell)
        if g is None:
            continue
        x, r = g, 1
        while x not in vectors:
            x = compose(x, g)
            r += 1
        if r == 1:
            continue
        relation = vectors[x]
        k = len(gens)
        new: dict[Form, tuple[int, ...]] = {}
        gpow = ident
        for e in range(r):
            for f, vec in vectors.items():
                new[compose(f, gpow)] = vec + (e,)
            gpow = compose(gpow, g)
        vectors = {f: v + (0,) * (k + 1 - len(v)) for f, v in new.items()}
        gens.append(Generator(g, ell, r, relation + (0,) * (k - len(relation))))
    return Presentation(D, gens, h, vectors)


def subgroup_candidates(P: Presentation) -> list[SubgroupSpec]:
    """Every distinct subgroup of the condition-(d, e) shape, smallest first."""
    out = [SubgroupSpec(0, 1, 1, P.h)]
    prefix = 1
    for d, r in enumerate(P.orders, start=1):
        for e in range(1, r):
            if r % e == 0:
                n = prefix * (r // e)
                out.append(SubgroupSpec(d, e, n, P.h // n))
        prefix *= r
    return sorted(out, key=lambda s: (s.n, s.d))


def subgroup_for_order(P: Presentation, n: int) -> SubgroupSpec:
    for s in subgroup_candidates(P):
        if s.n == n:
            return s
    raise ValueError(f"no subgroup of order {n} has the required shape")


def _coset_digits(vec: Sequence[int], G: SubgroupSpec, orders: Sequence[int]):
    if G.d == 0:
        return list(vec), list(orders)
    i = G.d - 1
    return [vec[i] % G.e, *vec[G.d:]], [G.e, *orders[G.d:]]


def coset_of(vec: Sequence[int], G: SubgroupSpec, P: Presentation) -> int:
    """Index in [0, m) of the coset of G containing the class with this vector."""
    digits, radices = _coset_digits(vec, G, P.orders)
    idx = 0
    for dgt, rad in zip(reversed(digits), reversed(radices)):
        idx = idx * rad + dgt
    return idx


def position_in_coset(vec: Sequence[int], G: SubgroupSpec, P: Presentation) -> int:
    """Index in [0, n) of the class inside its coset (0 for coset representatives)."""
    if G.d == 0:
        return 0
    digits = [*vec[:G.d - 1], vec[G.d - 1] // G.e]
    radices = [*P.orders[:G.d - 1], P.orders[G.d - 1] // G.e]
    idx = 0
    for dgt, rad in zip(reversed(digits), reversed(radices)):
        idx = idx * rad + dgt
    return idx


def coset_decomposition(P: Presentation, G: SubgroupSpec) -> list[list[Form]]:
    """Rows of forms, one row per coset, identity at [0][0]."""
    rows: list[list[Form | None]] = [[None] * G.n for _ in range(G.m)]
    for f, vec in P.vectors.items():
        rows[coset_of(vec, G, P)][position_in_coset(vec, G, P)] = f
    return rows  # type: ignore[return-value]


def subgroup_elements_arbitrary(P: Presentation, gens: Sequence[Form]) -> list[list[Form]]:
    """Coset decomposition for the subgroup generated by arbitrary forms.

    Cosets appear in order of their first element in P's enumeration, with
    the subgroup itself first and the identity leading every listing.
    """
    ident = principal_form(P.D)
    H = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    H.append(y)
                    nxt.append(y)
        frontier = nxt
    cosets = []
    covered: set[Form] = set()
    order = sorted(P.vectors, key=lambda f: tuple(reversed(P.vectors[f])))
    for f in order:
        if f in covered:
            continue
        row = [compose(f, x) for x in H]
        covered.update(row)
        cosets.append(row)
    return cosets


def subgroup_of_order_any(P: Presentation, n: int) -> list[Form]:
    """Generators for some subgroup of order n (cl(O) abelian, so one exists)."""
    forms = list(P.vectors)
    ident = principal_form(P.D)

    def order(f: Form) -> int:
        x, k = f, 1
        while x != ident:
            x = compose(x, f)
            k += 1
        return k

    # greedy: combine cyclic pieces until the generated subgroup has order n
    gens: list[Form] = []
    size = 1
    for f in sorted(forms, key=lambda f: (order(f), f)):
        if size == n:
            break
        if n % order(f):
            continue
        trial = len(subgroup_elements_arbitrary(P, gens + [f])[0])
        if n % trial == 0 and trial > size:
            gens.append(f)
            size = trial
    if size != n:
        raise ValueError(f"could not find a subgroup of order {n}")
    return gens
