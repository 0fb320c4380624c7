import random

import pytest

from cmdecomp.clgroup import (build_presentation, coset_decomposition, coset_of,
                              position_in_coset, subgroup_candidates, subgroup_elements_arbitrary,
                              subgroup_for_order, subgroup_of_order_any)
from cmdecomp.qform import class_number, compose, conductor, power, principal_form


def test_presentation_971(pres971):
    assert pres971.h == 15
    assert pres971.norms == [3, 5]
    assert pres971.orders == [5, 3]


@pytest.mark.parametrize("D", [-84, -420, -3299, -1560, -4027, -971, -23, -4, -3])
def test_presentation_covers_group(D):
    P = build_presentation(D)
    h = class_number(D)
    assert P.h == h
    assert len(P.vectors) == h
    prod = 1
    for g in P.generators:
        prod *= g.relative_order
        assert g.relative_order > 1
    assert prod == h
    # every vector maps back to its form
    for f, vec in P.vectors.items():
        assert P.element(vec) == f
    # relations: g_k^{r_k} equals the recorded word in earlier generators
    for k, g in enumerate(P.generators):
        assert power(g.form, g.relative_order) == P.element(g.relation)


def test_exponent_vector_order(pres971):
    vs = pres971.exponent_vectors()
    assert vs[:6] == [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1)]


def test_subgroup_candidates_971(pres971):
    got = {(G.d, G.e, G.n, G.m) for G in subgroup_candidates(pres971)}
    assert got == {(0, 1, 1, 15), (1, 1, 5, 3), (2, 1, 15, 1)}


@pytest.mark.parametrize("D", [-420, -3299, -1560, -971])
def test_cosets_partition(D):
    P = build_presentation(D)
    for G in subgroup_candidates(P):
        rows = coset_decomposition(P, G)
        flat = [f for r in rows for f in r]
        assert len(flat) == P.h and len(set(flat)) == P.h
        ident = principal_form(D)
        sub = set(rows[0])
        assert rows[0][0] == ident
        # sub is a group and every row is a coset of it
        assert all(compose(a, b) in sub for a in sub for b in sub)
        for r in rows:
            assert {compose(r[0], g) for g in sub} == set(r)


def test_coset_index_ranges(pres971):
    G = subgroup_for_order(pres971, 5)
    seen = set()
    for vec in pres971.vectors.values():
        c, k = coset_of(vec, G, pres971), position_in_coset(vec, G, pres971)
        assert 0 <= c < 3 and 0 <= k < 5
        seen.add((c, k))
    assert len(seen) == 15


def test_subgroup_for_order_rejects(pres971):
    with pytest.raises(ValueError):
        subgroup_for_order(pres971, 3)


def test_arbitrary_subgroup_order3(pres971):
    gens = subgroup_of_order_any(pres971, 3)
    cosets = subgroup_elements_arbitrary(pres971, gens)
    assert len(cosets) == 5 and all(len(r) == 3 for r in cosets)
    assert len({f for r in cosets for f in r}) == 15
