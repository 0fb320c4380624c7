import math

import pytest
from hypothesis import given, strategies as st

from cmdecomp.clgroup import (subgroup_candidates, subgroup_elements_arbitrary, subgroup_for_order,
                              subgroup_of_order_any)
from cmdecomp.heights import (HeightProfile, best_subgroup, bik, height_bound_general,
                              height_bound_opt, profile_for, stage_bound)


def test_bik_values():
    assert bik(-971, 1) == pytest.approx(141.23, abs=0.01)
    assert bik(-971, 15) == pytest.approx(11.45, abs=0.01)


@given(st.integers(3, 10**14), st.integers(1, 1000))
def test_bik_no_overflow_and_monotone(absD, A):
    b = bik(-absD, A)
    assert math.isfinite(b) and b > math.log2(2114.567)
    assert bik(-absD, A + 1) <= b


def test_bik_rejects_nonpositive():
    with pytest.raises(ValueError):
        bik(-971, 0)


def test_bounds_971(pres971):
    assert height_bound_opt(profile_for(pres971, subgroup_for_order(pres971, 5))) == 340
    cos = subgroup_elements_arbitrary(pres971, subgroup_of_order_any(pres971, 3))
    assert height_bound_opt(HeightProfile.from_cosets(-971, cos)) == 342
    assert height_bound_general(profile_for(pres971, subgroup_for_order(pres971, 5))) == 1060


def test_profile_shape(pres971):
    prof = profile_for(pres971, subgroup_for_order(pres971, 5))
    assert (prof.m, prof.n, prof.h) == (3, 5, 15)
    assert all(t <= s for s, t in zip(prof.sums, prof.maxima))


def test_best_subgroup(pres971):
    G, b = best_subgroup(pres971, subgroup_candidates(pres971))
    assert (G.n, b) == (5, 340)
    # 2 n^2 <= q excludes n = 5 when q = 31
    G, _ = best_subgroup(pres971, subgroup_candidates(pres971), q=31)
    assert G.n < 5


def test_stage_bound():
    q = 1029167
    assert stage_bound(340, 3, q, "A1") == 340
    assert stage_bound(340, 3, q, "A2") == math.ceil(340 + math.log2(3) + 2 * math.log2(q))
    assert stage_bound(340, 3, q, "A2L") == math.ceil(340 + math.log2(3) + math.log2(q))
    with pytest.raises(ValueError):
        stage_bound(1, 1, q, "A3")


@pytest.mark.parametrize("D", [-23, -271, -971, -1507, -3299, -4999])
def test_trivial_bound_covers_actual_height(D):
    from cmdecomp.clgroup import build_presentation
    from cmdecomp.engine import hilbert_over_Z
    P = build_presentation(D)
    bound = height_bound_opt(profile_for(P, subgroup_for_order(P, 1)))
    H = hilbert_over_Z(D)
    assert math.log2(max(abs(c) for c in H)) <= bound
