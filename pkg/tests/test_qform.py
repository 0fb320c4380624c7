import random

import pytest
from hypothesis import given, settings, strategies as st

from cmdecomp.arith import kronecker
from cmdecomp.qform import (Form, LimitExceeded, class_number, compose, conductor,
                            enumerate_reduced, fundamental_part, inverse, power, prime_form,
                            principal_form, reduce_form)


def fundamental(D):
    return D % 4 in (0, 1) and D < 0 and conductor(D) == 1


def dirichlet_h(D):
    """Class number formula, valid for fundamental D < -4."""
    s = sum(kronecker(D, a) * a for a in range(1, -D))
    return -s // -D


FUND = [D for D in range(-5, -1500, -1) if fundamental(D)]


@pytest.mark.parametrize("D", random.Random(7).sample(FUND, 40) + [-23, -971, -84])
def test_class_number_formula(D):
    assert class_number(D) == dirichlet_h(D)


def test_small_class_numbers():
    assert [class_number(D) for D in (-3, -4, -7, -8, -23, -971)] == [1, 1, 1, 1, 3, 15]


def test_fundamental_part():
    assert fundamental_part(-12) == (-3, 2)
    assert fundamental_part(-971 * 9) == (-971, 3)
    assert fundamental_part(-16) == (-4, 2)
    assert conductor(-971) == 1


def test_reduced_forms_reduced_and_primitive():
    for f in enumerate_reduced(-971):
        assert f.is_reduced() and f.is_primitive() and f.disc == -971
        assert reduce_form(f) == f


forms971 = st.sampled_from(enumerate_reduced(-971))


@settings(max_examples=60)
@given(forms971, forms971, forms971)
def test_group_axioms(f, g, k):
    e = principal_form(-971)
    assert compose(f, e) == f
    assert compose(f, g) == compose(g, f)
    assert compose(compose(f, g), k) == compose(f, compose(g, k))
    assert compose(f, inverse(f)) == e
    assert power(f, 15) == e


def test_reduce_form_equivalence():
    # (a, b, c) -> (a, b + 2a, ...) is properly equivalent
    f = Form(3, 1, 81)
    g = Form(3, 7, (49 + 971) // 12)
    assert reduce_form(g) == f


def test_prime_form():
    assert prime_form(-971, 3) == Form(3, 1, 81)
    assert prime_form(-971, 2) is None  # -971 = 5 mod 8: 2 inert
    assert prime_form(-23, 2) == Form(2, 1, 3)
    with pytest.raises(ValueError):
        prime_form(-971, 4)


def test_limit():
    with pytest.raises(LimitExceeded):
        enumerate_reduced(-10**7 - 3, limit=10**6)
