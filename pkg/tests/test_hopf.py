"""chain_engine: cobar complexes, Cotor tables, monogenic closed forms."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabkit.fields import F2, F3, QQ, FieldSpec, UsageError
from stabkit.grading import Box, Degree
from stabkit.hopf import (HopfPresentation, MonogenicFactor, cobar_complex,
                          cotor_box, materialize, monogenic_cotor_closed)

BOX8 = Box(n_max=8, d_min=0, d_max=8)


def hopf(field, *factors):
    return HopfPresentation(field, factors=list(factors))


def test_cotor_exterior_y1():
    A = hopf(F2, MonogenicFactor("y", 1, "exterior"))
    table = cotor_box(A, BOX8)
    for n in range(9):
        assert table.dims.get(Degree(n, 0), 0) == 1
    assert all(deg.d == 0 for deg, c in table.dims.items() if c)


def test_cotor_rational_x2():
    A = hopf(QQ, MonogenicFactor("x", 2, "polynomial"))
    table = cotor_box(A, BOX8)
    assert table.dims.get(Degree(0, 0), 0) == 1
    assert table.dims.get(Degree(2, 1), 0) == 1
    assert table.dims.get(Degree(4, 2), 0) == 0
    assert sum(table.dims.values()) == 2


def test_cotor_f2_truncated_height2():
    A = hopf(F2, MonogenicFactor("x", 1, "truncated", height=2))
    table = cotor_box(A, BOX8)
    closed = monogenic_cotor_closed(F2, MonogenicFactor("x", 1, "truncated", height=2),
                                    BOX8)
    assert table.dims == closed.dims
    # polynomial algebra on classes at (1,0) and (2,1)
    assert closed.dims.get(Degree(1, 0)) == 1
    assert closed.dims.get(Degree(2, 1)) == 1
    assert closed.dims.get(Degree(3, 1)) == 1


def test_cotor_f3_truncated_x2():
    fac = MonogenicFactor("x", 2, "truncated", height=1)
    table = cotor_box(hopf(F3, fac), BOX8)
    closed = monogenic_cotor_closed(F3, fac, BOX8)
    assert table.dims == closed.dims
    # Lambda[x_] (x) F_3[zeta x_] with zeta x_ at (6,4)
    assert closed.dims.get(Degree(2, 1)) == 1
    assert closed.dims.get(Degree(6, 4)) == 1
    assert closed.dims.get(Degree(4, 2), 0) == 0
    assert closed.dims.get(Degree(8, 5)) == 1  # x_ * zeta(x_)


def test_monogenic_closed_exterior_y3():
    closed = monogenic_cotor_closed(QQ, MonogenicFactor("y", 3, "exterior"),
                                    Box(n_max=9, d_min=0, d_max=9))
    assert closed.dims == {Degree(0, 0): 1, Degree(3, 2): 1, Degree(6, 4): 1,
                           Degree(9, 6): 1}


def test_exterior_equals_truncated_height1_at_p2():
    box = Box(n_max=6, d_min=0, d_max=6)
    a = cotor_box(hopf(F2, MonogenicFactor("x", 1, "exterior")), box)
    b = cotor_box(hopf(F2, MonogenicFactor("x", 1, "truncated", height=1)), box)
    assert a.dims == b.dims


def test_cotor_polynomial_f2():
    # F_2[x], |x| = 1: Cotor = F_2[x_, xi x_, xi^2 x_, ...]
    fac = MonogenicFactor("x", 1, "polynomial")
    box = Box(n_max=6, d_min=0, d_max=6)
    assert cotor_box(hopf(F2, fac), box).dims == \
        monogenic_cotor_closed(F2, fac, box).dims


def test_cotor_kunneth_on_pairs():
    box = Box(n_max=6, d_min=0, d_max=6)
    f1 = MonogenicFactor("y", 1, "exterior")
    f2 = MonogenicFactor("x", 2, "polynomial")
    t1 = cotor_box(hopf(QQ, f1), box)
    t2 = cotor_box(hopf(QQ, f2), box)
    t12 = cotor_box(hopf(QQ, f1, f2), box)
    for deg in box.degrees():
        conv = sum(t1.dims.get(Degree(n1, d1), 0) *
                   t2.dims.get(Degree(deg.n - n1, deg.d - d1), 0)
                   for n1 in range(deg.n + 1) for d1 in range(deg.d + 1))
        assert t12.dims.get(deg, 0) == conv, deg


def test_cotor_rejects_grading_zero():
    with pytest.raises(UsageError):
        HopfPresentation(F2, factors=[MonogenicFactor("x", 0, "polynomial")])


def test_odd_p_parity_validation():
    with pytest.raises(UsageError):
        HopfPresentation(F3, factors=[MonogenicFactor("x", 3, "polynomial")])
    with pytest.raises(UsageError):
        HopfPresentation(QQ, factors=[MonogenicFactor("y", 2, "exterior")])


def test_explicit_presentation_cotor():
    # explicit Lambda[y], |y| = 1 (primitive, no reduced coproduct)
    explicit = {
        "basis": [{"name": "y", "grading": 1}],
        "coproduct": [{"of": "y", "terms": [
            {"left": "y", "right": "1"}, {"left": "1", "right": "y"}]}],
    }
    A = HopfPresentation(F2, explicit=explicit)
    table = cotor_box(A, Box(n_max=5, d_min=0, d_max=5))
    for n in range(6):
        assert table.dims.get(Degree(n, 0), 0) == 1


def test_explicit_grading_violation_detected():
    explicit = {
        "basis": [{"name": "a", "grading": 1}, {"name": "b", "grading": 2}],
        "coproduct": [{"of": "a", "terms": [{"left": "b", "right": "b"}]}],
    }
    with pytest.raises(UsageError):
        HopfPresentation(QQ, explicit=explicit)


def test_materialize_weights_for_factors():
    A = hopf(F2, MonogenicFactor("x", 1, "truncated", height=2))
    data = materialize(A, 3)
    assert data.weights == {"x": 1, "x^2": 2, "x^3": 3}


def test_cobar_d_squared_odd_p_and_rational():
    # the sign convention survives coassociativity at odd p and over Q
    cobar_complex(hopf(F3, MonogenicFactor("x", 2, "truncated", height=2)),
                  Box(n_max=8, d_min=0, d_max=8))
    cobar_complex(hopf(QQ, MonogenicFactor("x", 2, "polynomial"),
                       MonogenicFactor("y", 3, "exterior")),
                  Box(n_max=8, d_min=0, d_max=8))


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 2), st.integers(1, 2))
def test_cotor_matches_closed_form_random_monogenic(p, m_scale, height):
    field = FieldSpec.prime(p)
    m = m_scale * (2 if p != 2 else 1)
    fac = MonogenicFactor("x", m, "truncated", height=height)
    box = Box(n_max=6, d_min=0, d_max=6)
    brute = cotor_box(HopfPresentation(field, factors=[fac]), box)
    closed = monogenic_cotor_closed(field, fac, box)
    assert brute.dims == closed.dims
