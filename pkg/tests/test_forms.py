import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

import oracles as orc
from cosym import catalog as cat
from cosym import forms as fm
from cosym import linalg as la
from cosym.errors import ArityMismatch, DegreeZero, DimensionMismatch, WrongDegree
from cosym.lie import jacobi_defect, new_lie_algebra, transport

coef = hs.integers(-2, 2).map(Fraction)


@hs.composite
def structure_constants(draw, n):
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(hs.lists(hs.sampled_from([0, 0, 0, 1, -1]), min_size=n, max_size=n))
            if any(v):
                entries.append((i, j, [Fraction(x) for x in v]))
    return new_lie_algebra(n, entries)


@hs.composite
def forms(draw, n, k):
    from itertools import combinations
    terms = {idx: draw(coef) for idx in combinations(range(n), k)}
    return fm.kform(n, k, terms.items())


def test_kform_sorting_and_sign():
    a = fm.kform(3, 2, {(1, 0): 2})
    assert a.coeffs == {(0, 1): -2}
    assert a[(1, 0)] == 2 and a[(0, 0)] == 0
    assert fm.kform(3, 2, {(0, 0): 5}).is_zero()


def test_wedge_anticommutes_on_one_forms():
    a, b = fm.basis_form(3, 0), fm.basis_form(3, 1)
    assert fm.wedge(a, b) == fm.basis_form(3, 0, 1)
    assert fm.wedge(b, a) == -fm.basis_form(3, 0, 1)
    assert fm.wedge(a, a).is_zero()


def test_evaluate_determinant_convention():
    a = fm.basis_form(2, 0, 1)
    e = orc.units(2)
    assert fm.evaluate(a, [e[0], e[1]]) == 1
    assert fm.evaluate(a, [e[1], e[0]]) == -1
    with pytest.raises(ArityMismatch):
        fm.evaluate(a, [e[0]])


@settings(max_examples=40, deadline=None)
@given(forms(4, 2), hs.lists(hs.lists(coef, min_size=4, max_size=4), min_size=2, max_size=2))
def test_evaluate_matches_permutation_sum(a, vs):
    vs = [la.rarray(v) for v in vs]
    assert fm.evaluate(a, vs) == orc.form_value(dict(a.coeffs), vs)
    assert fm.evaluate(a, vs[::-1]) == -fm.evaluate(a, vs)


@settings(max_examples=30, deadline=None)
@given(forms(4, 3), hs.lists(hs.lists(coef, min_size=4, max_size=4), min_size=3, max_size=3))
def test_degree_three_alternating(a, vs):
    vs = [la.rarray(v) for v in vs]
    base = fm.evaluate(a, vs)
    assert fm.evaluate(a, [vs[1], vs[0], vs[2]]) == -base
    assert fm.evaluate(a, [vs[0], vs[0], vs[2]]) == 0
    assert base == orc.form_value(dict(a.coeffs), vs)


@settings(max_examples=40, deadline=None)
@given(structure_constants(4))
def test_d_squared_zero_iff_jacobi(g):
    dd_zero = all(fm.cartan_d(g, fm.cartan_d(g, fm.basis_form(4, i))).is_zero() for i in range(4))
    assert dd_zero == (not jacobi_defect(g))


@settings(max_examples=25, deadline=None)
@given(forms(5, 1), forms(5, 2))
def test_leibniz(a, b):
    g = cat.h4_family_algebra(1, 2)
    lhs = fm.cartan_d(g, fm.wedge(a, b))
    # degree one: d(a ^ b) = da ^ b - a ^ db
    assert lhs == fm.wedge(fm.cartan_d(g, a), b) - fm.wedge(a, fm.cartan_d(g, b))


def test_cartan_d_two_form_matches_oracle():
    g = cat.filiform6_algebra()
    w = cat.filiform6_omega()
    dw = fm.cartan_d(g, w)
    assert dict(dw.coeffs) == orc.d_two_form(g.c, fm.form_matrix(w))
    assert dw.is_zero()


def test_one_form_differential_sign():
    # d eta(x, y) = -eta([x, y])
    g = new_lie_algebra(3, [(0, 1, {2: 1})])
    assert fm.cartan_d(g, fm.basis_form(3, 2)).coeffs == {(0, 1): -1}


@settings(max_examples=25, deadline=None)
@given(forms(4, 1), forms(4, 2))
def test_pullback_naturality(a, b):
    rng = random.Random(5)
    g1 = cat.r2prime_algebra()
    while True:
        psi = la.rarray([[rng.randint(-2, 2) for _ in range(4)] for _ in range(4)])
        if la.det(psi) != 0:
            break
    g2 = transport(g1, psi)
    # psi: g1 -> g2 is a Lie isomorphism, so pullback commutes with d and wedge
    assert fm.pullback(psi, fm.cartan_d(g2, b)) == fm.cartan_d(g1, fm.pullback(psi, b))
    assert fm.pullback(psi, fm.wedge(a, b)) == fm.wedge(fm.pullback(psi, a), fm.pullback(psi, b))


def test_interior_first_slot():
    a = fm.basis_form(3, 0, 1)
    assert fm.interior(la.unit(3, 0), a) == fm.basis_form(3, 1)
    assert fm.interior(la.unit(3, 1), a).coeffs == {(0,): -1}
    with pytest.raises(DegreeZero):
        fm.interior(la.unit(3, 0), fm.scalar(3, 1))
    with pytest.raises(DimensionMismatch):
        fm.interior(la.unit(2, 0), a)


def test_power_and_top_form():
    w = cat.standard_omega(4)
    top = fm.power(w, 2)
    assert top.coeffs == {(0, 1, 2, 3): 2}
    g = cat.h4_algebra()
    assert fm.is_top_nonzero(g, top)
    with pytest.raises(WrongDegree):
        fm.is_top_nonzero(g, w)


def test_form_matrix_roundtrip():
    w = fm.kform(4, 2, {(0, 3): 2, (1, 2): Fraction(-1, 2)})
    m = fm.form_matrix(w)
    assert m[0, 3] == 2 and m[3, 0] == -2
    assert fm.form_from_matrix(m) == w


def test_embed_and_restrict():
    w = cat.standard_omega(4)
    big = fm.embed(w, 5, 1)
    assert big.coeffs == {(1, 2): 1, (3, 4): 1}
    back = fm.restrict(big, [la.unit(5, i) for i in range(1, 5)])
    assert back == w
