import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

import oracles as orc
from cosym import catalog as cat
from cosym import linalg as la
from cosym.correspondence import extension_algebra
from cosym.errors import (
    DiagonalBracket,
    DimensionMismatch,
    DuplicateEntry,
    IndexOutOfRange,
    LinearlyDependentBasis,
    NotASubalgebra,
)
from cosym.lie import (
    abelian,
    ad,
    bracket,
    derivation_space,
    from_table,
    is_derivation,
    jacobi_defect,
    new_lie_algebra,
    restrict_to_subspace,
    transport,
)


def heis3():
    return new_lie_algebra(3, [(0, 1, {2: 1})])


def sympy_derivation_dim(g):
    """Dimension of Der(g) from a sympy nullspace over symbolic matrix entries."""
    n = g.dim
    syms = sympy.symbols(f"d0:{n * n}")
    d = sympy.Matrix(n, n, syms)
    c = [[sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in g.c[i, j]]) for j in range(n)]
         for i in range(n)]

    def br(x, y):
        out = sympy.zeros(n, 1)
        for i in range(n):
            for j in range(n):
                if x[i] != 0 and y[j] != 0:
                    out += x[i] * y[j] * c[i][j]
        return out

    eqs = []
    e = [sympy.Matrix([int(i == k) for i in range(n)]) for k in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = d * br(e[i], e[j])
            rhs = br(d * e[i], e[j]) + br(e[i], d * e[j])
            eqs.extend(list(lhs - rhs))
    if not eqs:
        return n * n
    a, _ = sympy.linear_eq_to_matrix(eqs, syms)
    return n * n - a.rank()


SMALL = {
    "heis3": heis3,
    "h4": cat.h4_algebra,
    "r2prime": cat.r2prime_algebra,
    "abelian3": lambda: abelian(3),
    "aff1": lambda: new_lie_algebra(2, [(0, 1, {1: 1})]),
    "sl2": lambda: new_lie_algebra(3, [(0, 1, {2: 1}), (2, 0, {0: 2}), (2, 1, {1: -2})]),
}


@pytest.mark.parametrize("name", sorted(SMALL))
def test_derivation_dim_matches_sympy(name):
    g = SMALL[name]()
    assert not jacobi_defect(g)
    space = derivation_space(g)
    assert space.dim == sympy_derivation_dim(g)
    rng = random.Random(0)
    for _ in range(3):
        d = space.sample(rng)
        assert orc.is_derivation(g.c, d) and is_derivation(g, d)


def test_known_derivation_dims():
    assert derivation_space(heis3()).dim == 6
    assert derivation_space(abelian(3)).dim == 9
    assert derivation_space(SMALL["sl2"]()).dim == 3
    assert derivation_space(cat.filiform6_algebra()).dim == 11


def test_inner_derivations_are_derivations():
    g = cat.h4_algebra()
    for i in range(g.dim):
        assert is_derivation(g, ad(g, g.basis(i)))


def test_bracket_antisymmetric_and_matches_oracle():
    g = cat.filiform7_algebra(1, 2, 3, 4)
    rng = random.Random(2)
    for _ in range(10):
        x = la.rarray([rng.randint(-3, 3) for _ in range(g.dim)])
        y = la.rarray([rng.randint(-3, 3) for _ in range(g.dim)])
        assert la.equal(bracket(g, x, y), -bracket(g, y, x))
        assert la.equal(bracket(g, x, y), orc.br(g.c, x, y))
        assert la.equal(ad(g, x) @ y, bracket(g, x, y))


def test_new_lie_algebra_input_errors():
    with pytest.raises(IndexOutOfRange):
        new_lie_algebra(2, [(0, 2, {0: 1})])
    with pytest.raises(DuplicateEntry):
        new_lie_algebra(3, [(0, 1, {2: 1}), (1, 0, {2: 1})])
    with pytest.raises(DiagonalBracket):
        new_lie_algebra(2, [(1, 1, {0: 1})])
    with pytest.raises(DimensionMismatch):
        new_lie_algebra(0, [])


def test_reversed_entry_is_negated():
    g = new_lie_algebra(3, [(1, 0, {2: 1})])
    assert g.c[0, 1, 2] == -1 and g.c[1, 0, 2] == 1


def test_jacobi_defect_witness():
    g = new_lie_algebra(3, [(0, 1, {2: 1}), (0, 2, {0: 1})])
    bad = jacobi_defect(g)
    assert bad and bad[0][:3] == (0, 1, 2)


def test_from_table_labels():
    g = from_table(("a", "b", "c"), {"a,b": {"c": 1}})
    assert g.labels == ("a", "b", "c")
    assert g.c[0, 1, 2] == 1
    assert g.index("c") == 2
    with pytest.raises(IndexOutOfRange):
        g.index("z")


def test_restrict_to_subspace():
    g = cat.h4_algebra()
    sub, _ = restrict_to_subspace(g, [g.basis(0), g.basis(1), g.basis(2)])
    assert sub.dim == 3 and sub.c[0, 1, 2] == 1
    with pytest.raises(NotASubalgebra):
        restrict_to_subspace(g, [g.basis(0), g.basis(1)])
    with pytest.raises(LinearlyDependentBasis):
        restrict_to_subspace(g, [g.basis(0), g.basis(0)])


def test_transport_is_isomorphism():
    g = cat.r2prime_algebra()
    psi = la.rarray([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 2, 1], [0, 0, 0, 1]])
    g2 = transport(g, psi)
    for i in range(4):
        for j in range(4):
            assert la.equal(psi @ bracket(g, g.basis(i), g.basis(j)), bracket(g2, psi[:, i], psi[:, j]))


def test_extension_by_non_derivation_breaks_jacobi():
    h = cat.h4_algebra()
    d = la.freeze(np.diag([Fraction(1), 0, 0, 0]).astype(object))
    assert not is_derivation(h, d)
    assert jacobi_defect(extension_algebra(h, d))
    good = derivation_space(h).basis[0]
    assert not jacobi_defect(extension_algebra(h, good))
