"""Left-invariant exterior forms and the Chevalley-Eilenberg differential.

A :class:`KForm` stores coefficients on strictly increasing index tuples,
so ``{(0, 2): 3}`` is ``3 e^0 ^ e^2``. Evaluation is the determinant
convention: ``e^{i1..ik}(e_i1, ..., e_ik) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg as la
from .errors import ArityMismatch, DegreeZero, DimensionMismatch, IndexOutOfRange, WrongDegree
from .lie import LieAlgebra


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


@dataclass(frozen=True, eq=False)
class KForm:
    dim: int
    degree: int
    _terms: tuple[tuple[tuple[int, ...], object], ...]

    @property
    def coeffs(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType(dict(self._terms))

    def __getitem__(self, idx) -> object:
        sign, key = _sort_sign(idx)
        if sign == 0:
            return Fraction(0)
        return sign * dict(self._terms).get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        return (isinstance(other, KForm) and self.dim == other.dim
                and self.degree == other.degree and self._terms == other._terms)

    def __hash__(self):
        return hash((self.dim, self.degree, self._terms))

    def _same(self, other: "KForm"):
        if self.dim != other.dim:
            raise DimensionMismatch("forms live on spaces of different dimension")
        if self.degree != other.degree:
            raise WrongDegree("cannot add forms of different degree")

    def __add__(self, other: "KForm") -> "KForm":
        self._same(other)
        acc = dict(self._terms)
        for k, v in other._terms:
            acc[k] = acc.get(k, 0) + v
        return kform(self.dim, self.degree, acc)

    def __neg__(self) -> "KForm":
        return kform(self.dim, self.degree, {k: -v for k, v in self._terms})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, s) -> "KForm":
        if isinstance(s, KForm):
            return wedge(self, s)
        return kform(self.dim, self.degree, {k: s * v for k, v in self._terms})

    __rmul__ = __mul__

    def __repr__(self):
        if not self._terms:
            return f"KForm(0, degree={self.degree}, dim={self.dim})"
        body = " + ".join(f"{v}*e^{''.join(map(str, k)) or '()'}" for k, v in self._terms)
        return f"KForm({body})"


def kform(dim: int, degree: int, terms: Mapping | Iterable = ()) -> KForm:
    """Canonicalize ``terms`` (index tuples in any order) into a KForm."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict[tuple[int, ...], object] = {}
    for idx, v in items:
        idx = tuple(idx)
        if len(idx) != degree:
            raise WrongDegree(f"index tuple {idx} in a degree-{degree} form")
        for i in idx:
            if not 0 <= i < dim:
                raise IndexOutOfRange(f"index {i} outside 0..{dim - 1}")
        sign, key = _sort_sign(idx)
        if sign == 0:
            continue
        if not isinstance(v, float):
            v = la.frac(v)
        acc[key] = acc.get(key, 0) + sign * v
    return KForm(dim, degree, tuple(sorted((k, v) for k, v in acc.items() if v != 0)))


def basis_form(dim: int, *idx: int) -> KForm:
    """``e^{i1} ^ ... ^ e^{ik}``."""
    return kform(dim, len(idx), {tuple(idx): 1})


def one_form(coords) -> KForm:
    coords = list(coords)
    return kform(len(coords), 1, {(i,): v for i, v in enumerate(coords)})


def zero(dim: int, degree: int) -> KForm:
    return KForm(dim, degree, ())


def scalar(dim: int, value) -> KForm:
    return kform(dim, 0, {(): value})


def wedge(a: KForm, b: KForm) -> KForm:
    if a.dim != b.dim:
        raise DimensionMismatch("wedge of forms on different spaces")
    deg = a.degree + b.degree
    if deg > a.dim:
        return zero(a.dim, deg)
    acc: dict = {}
    for ia, va in a._terms:
        for ib, vb in b._terms:
            sign, key = _sort_sign(ia + ib)
            if sign:
                acc[key] = acc.get(key, 0) + sign * va * vb
    return kform(a.dim, deg, acc)


def power(a: KForm, n: int) -> KForm:
    out = scalar(a.dim, 1)
    for _ in range(n):
        out = wedge(out, a)
    return out


def _on_basis(a: KForm, idx: Sequence[int]):
    """a(e_i1, ..., e_ik) for arbitrary (unsorted) indices."""
    return a[idx]


def interior(x, a: KForm) -> KForm:
    """Contraction in the first slot: (i_x a)(y...) = a(x, y...)."""
    x = np.asarray(x, dtype=object)
    if x.shape != (a.dim,):
        raise DimensionMismatch("vector and form dimensions differ")
    if a.degree == 0:
        raise DegreeZero("cannot contract a scalar")
    acc: dict = {}
    for idx, v in a._terms:
        for m, i in enumerate(idx):
            if x[i] != 0:
                key = idx[:m] + idx[m + 1:]
                acc[key] = acc.get(key, 0) + (-1) ** m * x[i] * v
    return kform(a.dim, a.degree - 1, acc)


def evaluate(a: KForm, xs: Sequence) -> object:
    """Full alternating multilinear evaluation a(x1, ..., xk)."""
    if len(xs) != a.degree:
        raise ArityMismatch(f"degree-{a.degree} form given {len(xs)} arguments")
    if a.degree == 0:
        return a[()]
    cols = [np.asarray(x, dtype=object) for x in xs]
    if any(c.shape != (a.dim,) for c in cols):
        raise DimensionMismatch("argument dimension differs from the form's")
    m = np.stack(cols, axis=1)
    total = Fraction(0)
    for idx, v in a._terms:
        total = total + v * la.det(m[list(idx), :])
    return total


def cartan_d(g: LieAlgebra, a: KForm) -> KForm:
    """Chevalley-Eilenberg differential.

    (da)(x0..xk) = sum_{i<j} (-1)^(i+j) a([xi, xj], x0..^i..^j..xk).
    Scalars are closed.
    """
    if a.dim != g.dim:
        raise DimensionMismatch("form and algebra dimensions differ")
    n, k = g.dim, a.degree
    if k == 0 or k + 1 > n:
        return zero(n, k + 1)
    acc: dict = {}
    for J in combinations(range(n), k + 1):
        val = Fraction(0)
        for p in range(k + 1):
            for q in range(p + 1, k + 1):
                v = g.c[J[p], J[q]]
                rest = J[:p] + J[p + 1:q] + J[q + 1:]
                sgn = (-1) ** (p + q)
                for m in range(n):
                    if v[m] != 0:
                        val += sgn * v[m] * _on_basis(a, (m,) + rest)
        if val != 0:
            acc[J] = val
    return kform(n, k + 1, acc)


def pullback(psi, a: KForm) -> KForm:
    """(psi^* a)(x1..xk) = a(psi x1, ..., psi xk)."""
    psi = np.asarray(psi, dtype=object)
    if psi.shape != (a.dim, a.dim):
        raise DimensionMismatch("pullback matrix does not match the form")
    if a.degree == 0:
        return a
    acc = {}
    for J in combinations(range(a.dim), a.degree):
        val = evaluate(a, [psi[:, j] for j in J])
        if val != 0:
            acc[J] = val
    return kform(a.dim, a.degree, acc)


def is_top_nonzero(g: LieAlgebra, a: KForm) -> bool:
    if a.dim != g.dim:
        raise DimensionMismatch("form and algebra dimensions differ")
    if a.degree != g.dim:
        raise WrongDegree(f"top degree is {g.dim}, got {a.degree}")
    return not a.is_zero()


def form_matrix(a: KForm) -> np.ndarray:
    """Gram matrix W[i, j] = a(e_i, e_j) of a 2-form."""
    if a.degree != 2:
        raise WrongDegree("Gram matrix needs a 2-form")
    w = la.rzeros((a.dim, a.dim))
    for (i, j), v in a._terms:
        w[i, j] = v
        w[j, i] = -v
    return la.freeze(w)


def form_from_matrix(w) -> KForm:
    """2-form from the upper triangle of a (skew) matrix."""
    w = np.asarray(w, dtype=object)
    n = w.shape[0]
    return kform(n, 2, {(i, j): w[i, j] for i in range(n) for j in range(i + 1, n)})


def embed(a: KForm, dim: int, offset: int) -> KForm:
    """Relabel index i as i + offset in a ``dim``-dimensional space."""
    return kform(dim, a.degree, {tuple(i + offset for i in idx): v for idx, v in a._terms})


def restrict(a: KForm, vectors: Sequence) -> KForm:
    """a restricted to span(vectors), in that basis."""
    k = len(vectors)
    acc = {}
    for J in combinations(range(k), a.degree):
        val = evaluate(a, [vectors[j] for j in J])
        if val != 0:
            acc[J] = val
    return kform(k, a.degree, acc)
