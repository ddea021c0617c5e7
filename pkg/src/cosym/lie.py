"""Lie algebras given by rational structure constants.

Basis positions are 0-based in the Python API. Printed names
(``e1``, ``X0``...) live in :attr:`LieAlgebra.labels` and are what the JSON
formats and reports show.

Vectors are 1D and endomorphisms 2D numpy object arrays of Fractions;
endomorphism matrices use the column convention (column j is the image of
basis vector j).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .errors import (
    CosymError,
    DiagonalBracket,
    DimensionMismatch,
    DuplicateEntry,
    IndexOutOfRange,
    LinearlyDependentBasis,
    NotASubalgebra,
)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    dim: int
    c: np.ndarray  # c[i, j, k]: [e_i, e_j] = sum_k c[i, j, k] e_k
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(self.dim)))
        if len(self.labels) != self.dim:
            raise DimensionMismatch("need one label per basis vector")

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and la.equal(self.c, other.c)

    def __hash__(self):
        return hash((self.dim, tuple(self.c.flat)))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, brackets={self.nonzero_brackets()})"

    def basis(self, i: int) -> np.ndarray:
        return la.unit(self.dim, i)

    @cached_property
    def sparse(self) -> tuple:
        """((i, j, ((k, c_ijk), ...)), ...) over i < j with [e_i, e_j] != 0."""
        return tuple((i, j, tuple((k, v[k]) for k in range(self.dim) if v[k] != 0))
                     for i, j, v in self.nonzero_brackets())

    def nonzero_brackets(self) -> list[tuple[int, int, np.ndarray]]:
        return [(i, j, self.c[i, j]) for i in range(self.dim) for j in range(i + 1, self.dim)
                if not la.is_zero(self.c[i, j])]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise IndexOutOfRange(f"no basis vector named {label!r}") from None


@dataclass(frozen=True, eq=False)
class MatSpace:
    """Affine space ``particular + span(basis)`` of n x n matrices."""

    n: int
    particular: np.ndarray
    basis: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_linear(self) -> bool:
        return la.is_zero(self.particular)

    def member(self, coeffs: Sequence) -> np.ndarray:
        if len(coeffs) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates")
        out = np.array(self.particular, dtype=object, copy=True)
        for t, b in zip(coeffs, self.basis):
            out = out + la.frac(t) * b
        return la.freeze(out)

    def coords(self, m) -> np.ndarray | None:
        """Coordinates of ``m`` relative to the particular solution, or None."""
        diff = np.asarray(m, dtype=object) - self.particular
        if not self.basis:
            return la.freeze(la.rzeros(0)) if la.is_zero(diff) else None
        return la.coordinates(diff, self.basis)

    def contains(self, m) -> bool:
        m = np.asarray(m, dtype=object)
        if m.shape != (self.n, self.n):
            return False
        return self.coords(m) is not None

    def same_span(self, other: "MatSpace") -> bool:
        return (self.n == other.n and self.dim == other.dim
                and all(la.in_span(b, self.basis) for b in other.basis))

    def equals(self, other: "MatSpace") -> bool:
        """Equality as affine subsets of matrix space."""
        return self.same_span(other) and self.contains(other.particular)

    def sample(self, rng: random.Random, lo: int = -5, hi: int = 5) -> np.ndarray:
        return self.member([Fraction(rng.randint(lo, hi), rng.randint(1, 3)) for _ in self.basis])


def _check_index(i, dim):
    if not isinstance(i, (int, np.integer)) or not 0 <= i < dim:
        raise IndexOutOfRange(f"index {i!r} outside 0..{dim - 1}")


def new_lie_algebra(dim: int, brackets: Iterable, labels: Sequence[str] | None = None) -> LieAlgebra:
    """Build an algebra from ``(i, j, coeffs)`` entries meaning [e_i, e_j] = coeffs.

    ``coeffs`` is a length-``dim`` sequence or a ``{k: coefficient}`` mapping.
    An entry with i > j is stored as -[e_j, e_i]. Jacobi is not checked.
    """
    if dim < 1:
        raise DimensionMismatch("dimension must be positive")
    c = la.rzeros((dim, dim, dim))
    seen = set()
    for i, j, coeffs in brackets:
        _check_index(i, dim)
        _check_index(j, dim)
        if i == j:
            raise DiagonalBracket(f"[e_{i}, e_{i}] must vanish; diagonal entries are not allowed")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEntry(f"bracket ({key[0]}, {key[1]}) given twice")
        seen.add(key)
        v = la.rzeros(dim)
        if isinstance(coeffs, dict):
            for k, val in coeffs.items():
                _check_index(k, dim)
                v[k] = la.frac(val)
        else:
            if len(coeffs) != dim:
                raise DimensionMismatch(f"bracket output must have length {dim}")
            v = np.array([la.frac(x) for x in coeffs], dtype=object)
        sign = 1 if i < j else -1
        c[key[0], key[1], :] = sign * v
        c[key[1], key[0], :] = -sign * v
    return LieAlgebra(dim, la.freeze(c), tuple(labels) if labels else ())


def from_table(labels: Sequence[str], table: dict[str, dict[str, object]]) -> LieAlgebra:
    """Readable construction: ``{"e1,e2": {"e3": 1}}`` means [e1, e2] = e3."""
    labels = list(labels)
    pos = {name: k for k, name in enumerate(labels)}
    entries = []
    for pair, out in table.items():
        a, b = (s.strip() for s in pair.split(","))
        try:
            entries.append((pos[a], pos[b], {pos[k]: v for k, v in out.items()}))
        except KeyError as exc:
            raise IndexOutOfRange(f"unknown basis label {exc.args[0]!r}") from None
    return new_lie_algebra(len(labels), entries, labels)


def abelian(dim: int, labels: Sequence[str] | None = None) -> LieAlgebra:
    return new_lie_algebra(dim, [], labels)


def _vec(g: LieAlgebra, x) -> np.ndarray:
    x = np.asarray(x, dtype=object)
    if x.shape != (g.dim,):
        raise DimensionMismatch(f"vector of shape {x.shape} in a {g.dim}-dimensional algebra")
    return x


def _endo(g: LieAlgebra, m) -> np.ndarray:
    m = np.asarray(m, dtype=object)
    if m.shape != (g.dim, g.dim):
        raise DimensionMismatch(f"matrix of shape {m.shape} on a {g.dim}-dimensional algebra")
    return m


def bracket(g: LieAlgebra, x, y) -> np.ndarray:
    x, y = _vec(g, x), _vec(g, y)
    out = [Fraction(0)] * g.dim
    for i, j, terms in g.sparse:
        t = x[i] * y[j] - x[j] * y[i]
        if t:
            for k, v in terms:
                out[k] += t * v
    return la.freeze(np.array(out, dtype=object))


def jacobi_defect(g: LieAlgebra) -> list[tuple[int, int, int, np.ndarray]]:
    """All triples i<j<k whose Jacobiator is nonzero, with the defect vector."""
    c = g.c
    n = g.dim
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = (np.tensordot(c[i, j], c[:, k], axes=(0, 0))
                     + np.tensordot(c[j, k], c[:, i], axes=(0, 0))
                     + np.tensordot(c[k, i], c[:, j], axes=(0, 0)))
                if not la.is_zero(v):
                    out.append((i, j, k, la.freeze(v)))
    return out


def ad(g: LieAlgebra, x) -> np.ndarray:
    x = _vec(g, x)
    # column j is [x, e_j]
    return la.freeze(np.tensordot(x, g.c, axes=(0, 0)).T)


def derivation_equations(g: LieAlgebra) -> np.ndarray:
    """Rows of the linear system D[e_i,e_j] = [De_i,e_j] + [e_i,De_j] (i<j).

    Unknowns are the entries of D flattened row-major: D[r, s] -> r*n + s.
    """
    n = g.dim
    c = g.c
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                row = la.rzeros(n * n)
                for m in range(n):
                    row[k * n + m] += c[i, j, m]
                    row[m * n + i] -= c[m, j, k]
                    row[m * n + j] -= c[i, m, k]
                if not la.is_zero(row):
                    rows.append(row)
    if not rows:
        return la.rzeros((0, n * n))
    return np.stack(rows)


def is_derivation(g: LieAlgebra, d) -> bool:
    d = _endo(g, d)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = d @ g.c[i, j]
            rhs = bracket(g, d[:, i], g.basis(j)) + bracket(g, g.basis(i), d[:, j])
            if not la.equal(lhs, rhs):
                return False
    return True


def matspace_from_solution(n: int, particular, basis) -> MatSpace:
    return MatSpace(n, la.freeze(np.asarray(particular, dtype=object).reshape(n, n)),
                    tuple(la.freeze(np.asarray(b, dtype=object).reshape(n, n)) for b in basis))


def derivation_space(g: LieAlgebra) -> MatSpace:
    n = g.dim
    basis = la.nullspace(derivation_equations(g), n * n)
    return matspace_from_solution(n, la.rzeros(n * n), basis)


def restrict_to_subspace(g: LieAlgebra, basis: Sequence, labels: Sequence[str] | None = None):
    """Structure constants of ``span(basis)`` in that basis.

    Returns ``(subalgebra, embedding)``, the embedding being the dim x k
    matrix whose columns are the basis vectors.
    """
    vecs = [_vec(g, b) for b in basis]
    k = len(vecs)
    if k == 0:
        raise LinearlyDependentBasis("empty basis")
    emb = la.freeze(np.stack(vecs, axis=1))
    if la.rank(emb) != k:
        raise LinearlyDependentBasis("basis vectors are linearly dependent")
    entries = []
    for i in range(k):
        for j in range(i + 1, k):
            v = bracket(g, vecs[i], vecs[j])
            if la.is_zero(v):
                continue
            coords = la.coordinates(v, vecs)
            if coords is None:
                raise NotASubalgebra(f"[b{i}, b{j}] leaves the span", witness=(i, j, v))
            entries.append((i, j, list(coords)))
    if labels is None:
        labels = []
        for b in vecs:
            nz = [t for t in range(g.dim) if b[t] != 0]
            labels.append(g.labels[nz[0]] if len(nz) == 1 and b[nz[0]] == 1 else None)
        if any(lab is None for lab in labels) or len(set(labels)) != k:
            labels = [f"f{i + 1}" for i in range(k)]
    return new_lie_algebra(k, entries, labels), emb


def transport(g: LieAlgebra, psi, labels: Sequence[str] | None = None) -> LieAlgebra:
    """The algebra making ``psi`` a Lie isomorphism: [x, y]' = psi[psi^-1 x, psi^-1 y]."""
    psi = _endo(g, psi)
    inv = la.inverse(psi)
    if inv is None:
        raise CosymError("transport needs an invertible matrix")
    n = g.dim
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            v = psi @ bracket(g, inv[:, i], inv[:, j])
            if not la.is_zero(v):
                entries.append((i, j, list(v)))
    return new_lie_algebra(n, entries, labels or g.labels)
