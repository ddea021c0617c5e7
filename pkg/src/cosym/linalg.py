"""Exact rational linear algebra on numpy object arrays of Fractions.

Everything here is small dense Gaussian elimination; dimensions in this
package stay below ~100 unknowns, so nothing clever is needed.
"""
from __future__ import annotations

import numbers
from fractions import Fraction

import numpy as np


def frac(x) -> Fraction:
    """Coerce ``x`` to a Fraction. Accepts ints, rationals and "p/q" strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, np.integer):
        return Fraction(int(x))
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def fmt(x: Fraction) -> str:
    """Render a rational as "p/q" (or "p" when integral)."""
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rarray(data, shape=None) -> np.ndarray:
    """Object array of Fractions, made read-only."""
    a = np.array(data, dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = frac(v)
    out.flags.writeable = False
    return out


def freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    if a.flags.writeable:
        a = a.copy()
        a.flags.writeable = False
    return a


def rzeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def reye(n: int) -> np.ndarray:
    out = rzeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def unit(n: int, i: int) -> np.ndarray:
    v = rzeros(n)
    v[i] = Fraction(1)
    return freeze(v)


def is_zero(a) -> bool:
    return all(x == 0 for x in np.asarray(a, dtype=object).flat)


def equal(a, b) -> bool:
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def rref(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(m, dtype=object, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a 2D array")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        a[r, :] = a[r, :] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i, :] = a[i, :] - a[i, c] * a[r, :]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m) -> int:
    m = np.asarray(m, dtype=object)
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m, ncols: int | None = None) -> list[np.ndarray]:
    """Canonical nullspace basis: one vector per free column, pivots solved."""
    m = np.asarray(m, dtype=object)
    if ncols is None:
        ncols = m.shape[1]
    if m.size == 0:
        return [unit(ncols, j) for j in range(ncols)]
    r, pivots = rref(m)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = rzeros(ncols)
        v[f] = Fraction(1)
        for row, p in enumerate(pivots):
            v[p] = -r[row, f]
        basis.append(freeze(v))
    return basis


def solve_affine(m, rhs, ncols: int | None = None):
    """Solve ``m x = rhs`` exactly.

    Returns ``(particular, basis)`` where ``particular`` has every free
    variable set to zero, or ``(None, basis)`` when inconsistent.
    """
    m = np.asarray(m, dtype=object)
    rhs = np.asarray(rhs, dtype=object)
    if ncols is None:
        ncols = m.shape[1]
    basis = nullspace(m, ncols)
    if m.size == 0:
        return freeze(rzeros(ncols)), basis
    aug = np.concatenate([m, rhs.reshape(-1, 1)], axis=1)
    r, pivots = rref(aug)
    if ncols in pivots:
        return None, basis
    x = rzeros(ncols)
    for row, p in enumerate(pivots):
        x[p] = r[row, ncols]
    return freeze(x), basis


def solve(m, rhs):
    """Unique solution of a square or overdetermined system, else None."""
    m = np.asarray(m, dtype=object)
    x, basis = solve_affine(m, rhs)
    if x is None or basis:
        return None
    return x


def inverse(m):
    """Exact inverse, or None when singular."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, pivots = rref(np.concatenate([m, reye(n)], axis=1))
    if pivots[:n] != list(range(n)):
        return None
    return freeze(r[:, n:])


def det(m) -> Fraction:
    a = np.array(m, dtype=object, copy=True)
    n = a.shape[0]
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[[c, p], :] = a[[p, c], :]
            out = -out
        out *= a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i, :] = a[i, :] - (a[i, c] / a[c, c]) * a[c, :]
    return out


def is_positive_definite(m) -> bool:
    """Sylvester's criterion, exact."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    return all(det(m[:k, :k]) > 0 for k in range(1, n + 1))


def in_span(v, basis) -> bool:
    v = np.asarray(v, dtype=object).ravel()
    if not basis:
        return is_zero(v)
    cols = np.stack([np.asarray(b, dtype=object).ravel() for b in basis], axis=1)
    x, _ = solve_affine(cols, v)
    return x is not None


def coordinates(v, basis):
    """Coordinates of ``v`` in a linearly independent ``basis``, or None."""
    v = np.asarray(v, dtype=object).ravel()
    cols = np.stack([np.asarray(b, dtype=object).ravel() for b in basis], axis=1)
    x, null = solve_affine(cols, v)
    if x is None:
        return None
    if null:
        raise ValueError("basis is linearly dependent")
    return x
