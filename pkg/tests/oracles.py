"""Reference computations written independently of the library internals.

They work from the bracket table and plain matrix formulas only.
"""
from fractions import Fraction
from itertools import permutations

import numpy as np


def br(c, x, y):
    """[x, y] from structure constants c[i, j, k]."""
    n = len(x)
    out = [Fraction(0)] * n
    for i in range(n):
        if x[i] == 0:
            continue
        for j in range(n):
            if y[j] == 0:
                continue
            for k in range(n):
                if c[i, j, k] != 0:
                    out[k] += x[i] * y[j] * c[i, j, k]
    return np.array(out, dtype=object)


def mat(m):
    return np.array(m, dtype=object)


def apply(m, v):
    return np.asarray(m, dtype=object) @ np.asarray(v, dtype=object)


def units(n):
    return [np.array([Fraction(int(i == k)) for i in range(n)], dtype=object) for k in range(n)]


def perm_sign(p):
    s, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def form_value(terms, vectors):
    """Alternating evaluation by the permutation sum over sorted-index terms."""
    total = Fraction(0)
    k = len(vectors)
    for idx, c in terms.items():
        for p in permutations(range(k)):
            prod = Fraction(perm_sign(p))
            for slot, pos in enumerate(p):
                prod *= vectors[slot][idx[pos]]
            total += c * prod
    return total


def d_two_form(c, w):
    """(d omega)(x, y, z) = -omega([x,y],z) + omega([x,z],y) - omega([y,z],x), as a dict on i<j<k."""
    n = w.shape[0]
    e = units(n)
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = (-(br(c, e[i], e[j]) @ w @ e[k]) + br(c, e[i], e[k]) @ w @ e[j]
                     - br(c, e[j], e[k]) @ w @ e[i])
                if v != 0:
                    out[(i, j, k)] = v
    return out


def nijenhuis(c, phi):
    n = phi.shape[0]
    e = units(n)
    out = {}
    for i in range(n):
        for j in range(n):
            x, y = e[i], e[j]
            px, py = apply(phi, x), apply(phi, y)
            v = (br(c, px, py) - apply(phi, br(c, px, y)) - apply(phi, br(c, x, py))
                 + apply(phi, apply(phi, br(c, x, y))))
            out[i, j] = v
    return out


def lie_metric(c, xi, g):
    """(L_xi g)(x, y) = -g([xi,x], y) - g(x, [xi,y])."""
    n = g.shape[0]
    e = units(n)
    m = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            m[i, j] = -(br(c, xi, e[i]) @ g @ e[j]) - (e[i] @ g @ br(c, xi, e[j]))
    return m


def lie_phi(c, xi, phi):
    """(L_xi phi) x = [xi, phi x] - phi [xi, x], columnwise."""
    n = phi.shape[0]
    e = units(n)
    cols = [br(c, xi, apply(phi, e[i])) - apply(phi, br(c, xi, e[i])) for i in range(n)]
    return np.stack(cols, axis=1)


def is_derivation(c, d):
    n = d.shape[0]
    e = units(n)
    for i in range(n):
        for j in range(n):
            lhs = apply(d, br(c, e[i], e[j]))
            rhs = br(c, apply(d, e[i]), e[j]) + br(c, e[i], apply(d, e[j]))
            if any(a != b for a, b in zip(lhs, rhs)):
                return False
    return True
