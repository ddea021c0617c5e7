"""Recognition of (almost) cosymplectic, alpha-cosymplectic and almost contact
metric structures on Lie algebras.

Conventions: Gram matrices ``W[i, j] = w(e_i, e_j)``; the fundamental form of
an almost contact metric structure is ``Phi(x, y) = g(x, phi y)``, i.e. the
matrix ``G @ phi``. The Chevalley-Eilenberg differential carries no 1/2, so
``d eta(x, y) = -eta([x, y])``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath as mp
import numpy as np

from . import forms as fm
from . import linalg as la
from .errors import (
    DimensionMismatch,
    EvenDimension,
    InternalInconsistency,
    NotAcm,
    NotSymplectic,
    NotVolume,
    NumericalFailure,
    OddDimension,
    SingularSystem,
    WrongDegree,
)
from .forms import KForm
from .lie import (
    LieAlgebra,
    MatSpace,
    ad,
    bracket,
    derivation_equations,
    derivation_space,
    matspace_from_solution,
    restrict_to_subspace,
)

POLAR_TOL = 1e-9
POLAR_DPS = 50  # working precision of the polarization
POLAR_MAX_DIM = 12


@dataclass(frozen=True)
class CosymPair:
    eta: KForm
    omega: KForm

    @property
    def dim(self) -> int:
        return self.eta.dim


@dataclass(frozen=True, eq=False)
class AcmStructure:
    phi: np.ndarray
    xi: np.ndarray
    eta: KForm
    metric: np.ndarray
    tolerance: float | None = None  # set on floating-point structures

    @property
    def exact(self) -> bool:
        return self.tolerance is None


@dataclass
class AlphaResult:
    kind: str  # "not_closed" | "no_alpha" | "alpha"
    alpha: Fraction | None = None
    witness: Any = None

    def __bool__(self):
        return self.kind == "alpha"


@dataclass
class StructureReport:
    flags: dict[str, bool] = field(default_factory=dict)
    alpha: Fraction | None = None
    witnesses: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    def failed(self) -> list[str]:
        return [k for k, v in self.flags.items() if not v]


def eta_vector(eta: KForm) -> np.ndarray:
    if eta.degree != 1:
        raise WrongDegree("eta must be a 1-form")
    v = la.rzeros(eta.dim)
    for (i,), c in eta.coeffs.items():
        v[i] = c
    return v


def kernel_basis(eta: KForm) -> list[np.ndarray]:
    """Echelon basis of ker(eta), keeping the original index order."""
    return la.nullspace(eta_vector(eta).reshape(1, -1), eta.dim)


def check_almost_cosymplectic(g: LieAlgebra, eta: KForm, omega: KForm) -> CosymPair:
    if g.dim % 2 == 0:
        raise EvenDimension(f"almost cosymplectic structures need odd dimension, got {g.dim}")
    if eta.dim != g.dim or omega.dim != g.dim:
        raise DimensionMismatch("forms do not live on this algebra")
    if eta.degree != 1 or omega.degree != 2:
        raise WrongDegree("need a 1-form and a 2-form")
    top = fm.wedge(eta, fm.power(omega, g.dim // 2))
    if not fm.is_top_nonzero(g, top):
        raise NotVolume("eta ^ omega^n vanishes", witness=top)
    return CosymPair(eta, omega)


def reeb_vector(pair: CosymPair) -> np.ndarray:
    """The unique xi with eta(xi) = 1 and i_xi omega = 0."""
    n = pair.dim
    w = fm.form_matrix(pair.omega)
    rows = np.concatenate([eta_vector(pair.eta).reshape(1, -1), w.T], axis=0)
    rhs = la.rzeros(n + 1)
    rhs[0] = Fraction(1)
    xi = la.solve(rows, rhs)
    if xi is None:
        raise SingularSystem("Reeb system has no unique solution; was the pair validated?")
    return xi


def detect_alpha(g: LieAlgebra, pair: CosymPair) -> AlphaResult:
    """Decide d eta = 0 and d omega = 2 alpha eta ^ omega for a rational alpha."""
    deta = fm.cartan_d(g, pair.eta)
    if not deta.is_zero():
        return AlphaResult("not_closed", witness=dict(deta.coeffs))
    domega = fm.cartan_d(g, pair.omega)
    vol = fm.wedge(pair.eta, pair.omega)
    if vol.is_zero():
        return AlphaResult("alpha", Fraction(0)) if domega.is_zero() else \
            AlphaResult("no_alpha", witness=dict(domega.coeffs))
    key, v = next(iter(vol.coeffs.items()))
    alpha = Fraction(domega[key]) / (2 * v)
    residual = domega - 2 * alpha * vol
    if not residual.is_zero():
        return AlphaResult("no_alpha", witness=dict(residual.coeffs))
    return AlphaResult("alpha", alpha)


def locally_conformal_form(g: LieAlgebra, pair: CosymPair) -> KForm | None:
    """Closed 1-form t with d eta = t ^ eta and d omega = 2 t ^ omega, if any.

    For closed eta this is alpha * eta exactly when the pair is alpha-cosymplectic.
    """
    n = g.dim
    deta = fm.cartan_d(g, pair.eta)
    domega = fm.cartan_d(g, pair.omega)
    # each condition is linear in the coefficients of t
    cols = []
    for i in range(n):
        e = fm.basis_form(n, i)
        parts = [fm.wedge(e, pair.eta), 2 * fm.wedge(e, pair.omega), fm.cartan_d(g, e)]
        cols.append(parts)
    keys = [sorted({k for col in cols for k in col[p].coeffs} | set(target.coeffs))
            for p, target in enumerate([deta, domega, fm.zero(n, 2)])]
    rows, rhs = [], []
    for p, target in enumerate([deta, domega, fm.zero(n, 2)]):
        for key in keys[p]:
            rows.append([cols[i][p][key] for i in range(n)])
            rhs.append(target[key])
    if not rows:
        return fm.zero(n, 1)
    t, _ = la.solve_affine(np.array(rows, dtype=object), np.array(rhs, dtype=object), n)
    if t is None:
        return None
    return fm.one_form(t)


def check_symplectic(h: LieAlgebra, omega: KForm) -> StructureReport:
    if h.dim % 2:
        raise OddDimension(f"symplectic structures need even dimension, got {h.dim}")
    rep = StructureReport()
    top = fm.power(omega, h.dim // 2)
    rep.flags["almost_symplectic"] = not top.is_zero()
    d = fm.cartan_d(h, omega)
    rep.flags["closed"] = d.is_zero()
    rep.flags["symplectic"] = rep.flags["almost_symplectic"] and rep.flags["closed"]
    if not rep.flags["almost_symplectic"]:
        rep.witnesses["almost_symplectic"] = {"omega^n": "0"}
    if not rep.flags["closed"]:
        rep.witnesses["closed"] = {"d omega": dict(d.coeffs)}
        rep.witnesses["symplectic"] = rep.witnesses["closed"]
    return rep


def f_form(omega: KForm, theta) -> np.ndarray:
    """Matrix of (x, y) -> omega(theta x, y)."""
    theta = np.asarray(theta, dtype=object)
    if theta.shape != (omega.dim, omega.dim):
        raise DimensionMismatch("endomorphism does not match the form")
    return la.freeze(theta.T @ fm.form_matrix(omega))


def ist_residual(omega: KForm, theta) -> np.ndarray:
    """theta^T W + W theta; zero exactly for infinitesimal symplectic transformations."""
    theta = np.asarray(theta, dtype=object)
    if theta.shape != (omega.dim, omega.dim):
        raise DimensionMismatch("endomorphism does not match the form")
    w = fm.form_matrix(omega)
    return la.freeze(theta.T @ w + w @ theta)


def is_ist(omega: KForm, theta) -> bool:
    f = f_form(omega, theta)
    return la.equal(f, f.T)


def ist_equations(omega: KForm, alpha=0):
    """Rows/rhs of (D + alpha I)^T W + W (D + alpha I) = 0 over row-major D."""
    n = omega.dim
    w = fm.form_matrix(omega)
    alpha = la.frac(alpha)
    rows, rhs = [], []
    for i in range(n):
        for j in range(i + 1, n):
            row = la.rzeros(n * n)
            for m in range(n):
                row[m * n + i] += w[m, j]
                row[m * n + j] += w[i, m]
            rows.append(row)
            rhs.append(-2 * alpha * w[i, j])
    return rows, rhs


def commute_equations(j) -> list[np.ndarray]:
    """Rows of D J - J D = 0 over row-major D."""
    j = np.asarray(j, dtype=object)
    n = j.shape[0]
    rows = []
    for r in range(n):
        for s in range(n):
            row = la.rzeros(n * n)
            for m in range(n):
                row[r * n + m] += j[m, s]
                row[m * n + s] -= j[r, m]
            if not la.is_zero(row):
                rows.append(row)
    return rows


def ist_derivation_space(h: LieAlgebra, omega: KForm, alpha=0, commute_with=None) -> MatSpace | None:
    """Derivations D of h with D + alpha I an i.s.t. of omega.

    With ``commute_with=J`` the condition DJ = JD is added. Returns None when
    no derivation satisfies the conditions (possible only for alpha != 0).
    """
    if not check_symplectic(h, omega).flags["symplectic"]:
        raise NotSymplectic("omega is not a symplectic form on this algebra")
    n = h.dim
    der = derivation_equations(h)
    rows = list(der)
    rhs = [Fraction(0)] * len(rows)
    ir, irhs = ist_equations(omega, alpha)
    rows += ir
    rhs += irhs
    if commute_with is not None:
        cr = commute_equations(commute_with)
        rows += cr
        rhs += [Fraction(0)] * len(cr)
    part, basis = la.solve_affine(np.stack(rows), np.array(rhs, dtype=object), n * n)
    if part is None:
        return None
    return matspace_from_solution(n, part, basis)


# -- almost contact metric structures -------------------------------------------------

def _close(a, b, tol) -> bool:
    return abs(a - b) <= tol


def _first_mismatch(x, y, tol, scale=None):
    """First entry where x and y differ; in float mode entry idx may differ by
    tol * max(1, scale[idx]), scale being the |A||B| rounding bound of a product."""
    x = np.asarray(x, dtype=object)
    y = np.asarray(y, dtype=object)
    for idx in np.ndindex(x.shape):
        t = tol if scale is None or tol == 0 else tol * max(1.0, float(scale[idx]))
        if not _close(x[idx], y[idx], t):
            return idx, x[idx], y[idx]
    return None


def _positive_definite(m, exact: bool) -> bool:
    if exact:
        return la.is_positive_definite(m)
    return bool(np.linalg.eigvalsh(np.asarray(m, dtype=float)).min() > 0)


def check_acm(g: LieAlgebra, phi, xi, eta: KForm, metric, tol: float = 0) -> AcmStructure:
    n = g.dim
    phi = np.asarray(phi, dtype=object)
    xi = np.asarray(xi, dtype=object)
    metric = np.asarray(metric, dtype=object)
    if phi.shape != (n, n) or xi.shape != (n,) or metric.shape != (n, n) or eta.dim != n:
        raise DimensionMismatch("structure tensors do not match the algebra")
    ev = eta_vector(eta)
    exact = tol == 0
    ab = (lambda a: np.abs(np.asarray(a, dtype=float))) if not exact else None
    checks = [
        ("eta(xi)=1", np.array([ev @ xi]), np.array([1]), None if exact else np.array([ab(ev) @ ab(xi)])),
        ("phi^2=-I+eta(x)xi", phi @ phi, -la.reye(n) + np.outer(xi, ev), None if exact else ab(phi) @ ab(phi)),
        ("eta∘phi=0", ev @ phi, la.rzeros(n), None if exact else ab(ev) @ ab(phi)),
        ("metric symmetric", metric, metric.T, None),
    ]
    for name, lhs, rhs, scale in checks:
        bad = _first_mismatch(lhs, rhs, tol, scale)
        if bad is not None:
            raise NotAcm(name, witness=bad)
    if not _positive_definite(metric, exact):
        raise NotAcm("metric positive definite")
    scale = None if exact else ab(phi).T @ ab(metric) @ ab(phi)
    bad = _first_mismatch(phi.T @ metric @ phi, metric - np.outer(ev, ev), tol, scale)
    if bad is not None:
        raise NotAcm("g(phi x, phi y)=g(x,y)-eta(x)eta(y)", witness=bad)
    if exact:
        return AcmStructure(la.freeze(phi), la.freeze(xi), eta, la.freeze(metric))
    return AcmStructure(np.asarray(phi, dtype=float), np.asarray(xi, dtype=float), eta,
                        np.asarray(metric, dtype=float), tolerance=tol)


def fundamental_matrix(s: AcmStructure) -> np.ndarray:
    return s.metric @ s.phi


def fundamental_form(s: AcmStructure) -> KForm:
    return fm.form_from_matrix(fundamental_matrix(s))


def nijenhuis(g: LieAlgebra, phi) -> np.ndarray:
    """N[i, j] = [phi e_i, phi e_j] - phi[phi e_i, e_j] - phi[e_i, phi e_j] + phi^2 [e_i, e_j]."""
    phi = np.asarray(phi, dtype=object)
    n = g.dim
    if phi.shape != (n, n):
        raise DimensionMismatch("phi does not match the algebra")
    out = la.rzeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = (bracket(g, phi[:, i], phi[:, j])
                 - phi @ bracket(g, phi[:, i], g.basis(j))
                 - phi @ bracket(g, g.basis(i), phi[:, j])
                 + phi @ (phi @ g.c[i, j]))
            out[i, j] = v
            out[j, i] = -v
    return la.freeze(out)


def normality_defect(g: LieAlgebra, s: AcmStructure) -> np.ndarray:
    """N_phi + (d eta) xi, which is the classical N_phi + 2 d eta (x) xi once d
    carries the 1/2 normalisation. Zero iff the structure is normal."""
    n = g.dim
    out = np.array(nijenhuis(g, s.phi), dtype=object, copy=True)
    deta = fm.cartan_d(g, s.eta)
    for (i, j), v in deta.coeffs.items():
        out[i, j] = out[i, j] + v * s.xi
        out[j, i] = out[j, i] - v * s.xi
    return la.freeze(out)


def lie_derivative_phi(g: LieAlgebra, xi, phi) -> np.ndarray:
    a = ad(g, xi)
    phi = np.asarray(phi, dtype=object)
    if phi.shape != a.shape:
        raise DimensionMismatch("phi does not match the algebra")
    return la.freeze(a @ phi - phi @ a)


def lie_derivative_metric(g: LieAlgebra, xi, metric) -> np.ndarray:
    """(L_xi g)(e_i, e_j) = -g([xi, e_i], e_j) - g([xi, e_j], e_i)."""
    a = ad(g, xi)
    metric = np.asarray(metric, dtype=object)
    if metric.shape != a.shape:
        raise DimensionMismatch("metric does not match the algebra")
    return la.freeze(-(a.T @ metric + metric @ a))


def reduced_data(g: LieAlgebra, s: AcmStructure) -> dict[str, Any]:
    """ker(eta) basis with D = ad_xi, J = phi and h = g restricted to it.

    Requires d eta = 0 (so that ad_xi preserves ker eta).
    """
    basis = kernel_basis(s.eta)
    b = np.stack(basis, axis=1)
    a = ad(g, s.xi)

    def restrict_endo(m):
        cols = [la.coordinates(m @ v, basis) for v in basis]
        if any(c is None for c in cols):
            raise InternalInconsistency("endomorphism does not preserve ker eta")
        return la.freeze(np.stack(cols, axis=1))

    return {"basis": basis, "D": restrict_endo(a), "J": restrict_endo(s.phi),
            "h": la.freeze(b.T @ s.metric @ b)}


def _witness_matrix(m):
    for idx in np.ndindex(np.shape(m)):
        if m[idx] != 0:
            return {"entry": [int(t) for t in idx], "value": m[idx]}
    return None


def classify(g: LieAlgebra, s: AcmStructure) -> StructureReport:
    if not s.exact:
        raise NumericalFailure("classify needs an exact structure")
    n = g.dim
    rep = StructureReport()
    phi_form = fundamental_form(s)
    top = fm.wedge(s.eta, fm.power(phi_form, n // 2))
    rep.flags["almost_cosymplectic"] = not top.is_zero()
    pair = CosymPair(s.eta, phi_form)
    res = detect_alpha(g, pair)
    rep.flags["eta_closed"] = res.kind != "not_closed"
    akc = res.kind == "alpha" and rep.flags["almost_cosymplectic"]
    rep.alpha = res.alpha if akc else None
    rep.flags["alpha_cosymplectic"] = akc
    rep.flags["almost_acoKahler"] = akc
    rep.flags["cosymplectic"] = akc and res.alpha == 0
    rep.flags["almost_coKahler"] = rep.flags["cosymplectic"]
    lcc = locally_conformal_form(g, pair)
    rep.flags["locally_conformally_cosymplectic"] = lcc is not None
    if not akc:
        rep.witnesses["almost_acoKahler"] = {"kind": res.kind, "residual": res.witness}

    lg = lie_derivative_metric(g, s.xi, s.metric)
    lphi = lie_derivative_phi(g, s.xi, s.phi)
    nd = normality_defect(g, s)
    rep.flags["normal"] = la.is_zero(nd)
    if not rep.flags["normal"]:
        for i in range(n):
            for j in range(i + 1, n):
                if not la.is_zero(nd[i, j]):
                    rep.witnesses["normal"] = {"pair": [i, j], "defect": list(nd[i, j])}
                    break
            if "normal" in rep.witnesses:
                break
    rep.flags["reeb_killing"] = la.is_zero(lg)
    rep.flags["lie_xi_phi_zero"] = la.is_zero(lphi)
    if not rep.flags["lie_xi_phi_zero"]:
        rep.witnesses["lie_xi_phi_zero"] = _witness_matrix(lphi)

    if rep.flags["eta_closed"]:
        red = reduced_data(g, s)
        sub, _ = restrict_to_subspace(g, red["basis"])
        sym = check_symplectic(sub, fm.restrict(phi_form, red["basis"]))
        rep.flags["almost_symplectic"] = sym.flags["almost_symplectic"]
        rep.flags["symplectic"] = sym.flags["symplectic"]
        rep.details["reduced"] = red

    for name in ("K_cosymplectic", "acoKahler", "coKahler", "alpha_Kenmotsu"):
        rep.flags[name] = False
    if akc:
        alpha = res.alpha
        ev = eta_vector(s.eta)
        d, j, h = red["D"], red["J"], red["h"]
        theta = d + alpha * la.reye(d.shape[0])
        conds = {
            "lie_xi_g=2alpha(g-eta*eta)": la.equal(lg, 2 * alpha * (s.metric - np.outer(ev, ev))),
            "D+alpha I skew-adjoint": la.is_zero(theta.T @ h + h @ theta),
            "DJ=JD": la.equal(d @ j, j @ d),
            "lie_xi_phi=0": rep.flags["lie_xi_phi_zero"],
        }
        rep.details["equivalent_conditions"] = conds
        if len(set(conds.values())) != 1:
            raise InternalInconsistency("equivalent conditions disagree", witness=conds)
        rep.flags["K_cosymplectic"] = alpha == 0 and rep.flags["reeb_killing"]
        rep.flags["acoKahler"] = rep.flags["normal"]
        rep.flags["coKahler"] = alpha == 0 and rep.flags["normal"]
        rep.flags["alpha_Kenmotsu"] = alpha != 0 and rep.flags["normal"]
        if not rep.flags["K_cosymplectic"]:
            rep.witnesses["K_cosymplectic"] = ({"lie_xi_g": _witness_matrix(lg)} if alpha == 0
                                               else {"alpha": alpha})
        if not rep.flags["acoKahler"]:
            rep.witnesses["acoKahler"] = rep.witnesses.get("normal")
    return rep


# -- polarization ---------------------------------------------------------------------

def _mp(a):
    a = np.asarray(a, dtype=object)
    return mp.matrix([[mp.mpf(x.numerator) / x.denominator for x in row] for row in a])


def _float(a) -> np.ndarray:
    return np.array([[float(a[i, j]) for j in range(a.cols)] for i in range(a.rows)])


def polarize(g: LieAlgebra, pair: CosymPair, seed_metric, tol: float = POLAR_TOL) -> AcmStructure:
    """Floating-point almost contact metric structure with the pair's eta, xi
    and fundamental form omega, built from a positive-definite seed metric."""
    n = g.dim
    if n > POLAR_MAX_DIM:
        raise NumericalFailure(f"polarization is limited to dimension {POLAR_MAX_DIM}")
    seed = np.asarray(seed_metric, dtype=float)
    if seed.shape != (n, n) or not np.allclose(seed, seed.T):
        raise DimensionMismatch("seed metric must be a symmetric n x n matrix")
    if np.linalg.eigvalsh(seed).min() <= 0:
        raise NumericalFailure("seed metric is not positive definite")
    xi = reeb_vector(pair)
    basis = kernel_basis(pair.eta)
    # exact change of basis to (xi, ker eta); only the square root is inexact
    t = la.freeze(np.stack([xi] + basis, axis=1))
    tinv = la.inverse(t)
    bmat = t[:, 1:]
    w = fm.form_matrix(pair.omega)
    m = n - 1
    with mp.workdps(POLAR_DPS):
        wb = _mp(bmat.T @ w @ bmat)
        bm = _mp(bmat)
        k = bm.T * mp.matrix(seed.tolist()) * bm
        try:
            low = mp.cholesky(k)
        except (ValueError, ZeroDivisionError) as exc:
            raise NumericalFailure("restricted seed metric is not positive definite") from exc
        linv = mp.inverse(low)
        w_hat = linv * wb * linv.T  # omega in k-orthonormal coordinates; skew
        evals, evecs = mp.eigsy(w_hat.T * w_hat)
        if min(evals) <= 0:
            raise NumericalFailure("omega is degenerate on ker eta", witness=float(min(evals)))
        root = evecs * mp.diag([mp.sqrt(x) for x in evals]) * evecs.T
        inv_root = evecs * mp.diag([1 / mp.sqrt(x) for x in evals]) * evecs.T
        phi_b = linv.T * (w_hat * inv_root) * low.T
        g_b = low * root * low.T
        phi_t = mp.zeros(n, n)
        g_t = mp.zeros(n, n)
        g_t[0, 0] = 1
        for i in range(m):
            for j in range(m):
                phi_t[i + 1, j + 1] = phi_b[i, j]
                g_t[i + 1, j + 1] = (g_b[i, j] + g_b[j, i]) / 2
        mt, mtinv = _mp(t), _mp(tinv)
        phi = _float(mt * phi_t * mtinv)
        metric = _float(mtinv.T * g_t * mtinv)
    metric = (metric + metric.T) / 2
    xi_f = xi.astype(float)
    w = w.astype(float)
    s = check_acm(g, phi, xi_f, pair.eta, metric, tol=tol)
    resid = np.abs(metric @ phi - w).max()
    if resid > tol:
        raise NumericalFailure(f"fundamental form misses omega by {resid:.3g}", witness=resid)
    return s


def ist_constraint_rank(h: LieAlgebra, omega: KForm) -> int:
    """Number of independent i.s.t. equations on Der(h); Der(h) minus this is
    the dimension of the homogeneous i.s.t. family."""
    der = derivation_space(h)
    n = h.dim
    cols = []
    for b in der.basis:
        r = ist_residual(omega, b)
        cols.append([r[i, j] for i in range(n) for j in range(i + 1, n)])
    if not cols:
        return 0
    return la.rank(np.array(cols, dtype=object).T)
