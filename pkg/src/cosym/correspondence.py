"""Odd/even dictionary: extensions R xi x_D h and their reductions to ker(eta),
plus verification and lifting of isomorphisms.

Extension coordinates put xi at position 0 and h's basis at 1..2n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import forms as fm
from . import linalg as la
from . import structures as st
from .errors import (
    EtaNotClosed,
    NoValidAlpha,
    NotADerivation,
    NotAlmostKahler,
    NotNondegenerate,
    PreconditionFailed,
)
from .forms import KForm
from .lie import LieAlgebra, ad, bracket, is_derivation, new_lie_algebra, restrict_to_subspace, transport
from .structures import AcmStructure, CosymPair


@dataclass(frozen=True, eq=False)
class EvenBundle:
    h: LieAlgebra
    omega: KForm
    D: np.ndarray
    J: np.ndarray | None = None
    metric: np.ndarray | None = None

    @property
    def kahler(self) -> bool:
        return self.J is not None

    def same_as(self, other: "EvenBundle") -> bool:
        def eq(a, b):
            return (a is None and b is None) or (a is not None and b is not None and la.equal(a, b))
        return (self.h == other.h and self.omega == other.omega and la.equal(self.D, other.D)
                and eq(self.J, other.J) and eq(self.metric, other.metric))


@dataclass(frozen=True, eq=False)
class OddBundle:
    g: LieAlgebra
    pair: CosymPair
    acm: AcmStructure | None = None


@dataclass
class IsoReport:
    conditions: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def record(self, name: str, passed: bool, witness=None):
        self.conditions[name] = bool(passed)
        if not passed and witness is not None:
            self.witnesses[name] = witness


def omega_from_kahler(j, metric) -> KForm:
    """Fundamental form Omega(x, y) = h(x, J y)."""
    return fm.form_from_matrix(np.asarray(metric, dtype=object) @ np.asarray(j, dtype=object))


def check_almost_kahler(h: LieAlgebra, j, metric) -> KForm:
    """Validate (J, metric) and return its (closed, nondegenerate) fundamental form."""
    n = h.dim
    j = np.asarray(j, dtype=object)
    metric = np.asarray(metric, dtype=object)
    if j.shape != (n, n) or metric.shape != (n, n):
        raise NotAlmostKahler("J and metric must be square and match the algebra")
    if not la.equal(j @ j, -la.reye(n)):
        raise NotAlmostKahler("J^2 != -I")
    if not la.equal(metric, metric.T) or not la.is_positive_definite(metric):
        raise NotAlmostKahler("metric is not a positive definite inner product")
    if not la.equal(j.T @ metric @ j, metric):
        raise NotAlmostKahler("metric is not J-invariant")
    omega = omega_from_kahler(j, metric)
    rep = st.check_symplectic(h, omega)
    if not rep.flags["symplectic"]:
        raise NotAlmostKahler("fundamental form is not symplectic", witness=rep.witnesses)
    return omega


def extension_algebra(h: LieAlgebra, d, xi_label: str = "e0") -> LieAlgebra:
    """R xi + h with [xi, x] = D x; no check that D is a derivation."""
    n = h.dim
    d = np.asarray(d, dtype=object)
    entries = []
    for i in range(n):
        if not la.is_zero(d[:, i]):
            entries.append((0, i + 1, [Fraction(0)] + list(d[:, i])))
        for j in range(i + 1, n):
            if not la.is_zero(h.c[i, j]):
                entries.append((i + 1, j + 1, [Fraction(0)] + list(h.c[i, j])))
    return new_lie_algebra(n + 1, entries, (xi_label,) + tuple(h.labels))


def extend(e: EvenBundle, xi_label: str = "e0") -> OddBundle:
    if not is_derivation(e.h, e.D):
        raise NotADerivation("D is not a derivation of h")
    n = e.h.dim
    if fm.power(e.omega, n // 2).is_zero() or n % 2:
        raise NotNondegenerate("Omega is degenerate")
    g = extension_algebra(e.h, e.D, xi_label)
    eta = fm.basis_form(n + 1, 0)
    omega = fm.embed(e.omega, n + 1, 1)
    pair = st.check_almost_cosymplectic(g, eta, omega)
    acm = None
    if e.kahler:
        phi = la.rzeros((n + 1, n + 1))
        phi[1:, 1:] = e.J
        metric = la.rzeros((n + 1, n + 1))
        metric[0, 0] = Fraction(1)
        metric[1:, 1:] = e.metric
        acm = st.check_acm(g, phi, la.unit(n + 1, 0), eta, metric)
    return OddBundle(g, pair, acm)


def _require_closed(o: OddBundle):
    deta = fm.cartan_d(o.g, o.pair.eta)
    if not deta.is_zero():
        raise EtaNotClosed("d eta != 0", witness=dict(deta.coeffs))


def reduce(o: OddBundle) -> tuple[EvenBundle, list[np.ndarray]]:
    """(ker eta, omega restricted, ad_xi restricted) together with the ker eta basis."""
    _require_closed(o)
    xi = st.reeb_vector(o.pair)
    basis = st.kernel_basis(o.pair.eta)
    h, _ = restrict_to_subspace(o.g, basis)
    a = ad(o.g, xi)
    d = la.freeze(np.stack([la.coordinates(a @ b, basis) for b in basis], axis=1))
    omega = fm.restrict(o.pair.omega, basis)
    return EvenBundle(h, omega, d), basis


def extend_acm(h: LieAlgebra, j, metric, d, xi_label: str = "e0") -> OddBundle:
    omega = check_almost_kahler(h, j, metric)
    if not is_derivation(h, d):
        raise NotADerivation("D is not a derivation of h")
    alpha = ist_alpha(omega, d)
    if alpha is None:
        raise NoValidAlpha("D + alpha I is not an i.s.t. for any alpha")
    o = extend(EvenBundle(h, omega, la.freeze(np.asarray(d, dtype=object)),
                          la.freeze(np.asarray(j, dtype=object)),
                          la.freeze(np.asarray(metric, dtype=object))), xi_label)
    res = st.detect_alpha(o.g, CosymPair(o.acm.eta, st.fundamental_form(o.acm)))
    assert res.kind == "alpha" and res.alpha == alpha
    return o


def ist_alpha(omega: KForm, d) -> Fraction | None:
    """The alpha with D + alpha I an i.s.t., or None. Unique since W != 0."""
    d = np.asarray(d, dtype=object)
    w = fm.form_matrix(omega)
    r = d.T @ w + w @ d  # must equal -2 alpha W
    for idx in np.ndindex(w.shape):
        if w[idx] != 0:
            alpha = -r[idx] / (2 * w[idx])
            return alpha if la.equal(r, -2 * alpha * w) else None
    return Fraction(0) if la.is_zero(r) else None


def reduce_acm(o: OddBundle) -> EvenBundle:
    if o.acm is None:
        raise PreconditionFailed("bundle carries no almost contact metric structure")
    e, basis = reduce(o)
    red = st.reduced_data(o.g, o.acm)
    return EvenBundle(e.h, e.omega, e.D, red["J"], red["h"])


def transport_even(psi, e: EvenBundle) -> EvenBundle:
    """Image of a bundle under psi, so that psi is an isomorphism e -> result."""
    psi = la.freeze(np.asarray(psi, dtype=object))
    inv = la.inverse(psi)
    h2 = transport(e.h, psi)
    omega2 = fm.pullback(inv, e.omega)
    d2 = la.freeze(psi @ e.D @ inv)
    j2 = metric2 = None
    if e.kahler:
        j2 = la.freeze(psi @ e.J @ inv)
        metric2 = la.freeze(inv.T @ e.metric @ inv)
    return EvenBundle(h2, omega2, d2, j2, metric2)


def _lie_iso(report: IsoReport, psi, g1: LieAlgebra, g2: LieAlgebra):
    report.record("invertible", la.inverse(psi) is not None)
    bad = None
    for i in range(g1.dim):
        for j in range(i + 1, g1.dim):
            lhs = psi @ g1.c[i, j]
            rhs = bracket(g2, psi[:, i], psi[:, j])
            if not la.equal(lhs, rhs):
                bad = {"pair": [i, j], "psi[x,y]": list(lhs), "[psi x,psi y]": list(rhs)}
                break
        if bad:
            break
    report.record("bracket", bad is None, bad)


def _matrix_witness(a, b):
    for idx in np.ndindex(np.shape(a)):
        if a[idx] != b[idx]:
            return {"entry": [int(t) for t in idx], "lhs": a[idx], "rhs": b[idx]}
    return None


def verify_iso_even(psi, e1: EvenBundle, e2: EvenBundle) -> IsoReport:
    psi = np.asarray(psi, dtype=object)
    rep = IsoReport()
    _lie_iso(rep, psi, e1.h, e2.h)
    pb = fm.pullback(psi, e2.omega)
    rep.record("omega_pullback", pb == e1.omega, {"pullback": dict(pb.coeffs)})
    lhs, rhs = psi @ e1.D, e2.D @ psi
    rep.record("intertwines_D", la.equal(lhs, rhs), _matrix_witness(lhs, rhs))
    if e1.kahler and e2.kahler:
        lhs, rhs = psi @ e1.J, e2.J @ psi
        rep.record("intertwines_J", la.equal(lhs, rhs), _matrix_witness(lhs, rhs))
        lhs, rhs = psi.T @ e2.metric @ psi, e1.metric
        rep.record("metric_pullback", la.equal(lhs, rhs), _matrix_witness(lhs, rhs))
    return rep


def lift_iso(psi, e1: EvenBundle, e2: EvenBundle) -> np.ndarray:
    rep = verify_iso_even(psi, e1, e2)
    if not rep.ok:
        raise PreconditionFailed("psi is not an isomorphism of the even bundles", witness=rep)
    n = e1.h.dim
    out = la.rzeros((n + 1, n + 1))
    out[0, 0] = Fraction(1)
    out[1:, 1:] = np.asarray(psi, dtype=object)
    return la.freeze(out)


def verify_iso_odd(psi, o1: OddBundle, o2: OddBundle) -> IsoReport:
    psi = np.asarray(psi, dtype=object)
    rep = IsoReport()
    _lie_iso(rep, psi, o1.g, o2.g)
    pb = fm.pullback(psi, o2.pair.omega)
    rep.record("omega_pullback", pb == o1.pair.omega, {"pullback": dict(pb.coeffs)})
    pe = fm.pullback(psi, o2.pair.eta)
    rep.record("eta_pullback", pe == o1.pair.eta, {"pullback": dict(pe.coeffs)})
    if o1.acm is not None and o2.acm is not None:
        lhs, rhs = psi @ o1.acm.phi, o2.acm.phi @ psi
        rep.record("intertwines_phi", la.equal(lhs, rhs), _matrix_witness(lhs, rhs))
        lhs, rhs = psi @ o1.acm.xi, o2.acm.xi
        rep.record("maps_xi", la.equal(lhs, rhs), {"psi xi1": list(lhs), "xi2": list(rhs)})
        lhs, rhs = psi.T @ o2.acm.metric @ psi, o1.acm.metric
        rep.record("metric_pullback", la.equal(lhs, rhs), _matrix_witness(lhs, rhs))
    # consequence of the pullback conditions; reported on its own
    x1, x2 = st.reeb_vector(o1.pair), st.reeb_vector(o2.pair)
    lhs = psi @ x1
    rep.record("maps_reeb", la.equal(lhs, x2), {"psi xi1": list(lhs), "xi2": list(x2)})
    if rep.conditions["omega_pullback"] and rep.conditions["eta_pullback"] \
            and rep.conditions["invertible"] and not rep.conditions["maps_reeb"]:
        rep.witnesses["maps_reeb_inconsistent"] = True
    return rep
