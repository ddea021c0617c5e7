"""Named algebras, forms, derivation families and structures.

Families and forms are written in the same notation the tables use, e.g.
``"De1=2p e1+q e3; De4=-s e3-2p e4"`` or ``"e14+eps e23"`` and parsed into
exact objects. Row constants (eps, lam, alpha, ...) are substituted at
instantiation; the remaining symbols are the free family parameters.

Brackets of the four-dimensional classification rows are not built in
(except h4 and r'2, whose brackets are printed alongside their examples).
They are read from an external JSON file, ``data/lie4d.json`` by
default or ``$COSYM_DATA``.
"""
from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import correspondence as co
from . import forms as fm
from . import linalg as la
from . import structures as st
from .correspondence import EvenBundle, OddBundle
from .errors import (
    CosymError,
    InadmissibleParams,
    MismatchReport,
    MissingExternalData,
    UnknownEntry,
)
from .forms import KForm
from .lie import (
    LieAlgebra,
    MatSpace,
    derivation_space,
    from_table,
    is_derivation,
    jacobi_defect,
    new_lie_algebra,
)

DATA_ENV = "COSYM_DATA"
DEFAULT_DATA = Path("data") / "lie4d.json"

E4 = ("e1", "e2", "e3", "e4")


# -- notation parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"^(\d+(?:/\d+)?)?([A-Za-z_][A-Za-z0-9_]*)?$")


def _terms(expr: str):
    expr = expr.strip()
    if not expr or expr == "0":
        return []
    out = []
    for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", expr):
        out.append((-1 if sign == "-" else 1, body.split()))
    return out


def _coefficient(tokens, consts: dict, free: tuple):
    """Product of the tokens; returns (value, free-parameter name or None)."""
    value = Fraction(1)
    param = None
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m or not (m.group(1) or m.group(2)):
            raise CosymError(f"cannot read coefficient token {tok!r}")
        if m.group(1):
            value *= Fraction(m.group(1))
        name = m.group(2)
        if name is None:
            continue
        if name in consts:
            value *= la.frac(consts[name])
        elif name in free:
            if param is not None:
                raise CosymError(f"term is not linear in the parameters: {tokens}")
            param = name
        else:
            raise CosymError(f"unknown symbol {name!r}")
    return value, param


def scalar_expr(expr: str, consts: dict | None = None) -> Fraction:
    """Rational value of a linear expression such as ``"1-lam"`` or ``"-1/2"``."""
    total = Fraction(0)
    for sign, toks in _terms(expr):
        v, _ = _coefficient(toks, consts or {}, ())
        total += sign * v
    return total


def parse_family(text: str, labels, params, consts: dict | None = None, letter="D"):
    """``"De1=p e3+q e4; De2=..."`` -> Family. Unlisted basis vectors map to 0."""
    labels = list(labels)
    n = len(labels)
    consts = dict(consts or {})
    params = tuple(params.split()) if isinstance(params, str) else tuple(params)
    part = la.rzeros((n, n))
    mats = {p: la.rzeros((n, n)) for p in params}
    for clause in filter(None, (c.strip() for c in text.split(";"))):
        lhs, rhs = (s.strip() for s in clause.split("="))
        if not lhs.startswith(letter) or lhs[len(letter):] not in labels:
            raise CosymError(f"bad left-hand side {lhs!r}")
        col = labels.index(lhs[len(letter):])
        for sign, toks in _terms(rhs):
            *coef, lab = toks
            if lab not in labels:
                raise CosymError(f"unknown basis vector {lab!r}")
            v, p = _coefficient(coef, consts, params)
            target = part if p is None else mats[p]
            target[labels.index(lab), col] += sign * v
    names = tuple(p for p in params if not la.is_zero(mats[p]))
    return Family(names, MatSpace(n, la.freeze(part), tuple(la.freeze(mats[p]) for p in names)))


def parse_endo(text: str, labels, consts=None, letter="D") -> np.ndarray:
    return parse_family(text, labels, (), consts, letter).space.particular


def parse_complex(text: str, labels) -> np.ndarray:
    """Complete ``"Je1=e2; Je3=e4"`` using J^2 = -I."""
    j = np.array(parse_endo(text, labels, letter="J"), dtype=object, copy=True)
    n = len(labels)
    for col in range(n):
        if la.is_zero(j[:, col]):
            continue
        for row in range(n):
            if j[row, col] != 0 and la.is_zero(j[:, row]):
                j[col, row] = -1 / j[row, col]
    if not la.equal(j @ j, -la.reye(n)):
        raise CosymError(f"{text!r} does not define a complex structure")
    return la.freeze(j)


def parse_form(text: str, labels, consts=None) -> KForm:
    """``"e14+eps e23"``: two-digit suffixes pick labels by their trailing number."""
    labels = list(labels)
    prefix = re.match(r"[A-Za-z]+", labels[-1]).group(0)
    number = {lab[len(prefix):]: k for k, lab in enumerate(labels) if lab.startswith(prefix)}
    acc = {}
    for sign, toks in _terms(text):
        *coef, lab = toks
        if not lab.startswith(prefix):
            raise CosymError(f"bad form term {lab!r}")
        idx = tuple(number[d] for d in lab[len(prefix):])
        v, _ = _coefficient(coef, consts or {}, ())
        acc[idx] = acc.get(idx, 0) + sign * v
    return fm.kform(len(labels), len(next(iter(acc))) if acc else 2, acc)


@dataclass(frozen=True, eq=False)
class Family:
    """Printed parametric family: particular matrix plus one matrix per parameter."""

    names: tuple[str, ...]
    space: MatSpace

    def at(self, values: dict) -> np.ndarray:
        return self.space.member([la.frac(values.get(p, 0)) for p in self.names])

    def sample(self, rng: random.Random) -> np.ndarray:
        return self.space.sample(rng)


# -- parameters -------------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    default: Any = 0
    kind: str = "rational"  # rational | nonzero | int | choice | interval
    lo: Any = None
    hi: Any = None
    lo_open: bool = False
    hi_open: bool = False
    choices: tuple = ()
    exclude: tuple = ()

    def admissible(self, v) -> bool:
        if self.kind == "int":
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    return False
                v = v.numerator
            if not isinstance(v, int) or (self.lo is not None and v < self.lo):
                return False
            return True
        if self.kind == "choice":
            return v in self.choices
        if self.kind == "nonzero" and v == 0:
            return False
        if v in [la.frac(x) for x in self.exclude]:
            return False
        if self.lo is not None:
            lo = la.frac(self.lo)
            if v < lo or (self.lo_open and v == lo):
                return False
        if self.hi is not None:
            hi = la.frac(self.hi)
            if v > hi or (self.hi_open and v == hi):
                return False
        return True

    def coerce(self, v):
        if self.kind == "choice":
            for c in self.choices:
                if v == c or str(v) == str(c):
                    return c
            return v
        if self.kind == "int":
            f = Fraction(v) if isinstance(v, int) else la.frac(v)
            return int(f) if f.denominator == 1 else f
        return la.frac(v)

    def sample(self, rng: random.Random):
        if self.kind == "choice":
            return rng.choice(self.choices)
        if self.kind == "int":
            return self.default
        for _ in range(100):
            lo = la.frac(self.lo) if self.lo is not None else Fraction(-4)
            hi = la.frac(self.hi) if self.hi is not None else Fraction(4)
            v = lo + (hi - lo) * Fraction(rng.randint(0, 24), 24)
            v = v.limit_denominator(48)
            if self.admissible(v):
                return v
        return self.default


def _check_params(specs: tuple[Param, ...], given: dict) -> dict:
    known = {p.name: p for p in specs}
    unknown = set(given) - set(known)
    if unknown:
        raise InadmissibleParams(f"unknown parameters {sorted(unknown)}")
    out = {}
    for p in specs:
        v = p.coerce(given[p.name] if p.name in given else p.default)
        if not p.admissible(v):
            raise InadmissibleParams(f"{p.name}={v} is not admissible")
        out[p.name] = v
    return out


# -- entries ----------------------------------------------------------------------------

@dataclass
class Instance:
    name: str
    params: dict
    provenance: str
    algebra: LieAlgebra | None = None
    even: EvenBundle | None = None
    odd: OddBundle | None = None
    families: dict[str, tuple] = field(default_factory=dict)  # label -> (Family, computed space fn, mode)
    expect: dict[str, Any] = field(default_factory=dict)
    xi_label: str = "e0"

    @property
    def bundle(self):
        return self.odd or self.even or self.algebra


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: tuple[Param, ...]
    factory: Callable[..., Instance]
    provenance: str
    extra: Callable[[dict], None] | None = None  # joint admissibility

    def instantiate(self, params: dict | None = None, data=None) -> Instance:
        vals = _check_params(self.params, dict(params or {}))
        if self.extra is not None:
            self.extra(vals)
        inst = self.factory(vals, data) if _needs_data(self) else self.factory(vals)
        inst.params = vals
        return inst

    def sample_params(self, rng: random.Random) -> dict:
        for _ in range(100):
            vals = {p.name: p.sample(rng) for p in self.params}
            try:
                if self.extra is not None:
                    self.extra(vals)
                return vals
            except InadmissibleParams:
                continue
        raise InadmissibleParams(f"could not sample admissible parameters for {self.name}")


def _needs_data(e: CatalogEntry) -> bool:
    return getattr(e.factory, "needs_data", False)


REGISTRY: dict[str, CatalogEntry] = {}


def register(name, params=(), provenance="", extra=None):
    def deco(fn):
        REGISTRY[name] = CatalogEntry(name, tuple(params), fn, provenance, extra)
        return fn
    return deco


def names() -> list[str]:
    return sorted(REGISTRY)


def catalog_get(name: str, params: dict | None = None, data=None) -> Instance:
    if name not in REGISTRY:
        raise UnknownEntry(f"no catalog entry named {name!r}")
    return REGISTRY[name].instantiate(params, data)


def standard_omega(n: int, offset: int = 0, dim: int | None = None) -> KForm:
    """e^{12} + e^{34} + ... on n = 2m coordinates."""
    dim = dim or n
    return fm.kform(dim, 2, {(offset + 2 * i, offset + 2 * i + 1): 1 for i in range(n // 2)})


def _ist(h, omega, alpha=0, commute=None):
    return lambda: st.ist_derivation_space(h, omega, alpha, commute)


# abelian ------------------------------------------------------------------------------

@register("abelian", [Param("n", 4, "int", lo=2)], "trivial: all brackets vanish")
def _abelian(p):
    n = p["n"]
    if n % 2:
        raise InadmissibleParams("n must be even")
    h = new_lie_algebra(n, [])
    e = EvenBundle(h, standard_omega(n), la.rzeros((n, n)))
    return Instance("abelian", p, "trivial", algebra=h, even=e, odd=co.extend(e),
                    expect={"alpha": Fraction(0), "der_dim": n * n, "symplectic": True})


# Heisenberg -----------------------------------------------------------------------------

def heisenberg_algebra(n: int, reading: str = "disjoint") -> LieAlgebra:
    """h_{2n+1}; ``disjoint`` pairs (e1,e2),(e3,e4),...; ``consecutive`` is the
    literal [e_i, e_{i+1}] = e_{2n+1}, i = 1..n-1."""
    dim = 2 * n + 1
    if reading == "disjoint":
        pairs = [(2 * i, 2 * i + 1) for i in range(n)]
    elif reading == "consecutive":
        pairs = [(i, i + 1) for i in range(n - 1)]
    else:
        raise InadmissibleParams(f"unknown Heisenberg reading {reading!r}")
    return new_lie_algebra(dim, [(i, j, {dim - 1: 1}) for i, j in pairs])


@register("heisenberg", [Param("n", 1, "int", lo=1),
                         Param("reading", "disjoint", "choice", choices=("disjoint", "consecutive"))],
          "Heisenberg algebra and its trivial extension R e0 x h_{2n+1} with an almost symplectic form")
def _heisenberg(p):
    n, reading = p["n"], p["reading"]
    g = heisenberg_algebra(n, reading)
    dim = 2 * n + 2
    labels = ("e0",) + tuple(f"e{i + 1}" for i in range(2 * n + 1))
    entries = [(i + 1, j + 1, [Fraction(0)] + list(v)) for i, j, v in g.nonzero_brackets()]
    h = new_lie_algebra(dim, entries, labels)
    # Omega = e^{01} + e^{23} + ... + e^{2n,2n+1}
    e = EvenBundle(h, standard_omega(dim), la.rzeros((dim, dim)))
    expect = {}
    if reading == "disjoint":
        expect["der_dim"] = 2 * n * n + 3 * n + 1
    return Instance("heisenberg", p, "Heisenberg almost cosymplectic example", algebra=g, even=e,
                    odd=co.extend(e, "xi"), expect=expect, xi_label="xi")


# R + sl(2) / su(2) -----------------------------------------------------------------------

UNSOLVABLE_LABELS = ("e0", "e1", "e2", "e3")


def unsolvable4_algebra(l1, l2, l3) -> LieAlgebra:
    return from_table(UNSOLVABLE_LABELS, {"e1,e2": {"e3": l3}, "e2,e3": {"e1": l1}, "e3,e1": {"e2": l2}})


def unsolvable4_family(l1, l2, l3) -> Family:
    # columns of the printed matrix, rows and columns ordered e0..e3
    c = {"u": l2 / l1, "v": l3 / l1, "w": l3 / l2}
    return parse_family("De0=a e0; De1=-u b e2-v c e3; De2=b e1-w d e3; De3=c e1+d e2",
                        UNSOLVABLE_LABELS, "a b c d", c)


@register("unsolvable4", [Param("l1", 1, "nonzero"), Param("l2", 1, "nonzero"), Param("l3", 1, "nonzero"),
                          Param("a"), Param("b"), Param("c"), Param("d")],
          "R + sl(2)/su(2) with its derivation family; almost symplectic Omega = e^01 + e^23")
def _unsolvable4(p):
    l1, l2, l3 = p["l1"], p["l2"], p["l3"]
    h = unsolvable4_algebra(l1, l2, l3)
    fam = unsolvable4_family(l1, l2, l3)
    d = fam.at(p)
    omega = fm.kform(4, 2, {(0, 1): 1, (2, 3): 1})
    e = EvenBundle(h, omega, d)
    return Instance("unsolvable4", p, "unsolvable 4D example", algebra=h, even=e, odd=co.extend(e, "xi"),
                    families={"der": (fam, lambda: derivation_space(h), "equal")},
                    expect={"symplectic": False, "der_dim": 4}, xi_label="xi")


# 6D filiform and the 7D family -------------------------------------------------------------

X6 = tuple(f"X{i}" for i in range(1, 7))
X7 = ("X0",) + X6
FILIFORM_OMEGA = "X16-X25+X34"

FILIFORM_DER = ("DX1=d11 X1+d21 X2+d31 X3+d41 X4+d51 X5+d61 X6;"
                "DX2=d22 X2+d32 X3+d42 X4+d52 X5+d62 X6;"
                "DX3=d11 X3+d22 X3+d32 X4+d42 X5+d52 X6;"
                "DX4=2d11 X4+d22 X4+d32 X5+d42 X6;"
                "DX5=3d11 X5+d22 X5+d32 X6;"
                "DX6=4d11 X6+d22 X6")
FILIFORM_DER_PARAMS = "d11 d21 d22 d31 d32 d41 d42 d51 d52 d61 d62"

FILIFORM_IST = ("DX1=-2/7 alpha X1+p X2+q X4+r X5+s X6;"
                "DX2=-4/7 alpha X2+p X3+q X5-r X6;"
                "DX3=-6/7 alpha X3+p X4+q X6;"
                "DX4=-8/7 alpha X4+p X5;"
                "DX5=-10/7 alpha X5+p X6;"
                "DX6=-12/7 alpha X6")


def filiform6_algebra() -> LieAlgebra:
    return from_table(X6, {"X1,X2": {"X3": 1}, "X1,X3": {"X4": 1}, "X1,X4": {"X5": 1}, "X1,X5": {"X6": 1}})


def filiform6_omega() -> KForm:
    return parse_form(FILIFORM_OMEGA, X6)


def filiform6_der_family() -> Family:
    return parse_family(FILIFORM_DER, X6, FILIFORM_DER_PARAMS, letter="D")


def filiform6_ist_family(alpha=0) -> Family:
    return parse_family(FILIFORM_IST, X6, "p q r s", {"alpha": alpha})


def filiform7_algebra(p, q, r, s) -> LieAlgebra:
    return from_table(X7, {
        "X0,X1": {"X2": p, "X4": q, "X5": r, "X6": s},
        "X0,X2": {"X3": p, "X5": q, "X6": -r},
        "X0,X3": {"X4": p, "X6": q},
        "X0,X4": {"X5": p},
        "X0,X5": {"X6": p},
        "X1,X2": {"X3": 1}, "X1,X3": {"X4": 1}, "X1,X4": {"X5": 1}, "X1,X5": {"X6": 1},
    })


_PQRS = [Param("p"), Param("q"), Param("r"), Param("s")]


def _filiform_instance(name, p, alpha):
    h = filiform6_algebra()
    omega = filiform6_omega()
    ist = filiform6_ist_family(alpha)
    d = ist.at(p)
    e = EvenBundle(h, omega, d)
    fams = {"der": (filiform6_der_family(), lambda: derivation_space(h), "equal"),
            "ist": (ist, _ist(h, omega, alpha), "equal")}
    return Instance(name, p, "6D filiform symplectic example", algebra=h, even=e, odd=co.extend(e, "X0"),
                    families=fams, expect={"der_dim": 11, "symplectic": True, "alpha": alpha,
                                           "ist_rank": 7},
                    xi_label="X0")


@register("filiform6", _PQRS, "6D filiform algebra with Omega = X^16 - X^25 + X^34 and D from the alpha=0 family")
def _filiform6(p):
    return _filiform_instance("filiform6", p, Fraction(0))


@register("filiform6_ist", [Param("alpha")] + _PQRS, "6D filiform with the general-alpha i.s.t. family")
def _filiform6_ist(p):
    return _filiform_instance("filiform6_ist", p, p["alpha"])


@register("filiform7", _PQRS, "printed 7D cosymplectic family")
def _filiform7(p):
    g = filiform7_algebra(p["p"], p["q"], p["r"], p["s"])
    omega = parse_form(FILIFORM_OMEGA, X7)
    pair = st.check_almost_cosymplectic(g, fm.basis_form(7, 0), omega)
    ref = _filiform_instance("filiform6", p, Fraction(0))
    return Instance("filiform7", p, "7D cosymplectic family", odd=OddBundle(g, pair),
                    expect={"alpha": Fraction(0), "reduces_to": ref.even}, xi_label="X0")


# h4 ------------------------------------------------------------------------------------

H4_J = "Je1=-e2; Je3=e4"


def h4_algebra() -> LieAlgebra:
    return from_table(E4, {"e1,e2": {"e3": 1}, "e4,e3": {"e3": 1},
                           "e4,e1": {"e1": Fraction(1, 2)}, "e4,e2": {"e1": 1, "e2": Fraction(1, 2)}})


def h4_family() -> Family:
    return parse_family("De2=p e1; De4=q e3", E4, "p q")


def h4_kahler(eps):
    """Omega = eps(e^12 - e^34) with metric I; eps = -1 uses -J."""
    j = parse_complex(H4_J, E4)
    j = la.freeze(eps * j)
    return parse_form("eps e12-eps e34", E4, {"eps": eps}), j, la.reye(4)


_EPS = Param("eps", 1, "choice", choices=(1, -1))


def _h4_even(p, d):
    h = h4_algebra()
    omega, j, metric = h4_kahler(p["eps"])
    return EvenBundle(h, omega, d, j, metric)


@register("h4", [_EPS, Param("p"), Param("q")], "h4 with Omega, J and the i.s.t. family De2 = p e1, De4 = q e3")
def _h4(p):
    fam = h4_family()
    e = _h4_even(p, fam.at(p))
    o = co.extend_acm(e.h, e.J, e.metric, e.D)
    return Instance("h4", p, "h4 almost coKahler example", algebra=e.h, even=e, odd=o,
                    families={"ist": (fam, _ist(e.h, e.omega), "equal")},
                    expect={"symplectic": True, "alpha": Fraction(0)})


def h4_family_algebra(p, q) -> LieAlgebra:
    labels = ("e0",) + E4
    return from_table(labels, {"e0,e2": {"e1": p}, "e0,e4": {"e3": q},
                               "e1,e2": {"e3": 1}, "e4,e3": {"e3": 1},
                               "e4,e1": {"e1": Fraction(1, 2)}, "e4,e2": {"e1": 1, "e2": Fraction(1, 2)}})


def _acm_from_printed(g, j4, metric4):
    n = g.dim
    phi = la.rzeros((n, n))
    phi[1:, 1:] = j4
    metric = la.rzeros((n, n))
    metric[0, 0] = Fraction(1)
    metric[1:, 1:] = metric4
    eta = fm.basis_form(n, 0)
    return st.check_acm(g, phi, la.unit(n, 0), eta, metric), eta


def _pq_not_both_zero(p):
    if p["p"] == 0 and p["q"] == 0:
        raise InadmissibleParams("(p, q) must differ from (0, 0)")


@register("h4_family", [_EPS, Param("p", 1), Param("q", 1)], "printed 5D strictly almost coKahler family from h4",
          extra=_pq_not_both_zero)
def _h4_family5(p):
    g = h4_family_algebra(p["p"], p["q"])
    omega4, j, metric = h4_kahler(p["eps"])
    acm, eta = _acm_from_printed(g, j, metric)
    pair = st.check_almost_cosymplectic(g, eta, st.fundamental_form(acm))
    ref = _h4_even(p, h4_family().at(p))
    return Instance("h4_family", p, "h4 5D family", odd=OddBundle(g, pair, acm),
                    expect={"alpha": Fraction(0), "reduces_to": ref, "extends_from": ref,
                            "flags": {"almost_coKahler": True, "K_cosymplectic": False, "normal": False,
                                      "lie_xi_phi_zero": False, "coKahler": False}})


@register("h4_kcosymplectic", [_EPS], "D = 0 on strictly almost Kahler h4: strictly K-cosymplectic")
def _h4_kcosym(p):
    e = _h4_even(p, la.rzeros((4, 4)))
    o = co.extend_acm(e.h, e.J, e.metric, e.D)
    return Instance("h4_kcosymplectic", p, "K-cosymplectic construction", even=e, odd=o,
                    expect={"alpha": Fraction(0),
                            "flags": {"almost_coKahler": True, "K_cosymplectic": True, "normal": False}})


# r'2 -----------------------------------------------------------------------------------

R2P_J = "Je3=e2; Je4=e1"
R2P_FAMILY = "De1=p e3+q e4; De2=-q e3+p e4; De3=-2 alpha e3; De4=-2 alpha e4"


def r2prime_algebra() -> LieAlgebra:
    return from_table(E4, {"e1,e3": {"e3": 1}, "e1,e4": {"e4": 1}, "e2,e3": {"e4": 1}, "e2,e4": {"e3": -1}})


def r2prime_family(alpha=0) -> Family:
    return parse_family(R2P_FAMILY, E4, "p q", {"alpha": alpha})


def r2prime_kahler():
    return parse_form("e14+e23", E4), parse_complex(R2P_J, E4), la.reye(4)


def _r2p_even(p):
    omega, j, metric = r2prime_kahler()
    return EvenBundle(r2prime_algebra(), omega, r2prime_family(p["alpha"]).at(p), j, metric)


def _r2p_admissible(p):
    if p["alpha"] == 0:
        _pq_not_both_zero(p)


_APQ = [Param("alpha"), Param("p", 1), Param("q")]


@register("r2prime", _APQ, "r'2 with Omega = e^14 + e^23, J and the alpha-i.s.t. family")
def _r2prime(p):
    e = _r2p_even(p)
    o = co.extend_acm(e.h, e.J, e.metric, e.D)
    fam = r2prime_family(p["alpha"])
    return Instance("r2prime", p, "r'2 example", algebra=e.h, even=e, odd=o,
                    families={"ist": (fam, _ist(e.h, e.omega, p["alpha"]), "equal")},
                    expect={"symplectic": True, "alpha": p["alpha"]})


def r2prime_family_algebra(alpha, p, q) -> LieAlgebra:
    """Printed [e0, .] brackets on top of the r'2 brackets."""
    labels = ("e0",) + E4
    return from_table(labels, {"e0,e1": {"e3": p, "e4": q}, "e0,e2": {"e3": -q, "e4": p},
                               "e0,e3": {"e3": -2 * alpha}, "e0,e4": {"e4": -2 * alpha},
                               "e1,e3": {"e3": 1}, "e1,e4": {"e4": 1}, "e2,e3": {"e4": 1}, "e2,e4": {"e3": -1}})


@register("r2prime_family", _APQ, "5D almost alpha-coKahler family from r'2", extra=_r2p_admissible)
def _r2prime_family5(p):
    g = r2prime_family_algebra(p["alpha"], p["p"], p["q"])
    _, j, metric = r2prime_kahler()
    acm, eta = _acm_from_printed(g, j, metric)
    pair = st.check_almost_cosymplectic(g, eta, st.fundamental_form(acm))
    ref = _r2p_even(p)
    return Instance("r2prime_family", p, "r'2 5D family", odd=OddBundle(g, pair, acm),
                    expect={"alpha": p["alpha"], "reduces_to": ref, "extends_from": ref,
                            "flags": {"almost_acoKahler": True, "lie_xi_phi_zero": False, "normal": False}})


# abelian alpha-Kenmotsu ---------------------------------------------------------------

KENMOTSU_J = "Je1=e3; Je2=e4"
KENMOTSU_FAMILY = ("De1=-alpha e1-p e2-q e3-r e4; De2=p e1-alpha e2-r e3-s e4;"
                   "De3=q e1+r e2-alpha e3-p e4; De4=r e1+s e2+p e3-alpha e4")


def kenmotsu_family(alpha) -> Family:
    return parse_family(KENMOTSU_FAMILY, E4, "p q r s", {"alpha": alpha})


def kenmotsu_kahler():
    return parse_form("e31+e42", E4), parse_complex(KENMOTSU_J, E4), la.reye(4)


_APQRS = [Param("alpha", 1)] + _PQRS


def _kenmotsu_even(p):
    omega, j, metric = kenmotsu_kahler()
    return EvenBundle(new_lie_algebra(4, []), omega, kenmotsu_family(p["alpha"]).at(p), j, metric)


def _kenmotsu_flags(alpha):
    return {"normal": True, "almost_acoKahler": True, "alpha_Kenmotsu": alpha != 0,
            "coKahler": alpha == 0, "lie_xi_phi_zero": True}


@register("abelian4_kenmotsu", _APQRS, "abelian Kahler R^4 with the commuting alpha-i.s.t. family")
def _abelian4_kenmotsu(p):
    e = _kenmotsu_even(p)
    o = co.extend_acm(e.h, e.J, e.metric, e.D)
    fam = kenmotsu_family(p["alpha"])
    return Instance("abelian4_kenmotsu", p, "alpha-Kenmotsu example", algebra=e.h, even=e, odd=o,
                    families={"ist_commuting": (fam, _ist(e.h, e.omega, p["alpha"], e.J), "equal")},
                    expect={"symplectic": True, "alpha": p["alpha"], "flags": _kenmotsu_flags(p["alpha"])})


def kenmotsu5_algebra(alpha, p, q, r, s) -> LieAlgebra:
    a = alpha
    return from_table(("e0",) + E4, {
        "e0,e1": {"e1": -a, "e2": -p, "e3": -q, "e4": -r},
        "e0,e2": {"e1": p, "e2": -a, "e3": -r, "e4": -s},
        "e0,e3": {"e1": q, "e2": r, "e3": -a, "e4": -p},
        "e0,e4": {"e1": r, "e2": s, "e3": p, "e4": -a},
    })


@register("kenmotsu5", [Param("alpha", 1, "nonzero")] + _PQRS, "printed 5D alpha-Kenmotsu family")
def _kenmotsu5(p):
    g = kenmotsu5_algebra(p["alpha"], p["p"], p["q"], p["r"], p["s"])
    _, j, metric = kenmotsu_kahler()
    acm, eta = _acm_from_printed(g, j, metric)
    pair = st.check_almost_cosymplectic(g, eta, st.fundamental_form(acm))
    ref = _kenmotsu_even(p)
    return Instance("kenmotsu5", p, "alpha-Kenmotsu 5D family", odd=OddBundle(g, pair, acm),
                    expect={"alpha": p["alpha"], "reduces_to": ref, "extends_from": ref,
                            "flags": _kenmotsu_flags(p["alpha"])})


# -- classification tables ----------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    table: int
    name: str  # row key, including the sub-case, e.g. "r4_0[eps=1]"
    algebra: str  # key into the external data / built-in brackets
    omega: str
    family: str
    family_params: str
    consts: dict = field(default_factory=dict)  # fixed sub-case constants (eps, ...)
    row_params: tuple[Param, ...] = ()  # continuous row parameters (lam, beta, a12, ...)
    J: str | None = None
    note: str = ""


def _interval(name, default, lo=None, hi=None, lo_open=False, hi_open=False, exclude=()):
    return Param(name, Fraction(default), "interval", lo, hi, lo_open, hi_open, exclude=exclude)


_NEG = lambda n, d=-1: _interval(n, d, hi=0, hi_open=True)  # noqa: E731
_POS = lambda n, d=1: _interval(n, d, lo=0, lo_open=True)  # noqa: E731


def _t1_rows() -> list[TableRow]:
    rows = [
        TableRow(1, "rh3", "rh3", "e14+e23",
                 "De1=2p e1+q e3+r e4; De2=s e1-p e2+t e3+q e4; De3=p e3; De4=-s e3-2p e4", "p q r s t"),
        TableRow(1, "rr3_0", "rr3_0", "e12+e34", "De1=p e2; De3=q e3+r e4; De4=s e3-q e4", "p q r s"),
        TableRow(1, "rr3_m1", "rr3_m1", "e14+e23", "De1=p e4; De2=q e2; De3=-q e3", "p q"),
        TableRow(1, "rr3p_0", "rr3p_0", "e14+e23", "De1=p e4; De2=q e3; De3=-q e2", "p q"),
        TableRow(1, "r2r2", "r2r2", "e12+lam e13+e34", "De1=p e2; De3=q e4", "p q",
                 row_params=(_interval("lam", 0, lo=0),)),
        TableRow(1, "r2p", "r2p", "e14+e23", "De1=p e3+q e4; De2=-q e3+p e4", "p q"),
        TableRow(1, "n4", "n4", "e12+e34", "De1=p e2+q e3; De2=p e3; De4=p e1-q e2+r e3", "p q r"),
    ]
    for eps in (1, -1):
        rows.append(TableRow(1, f"r4_0[eps={eps}]", "r4_0", "e14+eps e23", "De3=p e2; De4=q e1", "p q",
                             {"eps": eps}))
    rows.append(TableRow(1, "r4_m1", "r4_m1", "e13+e24", "De3=p e2; De4=p e1+q e2", "p q"))
    beta = _interval("beta", -1, lo=-1, hi=0, hi_open=True)
    fam = "De1=p e1; De2=-p e2+eps q e3; De4=eps q e1+r e3"
    # the printed case split names q; the reading on beta switches eps on at beta = -1
    rows.append(TableRow(1, "r4_m1_beta[reading=beta]", "r4_m1_beta", "e12+e34", fam, "p q r",
                         {"eps": "beta_is_m1"}, (beta,), note="eps = 1 iff beta = -1"))
    rows.append(TableRow(1, "r4_m1_beta[reading=q]", "r4_m1_beta", "e12+e34", fam, "p q r",
                         {"eps": 0}, (beta,), note="generic q != -1, eps = 0"))
    rows.append(TableRow(1, "r4_abar", "r4_abar", "e14+e23", "De2=p e2; De3=-p e3; De4=q e1", "p q",
                         row_params=(_interval("abar", Fraction(-1, 2), lo=-1, hi=0, lo_open=True, hi_open=True),)))
    for eps in (1, -1):
        rows.append(TableRow(1, f"r4p_0_delta[eps={eps}]", "r4p_0_delta", "e14+eps e23",
                             "De2=p e3; De3=-p e2; De4=q e1", "p q", {"eps": eps}, (_POS("delta"),)))
    for eps in (0, 1):
        rows.append(TableRow(1, f"d4_1[eps={eps}]", "d4_1", "e12-e34+eps e24",
                             "De1=p e1-eps p e1; De2=eps p e2-p e2+q e3; De4=-q e1+r e3", "p q r", {"eps": eps}))
    rows.append(TableRow(1, "d4_2[omega=e12-e34]", "d4_2", "e12-e34", "De1=p e1; De2=-p e2; De4=q e3", "p q"))
    for eps in (1, -1):
        rows.append(TableRow(1, f"d4_2[eps={eps}]", "d4_2", "e14+eps e23", "De2=p e3; De4=-2p e1", "p",
                             {"eps": eps}))
    fam = "De1=p e1+eps q e2; De2=eps r e1-p e2; De4=s e3"
    rows.append(TableRow(1, "d4_lambda", "d4_lambda", "e12-e34", fam, "p q r s", {"eps": 0},
                         (_interval("lam", 3, lo=Fraction(1, 2), lo_open=True, exclude=(1, 2)),)))
    rows.append(TableRow(1, "d4_lambda[lam=1/2]", "d4_lambda", "e12-e34", fam, "p q r s", {"eps": 1},
                         (_interval("lam", Fraction(1, 2), lo=Fraction(1, 2), hi=Fraction(1, 2)),),
                         note="boundary case"))
    for eps in (1, -1):
        rows.append(TableRow(1, f"d4p_delta[eps={eps}]", "d4p_delta", "eps e12-eps delta e34",
                             "De1=p e2; De2=-p e1; De4=q e3", "p q", {"eps": eps}, (_POS("delta"),)))
    for eps in (1, -1):
        rows.append(TableRow(1, f"h4[eps={eps}]", "h4", "eps e12-eps e34", "De2=p e1; De4=q e3", "p q",
                             {"eps": eps}))
    return rows


def _t2_rows() -> list[TableRow]:
    return [
        TableRow(2, "rr3_0", "rr3_0", "a12 e12+a34 e34", "De3=-p e4; De4=p e3", "p",
                 row_params=(_NEG("a12"), _NEG("a34")), J="Je1=e2; Je3=e4"),
        TableRow(2, "rr3p_0", "rr3p_0", "a14 e14+a23 e23", "De2=-p e3; De3=p e2", "p",
                 row_params=(_NEG("a14"), _NEG("a23")), J="Je1=e4; Je2=e3"),
        TableRow(2, "r2r2", "r2r2", "a12 e12+a34 e34", "", "",
                 row_params=(_NEG("a12"), _NEG("a34")), J="Je1=e2; Je3=e4"),
        TableRow(2, "r4p_0_delta[i]", "r4p_0_delta", "a14 e14+a23 e23", "De2=-p e3; De3=p e2", "p",
                 row_params=(_POS("a14"), _NEG("a23"), _POS("delta")), J="Je4=e1; Je2=e3"),
        TableRow(2, "r4p_0_delta[ii]", "r4p_0_delta", "a14 e14+a23 e23", "De2=-p e3; De3=p e2", "p",
                 row_params=(_POS("a14"), _POS("a23"), _POS("delta")), J="Je4=e1; Je3=e2"),
        TableRow(2, "d4_2", "d4_2", "a14 e14+a23 e23", "", "",
                 row_params=(_NEG("a14"), _NEG("a23")), J="Je1=e4; Je2=e3"),
        TableRow(2, "d4_half", "d4_lambda", "a12 e12-a12 e34", "De1=-p e2; De2=p e1", "p",
                 {"lam": Fraction(1, 2)}, (_NEG("a12"),), J="Je1=e2; Je4=e3"),
        TableRow(2, "d4p_delta[i]", "d4p_delta", "a12 e12-a12 delta e34", "De1=-p e2; De2=p e1", "p",
                 row_params=(_NEG("a12"), _POS("delta")), J="Je1=e2; Je4=e3"),
        TableRow(2, "d4p_delta[ii]", "d4p_delta", "a12 e12-a12 delta e34", "De1=-p e2; De2=p e1", "p",
                 row_params=(_POS("a12"), _POS("delta")), J="Je2=e1; Je3=e4"),
    ]


TABLE_ROWS: dict[tuple[int, str], TableRow] = {(r.table, r.name): r for r in _t1_rows() + _t2_rows()}

# algebras whose brackets are printed next to their examples
BUILTIN_BRACKETS: dict[str, Callable[[], LieAlgebra]] = {"h4": h4_algebra, "r2p": r2prime_algebra}

# rows of the strictly almost Kahler list
STRICTLY_ALMOST_KAHLER = ("rh3", "r2p", "rr3_m1", "n4", "r4_0", "r4_m1", "r4_m1_beta", "r4_abar",
                          "d4_1", "d4_lambda", "h4")


def table_rows(table: int | None = None) -> list[TableRow]:
    return [r for (t, _), r in sorted(TABLE_ROWS.items()) if table is None or t == table]


def data_path(path=None) -> Path:
    if path is not None:
        return Path(path)
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else DEFAULT_DATA


def load_external(path=None) -> dict[str, dict]:
    """Rows of the external classification file, keyed by algebra name."""
    p = data_path(path)
    if not p.exists():
        raise MissingExternalData(f"external structure-constant file {p} not found")
    raw = json.loads(p.read_text())
    rows = raw.get("rows", raw)
    for key, row in rows.items():
        if not row.get("provenance"):
            raise MissingExternalData(f"row {key!r} in {p} has no provenance")
    return rows


def _row_consts(row: TableRow, values: dict) -> dict:
    consts = dict(values)
    for k, v in row.consts.items():
        if v == "beta_is_m1":
            consts[k] = 1 if values.get("beta") == -1 else 0
        else:
            consts[k] = v
    return consts


def row_algebra(row: TableRow, values: dict, data=None) -> tuple[LieAlgebra, str]:
    if row.algebra in BUILTIN_BRACKETS:
        return BUILTIN_BRACKETS[row.algebra](), "brackets printed with the worked example"
    rows = data if isinstance(data, dict) else load_external(data)
    if row.algebra not in rows:
        raise MissingExternalData(f"no brackets for {row.algebra!r} in the external data")
    from .io import algebra_from_json
    return algebra_from_json(rows[row.algebra], consts=values), rows[row.algebra]["provenance"]


def row_params(row: TableRow, given: dict | None = None) -> dict:
    return _check_params(row.row_params, dict(given or {}))


def row_kahler(row: TableRow, values: dict | None = None):
    """(Omega, J, metric) of a Kahler row; the metric is h = -W J, so Omega(x, y) = h(x, J y)."""
    consts = _row_consts(row, row_params(row, values))
    omega = parse_form(row.omega, E4, consts)
    j = parse_complex(row.J, E4)
    metric = la.freeze(-fm.form_matrix(omega) @ j)
    if not la.is_positive_definite(metric) or not la.equal(j.T @ metric @ j, metric):
        raise MismatchReport(f"{row.name}: J is not compatible with Omega", expected="positive metric",
                             computed=_mat(metric))
    return omega, j, metric


def verify_table_row(table: int, row_name: str, params: dict | None = None, data=None) -> dict:
    """Compare the printed family of a table row with the computed i.s.t. space."""
    key = (int(table), row_name)
    if key not in TABLE_ROWS:
        raise UnknownEntry(f"no row {row_name!r} in table {table}")
    row = TABLE_ROWS[key]
    values = row_params(row, params)
    consts = _row_consts(row, values)
    h, provenance = row_algebra(row, consts, data)
    bad = jacobi_defect(h)
    if bad:
        raise MismatchReport(f"{row_name}: brackets violate Jacobi", expected=[], computed=bad)
    omega = parse_form(row.omega, E4, consts)
    sym = st.check_symplectic(h, omega)
    if not sym.flags["symplectic"]:
        raise MismatchReport(f"{row_name}: Omega is not symplectic", expected="symplectic",
                             computed=sym.witnesses)
    printed = parse_family(row.family, E4, row.family_params, consts)
    report = {"table": table, "row": row_name, "provenance": provenance,
              "params": {k: la.fmt(v) for k, v in values.items()}}
    if row.J is not None:
        _, j, _ = row_kahler(row, values)
        computed = st.ist_derivation_space(h, omega, 0, commute_with=j)
        report["normal_J"] = la.is_zero(st.nijenhuis(h, j))
    else:
        computed = st.ist_derivation_space(h, omega, 0)
    report["printed_dim"] = printed.space.dim
    report["computed_dim"] = computed.dim
    if not computed.equals(printed.space):
        raise MismatchReport(f"table {table} row {row_name}: printed family differs from the computed space",
                             expected=[_mat(b) for b in printed.space.basis],
                             computed=[_mat(b) for b in computed.basis])
    report["match"] = True
    return report


def _mat(m):
    return [[la.fmt(x) for x in r] for r in m]


# -- verification -------------------------------------------------------------------------

@dataclass
class EntryReport:
    name: str
    params: dict
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, key, passed, witness=None):
        self.checks[key] = bool(passed)
        if not passed and witness is not None:
            self.witnesses[key] = witness


def verify_entry(name: str, params: dict | None = None, seed: int = 0, samples: int = 5) -> EntryReport:
    inst = catalog_get(name, params)
    rep = EntryReport(name, dict(inst.params))
    rng = random.Random(seed)
    ex = inst.expect

    algebras = [a for a in (inst.algebra, inst.even and inst.even.h, inst.odd and inst.odd.g) if a is not None]
    bad = [t for a in algebras for t in jacobi_defect(a)]
    rep.record("jacobi", not bad, bad[:1])

    if "der_dim" in ex:
        dim = derivation_space(inst.algebra).dim
        rep.record("der_dim", dim == ex["der_dim"], {"computed": dim, "expected": ex["der_dim"]})

    e = inst.even
    if e is not None:
        rep.record("derivation", is_derivation(e.h, e.D))
        sym = st.check_symplectic(e.h, e.omega)
        rep.record("almost_symplectic", sym.flags["almost_symplectic"])
        rep.details["symplectic"] = sym.flags["symplectic"]
        if "symplectic" in ex:
            rep.record("symplectic", sym.flags["symplectic"] == ex["symplectic"], sym.witnesses)
        back, _ = co.reduce(co.extend(e, inst.xi_label))
        rep.record("reduce_extend_roundtrip", back.h == e.h and back.omega == e.omega and la.equal(back.D, e.D))
        if "ist_rank" in ex:
            rk = st.ist_constraint_rank(e.h, e.omega)
            rep.record("ist_rank", rk == ex["ist_rank"], {"computed": rk})

    for label, (fam, computed_fn, mode) in inst.families.items():
        computed = computed_fn()
        if computed is None:
            rep.record(f"{label}_family", False, "computed space is empty")
            continue
        members = [fam.sample(rng) for _ in range(samples)]
        miss = [m for m in members if not computed.contains(m)]
        rep.record(f"{label}_members", not miss, _mat(miss[0]) if miss else None)
        if mode == "equal":
            rep.record(f"{label}_family", computed.equals(fam.space),
                       {"printed_dim": fam.space.dim, "computed_dim": computed.dim})
        rep.details[f"{label}_dim"] = computed.dim

    o = inst.odd
    if o is not None:
        res = st.detect_alpha(o.g, o.pair)
        if "alpha" in ex:
            rep.record("alpha", res.kind == "alpha" and res.alpha == ex["alpha"],
                       {"kind": res.kind, "alpha": res.alpha and la.fmt(res.alpha)})
        rep.details["alpha"] = None if res.alpha is None else la.fmt(res.alpha)
        rep.record("eta_closed", fm.cartan_d(o.g, o.pair.eta).is_zero())
        if "reduces_to" in ex:
            target = ex["reduces_to"]
            red = co.reduce_acm(o) if o.acm is not None and target.J is not None else co.reduce(o)[0]
            rep.record("reduces_to_printed", red.same_as(target) if target.J is not None else
                       (red.h == target.h and red.omega == target.omega and la.equal(red.D, target.D)))
        if "extends_from" in ex:
            src = ex["extends_from"]
            built = co.extend_acm(src.h, src.J, src.metric, src.D)
            rep.record("printed_brackets", built.g == o.g)
        if o.acm is not None:
            cls = st.classify(o.g, o.acm)
            rep.details["flags"] = dict(cls.flags)
            for flag, want in ex.get("flags", {}).items():
                rep.record(f"flag:{flag}", cls.flags.get(flag) == want, cls.witnesses.get(flag))
    return rep


def verify_all(seed: int = 0, samples: int = 5) -> dict[str, list[EntryReport]]:
    """Each built-in entry at its defaults and at ``samples`` random admissible points."""
    rng = random.Random(seed)
    out = {}
    for name in names():
        entry = REGISTRY[name]
        points = [{}] + [entry.sample_params(rng) for _ in range(samples)]
        out[name] = [verify_entry(name, pt, seed) for pt in points]
    return out
