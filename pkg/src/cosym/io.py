"""JSON formats for algebras, forms, matrices and bundles.

Rationals are ``"p/q"`` strings. Basis indices in files are 1-based for
even-dimensional data and for plain algebras; odd bundles built as
extensions use base 0, index 0 being the xi direction. Any object may carry
an explicit ``"base"`` key.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import forms as fm
from . import linalg as la
from . import structures as st
from .correspondence import EvenBundle, OddBundle
from .errors import CosymError, DimensionMismatch
from .forms import KForm
from .lie import LieAlgebra, new_lie_algebra


class FormatError(CosymError):
    pass


def _scalar(v, consts=None):
    if isinstance(v, bool):
        raise FormatError(f"not a rational: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        raise FormatError(f"floats are not accepted, write {v!r} as a \"p/q\" string")
    if isinstance(v, str):
        try:
            return la.frac(v)
        except (ValueError, ZeroDivisionError, TypeError):
            if consts:
                from .catalog import scalar_expr
                return scalar_expr(v, consts)
            raise FormatError(f"not a rational: {v!r}") from None
    raise FormatError(f"not a rational: {v!r}")


def _index(v, base, dim):
    try:
        k = int(v) - base
    except (TypeError, ValueError):
        raise FormatError(f"bad index {v!r}") from None
    if not 0 <= k < dim:
        raise FormatError(f"index {v!r} out of range for dimension {dim} (base {base})")
    return k


def algebra_from_json(obj: dict, base: int | None = None, consts: dict | None = None) -> LieAlgebra:
    try:
        dim = int(obj["dim"])
        base = int(obj.get("base", 1 if base is None else base))
        entries = []
        for b in obj.get("brackets", []):
            i, j = _index(b["i"], base, dim), _index(b["j"], base, dim)
            out = {}
            for k, c in b["out"]:
                kk = _index(k, base, dim)
                out[kk] = out.get(kk, 0) + _scalar(c, consts)
            entries.append((i, j, out))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed algebra: {exc}") from None
    labels = obj.get("labels")
    return new_lie_algebra(dim, entries, labels)


def algebra_to_json(g: LieAlgebra, base: int = 1) -> dict:
    brackets = []
    for i, j, v in g.nonzero_brackets():
        brackets.append({"i": i + base, "j": j + base,
                         "out": [[k + base, la.fmt(v[k])] for k in range(g.dim) if v[k] != 0]})
    return {"dim": g.dim, "labels": list(g.labels), "base": base, "brackets": brackets}


def form_from_json(obj: dict, dim: int, base: int | None = None) -> KForm:
    try:
        base = int(obj.get("base", 1 if base is None else base))
        terms = {}
        for t in obj.get("terms", []):
            idx = tuple(_index(i, base, dim) for i in t["idx"])
            terms[idx] = terms.get(idx, 0) + _scalar(t["c"])
        return fm.kform(dim, int(obj["degree"]), terms.items())
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed form: {exc}") from None


def form_to_json(a: KForm, base: int = 1) -> dict:
    return {"degree": a.degree, "base": base,
            "terms": [{"idx": [i + base for i in idx], "c": la.fmt(c)} for idx, c in a.coeffs.items()]}


def matrix_from_json(rows, n: int) -> np.ndarray:
    try:
        m = np.array([[_scalar(x) for x in r] for r in rows], dtype=object)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed matrix: {exc}") from None
    if m.shape != (n, n):
        raise DimensionMismatch(f"matrix must be {n}x{n}, got {m.shape}")
    return la.freeze(m)


def vector_from_json(v, n: int) -> np.ndarray:
    out = np.array([_scalar(x) for x in v], dtype=object)
    if out.shape != (n,):
        raise DimensionMismatch(f"vector must have length {n}")
    return la.freeze(out)


def matrix_to_json(m) -> list:
    m = np.asarray(m)
    if m.dtype != object:
        return [[float(f"{x:.12g}") for x in r] for r in m]
    return [[la.fmt(x) for x in r] for r in m]


def bundle_from_json(obj: dict):
    kind = obj.get("kind")
    if kind not in ("even", "odd"):
        raise FormatError("bundle needs \"kind\": \"even\" or \"odd\"")
    base = 1 if kind == "even" else 0
    g = algebra_from_json(obj["algebra"], base)
    n = g.dim
    if kind == "even":
        omega = form_from_json(obj["omega"], n, base)
        d = matrix_from_json(obj["derivation"], n) if "derivation" in obj else la.rzeros((n, n))
        j = matrix_from_json(obj["J"], n) if "J" in obj else None
        metric = matrix_from_json(obj["metric"], n) if "metric" in obj else None
        if (j is None) != (metric is None):
            raise FormatError("J and metric must be given together")
        return EvenBundle(g, omega, d, j, metric)
    eta = form_from_json(obj["eta"], n, base)
    omega = form_from_json(obj["omega"], n, base) if "omega" in obj else None
    acm = None
    if "acm" in obj:
        a = obj["acm"]
        acm = st.check_acm(g, matrix_from_json(a["phi"], n), vector_from_json(a["xi"], n), eta,
                           matrix_from_json(a["metric"], n))
        omega = omega or st.fundamental_form(acm)
    if omega is None:
        raise FormatError("odd bundle needs omega or acm")
    pair = st.check_almost_cosymplectic(g, eta, omega)
    return OddBundle(g, pair, acm)


def bundle_to_json(b) -> dict:
    if isinstance(b, EvenBundle):
        out = {"kind": "even", "algebra": algebra_to_json(b.h, 1), "omega": form_to_json(b.omega, 1),
               "derivation": matrix_to_json(b.D)}
        if b.J is not None:
            out["J"] = matrix_to_json(b.J)
            out["metric"] = matrix_to_json(b.metric)
        return out
    out = {"kind": "odd", "algebra": algebra_to_json(b.g, 0), "eta": form_to_json(b.pair.eta, 0),
           "omega": form_to_json(b.pair.omega, 0)}
    if b.acm is not None:
        out["acm"] = {"phi": matrix_to_json(b.acm.phi), "xi": [la.fmt(x) for x in b.acm.xi],
                      "metric": matrix_to_json(b.acm.metric)}
    return out


def load(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None


def to_jsonable(x: Any) -> Any:
    """Recursively convert numbers, arrays, forms and tuples into JSON values."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return la.fmt(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, KForm):
        return {"degree": x.degree,
                "terms": [{"idx": list(k), "c": la.fmt(v)} for k, v in x.coeffs.items()]}
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "__dict__"):
        return to_jsonable(vars(x))
    return str(x)


def dumps(x: Any) -> str:
    return json.dumps(to_jsonable(x), sort_keys=True, indent=2, ensure_ascii=False)
