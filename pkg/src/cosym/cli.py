"""``cosym`` command line.

Exit status: 0 when every mathematical check passes, 1 when one fails (the
report says which), 2 for malformed input or usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog as cat
from . import correspondence as co
from . import forms as fm
from . import io
from . import linalg as la
from . import structures as st
from .correspondence import EvenBundle, OddBundle
from .errors import (
    ArityMismatch,
    CosymError,
    DiagonalBracket,
    DimensionMismatch,
    DuplicateEntry,
    InadmissibleParams,
    IndexOutOfRange,
    MissingExternalData,
    UnknownEntry,
    WrongDegree,
)
from .lie import LieAlgebra, ad, bracket, derivation_space, is_derivation, jacobi_defect

# every public library operation, filed under the one verb that exposes it
VERB_OPERATIONS = {
    "check": ["lie.new_lie_algebra", "lie.jacobi_defect", "lie.bracket", "forms.is_top_nonzero",
              "structures.check_almost_cosymplectic", "structures.check_symplectic", "structures.check_acm"],
    "reeb": ["structures.reeb_vector", "forms.interior", "forms.evaluate"],
    "alpha": ["structures.detect_alpha", "forms.cartan_d", "forms.wedge"],
    "der": ["lie.derivation_space", "lie.is_derivation", "lie.ad"],
    "ist": ["structures.ist_derivation_space", "structures.f_form", "structures.is_ist"],
    "extend": ["correspondence.extend", "correspondence.extend_acm"],
    "reduce": ["correspondence.reduce", "correspondence.reduce_acm", "lie.restrict_to_subspace"],
    "classify": ["structures.classify", "structures.fundamental_form", "structures.nijenhuis",
                 "structures.normality_defect", "structures.lie_derivative_phi",
                 "structures.lie_derivative_metric", "structures.polarize"],
    "iso": ["correspondence.verify_iso_even", "correspondence.verify_iso_odd", "forms.pullback"],
    "lift": ["correspondence.lift_iso"],
    "catalog": ["catalog.catalog_get"],
    "verify": ["catalog.verify_entry", "catalog.verify_table_row"],
}

INPUT_ERRORS = (io.FormatError, UnknownEntry, InadmissibleParams, MissingExternalData, DimensionMismatch,
                IndexOutOfRange, DuplicateEntry, DiagonalBracket, WrongDegree, ArityMismatch)


class UsageError(Exception):
    pass


# -- loading -------------------------------------------------------------------------------

def _params(items) -> dict:
    out = {}
    for item in items or []:
        for part in filter(None, item.split(",")):
            if "=" not in part:
                raise UsageError(f"--params expects k=v, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _is_path(s: str) -> bool:
    return s.endswith(".json") or os.sep in s or Path(s).is_file()


def _instance(name, args):
    return cat.catalog_get(name, _params(args.params))


def load_object(spec: str, args, want: str):
    """want: 'algebra', 'even' or 'odd'; catalog names pick the matching part."""
    if _is_path(spec):
        obj = _file_object(spec, want)
        if "kind" in obj:
            b = io.bundle_from_json(obj)
            if want == "algebra":
                return b.h if isinstance(b, EvenBundle) else b.g
            return _coerce_bundle(b, want)
        if want != "algebra":
            raise UsageError(f"{spec} holds a bare algebra; a bundle is needed")
        return io.algebra_from_json(obj)
    inst = _instance(spec, args)
    if want == "algebra":
        if inst.algebra is not None:
            return inst.algebra
        return inst.even.h if inst.even is not None else inst.odd.g
    if want == "even":
        if inst.even is None:
            raise UsageError(f"catalog entry {spec!r} has no even-dimensional bundle")
        return inst.even
    if inst.odd is None:
        return co.extend(inst.even, inst.xi_label)
    return inst.odd


def _file_object(spec, want):
    obj = io.load(spec)
    if "kind" not in obj and ("odd" in obj or "even" in obj):
        # output of `cosym catalog NAME --json`
        obj = obj.get(want) or obj.get("odd") or obj.get("even")
    return obj


def _coerce_bundle(b, want):
    if want == "odd" and isinstance(b, EvenBundle):
        return co.extend_acm(b.h, b.J, b.metric, b.D) if b.J is not None else co.extend(b)
    if want == "even" and isinstance(b, OddBundle):
        raise UsageError("an even-dimensional bundle is needed")
    return b


def _matrix(spec: str, n: int):
    text = Path(spec).read_text() if _is_path(spec) else spec
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise io.FormatError(f"matrix is not JSON: {exc}") from None
    return io.matrix_from_json(rows, n)


def _need(args, attr, flag):
    v = getattr(args, attr)
    if v is None:
        raise UsageError(f"{flag} is required")
    return v


# -- rendering -----------------------------------------------------------------------------

def vec_str(v, labels) -> str:
    parts = [f"{la.fmt(c)}*{labels[k]}" for k, c in enumerate(v) if c != 0]
    return " + ".join(parts) if parts else "0"


def emit_report(report: dict, as_json: bool) -> str:
    if as_json:
        return io.dumps(report) + "\n"
    lines = []
    failed = [k for k, v in report.get("checks", {}).items() if not v]
    if report.get("ok"):
        lines.append("ALL CHECKS PASSED")
    else:
        lines.append("CHECK FAILED" + (f": {failed[0]}" if failed else ""))
        wit = report.get("witnesses") or {}
        if failed and failed[0] in wit:
            lines.append(f"  witness: {json.dumps(io.to_jsonable(wit[failed[0]]), sort_keys=True)}")
        elif wit:
            k = sorted(wit)[0]
            lines.append(f"  witness ({k}): {json.dumps(io.to_jsonable(wit[k]), sort_keys=True)}")
    checks = report.get("checks", {})
    if checks:
        w = max(map(len, checks))
        for k in sorted(checks):
            lines.append(f"  {k.ljust(w)}  {'pass' if checks[k] else 'FAIL'}")
    for k in sorted(report):
        if k in ("ok", "checks", "witnesses"):
            continue
        v = io.to_jsonable(report[k])
        lines.append(f"{k}: {v if isinstance(v, str) else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _finish(report: dict, checks: dict, witnesses=None) -> dict:
    report["checks"] = {k: bool(v) for k, v in checks.items()}
    report["witnesses"] = witnesses or {}
    report["ok"] = all(report["checks"].values())
    return report


def _jacobi_witnesses(g: LieAlgebra):
    return [{"triple": [g.labels[i], g.labels[j], g.labels[k]], "defect": vec_str(v, g.labels)}
            for i, j, k, v in jacobi_defect(g)]


# -- verbs ---------------------------------------------------------------------------------

def cmd_check(args):
    spec = args.bundle or _need(args, "algebra", "--algebra or --bundle")
    if args.bundle is None:
        g = load_object(spec, args, "algebra")
        table = {f"[{g.labels[i]},{g.labels[j]}]": vec_str(bracket(g, g.basis(i), g.basis(j)), g.labels)
                 for i in range(g.dim) for j in range(i + 1, g.dim)
                 if not la.is_zero(g.c[i, j])}
        jw = _jacobi_witnesses(g)
        return _finish({"verb": "check", "dim": g.dim, "brackets": table}, {"jacobi": not jw},
                       {"jacobi": jw} if jw else {})
    b = io.bundle_from_json(_file_object(spec, "odd")) if _is_path(spec) else None
    if b is None:
        inst = _instance(spec, args)
        b = inst.odd or inst.even
    if isinstance(b, EvenBundle):
        sym = st.check_symplectic(b.h, b.omega)
        checks = {"jacobi": not jacobi_defect(b.h), "almost_symplectic": sym.flags["almost_symplectic"],
                  "derivation": is_derivation(b.h, b.D)}
        rep = {"verb": "check", "kind": "even", "symplectic": sym.flags["symplectic"]}
        if b.J is not None:
            try:
                co.check_almost_kahler(b.h, b.J, b.metric)
                checks["almost_kahler"] = True
            except CosymError as exc:
                checks["almost_kahler"] = False
                rep["almost_kahler_error"] = str(exc)
        return _finish(rep, checks, {"jacobi": _jacobi_witnesses(b.h)} if not checks["jacobi"] else {})
    g = b.g
    top = fm.wedge(b.pair.eta, fm.power(b.pair.omega, g.dim // 2))
    checks = {"jacobi": not jacobi_defect(g), "volume": fm.is_top_nonzero(g, top)}
    if b.acm is not None:
        st.check_acm(g, b.acm.phi, b.acm.xi, b.acm.eta, b.acm.metric)
        checks["almost_contact_metric"] = True
    st.check_almost_cosymplectic(g, b.pair.eta, b.pair.omega)
    return _finish({"verb": "check", "kind": "odd", "dim": g.dim}, checks,
                   {"jacobi": _jacobi_witnesses(g)} if not checks["jacobi"] else {})


def cmd_reeb(args):
    o = load_object(_need(args, "bundle", "--bundle"), args, "odd")
    xi = st.reeb_vector(o.pair)
    contracted = fm.interior(xi, o.pair.omega)
    eta_xi = fm.evaluate(o.pair.eta, [xi])
    return _finish({"verb": "reeb", "xi": vec_str(xi, o.g.labels), "xi_coords": list(xi)},
                   {"eta(xi)=1": eta_xi == 1, "i_xi omega=0": contracted.is_zero()})


def cmd_alpha(args):
    o = load_object(_need(args, "bundle", "--bundle"), args, "odd")
    res = st.detect_alpha(o.g, o.pair)
    rep = {"verb": "alpha", "result": res.kind, "d_eta": fm.cartan_d(o.g, o.pair.eta),
           "d_omega": fm.cartan_d(o.g, o.pair.omega), "eta_wedge_omega": fm.wedge(o.pair.eta, o.pair.omega)}
    if res.kind == "alpha":
        rep["alpha"] = res.alpha
    wit = {} if res.kind == "alpha" else {"alpha_cosymplectic": {"kind": res.kind, "residual": res.witness}}
    return _finish(rep, {"alpha_cosymplectic": res.kind == "alpha"}, wit)


def cmd_der(args):
    g = load_object(_need(args, "algebra", "--algebra"), args, "algebra")
    space = derivation_space(g)
    inner = la.rank(np.stack([ad(g, g.basis(i)).reshape(-1) for i in range(g.dim)])) if g.dim else 0
    rep = {"verb": "der", "dim": space.dim, "inner_dim": inner,
           "basis": [io.matrix_to_json(b) for b in space.basis]}
    checks = {}
    if args.matrix:
        checks["is_derivation"] = is_derivation(g, _matrix(args.matrix, g.dim))
    return _finish(rep, checks)


def cmd_ist(args):
    e = load_object(_need(args, "algebra", "--algebra") if args.bundle is None else args.bundle, args, "even")
    alpha = la.frac(args.alpha or "0")
    commute = e.J if args.commute else None
    if args.commute and commute is None:
        raise UsageError("--commute needs a bundle with J")
    space = st.ist_derivation_space(e.h, e.omega, alpha, commute)
    rep = {"verb": "ist", "alpha": alpha}
    checks = {"nonempty": space is not None}
    if space is not None:
        rep.update(dim=space.dim, particular=io.matrix_to_json(space.particular),
                   basis=[io.matrix_to_json(b) for b in space.basis])
    if args.matrix:
        theta = _matrix(args.matrix, e.h.dim) + alpha * la.reye(e.h.dim)
        f = st.f_form(e.omega, theta)
        rep["f_form"] = io.matrix_to_json(f)
        checks["is_ist"] = st.is_ist(e.omega, theta)
    return _finish(rep, checks)


def cmd_extend(args):
    e = load_object(_need(args, "bundle", "--bundle"), args, "even")
    o = co.extend_acm(e.h, e.J, e.metric, e.D) if e.J is not None else co.extend(e)
    return _finish({"verb": "extend", "bundle": io.bundle_to_json(o)}, {"jacobi": not jacobi_defect(o.g)})


def cmd_reduce(args):
    o = load_object(_need(args, "bundle", "--bundle"), args, "odd")
    e = co.reduce_acm(o) if o.acm is not None else co.reduce(o)[0]
    return _finish({"verb": "reduce", "bundle": io.bundle_to_json(e)},
                   {"symplectic": st.check_symplectic(e.h, e.omega).flags["symplectic"]})


def cmd_classify(args):
    o = load_object(_need(args, "bundle", "--bundle"), args, "odd")
    if args.polarize or o.acm is None:
        if not args.polarize:
            raise UsageError("bundle has no metric structure; pass --polarize to build one")
        tol = args.tol if args.tol is not None else st.POLAR_TOL
        s = st.polarize(o.g, o.pair, np.eye(o.g.dim), tol)
        resid = float(np.abs(st.fundamental_matrix(s) - fm.form_matrix(o.pair.omega).astype(float)).max())
        rep = {"verb": "classify", "polarized": {"phi": io.matrix_to_json(s.phi),
                                                 "metric": io.matrix_to_json(s.metric),
                                                 "fundamental_form_residual": resid, "tolerance": tol}}
        return _finish(rep, {"polarization": resid <= tol})
    s = o.acm
    r = st.classify(o.g, s)
    rep = {"verb": "classify", "flags": r.flags, "alpha": r.alpha,
           "fundamental_form": st.fundamental_form(s),
           "nijenhuis_zero": la.is_zero(st.nijenhuis(o.g, s.phi)),
           "normality_defect_zero": la.is_zero(st.normality_defect(o.g, s)),
           "lie_xi_phi": io.matrix_to_json(st.lie_derivative_phi(o.g, s.xi, s.phi)),
           "lie_xi_metric": io.matrix_to_json(st.lie_derivative_metric(o.g, s.xi, s.metric))}
    if "equivalent_conditions" in r.details:
        rep["equivalent_conditions"] = r.details["equivalent_conditions"]
    return _finish(rep, {"almost_contact_metric": True}, r.witnesses)


def _two_bundles(args, want):
    a = load_object(_need(args, "bundle", "--bundle"), args, want)
    b = load_object(_need(args, "to", "--to"), args, want)
    n = a.h.dim if want == "even" else a.g.dim
    psi = _matrix(_need(args, "psi", "--psi"), n)
    return a, b, psi


def cmd_iso(args):
    first = load_object(_need(args, "bundle", "--bundle"), args, "odd" if args.odd else "even")
    want = "odd" if isinstance(first, OddBundle) else "even"
    a, b, psi = _two_bundles(args, want)
    fn = co.verify_iso_odd if want == "odd" else co.verify_iso_even
    rep = fn(psi, a, b)
    return _finish({"verb": "iso", "kind": want}, rep.conditions, rep.witnesses)


def cmd_lift(args):
    a, b, psi = _two_bundles(args, "even")
    big = co.lift_iso(psi, a, b)
    rep = co.verify_iso_odd(big, co.extend(a), co.extend(b))
    return _finish({"verb": "lift", "Psi": io.matrix_to_json(big)}, rep.conditions, rep.witnesses)


def cmd_catalog(args):
    if not args.name:
        rows = [{"name": n, "params": [p.name for p in cat.REGISTRY[n].params],
                 "provenance": cat.REGISTRY[n].provenance} for n in cat.names()]
        tables = [f"t{r.table}:{r.name}" for r in cat.table_rows()]
        return _finish({"verb": "catalog", "entries": rows, "table_rows": tables}, {})
    inst = _instance(args.name, args)
    rep = {"verb": "catalog", "name": inst.name, "params": inst.params, "provenance": inst.provenance}
    if inst.even is not None:
        rep["even"] = io.bundle_to_json(inst.even)
    if inst.odd is not None:
        rep["odd"] = io.bundle_to_json(inst.odd)
    return _finish(rep, {})


def _entry_report(r):
    return {"name": r.name, "params": r.params, "checks": r.checks, "witnesses": r.witnesses}


def cmd_verify(args):
    if args.table is not None:
        rows = cat.table_rows(args.table) if args.row is None else [cat.TABLE_ROWS.get((args.table, args.row))]
        if rows == [None]:
            raise UnknownEntry(f"no row {args.row!r} in table {args.table}")
        results, checks, wit = {}, {}, {}
        for row in rows:
            key = f"t{row.table}:{row.name}"
            try:
                results[key] = cat.verify_table_row(row.table, row.name, _params(args.params) or None, args.data)
                checks[key] = True
            except MissingExternalData as exc:
                if args.row is not None:
                    raise
                results[key] = {"status": "skipped", "reason": str(exc)}
            except CosymError as exc:
                checks[key] = False
                wit[key] = {"error": str(exc), "detail": exc.witness}
        return _finish({"verb": "verify", "rows": results}, checks, wit)
    if args.all:
        out = cat.verify_all(seed=args.seed)
        checks = {f"{n}#{k}": r.ok for n, reps in out.items() for k, r in enumerate(reps)}
        wit = {f"{n}#{k}": _entry_report(r) for n, reps in out.items() for k, r in enumerate(reps) if not r.ok}
        return _finish({"verb": "verify", "entries": sorted(out)}, checks, wit)
    name = _need(args, "name", "an entry name, --all or --table")
    r = cat.verify_entry(name, _params(args.params), seed=args.seed)
    return _finish({"verb": "verify", "name": name, "params": r.params, "details": r.details},
                   r.checks, r.witnesses)


COMMANDS = {"check": cmd_check, "reeb": cmd_reeb, "alpha": cmd_alpha, "der": cmd_der, "ist": cmd_ist,
            "extend": cmd_extend, "reduce": cmd_reduce, "classify": cmd_classify, "iso": cmd_iso,
            "lift": cmd_lift, "catalog": cmd_catalog, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="catalog name or JSON file")
    common.add_argument("--bundle", help="catalog name or bundle JSON file")
    common.add_argument("--params", action="append", help="k=v[,k=v...] catalog parameters")
    common.add_argument("--alpha", help="rational alpha, e.g. -3/2")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--data", help="external classification data file")
    common.add_argument("--out", help="write output here instead of stdout")

    p = _Parser(prog="cosym", description="Cosymplectic and coKahler structures on Lie algebras.")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    for verb in COMMANDS:
        s = sub.add_parser(verb, parents=[common])
        if verb in ("der", "ist"):
            s.add_argument("--matrix", help="endomorphism (JSON rows or file) to test")
        if verb == "ist":
            s.add_argument("--commute", action="store_true", help="also require DJ = JD")
        if verb == "classify":
            s.add_argument("--polarize", action="store_true", help="build a metric structure by polarization")
            s.add_argument("--tol", type=float, help="polarization tolerance")
        if verb in ("iso", "lift"):
            s.add_argument("--to", help="target bundle")
            s.add_argument("--psi", help="isomorphism matrix (JSON rows or file)")
        if verb == "iso":
            s.add_argument("--odd", action="store_true", help="compare odd-dimensional bundles")
        if verb in ("catalog", "verify"):
            s.add_argument("name", nargs="?")
        if verb == "verify":
            s.add_argument("--all", action="store_true")
            s.add_argument("--table", type=int, choices=(1, 2))
            s.add_argument("--row")
            s.add_argument("--seed", type=int, default=0)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    as_json = False
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise UsageError("a verb is required: " + ", ".join(COMMANDS))
        as_json = args.json
        if args.data:
            os.environ[cat.DATA_ENV] = args.data
        report = COMMANDS[args.verb](args)
        code = 0 if report["ok"] else 1
    except (UsageError, *INPUT_ERRORS) as exc:
        print(f"cosym: error: {exc}", file=stderr)
        return 2
    except CosymError as exc:
        report = {"ok": False, "error": type(exc).__name__, "message": str(exc),
                  "witnesses": {"error": exc.witness} if exc.witness is not None else {}}
        code = 1
    text = emit_report(report, as_json)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
