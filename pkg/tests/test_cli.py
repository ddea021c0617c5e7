import importlib
import inspect
import io as sysio
import json

import pytest

from cosym import cli


def run(*argv):
    out, err = sysio.StringIO(), sysio.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def jrun(*argv):
    code, out, err = run(*argv, "--json")
    return code, (json.loads(out) if out else None), err


PUBLIC = {
    "lie": ["new_lie_algebra", "bracket", "jacobi_defect", "ad", "is_derivation", "derivation_space",
            "restrict_to_subspace"],
    "forms": ["wedge", "cartan_d", "interior", "evaluate", "pullback", "is_top_nonzero"],
    "structures": ["check_almost_cosymplectic", "reeb_vector", "detect_alpha", "check_symplectic", "f_form",
                   "is_ist", "ist_derivation_space", "check_acm", "fundamental_form", "nijenhuis",
                   "normality_defect", "lie_derivative_phi", "lie_derivative_metric", "classify", "polarize"],
    "correspondence": ["extend", "reduce", "extend_acm", "reduce_acm", "verify_iso_even", "lift_iso",
                       "verify_iso_odd"],
    "catalog": ["catalog_get", "verify_entry", "verify_table_row"],
}


def test_every_operation_has_exactly_one_verb():
    listed = [op for ops in cli.VERB_OPERATIONS.values() for op in ops]
    assert len(listed) == len(set(listed))
    expected = {f"{m}.{f}" for m, fs in PUBLIC.items() for f in fs}
    assert set(listed) == expected
    assert set(cli.VERB_OPERATIONS) == set(cli.COMMANDS)
    for op in listed:
        mod, name = op.split(".")
        assert callable(getattr(importlib.import_module(f"cosym.{mod}"), name))


def test_verbs_use_their_operations():
    # every listed operation is reached from the cli module, directly or via its loaders
    src = inspect.getsource(cli)
    for verb, ops in cli.VERB_OPERATIONS.items():
        for op in ops:
            assert op.split(".")[1] in src, (verb, op)


def test_ist_filiform_family_dimension():
    code, rep, _ = jrun("ist", "--algebra", "filiform6", "--alpha", "0")
    assert code == 0 and rep["dim"] == 4


def test_alpha_recovered_from_file(tmp_path):
    path = tmp_path / "r2prime_family.json"
    code, _, _ = run("catalog", "r2prime_family", "--params", "alpha=1", "--json", "--out", str(path))
    assert code == 0
    code, rep, _ = jrun("alpha", "--bundle", str(path))
    assert code == 0 and rep["alpha"] == "1"
    code, rep, _ = jrun("alpha", "--bundle", "r2prime_family", "--params", "alpha=-3/2,p=1")
    assert rep["alpha"] == "-3/2"


def test_check_bad_algebra_exit_one(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 3, "brackets": [{"i": 1, "j": 2, "out": [[3, "1"]]},
                                                       {"i": 1, "j": 3, "out": [[1, "1"]]}]}))
    code, out, _ = run("check", "--algebra", str(path))
    assert code == 1
    assert out.startswith("CHECK FAILED: jacobi")
    assert '"triple": ["e1", "e2", "e3"]' in out


def test_usage_errors_exit_two(tmp_path):
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("der", "--algebra", "no_such_entry")[0] == 2
    assert run("der", "--algebra", str(tmp_path / "missing.json"))[0] == 2
    assert run("der")[0] == 2
    code, _, err = run("catalog", "h4", "--params", "eps=3")
    assert code == 2 and "error" in err
    code, _, err = run("verify", "--table", "1", "--row", "rh3", "--data", str(tmp_path / "none.json"))
    assert code == 2


def test_pass_report_text():
    code, out, _ = run("reeb", "--bundle", "h4_family")
    assert code == 0 and out.startswith("ALL CHECKS PASSED")
    assert "xi: 1*e0" in out


def test_json_is_deterministic():
    a = run("classify", "--bundle", "kenmotsu5", "--params", "alpha=-2", "--json")[1]
    b = run("classify", "--bundle", "kenmotsu5", "--params", "alpha=-2", "--json")[1]
    assert a == b
    rep = json.loads(a)
    assert list(rep) == sorted(rep)
    assert rep["flags"]["alpha_Kenmotsu"] and rep["alpha"] == "-2"


def test_extend_reduce_via_files(tmp_path):
    odd = tmp_path / "odd.json"
    code, out, _ = run("extend", "--bundle", "r2prime", "--params", "alpha=1", "--json")
    assert code == 0
    odd.write_text(json.dumps(json.loads(out)["bundle"]))
    code, rep, _ = jrun("reduce", "--bundle", str(odd))
    assert code == 0 and rep["bundle"]["kind"] == "even"
    code, rep, _ = jrun("alpha", "--bundle", str(odd))
    assert rep["alpha"] == "1"


def test_der_with_matrix():
    code, rep, _ = jrun("der", "--algebra", "h4", "--matrix", "[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]")
    assert code == 0 and rep["checks"]["is_derivation"]
    code, rep, _ = jrun("der", "--algebra", "h4", "--matrix", "[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]")
    assert code == 1 and not rep["checks"]["is_derivation"]


def test_ist_with_matrix_and_commute():
    code, rep, _ = jrun("ist", "--bundle", "abelian4_kenmotsu", "--alpha", "1", "--commute")
    assert code == 0 and rep["dim"] == 4
    code, rep, _ = jrun("ist", "--bundle", "r2prime", "--alpha", "1", "--commute")
    assert code == 1 and not rep["checks"]["nonempty"]


def test_iso_and_lift(tmp_path):
    psi = "[[2,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"
    code, out, _ = run("catalog", "h4", "--json")
    even = json.loads(out)["even"]
    # build the image bundle with the library and feed both files to the CLI
    from cosym import correspondence as co, io, linalg as la
    e1 = io.bundle_from_json(even)
    e2 = co.transport_even(io.matrix_from_json(json.loads(psi), 4), e1)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(even))
    b.write_text(io.dumps(io.bundle_to_json(e2)))
    code, rep, _ = jrun("iso", "--bundle", str(a), "--to", str(b), "--psi", psi)
    assert code == 0 and rep["checks"]["intertwines_J"]
    code, rep, _ = jrun("lift", "--bundle", str(a), "--to", str(b), "--psi", psi)
    assert code == 0 and rep["Psi"][0] == ["1", "0", "0", "0", "0"]
    code, rep, _ = jrun("iso", "--bundle", str(a), "--to", str(b), "--psi", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]")
    assert code == 1


def test_classify_polarize():
    code, rep, _ = jrun("classify", "--bundle", "heisenberg", "--polarize", "--tol", "1e-9")
    assert code == 0 and rep["polarized"]["fundamental_form_residual"] < 1e-9
    assert isinstance(rep["polarized"]["phi"][1][2], float)


def test_classify_without_metric_needs_polarize(tmp_path):
    code, _, err = run("classify", "--bundle", "heisenberg")
    assert code == 2


def test_verify_verbs():
    code, rep, _ = jrun("verify", "h4_family", "--params", "p=1,q=2")
    assert code == 0 and rep["ok"]
    code, rep, _ = jrun("verify", "--table", "1")
    assert code == 0
    assert rep["rows"]["t1:h4[eps=1]"]["match"]
    skipped = [k for k, v in rep["rows"].items() if v.get("status") == "skipped"]
    assert skipped and all("not found" in rep["rows"][k]["reason"] for k in skipped)


def test_check_bundle_and_catalog_listing():
    code, rep, _ = jrun("check", "--bundle", "h4")
    assert code == 0 and rep["kind"] == "odd"
    code, rep, _ = jrun("catalog")
    assert code == 0 and any(e["name"] == "filiform6" for e in rep["entries"])


def test_math_error_exit_one(tmp_path):
    # eta not closed: reduce is a mathematical failure, not an input error
    path = tmp_path / "contact.json"
    path.write_text(json.dumps({
        "kind": "odd",
        "algebra": {"dim": 3, "base": 0, "brackets": [{"i": 0, "j": 1, "out": [[2, "1"]]}]},
        "eta": {"degree": 1, "base": 0, "terms": [{"idx": [2], "c": "1"}]},
        "omega": {"degree": 2, "base": 0, "terms": [{"idx": [0, 1], "c": "1"}]},
    }))
    code, rep, _ = jrun("reduce", "--bundle", str(path))
    assert code == 1 and rep["error"] == "EtaNotClosed"
    code, rep, _ = jrun("alpha", "--bundle", str(path))
    assert code == 1 and rep["result"] == "not_closed"
