import json
from fractions import Fraction

import pytest

from cosym import catalog as cat
from cosym import forms as fm
from cosym import linalg as la
from cosym import structures as st
from cosym.errors import CosymError, InadmissibleParams, MismatchReport, MissingExternalData, UnknownEntry

E4 = ("e1", "e2", "e3", "e4")


def test_parse_family_columns_and_params():
    fam = cat.parse_family("De1=p e3+2/3 q e4; De2=-q e3", E4, "p q r")
    assert fam.names == ("p", "q")  # r never appears
    m = fam.at({"p": 1, "q": 3})
    assert m[2, 0] == 1 and m[3, 0] == 2 and m[2, 1] == -3


def test_parse_family_constants():
    fam = cat.parse_family("De3=-2 alpha e3", E4, "", {"alpha": Fraction(3, 2)})
    assert fam.space.particular[2, 2] == -3
    with pytest.raises(CosymError):
        cat.parse_family("De5=e1", E4, "")
    with pytest.raises(CosymError):
        cat.parse_family("De1=e9", E4, "")


def test_parse_complex_completes():
    j = cat.parse_complex("Je1=e2; Je3=e4", E4)
    assert la.equal(j @ j, -la.reye(4))
    assert j[1, 0] == 1 and j[0, 1] == -1
    with pytest.raises(CosymError):
        cat.parse_complex("Je1=2 e2; Je2=e1", E4)


def test_parse_form():
    w = cat.parse_form("e14+eps e23", E4, {"eps": -1})
    assert w.coeffs == {(0, 3): 1, (1, 2): -1}
    x = cat.parse_form("X16-X25+X34", ("X1", "X2", "X3", "X4", "X5", "X6"))
    assert x == cat.filiform6_omega()


def test_scalar_expr():
    assert cat.scalar_expr("1-lam", {"lam": Fraction(1, 3)}) == Fraction(2, 3)
    assert cat.scalar_expr("-1/2") == Fraction(-1, 2)


def test_params():
    p = cat.Param("beta", -1, "interval", lo=-1, hi=0, hi_open=True)
    assert p.admissible(Fraction(-1)) and not p.admissible(Fraction(0))
    assert cat.Param("n", 1, "int", lo=1).coerce("2") == 2
    assert cat.Param("r", "disjoint", "choice", choices=("disjoint", "shared")).coerce("disjoint") == "disjoint"
    with pytest.raises(InadmissibleParams):
        cat.catalog_get("kenmotsu5", {"alpha": 0})
    with pytest.raises(InadmissibleParams):
        cat.catalog_get("h4_family", {"p": 0, "q": 0})
    with pytest.raises(InadmissibleParams):
        cat.catalog_get("h4", {"nonsense": 1})
    with pytest.raises(UnknownEntry):
        cat.catalog_get("nothing")


def test_registry_entries_build():
    for name in cat.names():
        inst = cat.catalog_get(name)
        assert inst.bundle is not None and inst.provenance


def test_verify_all_passes():
    out = cat.verify_all(seed=3, samples=2)
    bad = {n: [r.checks for r in reps if not r.ok] for n, reps in out.items() if not all(r.ok for r in reps)}
    assert not bad


def test_heisenberg_derivation_count():
    for n in (1, 2):
        inst = cat.catalog_get("heisenberg", {"n": n})
        r = cat.verify_entry("heisenberg", {"n": n})
        assert r.checks["der_dim"], r.details


def test_filiform7_is_cosymplectic():
    for params in ({"p": 1, "q": 2, "r": 3, "s": 4}, {}):
        r = cat.verify_entry("filiform7", params)
        assert r.ok, r.checks


@pytest.mark.parametrize("row", [r for r in cat.table_rows(2)], ids=lambda r: r.name)
def test_table2_kahler_data(row):
    omega, j, metric = cat.row_kahler(row)
    assert la.equal(metric, la.reye(4))  # the default a-parameters give the standard metric
    assert la.equal(j.T @ metric @ j, metric)
    assert la.equal(fm.form_matrix(omega), metric @ j)


def test_table_rows_without_data_skip():
    with pytest.raises(MissingExternalData):
        cat.verify_table_row(1, "rh3", data="/nonexistent/lie4d.json")


def test_builtin_rows():
    for name in ("h4[eps=1]", "h4[eps=-1]", "r2p"):
        rep = cat.verify_table_row(1, name)
        assert rep["match"] and rep["printed_dim"] == rep["computed_dim"] == 2
    with pytest.raises(UnknownEntry):
        cat.verify_table_row(1, "nope")


def _h4_json(provenance="brackets copied from the h4 example"):
    return {"dim": 4, "base": 1, "provenance": provenance,
            "brackets": [{"i": 1, "j": 2, "out": [[3, "1"]]}, {"i": 4, "j": 3, "out": [[3, "1"]]},
                         {"i": 4, "j": 1, "out": [[1, "1/2"]]}, {"i": 4, "j": 2, "out": [[1, "1"], [2, "1/2"]]}]}


def test_loader_reads_external_file(tmp_path):
    path = tmp_path / "rows.json"
    path.write_text(json.dumps({"rows": {"h4": _h4_json()}}))
    rows = cat.load_external(path)
    from cosym.io import algebra_from_json
    assert algebra_from_json(rows["h4"]) == cat.h4_algebra()


def test_loader_requires_provenance(tmp_path):
    path = tmp_path / "rows.json"
    path.write_text(json.dumps({"rows": {"h4": _h4_json("")}}))
    with pytest.raises(MissingExternalData):
        cat.load_external(path)


def test_mistranscribed_row_is_reported(tmp_path):
    # h4 brackets filed under rr3_0 must not match that row's printed family
    path = tmp_path / "rows.json"
    path.write_text(json.dumps({"rows": {"rr3_0": _h4_json()}}))
    with pytest.raises(MismatchReport):
        cat.verify_table_row(1, "rr3_0", data=path)


def test_strictly_almost_kahler_names_are_rows():
    algebras = {r.algebra for r in cat.table_rows(1)}
    assert set(cat.STRICTLY_ALMOST_KAHLER) <= algebras
