import json
from fractions import Fraction

import pytest

from cosym import catalog as cat
from cosym import io
from cosym import linalg as la
from cosym.errors import DimensionMismatch


def test_algebra_roundtrip():
    g = cat.filiform7_algebra(1, Fraction(2, 3), 0, -1)
    back = io.algebra_from_json(json.loads(json.dumps(io.algebra_to_json(g))))
    assert back == g and back.labels == g.labels


def test_form_roundtrip():
    w = cat.filiform6_omega()
    assert io.form_from_json(io.form_to_json(w), 6) == w


@pytest.mark.parametrize("name", ["h4", "r2prime", "abelian4_kenmotsu", "h4_family", "kenmotsu5", "filiform6"])
def test_bundle_roundtrip(name):
    inst = cat.catalog_get(name)
    for b in (inst.even, inst.odd):
        if b is None:
            continue
        text = io.dumps(io.bundle_to_json(b))
        back = io.bundle_from_json(json.loads(text))
        assert io.dumps(io.bundle_to_json(back)) == text


def test_rejects_floats_and_bad_indices():
    with pytest.raises(io.FormatError):
        io.algebra_from_json({"dim": 2, "brackets": [{"i": 1, "j": 2, "out": [[2, 0.5]]}]})
    with pytest.raises(io.FormatError):
        io.algebra_from_json({"dim": 2, "brackets": [{"i": 1, "j": 3, "out": [[2, "1"]]}]})
    with pytest.raises(io.FormatError):
        io.algebra_from_json({"brackets": []})
    with pytest.raises(io.FormatError):
        io.bundle_from_json({"kind": "weird"})
    with pytest.raises(DimensionMismatch):
        io.matrix_from_json([["1"]], 2)


def test_constants_in_files():
    g = io.algebra_from_json({"dim": 2, "brackets": [{"i": 1, "j": 2, "out": [[2, "1-lam"]]}]},
                             consts={"lam": Fraction(1, 4)})
    assert g.c[0, 1, 1] == Fraction(3, 4)


def test_load_errors(tmp_path):
    with pytest.raises(io.FormatError):
        io.load(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(io.FormatError):
        io.load(p)


def test_dumps_is_sorted_and_exact():
    text = io.dumps({"b": Fraction(-3, 2), "a": [Fraction(1)]})
    assert text.index('"a"') < text.index('"b"')
    assert '"-3/2"' in text
    assert io.matrix_to_json(la.reye(2)) == [["1", "0"], ["0", "1"]]
