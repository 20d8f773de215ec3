import itertools
import json
import subprocess
import sys

import numpy as np
import pytest

from gerbelab import _kernels_py, canonical, cli, kernels
from gerbelab.cech import U1Function
from gerbelab.errors import BadReference, ParseError, UnknownField
from gerbelab.exterior import PolyForm, x
from gerbelab.manifest import bundled, bundled_names, emit_report, parse_manifest, run, serialize


def _broken_manifest():
    z2 = PolyForm.zero(3, 2).to_json()
    nerve = [list(s) for k in range(1, 5) for s in itertools.combinations("abcd", k)]
    return {"version": "1", "objects": {
        "C": {"type": "cover", "dim": 3, "labels": list("abcd"), "nerve": nerve},
        "L": {"type": "gerbe", "cover": "C",
              "g": [{"simplex": ["a", "b", "c"], "value": U1Function(x(3, 1)).to_json()}],
              "A": [], "B": [{"simplex": [lab], "value": z2} for lab in "abcd"]}},
        "tasks": [{"command": "validate", "refs": {"gerbe": "L"}, "params": {}}]}


@pytest.fixture
def bundle_path(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(bundled("r3-prequantum"))
    return p


def test_bundled_roundtrip():
    assert "r3-prequantum" in bundled_names()
    m = parse_manifest(bundled("r3-prequantum"))
    again = parse_manifest(serialize(m))
    assert serialize(again) == serialize(m)


def test_parse_errors():
    with pytest.raises(ParseError) as e:
        parse_manifest("{not json")
    assert "$" in str(e.value)
    with pytest.raises(UnknownField):
        parse_manifest(json.dumps({"version": "1", "objects": {}, "tasks": [], "extra": 1}))
    with pytest.raises(UnknownField):
        parse_manifest(json.dumps({"version": "1", "objects": {"c": {"type": "blob"}}, "tasks": []}))
    with pytest.raises(BadReference) as e:
        parse_manifest(json.dumps({"version": "1", "objects": {},
                                   "tasks": [{"command": "validate", "refs": {"gerbe": "nope"}}]}))
    assert "tasks" in str(e.value)
    m = json.loads(bundled("r3-prequantum"))
    m["tasks"][0]["refs"]["gerbe"] = "rho"
    with pytest.raises(BadReference):
        parse_manifest(json.dumps(m))


def test_empty_manifest_passes():
    rep = run(parse_manifest(json.dumps({"version": "1", "objects": {}, "tasks": []})))
    assert rep.exit_code == 0


def test_broken_cocycle_report():
    rep = run(parse_manifest(json.dumps(_broken_manifest())))
    assert rep.exit_code == 1
    text = emit_report(rep, "text")
    assert "simplex ('a', 'b', 'c', 'd')" in text and "NotACocycle" in text
    doc = json.loads(emit_report(rep, "json"))
    assert doc["status"] == "fail"
    assert doc["tasks"][0]["residuals"][0]["simplex"] == ["a", "b", "c", "d"]


def test_cli_exit_codes(tmp_path, bundle_path, capsys):
    assert cli.main(["run", str(bundle_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "pass"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(_broken_manifest()))
    assert cli.main(["validate", str(bad)]) == 1
    capsys.readouterr()
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err
    junk = tmp_path / "junk.json"
    junk.write_text("[1, 2")
    assert cli.main(["run", str(junk)]) == 2


def test_cli_ref_task(bundle_path, capsys):
    assert cli.main(["hol-surface", str(bundle_path), "--ref", "curving=rho", "--ref", "surface=sphere",
                     "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "hol-surface: PASS" in out
    assert cli.main(["hol-surface", str(bundle_path), "--ref", "curving"]) == 2


def test_cli_deterministic_output(bundle_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["run", str(bundle_path), "-o", str(a)])
    cli.main(["run", str(bundle_path), "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_suite_subset(capsys):
    assert cli.main(["suite", "--criteria", "4", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "criterion  4 PASS" in out
    assert cli.main(["suite", "--criteria", "x"]) == 2


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "gerbelab.cli", "suite", "--list"],
                         capture_output=True, text=True, check=True)
    assert "r3-prequantum" in out.stdout


def test_canonical_floats():
    txt = canonical.dumps({"b": 1.0, "a": [0.1, 2 + 3j, float("nan")], "c": np.float64(2.0 ** -70)})
    assert txt == ('{\n  "a": [\n    0.10000000000000001,\n    [\n      2.0,\n      3.0\n    ],\n'
                   '    "NaN"\n  ],\n  "b": 1.0,\n  "c": 8.4703294725430034e-22\n}\n')


def test_kernel_backends_agree():
    r = np.random.default_rng(3)
    X = r.normal(size=(50, 3))
    E = r.integers(0, 5, size=(12, 3))
    assert np.allclose(kernels.monomials(X, E), _kernels_py.monomials(X, E), rtol=1e-12, atol=0)
    M = r.normal(size=(40, 3, 3)) * 0.3 + 1j * r.normal(size=(40, 3, 3)) * 0.1
    assert np.allclose(kernels.ordered_product(M), _kernels_py.ordered_product(M), rtol=1e-12, atol=1e-14)
    v = r.normal(size=(30, 6)) + 1j * r.normal(size=(30, 6))
    w = r.random(size=(30, 6))
    assert abs(kernels.tri_sums(v, w) - _kernels_py.tri_sums(v, w)) <= 1e-12
    assert kernels.BACKEND in ("cython", "python")
