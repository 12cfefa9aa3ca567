"""CLI surface: schema-valid output, determinism, thread independence,
machine-parsable errors, and the verify command's exit contract."""

import copy
import csv
import hashlib
import io
import json
from importlib import resources

import jsonschema
import pytest

from horocount.cli import build_config, main, run


@pytest.fixture(scope="session")
def schema():
    text = (
        resources.files("horocount") / "schemas" / "run-v1.schema.json"
    ).read_text()
    return json.loads(text)


def run_json(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--output", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def hash_without_timestamp(doc: dict) -> str:
    doc = copy.deepcopy(doc)
    doc.pop("generated_at", None)
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


# ----------------------------------------------------------------------
# Happy paths + schema
# ----------------------------------------------------------------------

def test_count_both_methods_agree(tmp_path, schema):
    code, doc = run_json(
        tmp_path, ["count", "--field", "d=1", "--cutoffs", "100,200", "--method", "both"]
    )
    assert code == 0
    jsonschema.validate(doc, schema)
    by_x = {}
    for row in doc["rows"]:
        by_x.setdefault(row["x_or_t"], set()).add(row["value"])
    assert by_x == {100.0: {2600}, 200.0: {10608}}  # brute == mobius per cutoff


def test_zeta_rational(tmp_path, schema):
    code, doc = run_json(tmp_path, ["zeta", "--field", "rational"])
    assert code == 0
    jsonschema.validate(doc, schema)
    assert abs(doc["rows"][0]["value"] - 1.6449340668) <= 1e-9
    assert doc["rows"][0]["tolerance"] == 1e-10


@pytest.mark.parametrize(
    "argv",
    [
        ["classnum", "--field", "d=23"],
        ["depths", "--field", "d=1", "--cutoffs", "2.0,4.0"],
        ["horoballs", "--field", "d=1", "--cutoffs", "10"],
        ["poincare", "--field", "d=1", "--cutoffs", "50,100,200", "--s", "2.5"],
        ["verify", "--field", "d=1", "--cutoffs", "120"],
    ],
)
def test_commands_emit_schema_valid_json(tmp_path, schema, argv):
    code, doc = run_json(tmp_path, argv)
    assert code == 0
    jsonschema.validate(doc, schema)


def test_classnum_value(tmp_path):
    _, doc = run_json(tmp_path, ["classnum", "--field", "d=23"])
    assert doc["rows"][0]["value"] == 3 and doc["field"]["h"] == 3


def test_poincare_verdicts_present(tmp_path):
    _, doc = run_json(
        tmp_path, ["poincare", "--field", "d=1", "--cutoffs", "100,200,400", "--s", "1.5"]
    )
    assert doc["verdicts"]["relative"]["verdict"] == "diverges"
    assert doc["verdicts"]["parabolic"]["verdict"] == "converges"
    assert "protocol" in doc["verdicts"]["relative"]


def test_horoballs_packing_summary(tmp_path):
    _, doc = run_json(tmp_path, ["horoballs", "--field", "rational", "--cutoffs", "12"])
    assert doc["packing"]["overlaps"] == 0
    assert doc["packing"]["unimodular_mismatches"] == 0
    assert len(doc["rows"]) == sum(1 for r in doc["rows"])
    assert all(r["diameter"].startswith("1") or "/" in r["diameter"] for r in doc["rows"])


# ----------------------------------------------------------------------
# Determinism
# ----------------------------------------------------------------------

def test_rerun_byte_reproducible_modulo_timestamp(tmp_path):
    argv = ["count", "--field", "d=3", "--cutoffs", "50,150", "--method", "both"]
    _, doc1 = run_json(tmp_path, argv, "a.json")
    _, doc2 = run_json(tmp_path, argv, "b.json")
    assert hash_without_timestamp(doc1) == hash_without_timestamp(doc2)


def test_thread_count_does_not_change_rows(tmp_path):
    base = ["count", "--field", "d=1", "--cutoffs", "300", "--method", "brute"]
    _, doc1 = run_json(tmp_path, base + ["--threads", "1"], "t1.json")
    _, doc3 = run_json(tmp_path, base + ["--threads", "3"], "t3.json")
    assert doc1["rows"] == doc3["rows"]


def test_csv_headers_fixed(tmp_path):
    out = tmp_path / "out.csv"
    assert (
        main(
            ["count", "--field", "rational", "--cutoffs", "10,20",
             "--format", "csv", "--output", str(out)]
        )
        == 0
    )
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["x_or_t", "value", "predicted", "ratio"]
    assert rows[1][1] == "32"  # phi_Q(10)

    out2 = tmp_path / "balls.csv"
    main(["horoballs", "--field", "rational", "--cutoffs", "5", "--format", "csv",
          "--output", str(out2)])
    rows2 = list(csv.reader(io.StringIO(out2.read_text())))
    assert rows2[0] == ["p", "q", "center_x", "center_y", "diameter", "depth"]


def test_csv_rerun_identical_bytes(tmp_path):
    argv = ["depths", "--field", "d=1", "--cutoffs", "1.0,2.0,3.0",
            "--format", "csv"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(argv + ["--output", str(a)])
    main(argv + ["--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


# ----------------------------------------------------------------------
# Errors
# ----------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--field", "d=12", "--cutoffs", "10"],
        ["count", "--field", "d=-5", "--cutoffs", "10"],
        ["count", "--field", "bogus", "--cutoffs", "10"],
        ["poincare", "--field", "d=1", "--cutoffs", "10,20,40"],  # missing --s
        ["count", "--field", "d=1", "--cutoffs", "20,10"],  # not increasing
        ["count", "--field", "d=5", "--cutoffs", "10", "--method", "mobius"],  # h=2
        ["count", "--field", "d=1", "--cutoffs", "10", "--s", "2.0"],  # stray s
        ["zeta", "--field", "d=1", "--tolerance", "-1"],
    ],
)
def test_error_paths_exit_nonzero(tmp_path, capsys, argv):
    code = main(argv + ["--output", str(tmp_path / "x.json")])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("horocount-error code=")
    assert err.count("\n") == 1  # one-line machine-parsable error


def test_unwritable_output(capsys):
    code = main(["classnum", "--field", "d=1", "--output", "/nonexistent-dir/x.json"])
    assert code == 2
    assert "unwritable-output" in capsys.readouterr().err


def test_verify_passes_on_good_field(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code = main(["verify", "--field", "d=3", "--cutoffs", "150", "--output", str(out)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "PASS" in captured and "FAIL" not in captured
    doc = json.loads(out.read_text())
    assert doc["failures"] == 0
    assert all(row["passed"] for row in doc["rows"])


def test_build_config_env_threads(monkeypatch):
    monkeypatch.setenv("HOROCOUNT_THREADS", "4")
    cfg = build_config(["count", "--field", "d=1", "--cutoffs", "10"])
    assert cfg.threads == 4


def test_big_integers_emitted_as_strings(tmp_path):
    # direct check of the encoder contract on a synthetic row
    from horocount.cli import _stringify_big_ints

    assert _stringify_big_ints({"v": 2**60}) == {"v": str(2**60)}
    assert _stringify_big_ints({"v": 2**50}) == {"v": 2**50}
    assert _stringify_big_ints([True, 2**60]) == [True, str(2**60)]
