import json

import pytest

from pdeglab import cli
from pdeglab.boolfn import write_table_file
from pdeglab.projection import example_tree


def run(argv, capsys, monkeypatch, stamp="fixed"):
    monkeypatch.setenv("PDEGLAB_TIMESTAMP", stamp)
    code = cli.main(argv)
    return code, capsys.readouterr()


def report_of(argv, capsys, monkeypatch):
    code, out = run(argv, capsys, monkeypatch)
    assert code == 0, out.err
    return json.loads(out.out)


def test_measure(capsys, monkeypatch):
    rep = report_of(["measure", "--function", "ADDR:2", "--seed", "0"], capsys, monkeypatch)
    assert rep["schema"] == cli.report_schema_version()
    assert rep["result"]["degree"] == 3
    assert rep["result"]["decision_tree_depth"] == 3
    assert rep["result"]["sensitivity"] == 3


def test_orpoly_report(capsys, monkeypatch):
    rep = report_of(["orpoly", "--n", "3", "--trials", "200", "--seed", "1"], capsys, monkeypatch)
    res = rep["result"]
    assert res["p"] == 12 and res["degree_bound"] == 36
    assert len(res["errors"]["records"]) == 8
    assert res["zero_input_exact"] and rep["verification"]["passed"]


def test_orredn_modes(capsys, monkeypatch):
    rep = report_of(["orredn", "--function", "XOR:3", "--trials", "100", "--seed", "0"], capsys, monkeypatch)
    assert rep["result"]["ell"] == 36
    rep = report_of(["orredn", "--function", "XOR:2", "--mode", "pipeline", "--trials", "30", "--seed", "0"],
                    capsys, monkeypatch)
    assert rep["result"]["degree_bound"] == rep["result"]["outer_degree"] * rep["result"]["inner_degree"]


def test_ubd_report(capsys, monkeypatch):
    rep = report_of(["ubd", "--t", "1", "--r", "1", "--scan", "exhaustive", "--trials", "200", "--seed", "0"],
                    capsys, monkeypatch)
    res = rep["result"]
    assert res["n"] == 5 and len(res["witnesses"]) == 5
    assert res["degree_bound"] == res["q_degree"] + 2


def test_ubd_needs_r_or_c(capsys, monkeypatch):
    code, out = run(["ubd", "--t", "1", "--seed", "0"], capsys, monkeypatch)
    assert code == 2 and "--r or --c" in out.err


def test_lbd_certificate_file(tmp_path, capsys, monkeypatch):
    tree_path = tmp_path / "tree.json"
    tree_path.write_text(json.dumps(example_tree().to_json()))
    fn_path = tmp_path / "f.txt"
    write_table_file(example_tree().to_function(), fn_path)
    cert = tmp_path / "cert.json"
    rep = report_of(["lbd", "--function", str(fn_path), "--tree", str(tree_path), "--emit-cert", str(cert),
                     "--verify", "--seed", "2"], capsys, monkeypatch)
    assert rep["result"]["r"] == 160 and rep["result"]["verified"] is True
    assert json.loads(cert.read_text())["r"] == 160


@pytest.mark.parametrize("mode, key, value", [("max-agreement", "k", 3), ("bad", "bad", False)])
def test_oracle_modes(mode, key, value, capsys, monkeypatch):
    rep = report_of(["oracle", "--points", "all:2", "--function", "XOR:2", "--degree", "1", "--mode", mode,
                     "--seed", "0"], capsys, monkeypatch)
    assert rep["result"][key] == value


def test_oracle_points_file(tmp_path, capsys, monkeypatch):
    pts = tmp_path / "pts.txt"
    pts.write_text("000\n100\n010\n001\n")
    rep = report_of(["oracle", "--points", str(pts), "--function", "OR:3", "--degree", "1", "--seed", "0"],
                    capsys, monkeypatch)
    assert rep["result"]["k"] == 4


def test_oracle_fraction(capsys, monkeypatch):
    rep = report_of(["oracle", "--points", "all:3", "--degree", "0", "--mode", "fraction:exact", "--seed", "0"],
                    capsys, monkeypatch)
    assert rep["result"]["fraction"]["estimate_exact"] == "1/128"


@pytest.mark.parametrize("argv", [
    ["orpoly", "--seed", "0"],
    ["orpoly", "--n", "3"],
    ["measure", "--function", "NOPE:3", "--seed", "0"],
    ["oracle", "--points", "all:2", "--degree", "1", "--seed", "0"],
    ["orpoly", "--n", "30", "--seed", "0"],
    ["orredn", "--function", "XOR:0", "--seed", "0"],
])
def test_usage_errors_exit_2(argv, capsys, monkeypatch):
    code, _ = run(argv, capsys, monkeypatch)
    assert code == 2


def test_verification_failure_exits_1(capsys, monkeypatch):
    monkeypatch.setattr(cli.probpoly.ErrorReport, "within", lambda self, bound: False)
    code, out = run(["orpoly", "--n", "2", "--trials", "20", "--seed", "0"], capsys, monkeypatch)
    assert code == 1
    assert json.loads(out.out)["verification"]["passed"] is False


def test_determinism_ignoring_timestamp(capsys, monkeypatch):
    argv = ["orpoly", "--n", "4", "--trials", "100", "--seed", "7"]
    _, first = run(argv, capsys, monkeypatch, stamp="")
    _, second = run(argv, capsys, monkeypatch, stamp="")
    a, b = json.loads(first.out), json.loads(second.out)
    a.pop("timestamp"), b.pop("timestamp")
    assert a == b


def test_table_rendered_from_json(capsys, monkeypatch, tmp_path):
    out = tmp_path / "rep.json"
    code, res = run(["measure", "--function", "MAJ:3", "--seed", "0", "--format", "table", "--out", str(out)],
                    capsys, monkeypatch)
    assert code == 0
    assert cli.render_table(cli.load_report(out)) + "\n" == res.out
    assert "verification: PASS" in res.out


def test_load_report_rejects_other_schema(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "0.9.0"}))
    with pytest.raises(cli.SchemaMismatch):
        cli.load_report(bad)
