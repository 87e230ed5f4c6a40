import contextlib
import io
import json
import os
import tempfile

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from khg.cli import main, render, run
from khg.constructions import binomial, triangle_cone
from khg.core import write_khg


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_khg(binomial(12, 3, "9/10", 3), "h.khg")
    write_khg(triangle_cone(12, "1/2", 1), "t.khg")
    write_khg(binomial(8, 3, "1/2", 2), "s.khg")
    return tmp_path


def call(capsys, argv):
    report, code = run(argv)
    out = capsys.readouterr()
    return report, code, out.out, out.err


def test_partite_k222(workdir, capsys):
    rep, code, out, _ = call(capsys, ["partite", "catalog:K_{2,2,2}"])
    assert code == 0
    assert json.loads(out)["result"]["gcd"] == 2
    assert rep["result"]["size_set"] == [2]


def test_factor_non_divisible(workdir, capsys):
    rep, code, _, _ = call(capsys, ["factor", "catalog:complete(7,3)", "catalog:edge"])
    assert code == 1 and rep["result"]["status"] == "no"


def test_dense_over_budget(workdir, capsys):
    rep, code, _, _ = call(capsys, ["dense", "catalog:complete(14,3)", "--p", "1/2", "--mu", "0"])
    assert code == 3
    assert rep["result"]["status"] == "refused" and rep["exhaustive"] is False


def test_dense_verdicts(workdir, capsys):
    rep, code, _, _ = call(capsys, ["dense", "s.khg", "--p", "0", "--mu", "0"])
    assert code == 0 and rep["result"]["verdict"] == "dense"
    rep, code, _, _ = call(capsys, ["dense", "s.khg", "--p", "1/2", "--mu", "0.001"])
    assert code == 1 and rep["result"]["verdict"] == "not dense"
    assert rep["command"]["mu"] == "1/1000"
    rep, code, _, _ = call(capsys, ["dense", "s.khg", "--p", "1/2", "--mu", "1", "--mode", "sample",
                                    "--seed", "4", "--samples", "3"])
    assert code == 0 and rep["result"]["verdict"] == "not refuted"
    assert rep["result"]["seed"] == 4 and rep["exhaustive"] is False


def test_dense_usage_errors(workdir, capsys):
    assert call(capsys, ["dense", "s.khg", "--p", "1/2", "--mu", "0", "--mode", "sample"])[1] == 2
    assert call(capsys, ["dense", "s.khg", "--p", "1/2", "--mu", "0", "--notion", "cherry"])[1] == 2
    assert call(capsys, ["dense", "s.khg", "--p", "x", "--mu", "0"])[1] == 2
    assert call(capsys, ["dense", "s.khg", "--p", "3/2", "--mu", "0"])[1] == 2


def test_malformed_file_names_line(workdir, capsys):
    (workdir / "bad.khg").write_text("khg 3 4 2\n0 1 2\n0 2 1\n")
    _, code, _, err = call(capsys, ["cover", "bad.khg", "catalog:edge"])
    assert code == 2 and "line 3" in err
    _, code, _, err = call(capsys, ["cover", "missing.khg", "catalog:edge"])
    assert code == 2 and "no such file" in err
    _, code, _, err = call(capsys, ["cover", "catalog:nope", "catalog:edge"])
    assert code == 2


def test_gen_writes_sidecar_and_figure(workdir, capsys):
    rep, code, _, _ = call(capsys, ["gen", "binomial", "--n", "9", "--p", "1/2", "--seed", "1",
                                    "-o", "g.khg", "--figure", "g.png"])
    assert code == 0
    assert (workdir / "g.khg.spec.json").exists() and (workdir / "g.png").stat().st_size > 0
    assert json.loads((workdir / "g.khg.spec.json").read_text())["seed"] == 1
    assert call(capsys, ["gen", "binomial", "--n", "9", "--p", "1/2", "-o", "x.khg"])[1] == 2
    rep, code, _, _ = call(capsys, ["gen", "cone-augment", "g.khg", "--count", "2", "-o", "a.khg"])
    assert code == 0 and rep["result"]["n"] == 11
    rep, code, _, _ = call(capsys, ["gen", "catalog", "K4-", "-o", "k.khg"])
    assert code == 0 and rep["result"]["m"] == 3
    rep, code, _, _ = call(capsys, ["gen", "triangle-cone", "--n", "10", "--seed", "2", "-o", "c.khg"])
    assert code == 0


def test_factor_certificate_and_verify(workdir, capsys):
    rep, code, _, _ = call(capsys, ["factor", "h.khg", "catalog:K_{2,2,2}", "-o", "cert.json"])
    assert code == 0 and rep["result"]["status"] == "yes"
    _, code, _, _ = call(capsys, ["verify", "h.khg", "catalog:K_{2,2,2}", "cert.json"])
    assert code == 0
    data = json.loads((workdir / "cert.json").read_text())
    data["tiles"][0]["mapping"][0] = data["tiles"][1]["mapping"][0]
    (workdir / "bad.json").write_text(json.dumps(data))
    rep, code, _, _ = call(capsys, ["verify", "h.khg", "catalog:K_{2,2,2}", "bad.json"])
    assert code == 1 and rep["result"]["valid"] is False
    (workdir / "junk.json").write_text("{")
    assert call(capsys, ["verify", "h.khg", "catalog:K_{2,2,2}", "junk.json"])[1] == 2


def test_factor_budget_unknown(workdir, capsys, monkeypatch):
    monkeypatch.setenv("KHG_BUDGET_NODES", "1")
    rep, code, _, _ = call(capsys, ["factor", "s.khg", "catalog:K_{1,1,2}"])
    assert code in (1, 3)
    rep, code, _, _ = call(capsys, ["factor", "h.khg", "catalog:edge"])
    assert code == 3 and rep["result"]["status"] == "unknown"


def test_cover_trans_goodpairs_reach(workdir, capsys):
    rep, code, _, _ = call(capsys, ["cover", "t.khg", "catalog:K_{2,2,2}"])
    assert code == 1 and 11 in rep["result"]["uncovered"]
    rep, code, _, _ = call(capsys, ["trans", "catalog:edge"])
    assert code == 0 and rep["result"]["in_trans"] is True
    assert call(capsys, ["trans", "catalog:edge", "--s", "3"])[1] == 2
    rep, code, _, _ = call(capsys, ["goodpairs", "t.khg", "--eta", "1/1000", "--vertex", "11"])
    assert code == 1 and rep["result"]["partner"] is None
    rep, code, _, _ = call(capsys, ["goodpairs", "h.khg", "--eta", "1/10", "--figure", "gp.png"])
    assert code == 0 and (workdir / "gp.png").exists()
    rep, code, _, _ = call(capsys, ["reach", "catalog:complete(8,3)", "catalog:edge", "--u", "0", "--v", "1"])
    assert code == 0 and rep["result"]["count"] == 15
    rep, code, _, _ = call(capsys, ["reach", "catalog:complete(8,3)", "catalog:edge", "--u", "0",
                                    "--v", "1", "--beta", "1"])
    assert code == 1 and rep["result"]["reachable"] is False
    assert call(capsys, ["reach", "h.khg", "catalog:edge", "--u", "0", "--v", "0"])[1] == 2


def test_robust_copies_tile(workdir, capsys):
    rep, code, _, _ = call(capsys, ["robust", "catalog:K_{2,2,2}", "catalog:edge",
                                    "--partition", "|0,2,3|1,4,5", "--figure", "r.png"])
    assert code == 0 and rep["result"]["robust"] == [[1, 2], [2, 1]]
    assert rep["result"]["transferral"] is True
    assert call(capsys, ["robust", "catalog:K_{2,2,2}", "catalog:edge", "--partition", "0|1"])[1] == 2
    rep, code, _, _ = call(capsys, ["copies", "catalog:complete(4,3)", "catalog:K4-"])
    assert rep["result"]["count"] == 4
    rep, code, _, _ = call(capsys, ["copies", "catalog:complete(4,3)", "catalog:K4-", "--labeled",
                                    "--limit", "3"])
    assert rep["result"]["count"] == 24 and len(rep["result"]["shown"]) == 3
    rep, code, _, _ = call(capsys, ["tile", "t.khg", "catalog:K_{2,2,2}"])
    assert code == 0 and rep["result"]["tiles"] <= 1


def test_table_format(workdir, capsys):
    _, code, out, _ = call(capsys, ["partite", "catalog:K_{1,2,3}", "--format", "table"])
    rows = dict(line.split("\t", 1) for line in out.splitlines())
    assert rows["result.gcd"] == "1" and rows["result.size_set"] == "[1,2,3]"


def test_timing_only_on_request(workdir, capsys):
    rep, _, _, _ = call(capsys, ["partite", "catalog:edge"])
    assert "seconds" not in rep
    rep, _, _, _ = call(capsys, ["partite", "catalog:edge", "--timing"])
    assert rep["seconds"] >= 0


def test_reports_round_trip(workdir, capsys):
    for argv in (["partite", "catalog:matching(2)"], ["trans", "catalog:K_{2,2,2}"],
                 ["factor", "h.khg", "catalog:K_{2,2,2}"], ["dense", "s.khg", "--p", "1/3", "--mu", "0"]):
        _, _, out, _ = call(capsys, argv)
        assert render(json.loads(out), "json") == out


def test_main_returns_code(workdir, capsys):
    assert main(["partite", "catalog:complete(4,3)"]) == 1
    assert main([]) == 2
    assert main(["--version"]) == 0


TOKENS = ["gen", "dense", "partite", "trans", "robust", "copies", "cover", "goodpairs", "reach",
          "factor", "tile", "verify", "binomial", "triangle-cone", "catalog", "catalog:edge",
          "catalog:K4-", "catalog:complete(5,3)", "catalog:K_{1,1,2}", "catalog:bogus", "s.khg",
          "missing.khg", "--p", "--mu", "--eta", "--seed", "--n", "--u", "--v", "--i", "--s",
          "--mode", "sample", "exact", "--notion", "cherry", "edge", "--partition", "0|1,2|3,4",
          "--vertex", "-o", "out.khg", "--format", "table", "1/2", "0", "1", "2", "5", "-3", "x",
          "--count", "--workers", "--nodes", "--samples", "--labeled", "--degenerate"]


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.sampled_from(TOKENS), min_size=0, max_size=9))
def test_fuzzed_argv_exit_contract(argv):
    old = os.getcwd()
    with tempfile.TemporaryDirectory() as tmp:
        os.chdir(tmp)
        try:
            write_khg(binomial(6, 3, "1/2", 1), "s.khg")
            buf, err = io.StringIO(), io.StringIO()
            with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
                report, code = run(argv)
        finally:
            os.chdir(old)
    assert code in (0, 1, 2, 3)
    if report is not None:
        assert report["exit_code"] == code
        if "table" not in argv:
            assert json.loads(buf.getvalue()) == report
