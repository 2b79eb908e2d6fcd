import csv
import io
import json
import subprocess
import sys

import pytest

from hodgetau import REPORT_SCHEMA
from hodgetau.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_origami_h2(capsys):
    code, out, _ = run(capsys, "origami", "--degree", "3", "--stratum", "2")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["schema"] == REPORT_SCHEMA
    assert rep["origami_count"] == 3 and rep["orbit_count"] == 1
    assert sorted(rep["orbits"][0]["cylinder_modulus_sums"]) == ["1/3", "3/2", "3/2"]


def test_origami_trivial_cover(capsys):
    code, out, _ = run(capsys, "origami", "--degree", "1", "--stratum", "", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 1 and rows[0]["size"] == "1"


@pytest.mark.parametrize("argv", [
    ("origami", "--degree", "3", "--stratum", "3"),
    ("origami", "--degree", "2", "--stratum", "1,1"),
    ("origami", "--degree", "x", "--stratum", "2"),
    ("lyapunov", "--stratum", "1,a", "--dmax", "3"),
    ("lyapunov", "--stratum", "2", "--dmax", "0"),
    ("lyapunov", "--stratum", "2", "--dmax", "3", "--calibration-k", "1/0"),
    ("picard", "--genus", "1"),
    ("tau", "genus1", "--B", "-1j"),
    ("tau", "genus1", "--checks", "nope"),
    ("tau", "genus2", "--checks", "nope"),
    ("origami", "--degree", "3", "--stratum", "2", "--jobs", "0"),
    ("frobnicate",),
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert err.startswith("error:") and err.count("\n") == 1


@pytest.mark.parametrize("stratum,dmax,expected", [("1,1", "6", "3/2"), ("", "3", "1/1"), ("2", "3", "4/3")])
def test_lyapunov_tables(capsys, stratum, dmax, expected):
    code, out, _ = run(capsys, "lyapunov", "--stratum", stratum, "--dmax", dmax, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows
    assert {r["lyap_sum"] for r in rows} == {expected}
    assert all(r["K"] == "12/1" for r in rows)
    if stratum == "2":
        assert len(rows) == 1


def test_lyapunov_json_logs_k(capsys):
    code, out, _ = run(capsys, "lyapunov", "--stratum", "1,1", "--dmax", "4", "--calibration-k", "6")
    rep = json.loads(out)
    assert rep["K"] == "6/1" and all(r["K"] == "6/1" for r in rep["rows"])


def test_picard(capsys):
    code, out, _ = run(capsys, "picard", "--genus", "2")
    assert code == EXIT_OK
    assert "1/4*psi + 1/24*delta_deg + 1/12*delta_0 + 1/8*delta_1" in out
    code, out, _ = run(capsys, "picard", "--genus", "5", "--verify", "--format", "json")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_tau_genus1_all_checks(capsys):
    code, out, _ = run(capsys, "tau", "genus1", "--all-checks")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"]
    names = {c["check"] for c in rep["checks"]}
    assert {"lemma3-modular-factor", "lemma7-cusp-asymptotics", "bercon-dB-log-tau"} <= names
    assert all(c["residual"] < 1e-9 for c in rep["checks"] if "residual" in c)


def test_tau_genus2_curve_file(capsys, tmp_path, genus2_corpus):
    from hodgetau.hyperelliptic import dump_curve_json
    path = tmp_path / "curve.json"
    path.write_text(dump_curve_json(*genus2_corpus[1]))
    code, out, _ = run(capsys, "tau", "genus2", "--curve", str(path), "--checks", "invariance")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"]
    assert [c["check"] for c in rep["checks"]] == ["tau-value", "theorem1-invariance"]


@pytest.mark.parametrize("text", ["{not json", '{"branch_points": [[0, 0]], "c0": [1, 0], "c1": [1, 0]}', "[]"])
def test_malformed_curve_exit_2(capsys, tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(capsys, "tau", "genus2", "--curve", str(path))
    assert code == EXIT_INPUT and str(path) in err


def test_failed_check_exit_3_still_writes_report(capsys, tmp_path, monkeypatch):
    import hodgetau.tau_elliptic as te
    monkeypatch.setattr(te, "euler_identity_genus1", lambda p: 1.0)
    out = tmp_path / "rep.json"
    code, stdout, _ = run(capsys, "tau", "genus1", "--checks", "euler", "--out", str(out))
    rep = json.loads(out.read_text())
    assert code == EXIT_CHECK and stdout == "" and not rep["passed"]


def test_reports_identical_across_jobs(capsys, tmp_path):
    texts = []
    for jobs in ("1", "3"):
        for argv in (("origami", "--degree", "5", "--stratum", "1,1"), ("lyapunov", "--stratum", "1,1", "--dmax", "6")):
            run(capsys, *argv, "--jobs", jobs, "--out", str(tmp_path / f"{argv[0]}-{jobs}.json"))
    for name in ("origami", "lyapunov"):
        assert (tmp_path / f"{name}-1.json").read_bytes() == (tmp_path / f"{name}-3.json").read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hodgetau", "picard", "--genus", "3", "--verify"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "pass" in res.stdout
