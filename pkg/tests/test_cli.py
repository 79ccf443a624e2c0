import csv
import io
import json

import pytest

from eigenadversary.cli import main, parse_range, ConfigError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_range():
    assert parse_range("6..10") == [6, 7, 8, 9, 10]
    assert parse_range("6,8") == [6, 8]
    assert parse_range("6") == [6]
    with pytest.raises(ConfigError):
        parse_range("a..b")


@pytest.mark.slow
def test_verify_grid_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--n", "6..10", "--k", "1..3")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"dimensions", "rotation_in_s_j", "next_overlap_formula", "coefficient_system", "transfer_tilde", "tilde_norm_formula"} <= names
    assert all("worst" in c for c in report["checks"])


def test_verify_rejects_k_above_half(capsys):
    code, _, err = run_cli(capsys, "verify", "--n", "4", "--k", "3")
    assert code == 1 and "K <= N/2" in err


def test_verify_tight_tolerance_fails(capsys):
    code, out, _ = run_cli(capsys, "verify", "--n", "6..10", "--k", "1..3", "--tolerance", "1e-15")
    assert code == 2 and json.loads(out)["failed_checks"]


def test_bad_flag_is_config_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--algorithm", "quantum-magic"])
    assert exc.value.code == 1


def test_dimension_cap(capsys):
    code, _, err = run_cli(capsys, "verify", "--n", "20", "--k", "10")
    assert code == 1 and "cap" in err


def test_simulate_grover(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--algorithm", "grover", "--n", "16", "--k", "1", "--t", "3")
    summary = json.loads(out)
    assert code == 0 and abs(summary["success_probability"] - 0.961318969727) < 1e-9


def test_simulate_identity(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--algorithm", "identity", "--n", "6", "--k", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert len(rows) == 2 * 3
    assert [float(r["p"]) for r in rows] == pytest.approx([1, 0, 0] * 2, abs=1e-12)
    code, out, _ = run_cli(capsys, "simulate", "--algorithm", "identity", "--n", "6", "--k", "2")
    assert abs(json.loads(out)["success_probability"] - 1 / 15) < 1e-12


def test_simulate_random_is_byte_identical(tmp_path, capsys):
    outs = []
    for d in ("a", "b"):
        code, _, _ = run_cli(capsys, "simulate", "--algorithm", "random", "--n", "6", "--k", "2", "--t", "3",
                             "--seed", "7", "--out-dir", str(tmp_path / d))
        assert code == 0
        outs.append({f.name: f.read_bytes() for f in (tmp_path / d).iterdir()})
    assert outs[0] == outs[1] and set(outs[0]) == {"trajectory.csv", "trajectory.json"}


def test_out_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EIGENADVERSARY_OUT_DIR", str(tmp_path))
    assert run_cli(capsys, "progress", "--n", "6", "--k", "2", "--algorithm", "random", "--t", "2")[0] == 0
    assert (tmp_path / "progress.csv").exists()


def test_report(capsys):
    code, out, _ = run_cli(capsys, "report", "--n", "100", "--k", "10")
    row = json.loads(out)["rows"][0]
    assert code == 0 and abs(row["c_threshold"] - 0.897900760012) < 1e-9
    code, out, _ = run_cli(capsys, "report", "--n", "6", "--k", "2")
    assert abs(json.loads(out)["rows"][0]["combinatorial_term"] - 0.4) < 1e-12
    code, out, _ = run_cli(capsys, "report", "--n", "10,20", "--k", "2..4", "--format", "csv")
    assert len(list(csv.DictReader(io.StringIO(out)))) == 6
