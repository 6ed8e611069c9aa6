import json
import os
import subprocess
import sys

import pytest

from eurlab.cli import main
from eurlab.errors import DomainError
from eurlab.scan import ScanConfig, grid_axis, header, run_scan, to_csv, verify_csv, write_scan


def run_cli(*argv):
    return subprocess.run([sys.executable, "-m", "eurlab", *argv], capture_output=True, text=True)


def test_grid_axis_interior():
    axis = grid_axis(0.0, 1.0, 99)
    assert len(axis) == 99 and axis[0] == 0.01 and axis[-1] == 0.99


def test_config_validation():
    with pytest.raises(DomainError):
        ScanConfig("ghz", steps=1)
    with pytest.raises(DomainError):
        ScanConfig("ghz", ranges={"l0": (0.5, 0.2)})
    with pytest.raises(DomainError):
        ScanConfig("custom", criteria=("prop1",))
    with pytest.raises(DomainError):
        ScanConfig("nope")


def test_header_layout():
    cols = header(ScanConfig("eps_family", criteria=("criterio1",)))
    assert cols == [
        "eps", "status", "criterio1_H1", "criterio1_H2",
        "criterio1_lhs", "criterio1_threshold", "criterio1_margin", "criterio1_verdict",
    ]


def test_w_plane_marks_infeasible_points():
    cols, rows = run_scan(ScanConfig("w_plane", steps=4), workers=1)
    statuses = {(r[0], r[1]): r[2] for r in rows}
    assert statuses[("0.8", "0.8")] == "infeasible"
    assert statuses[("0.2", "0.2")] == "ok"
    assert all(len(r) == len(cols) for r in rows)


def test_scan_is_deterministic_across_workers():
    config = ScanConfig("w_plane", steps=12)
    serial = to_csv(*run_scan(config, workers=1))
    parallel = to_csv(*run_scan(config, workers=2))
    assert serial == parallel
    assert serial.endswith("\r\n") and "\n" not in serial.replace("\r\n", "")
    assert verify_csv(serial) == []


def test_verify_csv_catches_flipped_verdict():
    text = to_csv(*run_scan(ScanConfig("ghz", steps=5), workers=1))
    assert verify_csv(text) == []
    bad = text.replace("violated", "satisfied", 1)
    assert verify_csv(bad)


def test_custom_scan_fixed_parameter():
    config = ScanConfig("custom", steps=3, family="w", param="l2", criteria=("prop3",), fixed={"l0": 0.5})
    cols, rows = run_scan(config, workers=1)
    assert cols[:2] == ["l2", "status"]
    assert [r[1] for r in rows] == ["ok"] * 3


def test_cli_check_bell(capsys):
    assert main(["check", "--family", "bell", "--criteria", "prop1", "--bases", "Z,X,Y"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("prop1: lhs 3.000000000 threshold 4.000000000 VIOLATED")


def test_cli_check_exit_codes(capsys):
    args = ["check", "--family", "w", "--l0", "1", "--l2", "0", "--criteria", "prop3"]
    assert main(args) == 0
    assert "SATISFIED" in capsys.readouterr().out
    assert main(["check", "--family", "bell", "--criteria", "prop1", "--fail-on-detect"]) == 2
    assert main(args + ["--fail-on-detect"]) == 0


def test_cli_check_ghz_prop6_json(capsys):
    assert main(["check", "--family", "ghz", "--l0", "0.707106781", "--criteria", "prop6", "--json"]) == 0
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "satisfied"
    assert rep["threshold"] == pytest.approx(16 / 3, abs=1e-8)
    assert rep["margin"] == pytest.approx(6 - 16 / 3, abs=1e-8)


def test_cli_named_criterion(capsys):
    assert main(["check", "--family", "eps", "--eps", "0.5", "--criteria", "criterio1"]) == 0
    assert capsys.readouterr().out.startswith("criterio1 (prop2): ")


def test_cli_errors_exit_one(capsys):
    assert main(["check", "--family", "w", "--l0", "0.9", "--l2", "0.9", "--criteria", "prop3"]) == 1
    assert main(["check", "--family", "bell", "--criteria", "nope"]) == 1
    assert main(["bound", "--d", "6", "--mubs", "3"]) == 1
    assert "6" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--scan", "bogus"])
    assert exc.value.code == 1


def test_cli_bound(capsys):
    assert main(["bound", "--d", "3", "--mubs", "4"]) == 0
    assert capsys.readouterr().out.strip() == "4.000000000 tight registry_qutrit4"
    assert main(["bound", "--d", "2", "--bases", "Z,X,Y", "--sites", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "F1 2.000000000 tight F2 3.000000000 tight"


def test_cli_minimize(capsys):
    assert main(["minimize", "--d", "2", "--bases", "Z,X", "--restarts", "4", "--seed", "1"]) == 0
    out = dict(line.split(" ", 1) for line in capsys.readouterr().out.splitlines())
    assert float(out["min_found"]) == pytest.approx(1.0, abs=1e-6)
    assert out["iteration_cap_hit"] == "false"


def test_cli_scan_and_verify(tmp_path):
    path = tmp_path / "ghz.csv"
    assert main(["scan", "--scan", "ghz", "--steps", "9", "--output", str(path), "--threads", "1"]) == 0
    first = path.read_bytes()
    assert main(["scan", "--scan", "ghz", "--steps", "9", "--output", str(path), "--threads", "2"]) == 0
    assert path.read_bytes() == first
    assert main(["verify-csv", str(path)]) == 0
    path.write_bytes(first.replace(b"violated", b"satisfied"))
    assert main(["verify-csv", str(path)]) == 1


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("# ghz scan\nscan = ghz\nsteps = 5\ncriteria = multi_ent1\n")
    assert main(["scan", "--config", str(cfg)]) == 0
    rows = capsys.readouterr().out.strip().split("\r\n")
    assert len(rows) == 6
    assert main(["scan", "--config", str(cfg), "--steps", "3"]) == 0
    assert len(capsys.readouterr().out.strip().split("\r\n")) == 4
    cfg.write_text("scan = ghz\ncolour = red\n")
    assert main(["scan", "--config", str(cfg)]) == 1


def test_cli_unwritable_output(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    assert main(["scan", "--scan", "ghz", "--steps", "3", "--output", str(target)]) == 1


def test_threads_env(tmp_path):
    env = dict(os.environ, EURLAB_THREADS="2")
    out = tmp_path / "w.csv"
    res = subprocess.run(
        [sys.executable, "-m", "eurlab", "scan", "--scan", "w_plane", "--steps", "10", "--output", str(out)],
        capture_output=True, text=True, env=env,
    )
    assert res.returncode == 0, res.stderr
    assert out.read_bytes() == to_csv(*run_scan(ScanConfig("w_plane", steps=10), workers=1)).encode()


def test_module_entry_point():
    res = run_cli("bound", "--d", "2", "--bases", "Z,X")
    assert res.returncode == 0
    assert res.stdout.strip() == "1.000000000 tight maassen_uffink"


def test_write_scan_returns_text(tmp_path):
    config = ScanConfig("eps_family", steps=3, output_path=str(tmp_path / "e.csv"))
    text = write_scan(config, workers=1)
    assert (tmp_path / "e.csv").read_bytes() == text.encode()
