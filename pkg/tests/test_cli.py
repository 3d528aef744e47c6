"""CLI contracts: grids, formats, reproducibility, exit codes."""

import json

import pytest

from bernlpp.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestShapeCommand:
    def test_grid_row_count(self, capsys):
        code, out = _run(capsys, "shape", "--p", "0.25", "--grid", "s=0..2:40", "t=0..2:40")
        assert code == 0
        lines = out.strip().splitlines()
        data = [ln for ln in lines if not ln.startswith("#")][1:]  # skip header row
        assert len(data) == 1600

    def test_embedded_provenance(self, capsys):
        code, out = _run(capsys, "shape", "--p", "0.25", "--s", "1", "--t", "1", "--seed", "9")
        assert code == 0
        assert out.splitlines()[0].startswith("# bernlpp-version:")
        assert '"seed": 9' in out.splitlines()[1]

    def test_byte_reproducible(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (p1, p2):
            assert main(["shape", "--p", "0.3", "--grid", "s=0..1:7", "t=0..1:5", "--out", str(p)]) == 0
        assert p1.read_bytes() == p2.read_bytes()


class TestRateCommand:
    def test_xi_curve(self, capsys):
        code, out = _run(capsys, "rate", "--p", "0.5", "--s", "2", "--t", "1", "--xi", "0..3:60")
        assert code == 0
        data = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
        assert data[0] == "xi,jstar,u_star"
        assert len(data) == 61
        vals = [float(ln.split(",")[1]) for ln in data[1:]]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))  # convex increasing curve

    def test_r_curve_serializes_infinity(self, capsys):
        code, out = _run(capsys, "rate", "--p", "0.25", "--s", "1", "--t", "1", "--r", "0.5")
        assert code == 0
        assert out.strip().splitlines()[-1].split(",")[1] == "inf"

    def test_needs_a_query(self, capsys):
        code, _ = _run(capsys, "rate", "--p", "0.5")
        assert code == 2


class TestLmgfCommand:
    def test_curve_with_pole(self, capsys):
        code, out = _run(capsys, "lmgf", "--p", "0.25", "--u", "0.5", "--xi", "0..1.2:13")
        assert code == 0
        rows = [ln.split(",") for ln in out.strip().splitlines() if not ln.startswith("#")][1:]
        assert rows[-1][3] == "inf" and rows[-1][4] == "infinite"
        finite = [r for r in rows if r[3] != "inf"]
        assert all(float(r[3]) == pytest.approx(max(float(r[1]), float(r[2])), abs=1e-9) for r in finite)


class TestSimulationCommands:
    def test_simulate_json_record(self, capsys):
        code, out = _run(
            capsys, "simulate", "--p", "0.25", "--s", "1", "--t", "1",
            "--n", "50", "--reps", "20", "--seed", "3", "--format", "json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["quantity"] == "growth"
        assert doc["result"]["master_seed"] == 3
        assert 0.5 < doc["result"]["point"] < 1.0

    def test_tail_and_left_tail(self, capsys):
        code, out = _run(
            capsys, "tail", "--p", "0.25", "--s", "1", "--t", "1", "--r", "0.95",
            "--n", "40", "--reps", "5000", "--seed", "1",
        )
        assert code == 0
        assert json.loads(out)["result"]["quantity"] == "tail_rate"
        code, out = _run(
            capsys, "left-tail", "--p", "0.5", "--s", "1", "--t", "1", "--r", "0.9",
            "--n", "10..20:2", "--reps", "20000", "--seed", "1",
        )
        assert code == 0
        data = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
        assert data[0] == "N,reps,hits,rate_estimate,censored"
        assert len(data) == 3

    def test_mgf_sim(self, capsys):
        code, out = _run(
            capsys, "mgf-sim", "--p", "0.25", "--s", "1", "--t", "1", "--xi", "0.2",
            "--n", "60", "--reps", "2000", "--seed", "4",
        )
        assert code == 0
        assert json.loads(out)["result"]["quantity"] == "lmgf"


class TestBurkeCommand:
    def test_json_report(self, capsys):
        code, out = _run(capsys, "burke", "--p", "0.25", "--u", "0.5")
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["exact"]["max_abs_deviation"] < 1e-10


class TestConfigHandling:
    def test_missing_p_is_config_error(self, capsys):
        code, _ = _run(capsys, "shape")
        assert code == 2

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 0.25, "bogus": 1}))
        code, _ = _run(capsys, "shape", "--config", str(cfg))
        assert code == 2

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 0.25, "s": "1", "t": "1"}))
        code, out = _run(capsys, "shape", "--config", str(cfg), "--t", "2")
        assert code == 0
        row = [ln for ln in out.strip().splitlines() if not ln.startswith("#")][1]
        assert row.split(",")[1] == "2.0"

    def test_config_file_survives_absent_flags(self, tmp_path, capsys):
        # built-in defaults must not clobber config-file values
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 0.25, "u": 0.5, "which": "boundary", "s": "1", "t": "1", "seed": 5}))
        code, out = _run(capsys, "shape", "--config", str(cfg))
        assert code == 0
        assert '"seed": 5' in out.splitlines()[1]
        row = [ln for ln in out.strip().splitlines() if not ln.startswith("#")][1]
        assert row.split(",")[3] == "boundary"

    def test_domain_errors_surface_per_row(self, capsys):
        # the (0,0) corner of a grid is rejected pointwise, the run continues
        code, out = _run(capsys, "shape", "--p", "0.25", "--grid", "s=0..1:2", "t=0..1:2")
        assert code == 0
        rows = [ln for ln in out.strip().splitlines() if not ln.startswith("#")][1:]
        assert len(rows) == 4
        assert rows[0].split(",")[3] == "error"
