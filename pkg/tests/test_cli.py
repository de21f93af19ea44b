import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from anisofield.cli import main

import oracle_values as oracle


def run_cli(*argv):
    return main(list(argv))


def load_report(path):
    doc = json.loads(path.read_text())
    assert doc["schema"] == "report/1"
    return doc


def write_config(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


SMALL_VERIFY = """
[run]
tol = 1e-8
[verify]
draws = 40
gram_points = 40
"""


class TestKernelEval:
    def test_table_and_report(self, tmp_path):
        cfg = write_config(tmp_path, "[lags]\nv1 = -1.0, 0.0, 1.0\nv2 = 0.0, 1.0\n")
        code = run_cli("kernel-eval", "--config", cfg, "--theta", "0.005",
                       "--out", str(tmp_path / "out"))
        assert code == 0
        lines = (tmp_path / "out" / "kernel_eval.csv").read_text().strip().split("\n")
        assert lines[0] == "v1,v2,F_H1,F_H2,R0,R_theta"
        assert len(lines) == 1 + 6
        rows = {tuple(float(c) for c in line.split(",")[:2]): line.split(",")
                for line in lines[1:]}
        origin = [float(c) for c in rows[(0.0, 0.0)]]
        assert origin[2:] == [2.0, 2.0, 1.0, 1.0]
        at_11 = [float(c) for c in rows[(1.0, 1.0)]]
        assert at_11[5] == pytest.approx(oracle.R_THETA_HALF_0005_AT_1_1, rel=1e-15)
        report = load_report(tmp_path / "out" / "kernel_eval_report.json")
        assert report["pass"] is True
        assert report["config"]["theta"] == {"requested": 0.005, "resolved": 0.005}

    def test_theta_zero_collapses_columns(self, tmp_path):
        cfg = write_config(tmp_path, "[lags]\nv1 = -2.0, 0.5\nv2 = 1.0, 3.0\n")
        assert run_cli("kernel-eval", "--config", cfg, "--theta", "0",
                       "--out", str(tmp_path / "out")) == 0
        lines = (tmp_path / "out" / "kernel_eval.csv").read_text().strip().split("\n")
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[4] == cells[5]


class TestThetaBound:
    def test_prints_bound(self, tmp_path, capsys):
        assert run_cli("theta-bound", "--out", str(tmp_path)) == 0
        printed = capsys.readouterr().out
        value = float(printed.split(" = ")[1].split()[0])
        assert value == pytest.approx(oracle.THETA_BOUNDS[(0.5, 0.5)], rel=1e-15)

    def test_flags_theta_outside_bound(self, tmp_path):
        assert run_cli("theta-bound", "--theta", "0.1", "--out", str(tmp_path)) == 1
        report = load_report(tmp_path / "theta_bound_report.json")
        failed = [c for c in report["checks"] if not c["pass"]]
        assert [c["name"] for c in failed] == ["theta_within_bound"]


class TestSpectral:
    def test_three_routes_agree(self, tmp_path):
        cfg = write_config(tmp_path, "[spectral]\nx = 0.0, 0.5, 1.0, 4.0\n")
        code = run_cli("spectral", "--config", cfg, "--hurst", "0.3,0.7",
                       "--out", str(tmp_path / "out"))
        assert code == 0
        lines = (tmp_path / "out" / "spectral.csv").read_text().strip().split("\n")
        assert lines[0] == "h,x,a_series,a_quadrature,a_closed_form,b_series,b_quadrature"
        assert len(lines) == 1 + 2 * 4
        report = load_report(tmp_path / "out" / "spectral_report.json")
        assert report["pass"] is True
        assert len(report["checks"]) == 6


class TestVerify:
    def test_passes_inside_bound(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_VERIFY)
        assert run_cli("verify", "--config", cfg, "--out", str(tmp_path / "out")) == 0
        report = load_report(tmp_path / "out" / "verify_report.json")
        names = {c["name"] for c in report["checks"]}
        assert {"folded_identity", "kernel_evenness", "covariance_symmetry",
                "theta_within_bound", "main_inequality_h1", "density_nonnegative",
                "gram_min_eigenvalue"} <= names

    def test_fails_for_huge_theta(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_VERIFY)
        code = run_cli("verify", "--config", cfg, "--theta", "100",
                       "--out", str(tmp_path / "out"))
        assert code == 1
        report = load_report(tmp_path / "out" / "verify_report.json")
        failed = {c["name"] for c in report["checks"] if not c["pass"]}
        assert "main_inequality_h1" in failed
        # the algebraic identities hold for every theta
        assert "folded_identity" not in failed

    def test_reports_are_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_VERIFY)
        assert run_cli("verify", "--config", cfg, "--seed", "3",
                       "--out", str(tmp_path / "a")) == 0
        assert run_cli("verify", "--config", cfg, "--seed", "3",
                       "--out", str(tmp_path / "b")) == 0
        docs = []
        for sub in ("a", "b"):
            doc = load_report(tmp_path / sub / "verify_report.json")
            doc.pop("wall_clock_s")
            doc["config"].pop("out")
            docs.append(doc)
        assert docs[0] == docs[1]


class TestSimulate:
    GRID = "[grid]\nt1 = 0.5, 1.0, 1.5\nt2 = 0.5, 1.0, 1.5\ninclude_axes = true\n"

    def test_samples_and_variance_table(self, tmp_path):
        cfg = write_config(tmp_path, self.GRID + "[run]\nsave_limit = 2\n")
        code = run_cli("simulate", "--config", cfg, "--theta", "0", "--paths", "4000",
                       "--seed", "8", "--out", str(tmp_path / "out"))
        assert code == 0
        report = load_report(tmp_path / "out" / "simulate_report.json")
        assert report["pass"] is True
        variance_checks = [c for c in report["checks"] if c["name"].startswith("variance")]
        assert len(variance_checks) == 16
        files = sorted(p.name for p in (tmp_path / "out" / "samples").iterdir())
        assert files == ["sample_00000.csv", "sample_00000.json",
                         "sample_00001.csv", "sample_00001.json"]

    def test_bit_identical_outputs_across_runs(self, tmp_path):
        cfg = write_config(tmp_path, self.GRID + "[run]\nsave_limit = 1\n")
        for sub in ("a", "b"):
            assert run_cli("simulate", "--config", cfg, "--theta", "auto",
                           "--paths", "2000", "--seed", "99",
                           "--out", str(tmp_path / sub)) == 0
        csv_a = (tmp_path / "a" / "samples" / "sample_00000.csv").read_bytes()
        csv_b = (tmp_path / "b" / "samples" / "sample_00000.csv").read_bytes()
        assert csv_a == csv_b
        docs = []
        for sub in ("a", "b"):
            doc = load_report(tmp_path / sub / "simulate_report.json")
            doc.pop("wall_clock_s")
            doc["config"].pop("out")
            docs.append(doc)
        assert docs[0] == docs[1]

    def test_uncertifiable_theta_exits_one(self, tmp_path):
        # dense enough that the gram scan sees the indefiniteness at theta = 5
        cfg = write_config(
            tmp_path,
            "[grid]\nt1 = 0.25, 0.5, 0.75, 1.0, 1.25\nt2 = 0.25, 0.5, 0.75, 1.0, 1.25\n",
        )
        code = run_cli("simulate", "--config", cfg, "--theta", "5.0",
                       "--paths", "100", "--out", str(tmp_path / "out"))
        assert code == 1

    def test_too_few_paths_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, self.GRID)
        assert run_cli("simulate", "--config", cfg, "--paths", "1",
                       "--out", str(tmp_path / "out")) == 2


class TestTest:
    PAIR = ("[test]\npair0 = 0.5, 0.5, 1.5, 1.25, 1.25, 1.0, 2.25, 1.75\n"
            "[run]\npaths = 2000\n")

    def test_null_calibration_passes(self, tmp_path):
        cfg = write_config(tmp_path, self.PAIR)
        code = run_cli("test", "--config", cfg, "--theta", "0", "--seed", "12",
                       "--out", str(tmp_path / "out"))
        assert code == 0
        report = load_report(tmp_path / "out" / "test_report.json")
        witness = [c for c in report["checks"] if c["name"] == "witness_not_fbs"][0]
        assert witness["inputs"]["expected"] == "no_reject"
        assert witness["pass"] is True

    def test_detectable_gap_needs_many_paths(self, tmp_path):
        # at theta = auto the witness gap sits far below 5 standard errors
        # for any desk-scale path count, so the run must refuse, not mislead
        cfg = write_config(tmp_path, self.PAIR)
        code = run_cli("test", "--config", cfg, "--theta", "auto",
                       "--out", str(tmp_path / "out"))
        assert code == 2


class TestConfigHandling:
    def test_flag_overrides_file(self, tmp_path):
        cfg = write_config(tmp_path, "[run]\nseed = 5\ntheta = 0.001\n")
        assert run_cli("theta-bound", "--config", cfg, "--theta", "0.002",
                       "--seed", "9", "--out", str(tmp_path / "out")) == 0
        report = load_report(tmp_path / "out" / "theta_bound_report.json")
        assert report["config"]["seed"] == 9
        assert report["config"]["theta"]["requested"] == 0.002

    def test_missing_config_file(self, tmp_path):
        assert run_cli("verify", "--config", str(tmp_path / "nope.ini")) == 2

    def test_unknown_key_rejected(self, tmp_path):
        cfg = write_config(tmp_path, "[run]\nfoo = 1\n")
        assert run_cli("theta-bound", "--config", cfg) == 2

    def test_malformed_ini_rejected(self, tmp_path):
        cfg = write_config(tmp_path, "not an ini file\n")
        assert run_cli("theta-bound", "--config", cfg) == 2

    def test_bad_hurst_rejected(self, tmp_path):
        assert run_cli("theta-bound", "--hurst", "1.5,0.5", "--out", str(tmp_path)) == 2
        assert run_cli("theta-bound", "--hurst", "0.5", "--out", str(tmp_path)) == 2

    def test_bad_theta_rejected(self, tmp_path):
        assert run_cli("theta-bound", "--theta", "lots", "--out", str(tmp_path)) == 2


class TestEntryPoint:
    def test_console_script_version(self):
        exe = shutil.which("anisofield")
        if exe is None:
            pytest.skip("console script not on PATH")
        out = subprocess.run([exe, "--version"], capture_output=True, text=True)
        assert out.returncode == 0
        assert out.stdout.startswith("anisofield ")

    def test_unknown_subcommand_is_usage_error(self):
        out = subprocess.run(
            [sys.executable, "-m", "anisofield.cli", "frobnicate"],
            capture_output=True, text=True,
        )
        assert out.returncode == 2
