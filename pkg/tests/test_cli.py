"""End-to-end CLI tests: reports, traces, figures, overrides, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from truncratio.cli import main
from truncratio.report import read_ascent_trace_csv, read_em_trace_csv

COMPARE_CONFIG = """
compare:
  theta1: [0.2, 0.3]
  theta2: [0.4, 0.3]
  confidence: 0.99
model:
  kind: table
  joint: [0.2, 0.3]
sampler:
  seed: 42
output:
  path: {out}
"""

MAXIMIZE_CONFIG = """
maximize:
  theta0: [0.55, -1.6, 1.7, 1.2]
  initial_scale: 0.15
  max_iterations: {iters}
  seed: 7
  comparison_budget: 2048
model:
  kind: mixture
  simulate:
    n: 40
    seed: 5
    truth: {{weight: 0.4, mean1: -2.0, mean2: 2.0, sigma: 1.0}}
sampler:
  seed: 3
output:
  path: {out}
"""

EM_CONFIG = """
em:
  theta0: [0.5, -1.0, 1.0, 1.5]
  tolerance: 1.0e-9
model:
  kind: mixture
  simulate:
    n: 60
    seed: 4
    truth: {{weight: 0.4, mean1: -2.0, mean2: 2.0, sigma: 1.0}}
output:
  path: {out}
"""

VERIFY_CONFIG = """
verify:
  instance_count: 200
  seed: 42
output:
  path: {out}
"""


def write_config(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(text)
    return str(path)


class TestCompareCommand:
    def test_reference_pair_decision(self, tmp_path, capsys):
        out = tmp_path / "compare.json"
        cfg = write_config(tmp_path, COMPARE_CONFIG.format(out=out))
        assert main(["compare", "--config", cfg]) == 0
        report = json.loads(out.read_text())
        assert report["command"] == "compare"
        assert report["result"]["decision"] == "first_smaller"
        assert report["seeds"]["sampler"] == 42
        assert report["config"]["compare"]["confidence"] == 0.99
        assert "decision: first_smaller" in capsys.readouterr().out

    def test_bit_stable_reruns(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        cfg1 = tmp_path / "c1.yaml"
        cfg2 = tmp_path / "c2.yaml"
        cfg1.write_text(COMPARE_CONFIG.format(out=out1))
        cfg2.write_text(COMPARE_CONFIG.format(out=out2))
        assert main(["compare", "--config", str(cfg1)]) == 0
        assert main(["compare", "--config", str(cfg2)]) == 0
        a = json.loads(out1.read_text())
        b = json.loads(out2.read_text())
        assert a["result"] == b["result"]
        assert a["seeds"] == b["seeds"]

    def test_seed_override_changes_ledger(self, tmp_path):
        out = tmp_path / "c.json"
        cfg = write_config(tmp_path, COMPARE_CONFIG.format(out=out))
        assert main(["compare", "--config", cfg, "--seed", "123"]) == 0
        report = json.loads(out.read_text())
        assert report["seeds"]["sampler"] == 123
        assert report["config"]["sampler"]["seed"] == 123

    def test_output_override(self, tmp_path):
        configured = tmp_path / "ignored.json"
        actual = tmp_path / "actual.json"
        cfg = write_config(tmp_path, COMPARE_CONFIG.format(out=configured))
        assert main(["compare", "--config", cfg, "--output", str(actual)]) == 0
        assert actual.exists()
        assert not configured.exists()

    def test_subcommand_must_match_config(self, tmp_path, capsys):
        out = tmp_path / "x.json"
        cfg = write_config(tmp_path, COMPARE_CONFIG.format(out=out))
        assert main(["verify", "--config", cfg]) == 1
        assert "declares a 'compare' block" in capsys.readouterr().err


class TestVerifyCommand:
    def test_all_instances_pass(self, tmp_path):
        out = tmp_path / "verify.json"
        cfg = write_config(tmp_path, VERIFY_CONFIG.format(out=out))
        assert main(["verify", "--config", cfg]) == 0
        report = json.loads(out.read_text())
        assert report["result"]["passes"] == 200
        assert report["result"]["failures"] == 0


class TestMaximizeCommand:
    def test_zero_iterations_header_only_trace(self, tmp_path):
        out = tmp_path / "trace.csv"
        cfg = write_config(tmp_path, MAXIMIZE_CONFIG.format(out=out, iters=0))
        assert main(["maximize", "--config", cfg]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("iter,theta_0")
        report = json.loads(out.with_suffix(".report.json").read_text())
        np.testing.assert_allclose(report["result"]["final_theta"],
                                   [0.55, -1.6, 1.7, 1.2])
        # nothing to draw for an empty trace
        assert not out.with_suffix(".png").exists()

    def test_trace_round_trip_and_figure(self, tmp_path):
        out = tmp_path / "trace.csv"
        cfg = write_config(tmp_path, MAXIMIZE_CONFIG.format(out=out, iters=12))
        assert main(["maximize", "--config", cfg]) == 0
        rows = read_ascent_trace_csv(out)
        assert len(rows) == 12
        report = json.loads(out.with_suffix(".report.json").read_text())
        assert report["result"]["iterations"] == 12
        # trace chaining: next theta is the proposal iff accepted
        for prev, row in zip(rows, rows[1:]):
            expected = prev["proposed"] if prev["accepted"] else prev["theta"]
            np.testing.assert_array_equal(row["theta"], expected)
        # CSV floats are full precision: re-parsed values agree bit for bit
        final_row = rows[-1]
        final = (final_row["proposed"] if final_row["accepted"]
                 else final_row["theta"])
        np.testing.assert_array_equal(final, report["result"]["final_theta"])
        figure = out.with_suffix(".png")
        assert figure.exists()
        assert figure.stat().st_size > 0
        assert report["files"]["figure"] == str(figure)

    def test_plot_disabled(self, tmp_path):
        out = tmp_path / "trace.csv"
        text = MAXIMIZE_CONFIG.format(out=out, iters=3).replace(
            f"path: {out}", f"path: {out}\n  plot: false")
        cfg = write_config(tmp_path, text)
        assert main(["maximize", "--config", cfg]) == 0
        assert not out.with_suffix(".png").exists()


class TestEmCommand:
    def test_monotone_trace_and_figure(self, tmp_path):
        out = tmp_path / "em.csv"
        cfg = write_config(tmp_path, EM_CONFIG.format(out=out))
        assert main(["em", "--config", cfg]) == 0
        rows = read_em_trace_csv(out)
        assert len(rows) >= 2
        values = [row["log_marginal"] for row in rows]
        assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))
        assert out.with_suffix(".png").exists()
        report = json.loads(out.with_suffix(".report.json").read_text())
        assert report["result"]["final_log_marginal"] == pytest.approx(values[-1])

    def test_em_requires_mixture_model(self, tmp_path, capsys):
        out = tmp_path / "em.csv"
        cfg = write_config(tmp_path, f"""
em:
  theta0: [0.0, 1.0, 1.0]
model:
  kind: random_effects
  simulate: {{n: 5, seed: 1, truth: {{mu: 0.0, tau: 1.0, sigma: 1.0}}}}
output:
  path: {out}
""")
        assert main(["em", "--config", cfg]) == 1
        assert "requires a mixture model" in capsys.readouterr().err


class TestErrorPaths:
    def test_bad_config_exits_nonzero_and_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(COMPARE_CONFIG.format(out="x.json").replace(
            "model:", "modle:\n  x: 1\nmodel:"))
        assert main(["compare", "--config", str(cfg)]) == 1
        assert "'modle'" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["compare", "--config", "/nonexistent.yaml"]) == 1
        assert "cannot read config" in capsys.readouterr().err

    def test_theta_dimension_error_surfaces(self, tmp_path, capsys):
        out = tmp_path / "x.json"
        text = COMPARE_CONFIG.format(out=out).replace("theta1: [0.2, 0.3]",
                                                      "theta1: [0.2]")
        cfg = write_config(tmp_path, text)
        assert main(["compare", "--config", cfg]) == 1
        assert "length" in capsys.readouterr().err


def test_console_entry_point_runs(tmp_path):
    out = tmp_path / "verify.json"
    cfg = tmp_path / "run.yaml"
    cfg.write_text(VERIFY_CONFIG.format(out=out))
    proc = subprocess.run(
        [sys.executable, "-m", "truncratio.cli", "verify", "--config", str(cfg)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "verify: 200/200" in proc.stdout
