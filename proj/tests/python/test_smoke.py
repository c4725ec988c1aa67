"""Smoke tests for the Python extension and the CLI binary.

ctest runs these with PYTHONPATH pointing at the built package and
RISKAUDIT_CLI pointing at the built binary.
"""

import json
import math
import os
import subprocess
import sys

import pytest

import riskaudit


def test_version():
    assert riskaudit.__version__


def test_auroc_matches_hand_count():
    assert riskaudit.auroc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert riskaudit.auroc([0.9, 0.7, 0.4, 0.2], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert riskaudit.auroc([0.5, 0.5], [1, 1]) is None  # single class


def test_calibration_metrics():
    scores = [0.2, 0.2, 0.8, 0.8]
    outcomes = [0, 0, 1, 1]
    assert riskaudit.ece(scores, outcomes, n_bins=2) == pytest.approx(0.2)
    assert riskaudit.rmsce(scores, outcomes, n_bins=2) == pytest.approx(0.2)
    # pure bins: debiasing changes nothing
    assert riskaudit.debiased_rmsce(scores, outcomes, n_bins=2) == pytest.approx(0.2)


def test_drmsce_on_synthetic_stream():
    scores, outcomes = riskaudit.generate_calibration_stream(10000, "perfect", seed=5)
    value = riskaudit.drmsce(scores, outcomes)
    assert value is not None and value < 0.05

    gt_ece, gt_rmsce = riskaudit.ground_truth_errors("square")
    assert gt_ece == pytest.approx(1 / 6)
    assert gt_rmsce == pytest.approx(math.sqrt(1 / 30))


def test_eur_worked_example():
    scores = [0.9, 0.6, 0.7, 0.2]
    outcomes = [1, 0, 1, 0]
    assert riskaudit.eur(scores, outcomes, [1, 1, 0, 0]) == 1.0
    assert riskaudit.eur(scores, outcomes, [0, 0, 1, 1]) == pytest.approx(2 / 3, abs=0)


def test_bootstrap_determinism():
    scores, outcomes = riskaudit.generate_calibration_stream(300, "perfect", seed=2)
    a = riskaudit.bootstrap_metric(scores, outcomes, "auroc", n_replicates=50, seed=7)
    b = riskaudit.bootstrap_metric(scores, outcomes, "auroc", n_replicates=50, seed=7)
    assert a == b
    assert a["ci_lower"] <= a["median"] <= a["ci_upper"]
    assert a["replicates_used"] + a["replicates_dropped"] == 50


def test_max_monotonic_bins():
    scores = [(i + 0.5) / 20 for i in range(20)]
    outcomes = [0] * 10 + [1] * 10
    assert riskaudit.max_monotonic_bins(scores, outcomes) == 2
    assert riskaudit.max_monotonic_bins(scores, outcomes[::-1]) == 1


def test_run_audit_roundtrip(tmp_path):
    rows = riskaudit.generate_two_group_example(300, seed=11)
    data_path = tmp_path / "data.csv"
    with open(data_path, "w") as fh:
        fh.write("score,outcome,group\n")
        for s, y, g in zip(rows["score"], rows["outcome"], rows["group"]):
            fh.write(f"{s!r},{y},{g}\n")

    report = riskaudit.run_audit(
        {
            "input": str(data_path),
            "sensitive_attributes": ["group"],
            "min_group_size": 1,
            "bootstrap": {"n_replicates": 20, "seed": 3},
            "metrics": ["drmsce", "auroc", "eur"],
            "curves": False,
        },
        output_dir=str(tmp_path / "out"),
    )
    names = [g["name"] for g in report["groups"]]
    assert names[0] == "overall"
    assert "group=blue" in names and "group=orange" in names
    assert (tmp_path / "out" / "report.json").exists()
    assert (tmp_path / "out" / "metrics_by_group.csv").exists()

    on_disk = json.loads((tmp_path / "out" / "report.json").read_text())
    assert on_disk == report


@pytest.fixture()
def cli():
    path = os.environ.get("RISKAUDIT_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("RISKAUDIT_CLI not set")
    return path


def test_cli_audit_and_render(cli, tmp_path):
    data = tmp_path / "data.csv"
    data.write_text(
        "score,outcome,sex\n"
        "0.2,0,M\n0.8,1,F\n0.5,1,M\n0.1,0,F\n"
        "0.9,1,M\n0.3,0,F\n0.7,1,F\n0.4,0,M\n"
    )
    out = tmp_path / "out"
    run = subprocess.run(
        [cli, "audit", "--input", str(data), "--attributes", "sex",
         "--min-group-size", "1", "--bootstrap", "10", "--seed", "1",
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert run.returncode == 0, run.stderr
    report = json.loads((out / "report.json").read_text())
    assert len(report["groups"]) == 3

    svg = tmp_path / "roc.svg"
    run = subprocess.run(
        [cli, "render", "--input", str(out / "curves/overall/roc.csv"),
         "--out", str(svg), "--title", "roc"],
        capture_output=True, text=True,
    )
    assert run.returncode == 0, run.stderr
    assert svg.read_text().startswith("<svg")


def test_cli_exit_codes(cli, tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("score,outcome,sex\n1.7,0,M\n0.5,1,F\n")
    run = subprocess.run(
        [cli, "audit", "--input", str(data), "--attributes", "sex",
         "--min-group-size", "1", "--out", str(tmp_path / "x")],
        capture_output=True, text=True,
    )
    assert run.returncode == 2  # data validation error
    assert "row 1" in run.stderr

    run = subprocess.run(
        [cli, "audit", "--input", str(data), "--attributes", "sex",
         "--metrics", "bogus", "--out", str(tmp_path / "y")],
        capture_output=True, text=True,
    )
    assert run.returncode == 1  # usage/config error


def test_cli_bench_bias(cli, tmp_path):
    out = tmp_path / "bias"
    run = subprocess.run(
        [cli, "bench-bias", "--sizes", "100", "--repetitions", "3",
         "--seed", "5", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert run.returncode == 0, run.stderr
    lines = (out / "bias_study.csv").read_text().strip().splitlines()
    assert lines[0] == "metric,scenario,sample_size,repetition,value"
    assert len(lines) > 1
    truth = (out / "ground_truth.csv").read_text()
    assert "square" in truth
