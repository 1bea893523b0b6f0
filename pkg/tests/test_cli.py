"""CLI tests: exit codes, stage artifacts, manifest pipeline reproducibility."""

import json
import shutil
import subprocess
import time
from importlib import resources

import pytest
import requests

from fieldtriage import cli
from fieldtriage.errors import DataError, InsufficientDataError

DEMO_SCENARIO = str(resources.files("fieldtriage")
                    .joinpath("assets/demo_scenario.json"))


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A synthetic dataset and a trained tree, produced through the CLI itself."""
    root = tmp_path_factory.mktemp("cli")
    assert cli.main(["synthesize", "--output", str(root / "data.csv"),
                     "--count", "600", "--seed", "5"]) == 0
    assert cli.main(["train", "tree", "--input", str(root / "data.csv"),
                     "--model", str(root / "tree.json"), "--seed", "5"]) == 0
    return root


# ---------------------------------------------------------------- exit codes


def test_no_command_is_usage_error(capsys):
    assert cli.main([]) == 1
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert "pipeline" in capsys.readouterr().out


def test_unknown_model_kind_is_usage_error(capsys):
    assert cli.main(["train", "bogus", "--input", "x", "--model", "y"]) == 1
    capsys.readouterr()


def test_missing_input_file_exits_two_naming_path(tmp_path, capsys):
    missing = str(tmp_path / "absent.csv")
    code = cli.main(["preprocess", "--input", missing,
                     "--output", str(tmp_path / "clean.csv")])
    assert code == 2
    assert missing in capsys.readouterr().err


@pytest.mark.parametrize("raised, expected", [
    (DataError("bad table"), 2),
    (InsufficientDataError("too few"), 3),
    (KeyboardInterrupt(), 3),
    (RuntimeError("boom"), 3),
])
def test_exit_codes_map_error_classes(monkeypatch, capsys, raised, expected):
    def explode(*args, **kwargs):
        raise raised

    monkeypatch.setattr(cli, "do_evaluate", explode)
    code = cli.main(["evaluate", "--model", "m", "--input", "i", "--output", "o"])
    assert code == expected
    capsys.readouterr()


# ---------------------------------------------------------------- stages


def test_synthesize_writes_header_plus_rows(workspace):
    lines = (workspace / "data.csv").read_text().splitlines()
    assert len(lines) == 601
    assert lines[0].split(",")[:2] == ["temperature", "heartrate"]


def test_train_produces_model_and_holdout(workspace):
    model = json.loads((workspace / "tree.json").read_text())
    assert model["format"].endswith("tree/1")
    holdout = (workspace / "tree.test.csv").read_text().splitlines()
    assert len(holdout) == 121  # 20% of 600, plus the header


def test_train_mlp_accepts_exactly_seven_hidden_widths(workspace, tmp_path, capsys):
    base = ["train", "mlp", "--input", str(workspace / "data.csv"),
            "--model", str(tmp_path / "net.json"), "--seed", "5", "--epochs", "2"]
    assert cli.main(base + ["--hidden", "8", "8", "8", "8", "8", "8", "8"]) == 0
    assert cli.main(base + ["--hidden", "8", "8"]) == 2
    capsys.readouterr()


def test_train_with_rebalance_flag(workspace, tmp_path, capsys):
    model_path = tmp_path / "balanced.json"
    holdout = tmp_path / "holdout.csv"
    code = cli.main(["train", "tree", "--input", str(workspace / "data.csv"),
                     "--model", str(model_path), "--seed", "5", "--rebalance",
                     "--test-output", str(holdout)])
    assert code == 0
    capsys.readouterr()
    # rebalancing equalizes class counts, so the split is much smaller than 600
    assert len(holdout.read_text().splitlines()) < 200


def test_train_ensemble_via_cli(workspace, tmp_path, capsys):
    model_path = tmp_path / "ensemble.json"
    code = cli.main(["train", "ensemble", "--input", str(workspace / "data.csv"),
                     "--model", str(model_path), "--seed", "5", "--epochs", "2",
                     "--test-output", str(tmp_path / "holdout.csv")])
    assert code == 0
    saved = json.loads(model_path.read_text())
    assert len(saved["learners"]) == 10
    code = cli.main(["evaluate", "--model", str(model_path),
                     "--input", str(tmp_path / "holdout.csv"),
                     "--output", str(tmp_path / "metrics.json")])
    assert code == 0
    capsys.readouterr()


def test_preprocess_writes_clean_table_and_report(workspace, tmp_path):
    clean = tmp_path / "clean.csv"
    report = tmp_path / "clean.report.json"
    code = cli.main(["preprocess", "--input", str(workspace / "data.csv"),
                     "--output", str(clean)])
    assert code == 0
    counts = json.loads(report.read_text())
    assert counts["initial"] == 600
    assert counts["final"] == (counts["initial"] - counts["duplicates_removed"]
                               - counts["missing_removed"]
                               - counts["outliers_removed"])
    assert counts["parse_diagnostics"] == []


def test_analyze_writes_correlations_and_bins(workspace, tmp_path):
    out = tmp_path / "analysis.json"
    code = cli.main(["analyze", "--input", str(workspace / "data.csv"),
                     "--output", str(out), "--bin-feature", "o2_sat"])
    assert code == 0
    data = json.loads(out.read_text())
    assert set(data["correlations"]) == {"temperature", "heart_rate", "resp_rate",
                                         "o2_sat", "sbp", "dbp"}
    assert data["binning"]["feature"] == "o2_sat"
    assert data["binning"]["bins"]


def test_evaluate_writes_metrics_and_prints_table(workspace, tmp_path, capsys):
    out = tmp_path / "metrics.json"
    code = cli.main(["evaluate", "--model", str(workspace / "tree.json"),
                     "--input", str(workspace / "tree.test.csv"),
                     "--output", str(out)])
    assert code == 0
    metrics = json.loads(out.read_text())
    assert 0.0 <= metrics["accuracy"] <= 1.0
    assert len(metrics["per_class"]) == 5
    assert "accuracy" in capsys.readouterr().out


def test_evaluate_emits_roc_curves(workspace, tmp_path, capsys):
    # sweep over the full dataset: the tiny holdout may lack a class entirely
    roc_dir = tmp_path / "roc"
    code = cli.main(["evaluate", "--model", str(workspace / "tree.json"),
                     "--input", str(workspace / "data.csv"),
                     "--output", str(tmp_path / "metrics.json"),
                     "--roc-dir", str(roc_dir)])
    assert code == 0
    capsys.readouterr()
    for acuity in range(1, 6):
        lines = (roc_dir / f"roc_class_{acuity}.csv").read_text().splitlines()
        assert lines[0].startswith("# auc,")
        assert lines[1] == "fpr,tpr"
        assert 0.0 <= float(lines[0].split(",")[1]) <= 1.0


def test_compare_identical_models_is_inconclusive(workspace, tmp_path, capsys):
    out = tmp_path / "comparison.json"
    code = cli.main(["compare", "--model-a", str(workspace / "tree.json"),
                     "--model-b", str(workspace / "tree.json"),
                     "--input", str(workspace / "data.csv"),
                     "--output", str(out), "--subsets", "8"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["insufficient_data"] is True
    assert report["p_value"] is None
    assert "inconclusive" in capsys.readouterr().out


def test_simulate_demo_scenario_with_tree_model(workspace, tmp_path, capsys):
    out = tmp_path / "mission.jsonl"
    code = cli.main(["simulate", "--scenario", DEMO_SCENARIO,
                     "--model", str(workspace / "tree.json"),
                     "--output", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 12
    assert {json.loads(line)["victim_id"] for line in lines} == \
        {f"v{i:02d}" for i in range(1, 13)}
    assert "12 reports" in capsys.readouterr().out


# ---------------------------------------------------------------- pipeline


def manifest_stages():
    return [
        {"stage": "synthesize", "output": "data.csv", "count": 500},
        {"stage": "train", "kind": "tree", "input": "data.csv",
         "model": "tree.json", "test_output": "holdout.csv"},
        {"stage": "evaluate", "model": "tree.json", "input": "holdout.csv",
         "output": "metrics.json"},
    ]


def run_manifest(directory, manifest):
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest))
    return cli.main(["pipeline", "--config", str(path)])


def test_pipeline_runs_stages_and_reports_digests(tmp_path, capsys):
    code = run_manifest(tmp_path, {"seed": 9, "stages": manifest_stages()})
    assert code == 0
    capsys.readouterr()
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert report["seed"] == 9
    assert report["partial"] is False
    assert report["failed"] is None
    assert report["stages_completed"] == ["synthesize", "train", "evaluate"]
    assert set(report["artifacts"]) == {"data.csv", "tree.json", "holdout.csv",
                                        "metrics.json"}
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert "accuracy" in metrics


def test_pipeline_reruns_are_byte_identical(tmp_path, capsys):
    manifest = {"seed": 9, "stages": manifest_stages()}
    first = tmp_path / "a"
    second = tmp_path / "b"
    first.mkdir()
    second.mkdir()
    assert run_manifest(first, manifest) == 0
    assert run_manifest(second, manifest) == 0
    capsys.readouterr()
    assert (first / "run_report.json").read_bytes() == \
        (second / "run_report.json").read_bytes()
    for name in ("data.csv", "tree.json", "metrics.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_pipeline_failure_leaves_partial_report(tmp_path, capsys):
    manifest = {"seed": 9, "stages": [
        {"stage": "synthesize", "output": "data.csv", "count": 200},
        {"stage": "evaluate", "model": "missing.json", "input": "data.csv",
         "output": "metrics.json"},
    ]}
    assert run_manifest(tmp_path, manifest) == 2
    capsys.readouterr()
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert report["partial"] is True
    assert "missing.json" in report["failed"]
    assert report["stages_completed"] == ["synthesize"]
    assert set(report["artifacts"]) == {"data.csv"}


@pytest.mark.parametrize("content", ["{not json", '{"seed": 1}',
                                     '{"stages": {"stage": "synthesize"}}'])
def test_pipeline_rejects_bad_manifests(tmp_path, capsys, content):
    path = tmp_path / "manifest.json"
    path.write_text(content)
    assert cli.main(["pipeline", "--config", str(path)]) == 2
    capsys.readouterr()


def test_pipeline_rejects_unknown_stage(tmp_path, capsys):
    code = run_manifest(tmp_path, {"stages": [{"stage": "deploy"}]})
    assert code == 2
    assert "deploy" in capsys.readouterr().err


# ---------------------------------------------------------------- console script


def test_console_script_is_installed():
    exe = shutil.which("fieldtriage")
    assert exe is not None
    result = subprocess.run([exe, "--help"], capture_output=True, text=True,
                            timeout=60)
    assert result.returncode == 0
    assert "simulate" in result.stdout


def test_serve_subcommand_announces_address_and_serves(tmp_path):
    exe = shutil.which("fieldtriage")
    assert exe is not None
    proc = subprocess.Popen(
        [exe, "serve", "--log", str(tmp_path / "events.jsonl"), "--port", "0"],
        stdout=subprocess.PIPE, text=True)
    try:
        line = proc.stdout.readline().strip()
        assert line.startswith("serving on http://")
        base_url = line.split()[-1]
        deadline = time.time() + 10
        while True:
            try:
                resp = requests.get(base_url + "/api/victims", timeout=1)
                break
            except requests.RequestException:
                if time.time() > deadline:
                    raise
                time.sleep(0.05)
        assert resp.status_code == 200
        assert resp.json() == []
    finally:
        proc.terminate()
        proc.wait(timeout=10)
