from __future__ import annotations

import json
import pytest
from click.testing import CliRunner

from urbanrisk.cli import main

CONFIG_TOML = """
[synth]
city_id = "minitown"
n_buildings = 40
n_years = 15
grid_side = 5
extent_km = 3.0
facilities_per_kind = 2
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Run the full CLI flow once; individual tests inspect the artifacts."""
    root = tmp_path_factory.mktemp("cliflow")
    (root / "config.toml").write_text(CONFIG_TOML, encoding="utf-8")
    runner = CliRunner()

    def run(*args, expect=0):
        result = runner.invoke(main, list(args), catch_exceptions=False)
        assert result.exit_code == expect, result.output
        return result

    run("generate-data", "--config", str(root / "config.toml"), "--seed", "7",
        "--out", str(root / "data"))
    run("split", "--data", str(root / "data"), "--regime", "temporal",
        "--out", str(root / "manifest.json"))
    run("train", "--data", str(root / "data"), "--manifest", str(root / "manifest.json"),
        "--out", str(root / "model.npz"), "--epochs", "6", "--seed", "3")
    return root, run


class TestGenerate:
    def test_deterministic_output_files(self, tmp_path):
        runner = CliRunner()
        (tmp_path / "config.toml").write_text(CONFIG_TOML, encoding="utf-8")
        for out in ("a", "b"):
            result = runner.invoke(
                main,
                ["generate-data", "--config", str(tmp_path / "config.toml"),
                 "--seed", "7", "--out", str(tmp_path / out)],
                catch_exceptions=False,
            )
            assert result.exit_code == 0
        for name in ("buildings.jsonl", "nodes.csv", "edges.csv", "facilities.csv", "zones.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_bad_config_named_error(self, tmp_path):
        (tmp_path / "bad.toml").write_text("[synth]\nn_buildings = 0\n", encoding="utf-8")
        result = CliRunner().invoke(
            main,
            ["generate-data", "--config", str(tmp_path / "bad.toml"),
             "--seed", "1", "--out", str(tmp_path / "x")],
        )
        assert result.exit_code == 1
        assert result.output.startswith("error: generate:") or "error: generate:" in result.output

    def test_unknown_flag_usage_exit_2(self):
        result = CliRunner().invoke(main, ["generate-data", "--frobnicate"])
        assert result.exit_code == 2


class TestSplitCommand:
    def test_spatial_manifest(self, workspace):
        root, run = workspace
        run("split", "--data", str(root / "data"), "--regime", "spatial-block",
            "--cell-km", "0.5", "--seed", "4", "--out", str(root / "spatial.json"))
        doc = json.loads((root / "spatial.json").read_text())
        assert doc["regime"] == "spatial_block"

    def test_unseen_city_requires_two_cities(self, workspace):
        root, run = workspace
        result = CliRunner().invoke(
            main,
            ["split", "--data", str(root / "data"), "--regime", "unseen-city",
             "--held-out-city", "minitown", "--out", str(root / "uc.json")],
        )
        assert result.exit_code == 1
        assert "error: split:" in result.output


class TestTrainEvaluate:
    def test_history_written(self, workspace):
        root, _ = workspace
        history = (root / "model.history.csv").read_text()
        assert history.startswith("epoch,")

    def test_evaluate_writes_report(self, workspace):
        root, run = workspace
        run("evaluate", "--data", str(root / "data"), "--manifest", str(root / "manifest.json"),
            "--model", str(root / "model.npz"), "--out", str(root / "report.json"),
            "--n-samples", "6", "--max-pairs", "60")
        report = json.loads((root / "report.json").read_text())
        assert "mae" in report["metrics"]
        assert 0 <= report["metrics"]["ece"] <= 1
        assert (root / "report.reliability.csv").exists()
        # subgroup diagnostics: income-quintile strata with gap summary
        assert any(k.startswith("income-q") for k in report.get("subgroups", {}))
        assert "accuracy" in report.get("gaps", {})

    def test_evaluate_without_test_records_fails_cleanly(self, workspace):
        root, _ = workspace
        manifest = json.loads((root / "manifest.json").read_text())
        manifest["assignments"] = {k: "train" for k in manifest["assignments"]}
        (root / "all-train.json").write_text(json.dumps(manifest))
        result = CliRunner().invoke(
            main,
            ["evaluate", "--data", str(root / "data"), "--manifest", str(root / "all-train.json"),
             "--model", str(root / "model.npz"), "--out", str(root / "r.json")],
        )
        assert result.exit_code == 1
        assert "error: evaluate:" in result.output


class TestConditionAndLayers:
    def test_condition_exports_geojson(self, workspace):
        root, run = workspace
        scenario_id = sorted(p.stem for p in (root / "data" / "scenarios").glob("*.csv"))[0]
        run("condition", "--data", str(root / "data"), "--scenario-id", scenario_id,
            "--out", str(root / "layer.geojson"))
        doc = json.loads((root / "layer.geojson").read_text())
        assert doc["type"] == "FeatureCollection"

    def test_condition_unknown_scenario(self, workspace):
        root, _ = workspace
        result = CliRunner().invoke(
            main,
            ["condition", "--data", str(root / "data"), "--scenario-id", "nope",
             "--out", str(root / "x.geojson")],
        )
        assert result.exit_code == 1
        assert "error: condition:" in result.output

    def test_export_layer_with_zones(self, workspace):
        root, run = workspace
        run("export-layer", "--data", str(root / "data"), "--out", str(root / "risk.json"),
            "--version", "1")
        doc = json.loads((root / "risk.json").read_text())
        assert doc["version"] == 1
        # zones must resolve: a 3 km city spans several 1 km zone cells
        assert len(doc["zone_summaries"]) > 1
        assert "unzoned" not in doc["zone_summaries"]
        assert doc["checksum"]


class TestScenarioCommand:
    def test_scenario_runs_and_reports_deltas(self, workspace):
        root, run = workspace
        prompt = {
            "kind": "green_infrastructure",
            "deltas": {"drainage_gain": 0.3},
            "selector": {"all": True},
            "label": "swales",
        }
        (root / "prompt.json").write_text(json.dumps(prompt))
        run("scenario", "--data", str(root / "data"), "--model", str(root / "model.npz"),
            "--prompt", str(root / "prompt.json"), "--out", str(root / "scenario.json"),
            "--n-samples", "6", "--max-buildings", "5", "--seed", "2")
        doc = json.loads((root / "scenario.json").read_text())
        assert [v["factor"] for v in doc["variants"]] == [0.5, 1.0, 1.5]
        assert doc["weight_layer"]["features"]

    def test_invalid_prompt_file(self, workspace):
        root, _ = workspace
        (root / "bad_prompt.json").write_text('{"kind": "terraform"}')
        result = CliRunner().invoke(
            main,
            ["scenario", "--data", str(root / "data"), "--model", str(root / "model.npz"),
             "--prompt", str(root / "bad_prompt.json"), "--out", str(root / "s.json")],
        )
        assert result.exit_code == 1
        assert "error: prompt:" in result.output
