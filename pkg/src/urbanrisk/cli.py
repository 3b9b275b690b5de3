"""Command-line surface: generate, split, train, evaluate, condition,
scenario, export-layer, serve.

Every subcommand exits 0 on success and 1 with a one-line machine-parsable
``error: <code>: <message>`` on stderr otherwise; unknown flags exit 2 with
usage text. All randomness sits behind an explicit --seed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from urbanrisk.data.io import (
    load_dataset_dir,
    load_toml_config,
    save_dataset_dir,
)
from urbanrisk.data.synth import SynthConfig, synthesize_city
from urbanrisk.errors import UrbanRiskError
from urbanrisk.evaluation.report import build_report, subgroup_report
from urbanrisk.evaluation.splits import (
    SplitManifest,
    leakage_audit,
    spatial_block_split,
    temporal_split,
    unseen_city_split,
)
from urbanrisk.forecast.training import TrainConfig
from urbanrisk.network.access import accessibility_summary
from urbanrisk.network.condition import condition_network
from urbanrisk.network.layer import export_weight_layer, layer_to_json
from urbanrisk.network.model import HazardPolicy, HazardScenario
from urbanrisk.pipeline import Forecaster, ForecasterConfig, GraphSummaryProvider
from urbanrisk.scenario.prompts import InterventionPrompt
from urbanrisk.scenario.runner import run_counterfactual
from urbanrisk.service.app import ServiceState, create_app
from urbanrisk.service.store import build_risk_layer


def fail(code: str, message: str) -> None:
    click.echo(f"error: {code}: {message}", err=True)
    sys.exit(1)


def _load_data(data_dir: str):
    try:
        return load_dataset_dir(Path(data_dir))
    except (FileNotFoundError, ValueError, UrbanRiskError) as exc:
        fail("data-load", str(exc))


def _load_manifest(path: str) -> SplitManifest:
    try:
        return SplitManifest.from_json(Path(path).read_text(encoding="utf-8"))
    except (FileNotFoundError, ValueError, KeyError) as exc:
        fail("manifest-load", str(exc))


def _load_forecaster(path: str) -> Forecaster:
    try:
        return Forecaster.load(path)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        fail("model-load", str(exc))


@click.group()
def main() -> None:
    """Hazard-conditioned accessibility engine and scenario simulator."""


@main.command("generate-data")
@click.option("--config", "config_path", type=click.Path(), default=None, help="TOML config with a [synth] table.")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def generate_data(config_path, seed, out_dir):
    """Generate a synthetic city dataset into OUT."""
    try:
        cfg = SynthConfig()
        if config_path:
            doc = load_toml_config(Path(config_path))
            cfg = SynthConfig.from_mapping(doc.get("synth", {}))
        result = synthesize_city(cfg, seed=seed)
        save_dataset_dir(result, Path(out_dir))
    except UrbanRiskError as exc:
        fail("generate", str(exc))
    click.echo(
        f"generated {len(result.dataset.buildings)} records, "
        f"{len(result.network.edges)} edges, {len(result.scenarios)} scenarios -> {out_dir}"
    )


@main.command("split")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--regime", type=click.Choice(["temporal", "spatial-block", "unseen-city"]), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--train-end", type=int, default=2021, show_default=True)
@click.option("--val-end", type=int, default=2023, show_default=True)
@click.option("--cell-km", type=float, default=1.0, show_default=True)
@click.option("--test-frac", type=float, default=0.2, show_default=True)
@click.option("--held-out-city", type=str, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
def split(data_dir, regime, out_path, train_end, val_end, cell_km, test_frac, held_out_city, seed):
    """Build a split manifest with leakage controls."""
    _dataset, _net, _svc, _scen, _zones = _load_data(data_dir)
    records = _dataset.buildings if _dataset else []
    try:
        if regime == "temporal":
            manifest = temporal_split(records, train_end=train_end, val_end=val_end)
        elif regime == "spatial-block":
            manifest = spatial_block_split(records, cell_km=cell_km, test_frac=test_frac, seed=seed)
        else:
            if not held_out_city:
                fail("split", "--held-out-city is required for the unseen-city regime")
            manifest = unseen_city_split(records, held_out_city)
        audit = leakage_audit(manifest, records)
    except ValueError as exc:
        fail("split", str(exc))
    Path(out_path).write_text(manifest.to_json(), encoding="utf-8")
    click.echo(f"{regime} manifest -> {out_path} ({json.dumps(audit)})")


@main.command("train")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--manifest", "manifest_path", type=click.Path(), required=True)
@click.option("--out", "model_path", type=click.Path(), required=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--stage2-epochs", type=int, default=0, show_default=True)
@click.option("--batch-size", type=int, default=128, show_default=True)
@click.option("--learning-rate", type=float, default=2e-3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train_cmd(data_dir, manifest_path, model_path, epochs, stage2_epochs, batch_size, learning_rate, seed):
    """Fit the diffusion forecaster on the train partition."""
    dataset, network, service, _scen, _zones = _load_data(data_dir)
    manifest = _load_manifest(manifest_path)
    try:
        manifest.validate_partition(dataset.buildings)
        cn0 = condition_network(network, HazardScenario(scenario_id="free-flow"))
        graphs = GraphSummaryProvider(cn0, service)
        fc = Forecaster(ForecasterConfig(seed=seed))
        history = fc.fit(
            dataset.buildings,
            manifest,
            graphs,
            TrainConfig(epochs=epochs, batch_size=batch_size, learning_rate=learning_rate, seed=seed),
        )
        if stage2_epochs > 0:
            from urbanrisk.forecast.training import train as train_fn

            pairs = fc.build_pairs(dataset.buildings, manifest.assignments, "train")
            x0 = np.stack([fc.stats.encode_targets(f.targets.as_array()) for _, f, _ in pairs])
            cond = np.stack([fc.conditioning(r, graphs, h) for r, _, h in pairs])
            train_fn(
                x0,
                cond,
                fc.denoiser,
                fc.schedule,
                config=TrainConfig(
                    epochs=stage2_epochs,
                    batch_size=batch_size,
                    learning_rate=learning_rate / 4,
                    stage=2,
                    seed=seed + 1,
                ),
            )
        fc.save(model_path)
        Path(model_path).with_suffix(".history.csv").write_text(history.to_csv(), encoding="utf-8")
    except (ValueError, RuntimeError, UrbanRiskError) as exc:
        fail("train", str(exc))
    final = history.combined_series()[-1]
    click.echo(f"trained {epochs} epochs (final combined loss {final:.4f}) -> {model_path}")


@main.command("evaluate")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--manifest", "manifest_path", type=click.Path(), required=True)
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--out", "report_path", type=click.Path(), required=True)
@click.option("--n-samples", type=int, default=24, show_default=True)
@click.option("--top-q", type=float, default=10.0, show_default=True)
@click.option("--max-pairs", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def evaluate(data_dir, manifest_path, model_path, report_path, n_samples, top_q, max_pairs, seed):
    """Score the trained forecaster on the manifest's test partition."""
    dataset, network, service, scenarios, _zones = _load_data(data_dir)
    manifest = _load_manifest(manifest_path)
    fc = _load_forecaster(model_path)
    try:
        manifest.validate_partition(dataset.buildings)
        pairs = fc.build_pairs(dataset.buildings, manifest.assignments, "test")
        if not pairs:
            fail("evaluate", "manifest has no usable test records for the trained horizons")
        pairs = pairs[:max_pairs]
        cn0 = condition_network(network, HazardScenario(scenario_id="free-flow"))
        graphs = GraphSummaryProvider(cn0, service)
        feats = [p[0] for p in pairs]
        futs = [p[1] for p in pairs]
        sets_ = fc.predict(feats, graphs, horizon=pairs[0][2], n=n_samples, seed=seed)

        truth = np.array([f.targets.flood_depth for f in futs])
        pred = fc.predict_mean(sets_, "flood_depth")
        # high-risk class: above the train-partition 80th percentile
        train_depths = [
            r.targets.flood_depth
            for r in dataset.buildings
            if manifest.assignments[r.id] == "train" and r.targets
        ]
        threshold = float(np.percentile(train_depths, 80))
        outcomes = (truth > threshold).astype(int)
        probs = np.array(
            [float(np.mean(s.samples[:, 0] > threshold)) for s in sets_]
        )
        lows = np.array([s.ci_low[0] for s in sets_])
        highs = np.array([s.ci_high[0] for s in sets_])

        report = build_report(
            y_true_class=outcomes,
            y_pred_class=(probs >= 0.5).astype(int),
            y_true_reg=truth,
            y_pred_reg=pred,
            probs=probs,
            outcomes=outcomes,
            ci_lows=lows,
            ci_highs=highs,
            truths=truth,
            scores=pred,
            risk_labels=outcomes,
            record_ids=[f.id for f in futs],
            top_q=top_q,
        )
        if scenarios:
            cn = condition_network(network, scenarios[0])
            nodes = sorted({b.node_attachment for b in feats if b.node_attachment})
            summary = accessibility_summary(
                cn, nodes, service.emergency_nodes, service.shelter_nodes, 900.0
            )
            report.values["reachability_rate"] = summary.reachability_rate
            report.values["mean_hazard_travel_time_s"] = summary.mean_travel_time_s
            report.values["mean_redundancy"] = summary.mean_redundancy

        # subgroup diagnostics across income quintiles of the feature records
        incomes = np.array([float(r.features["demo"][1]) for r in feats])
        train_incomes = [
            float(r.features["demo"][1])
            for r in dataset.buildings
            if manifest.assignments[r.id] == "train"
        ]
        edges_q = np.percentile(train_incomes, [20, 40, 60, 80])
        strata = [f"income-q{int(np.searchsorted(edges_q, v)) + 1}" for v in incomes]
        sub = subgroup_report(strata, outcomes, (probs >= 0.5).astype(int), probs)
        report.subgroups = sub.subgroups
        report.gaps = sub.gaps
        report.notes.extend(sub.notes)
        report.values["high_risk_threshold_m"] = threshold
        report.values["n_test_pairs"] = len(pairs)
        Path(report_path).write_text(report.to_json(), encoding="utf-8")
        Path(report_path).with_suffix(".reliability.csv").write_text(
            report.reliability_csv(), encoding="utf-8"
        )
    except (ValueError, KeyError, UrbanRiskError) as exc:
        fail("evaluate", str(exc))
    click.echo(
        f"evaluated {len(pairs)} pairs: mae={report.values['mae']:.4f} "
        f"ece={report.values['ece']:.4f} coverage={report.values['coverage_90']:.3f} -> {report_path}"
    )


@main.command("condition")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--scenario-id", type=str, required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--depth-free-m", type=float, default=0.10, show_default=True)
@click.option("--depth-impassable-m", type=float, default=0.50, show_default=True)
@click.option("--inflation-per-m", type=float, default=4.0, show_default=True)
@click.option("--timestamp", type=str, default="1970-01-01T00:00:00Z", show_default=True)
def condition(data_dir, scenario_id, out_path, depth_free_m, depth_impassable_m, inflation_per_m, timestamp):
    """Condition the network on a hazard scenario and export the weight layer."""
    _dataset, network, _svc, scenarios, _zones = _load_data(data_dir)
    match = [sc for sc in scenarios if sc.scenario_id == scenario_id]
    if not match:
        fail("condition", f"unknown scenario id {scenario_id!r}")
    try:
        policy = HazardPolicy(depth_free_m, depth_impassable_m, inflation_per_m)
        cn = condition_network(network, match[0], policy)
    except ValueError as exc:
        fail("condition", str(exc))
    Path(out_path).write_text(layer_to_json(export_weight_layer(cn, timestamp)), encoding="utf-8")
    removed = sum(1 for s in cn.states.values() if s.removed)
    click.echo(f"conditioned {len(cn.states)} edges ({removed} removed) -> {out_path}")


@main.command("scenario")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--prompt", "prompt_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--scenario-id", type=str, default=None, help="Default: full generated ensemble.")
@click.option("--n-samples", type=int, default=25, show_default=True)
@click.option("--max-buildings", type=int, default=50, show_default=True)
@click.option("--sensitivity/--no-sensitivity", default=True, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def scenario_cmd(data_dir, model_path, prompt_path, out_path, scenario_id, n_samples, max_buildings, sensitivity, seed):
    """Run a counterfactual intervention scenario."""
    dataset, network, service, scenarios, _zones = _load_data(data_dir)
    fc = _load_forecaster(model_path)
    try:
        prompt = InterventionPrompt.from_dict(
            json.loads(Path(prompt_path).read_text(encoding="utf-8"))
        )
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        fail("prompt", str(exc))
    ensemble = scenarios
    if scenario_id is not None:
        ensemble = [sc for sc in scenarios if sc.scenario_id == scenario_id]
        if not ensemble:
            fail("scenario", f"unknown scenario id {scenario_id!r}")
    try:
        result = run_counterfactual(
            prompt,
            dataset.buildings[:max_buildings],
            network,
            ensemble,
            service,
            fc,
            n_samples=n_samples,
            seed=seed,
            sensitivity=sensitivity,
        )
    except (ValueError, UrbanRiskError) as exc:
        fail("scenario", str(exc))
    Path(out_path).write_text(
        json.dumps(result.to_dict(), sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )
    delta = result.primary.accessibility_delta["mean_travel_time_s"]
    click.echo(f"scenario {prompt.prompt_id} done (mean_T delta {delta}) -> {out_path}")


@main.command("export-layer")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--scenario-id", type=str, default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--version", type=int, default=1, show_default=True)
@click.option("--cadence-s", type=int, default=900, show_default=True)
@click.option("--tau-s", type=float, default=900.0, show_default=True)
@click.option("--timestamp", type=str, default="1970-01-01T00:00:00Z", show_default=True)
def export_layer(data_dir, scenario_id, out_path, version, cadence_s, tau_s, timestamp):
    """Build a full risk layer (weights + zone summaries) as JSON."""
    dataset, network, service, scenarios, zones = _load_data(data_dir)
    hazard = HazardScenario(scenario_id="free-flow")
    if scenario_id is not None:
        match = [sc for sc in scenarios if sc.scenario_id == scenario_id]
        if not match:
            fail("export-layer", f"unknown scenario id {scenario_id!r}")
        hazard = match[0]
    try:
        from urbanrisk.pipeline import building_key

        cn = condition_network(network, hazard)
        by_zone: dict[str, list[str]] = {}
        for b in dataset.buildings:
            if b.node_attachment:
                zone = zones.get(b.id) or zones.get(building_key(b), "unzoned")
                by_zone.setdefault(zone, []).append(b.node_attachment)
        layer = build_risk_layer(
            cn, by_zone, service, version=version, generated_at=timestamp,
            tau_s=tau_s, cadence_s=cadence_s,
        )
    except (ValueError, UrbanRiskError) as exc:
        fail("export-layer", str(exc))
    Path(out_path).write_text(
        json.dumps(layer.to_dict(), sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )
    click.echo(f"risk layer v{layer.version} with {len(layer.zone_summaries)} zones -> {out_path}")


@main.command("serve")
@click.option("--data", "data_dir", type=click.Path(), required=True)
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--cadence-s", type=int, default=900, show_default=True)
@click.option("--scenario-id", type=str, default=None, help="Hazard scenario to publish; default free flow.")
def serve(data_dir, model_path, host, port, cadence_s, scenario_id):
    """Publish the risk layer and serve the scenario API."""
    dataset, network, service, scenarios, zones = _load_data(data_dir)
    forecaster = _load_forecaster(model_path) if model_path else None
    state = ServiceState(
        network=network,
        service_points=service,
        scenarios=scenarios,
        buildings=dataset.buildings,
        zones=zones,
        forecaster=forecaster,
        cadence_s=cadence_s,
    )
    try:
        state.publish_conditions(scenario_id)
    except (ValueError, KeyError, UrbanRiskError) as exc:
        fail("serve", str(exc))
    state.start_cadence_publisher(scenario_id)
    app = create_app(state)

    import uvicorn

    click.echo(f"serving on http://{host}:{port} (layer v{state.store.version}, cadence {cadence_s}s)")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
