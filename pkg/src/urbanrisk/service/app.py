"""HTTP surface: current risk layer, edge-weight queries, scenario runs.

Single process, many concurrent readers, one publisher. Scenario runs are
deterministic under (request, seed), so a repeated request returns a
byte-identical body.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from urbanrisk.data.records import BuildingRecord
from urbanrisk.errors import NotTrainedError, StaleLayerError
from urbanrisk.network.condition import condition_network
from urbanrisk.network.model import HazardPolicy, HazardScenario, RoadNetwork, ServicePoints
from urbanrisk.pipeline import Forecaster
from urbanrisk.scenario.prompts import InterventionPrompt, TargetSelector
from urbanrisk.scenario.runner import run_counterfactual
from urbanrisk.service.schemas import SCHEMA_VERSION, ScenarioRequest, ScenarioResponse
from urbanrisk.service.store import DEFAULT_CADENCE_S, LayerStore, build_risk_layer

logger = logging.getLogger(__name__)


@dataclass
class ServiceState:
    network: RoadNetwork
    service_points: ServicePoints
    scenarios: list[HazardScenario]
    buildings: list[BuildingRecord]
    zones: dict[str, str]  # building id -> zone id
    forecaster: Forecaster | None = None
    store: LayerStore = field(default_factory=LayerStore)
    policy: HazardPolicy = field(default_factory=HazardPolicy)
    cadence_s: int = DEFAULT_CADENCE_S
    tau_s: float = 900.0

    def zone_nodes(self) -> dict[str, list[str]]:
        from urbanrisk.pipeline import building_key

        out: dict[str, list[str]] = {}
        for b in self.buildings:
            if b.node_attachment:
                zone = self.zones.get(b.id) or self.zones.get(building_key(b), "unzoned")
                out.setdefault(zone, []).append(b.node_attachment)
        return out

    def scenario_by_id(self, scenario_id: str) -> HazardScenario:
        for sc in self.scenarios:
            if sc.scenario_id == scenario_id:
                return sc
        raise KeyError(scenario_id)

    def publish_conditions(self, scenario_id: str | None = None, generated_at: str | None = None) -> int:
        """Condition on a hazard scenario (or free flow) and publish."""
        hazard = (
            self.scenario_by_id(scenario_id)
            if scenario_id
            else HazardScenario(scenario_id="free-flow")
        )
        cn = condition_network(self.network, hazard, self.policy)
        layer = build_risk_layer(
            cn,
            self.zone_nodes(),
            self.service_points,
            version=self.store.next_version(),
            generated_at=generated_at or datetime.now(timezone.utc).isoformat(),
            tau_s=self.tau_s,
            cadence_s=self.cadence_s,
        )
        return self.store.publish(layer)

    def start_cadence_publisher(self, scenario_id: str | None = None) -> threading.Thread:
        """Republish on the configured cadence until the process exits."""

        def loop():
            stop = threading.Event()
            while not stop.wait(self.cadence_s):
                try:
                    self.publish_conditions(scenario_id)
                except Exception:  # pragma: no cover - defensive logging path
                    logger.exception("cadence publish failed")

        thread = threading.Thread(target=loop, daemon=True, name="layer-cadence")
        thread.start()
        return thread


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="urbanrisk", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.urbanrisk = state

    @app.get("/health")
    def health() -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "layer_version": state.store.version,
            "forecaster_loaded": state.forecaster is not None,
        }

    @app.get("/layers/current")
    def current_layer() -> JSONResponse:
        layer = state.store.snapshot()
        if layer is None:
            raise HTTPException(status_code=503, detail="no layer published yet")
        return JSONResponse(layer.to_dict())

    @app.get("/layers/current/edges")
    def edge_weights(ids: str = Query(..., description="comma-separated edge ids")) -> dict:
        requested = [e for e in ids.split(",") if e]
        if not requested:
            raise HTTPException(status_code=400, detail="no edge ids given")
        answer = state.store.query_edges(requested)
        if answer is None:
            raise HTTPException(status_code=503, detail="no layer published yet")
        results, version = answer
        return {"schema_version": SCHEMA_VERSION, "layer_version": version, "edges": results}

    @app.post("/scenarios", response_model=ScenarioResponse)
    def run_scenario(request: ScenarioRequest) -> ScenarioResponse:
        if state.forecaster is None:
            raise HTTPException(status_code=503, detail="forecaster not loaded")
        try:
            prompt = InterventionPrompt(
                kind=request.prompt.kind,
                deltas=request.prompt.deltas,
                selector=TargetSelector(
                    all=request.prompt.selector.all, ids=tuple(request.prompt.selector.ids)
                ),
                label=request.prompt.label,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"invalid prompt: {exc}")

        if request.hazard_scenario_id is not None:
            try:
                ensemble = [state.scenario_by_id(request.hazard_scenario_id)]
            except KeyError:
                raise HTTPException(
                    status_code=404,
                    detail=f"unknown hazard scenario {request.hazard_scenario_id!r}",
                )
        else:
            ensemble = state.scenarios or [HazardScenario(scenario_id="free-flow")]

        opts = request.options
        buildings = state.buildings[: opts.max_buildings]
        try:
            result = run_counterfactual(
                prompt,
                buildings,
                state.network,
                ensemble,
                state.service_points,
                state.forecaster,
                policy=state.policy,
                tau_s=opts.tau_s,
                n_samples=opts.n_samples,
                seed=opts.seed,
                sensitivity=opts.sensitivity,
            )
        except NotTrainedError as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        return ScenarioResponse(
            request_id=request.request_id,
            layer_version=state.store.version,
            result=result.to_dict(),
            layer_deltas=_layer_deltas(state, result.weight_layer),
        )

    return app


def _layer_deltas(state: ServiceState, edited_layer: dict) -> dict:
    """Per-edge multiplier changes of the scenario layer vs the published one."""
    current = state.store.snapshot()
    if current is None or not edited_layer:
        return {}
    base = {
        f["properties"]["edge_id"]: f["properties"]
        for f in current.weight_layer.get("features", [])
    }
    deltas = {}
    for feat in edited_layer.get("features", []):
        props = feat["properties"]
        eid = props["edge_id"]
        before = base.get(eid, {})
        b_mult = before.get("multiplier")
        a_mult = props.get("multiplier")
        if before.get("removed") != props.get("removed") or b_mult != a_mult:
            deltas[eid] = {
                "before": {"multiplier": b_mult, "removed": bool(before.get("removed"))},
                "after": {"multiplier": a_mult, "removed": bool(props.get("removed"))},
            }
    return deltas


def raise_for_stale(exc: StaleLayerError) -> None:  # pragma: no cover - helper
    raise HTTPException(status_code=409, detail=str(exc))
