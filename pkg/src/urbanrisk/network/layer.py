"""GeoJSON export of conditioned edge weights, and its lossless inverse.

One LineString feature per edge. Retained edges carry a ``multiplier``
property; removed edges carry ``removed: true`` and no multiplier. The
serialization is canonical (sorted keys, edge-id feature order, fixed
separators) so export -> import -> export is byte-identical.
"""

from __future__ import annotations

import json
from typing import Mapping

from urbanrisk.network.model import ConditionedNetwork, EdgeState, RoadNetwork

SCHEMA_VERSION = 1


def export_weight_layer(cn: ConditionedNetwork, generated_at: str) -> dict:
    """Build a GeoJSON FeatureCollection of per-edge hazard multipliers."""
    features = []
    for eid in sorted(cn.base.edges):
        e = cn.base.edges[eid]
        a, b = cn.base.nodes[e.frm], cn.base.nodes[e.to]
        props: dict = {"edge_id": eid, "scenario_id": cn.scenario_id, "generated_at": generated_at}
        st = cn.states[eid]
        if st.removed:
            props["removed"] = True
        else:
            props["multiplier"] = float(st.multiplier)
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[a.lon, a.lat], [b.lon, b.lat]],
                },
                "properties": props,
            }
        )
    return {
        "type": "FeatureCollection",
        "schema_version": SCHEMA_VERSION,
        "features": features,
    }


def layer_to_json(layer: Mapping) -> str:
    """Canonical byte-stable serialization of a weight layer."""
    return json.dumps(layer, sort_keys=True, separators=(",", ":"))


def import_weight_layer(document: Mapping | str, base: RoadNetwork) -> tuple[ConditionedNetwork, str]:
    """Rebuild a ConditionedNetwork from an exported layer.

    Returns the network and the generated_at stamp so a re-export can
    reproduce the original document exactly.
    """
    doc = json.loads(document) if isinstance(document, str) else document
    if doc.get("type") != "FeatureCollection":
        raise ValueError("weight layer must be a GeoJSON FeatureCollection")
    states: dict[str, EdgeState] = {}
    scenario_id = ""
    generated_at = ""
    for feat in doc.get("features", []):
        props = feat["properties"]
        eid = props["edge_id"]
        if eid not in base.edges:
            raise ValueError(f"layer references unknown edge {eid!r}")
        scenario_id = props.get("scenario_id", scenario_id)
        generated_at = props.get("generated_at", generated_at)
        if props.get("removed"):
            states[eid] = EdgeState(removed=True, multiplier=None)
        else:
            states[eid] = EdgeState(removed=False, multiplier=float(props["multiplier"]))
    missing = set(base.edges) - set(states)
    if missing:
        raise ValueError(f"layer missing edges: {sorted(missing)[:5]}")
    return ConditionedNetwork(base, states, scenario_id=scenario_id), generated_at
