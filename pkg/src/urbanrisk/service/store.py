"""Published risk layers and their atomic store.

Readers always see a complete layer: publication swaps one reference to an
immutable composite (layer + prebuilt edge lookup), so a torn read is
impossible by construction. Each layer carries a content checksum that
readers can re-verify; the concurrency hammer test does exactly that.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from urbanrisk.errors import StaleLayerError
from urbanrisk.network.access import accessibility_summary
from urbanrisk.network.layer import export_weight_layer
from urbanrisk.network.model import ConditionedNetwork, ServicePoints

SCHEMA_VERSION = 1
DEFAULT_CADENCE_S = 900


def _content_checksum(doc: Mapping) -> str:
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


@dataclass(frozen=True)
class RiskLayer:
    version: int
    generated_at: str
    cadence_s: int
    weight_layer: dict  # GeoJSON FeatureCollection of edge multipliers
    zone_summaries: dict  # zone id -> reachability_rate / mean_T / mean_K
    checksum: str = ""

    def content_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "generated_at": self.generated_at,
            "cadence_s": self.cadence_s,
            "weight_layer": self.weight_layer,
            "zone_summaries": self.zone_summaries,
        }

    def to_dict(self) -> dict:
        doc = self.content_dict()
        doc["checksum"] = self.checksum
        return doc

    def verify(self) -> bool:
        return self.checksum == _content_checksum(self.content_dict())

    @classmethod
    def create(
        cls,
        version: int,
        generated_at: str,
        weight_layer: dict,
        zone_summaries: dict,
        cadence_s: int = DEFAULT_CADENCE_S,
    ) -> "RiskLayer":
        layer = cls(
            version=version,
            generated_at=generated_at,
            cadence_s=cadence_s,
            weight_layer=weight_layer,
            zone_summaries=zone_summaries,
        )
        return cls(
            version=version,
            generated_at=generated_at,
            cadence_s=cadence_s,
            weight_layer=weight_layer,
            zone_summaries=zone_summaries,
            checksum=_content_checksum(layer.content_dict()),
        )


def build_risk_layer(
    cn: ConditionedNetwork,
    building_nodes_by_zone: Mapping[str, Sequence[str]],
    service: ServicePoints,
    version: int,
    generated_at: str,
    tau_s: float = 900.0,
    cadence_s: int = DEFAULT_CADENCE_S,
) -> RiskLayer:
    """Assemble a publishable layer: edge multipliers plus per-zone summaries."""
    zone_summaries = {}
    for zone in sorted(building_nodes_by_zone):
        nodes = sorted(set(building_nodes_by_zone[zone]))
        if not nodes:
            continue
        summary = accessibility_summary(
            cn, nodes, service.emergency_nodes, service.shelter_nodes, tau_s
        )
        zone_summaries[zone] = {
            "reachability_rate": summary.reachability_rate,
            "mean_travel_time_s": summary.mean_travel_time_s,
            "mean_redundancy": summary.mean_redundancy,
            "n_buildings": summary.n_buildings,
        }
    return RiskLayer.create(
        version=version,
        generated_at=generated_at,
        weight_layer=export_weight_layer(cn, generated_at),
        zone_summaries=zone_summaries,
        cadence_s=cadence_s,
    )


@dataclass(frozen=True)
class _Published:
    layer: RiskLayer
    edge_lookup: dict  # edge id -> {"multiplier": x} | {"removed": True}


class LayerStore:
    """Single-publisher, many-reader store with atomic replacement."""

    def __init__(self):
        self._current: _Published | None = None
        self._publish_lock = threading.Lock()

    @property
    def version(self) -> int:
        cur = self._current
        return cur.layer.version if cur else 0

    def next_version(self) -> int:
        return self.version + 1

    def publish(self, layer: RiskLayer) -> int:
        """Swap in a new layer; rejects stale versions and bad checksums."""
        if not layer.verify():
            raise ValueError("layer checksum does not match its content")
        lookup = {}
        for feat in layer.weight_layer.get("features", []):
            props = feat["properties"]
            if props.get("removed"):
                lookup[props["edge_id"]] = {"removed": True}
            else:
                lookup[props["edge_id"]] = {"multiplier": props["multiplier"]}
        published = _Published(layer=layer, edge_lookup=lookup)
        with self._publish_lock:
            current = self._current
            if current is not None and layer.version <= current.layer.version:
                raise StaleLayerError(
                    f"version {layer.version} is not newer than {current.layer.version}"
                )
            self._current = published  # atomic reference swap
        return layer.version

    def snapshot(self) -> RiskLayer | None:
        cur = self._current
        return cur.layer if cur else None

    def query_edges(self, edge_ids: Iterable[str]) -> tuple[dict, int] | None:
        """Current multipliers for the requested edges; None when unpublished.

        Unknown ids get a not_found marker; known ids are still answered.
        """
        cur = self._current
        if cur is None:
            return None
        results = {}
        for eid in edge_ids:
            results[eid] = cur.edge_lookup.get(eid, {"not_found": True})
        return results, cur.layer.version
