"""Network domain types: physical road layer, service points, hazard fields,
and the hazard-conditioned network.

All types are immutable after construction; queries are read-only and safe
to run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

FACILITY_KINDS = ("hospital", "fire_station", "shelter")


@dataclass(frozen=True)
class Node:
    id: str
    lat: float
    lon: float


@dataclass(frozen=True)
class Edge:
    id: str
    frm: str
    to: str
    travel_time_s: float
    capacity: float = 1.0
    is_evacuation: bool = False

    def __post_init__(self):
        if self.frm == self.to:
            raise ValueError(f"edge {self.id}: self-loops are not allowed")
        if not (math.isfinite(self.travel_time_s) and self.travel_time_s > 0):
            raise ValueError(f"edge {self.id}: travel time must be > 0, got {self.travel_time_s}")
        if self.capacity < 0:
            raise ValueError(f"edge {self.id}: capacity must be >= 0")


class RoadNetwork:
    """Directed travel-time graph. Validates referential integrity up front."""

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge]):
        self.nodes: dict[str, Node] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ValueError(f"duplicate node id {n.id!r}")
            self.nodes[n.id] = n
        self.edges: dict[str, Edge] = {}
        self._out: dict[str, list[Edge]] = {nid: [] for nid in self.nodes}
        self._in: dict[str, list[Edge]] = {nid: [] for nid in self.nodes}
        for e in edges:
            if e.id in self.edges:
                raise ValueError(f"duplicate edge id {e.id!r}")
            if e.frm not in self.nodes:
                raise ValueError(f"edge {e.id}: unknown node {e.frm!r}")
            if e.to not in self.nodes:
                raise ValueError(f"edge {e.id}: unknown node {e.to!r}")
            self.edges[e.id] = e
            self._out[e.frm].append(e)
            self._in[e.to].append(e)
        # Deterministic adjacency order regardless of input order.
        for adj in (self._out, self._in):
            for nid in adj:
                adj[nid].sort(key=lambda e: e.id)

    def out_edges(self, node_id: str) -> list[Edge]:
        return self._out[node_id]

    def in_edges(self, node_id: str) -> list[Edge]:
        return self._in[node_id]

    def degree(self, node_id: str) -> int:
        return len(self._out[node_id]) + len(self._in[node_id])

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.nodes


@dataclass(frozen=True)
class Facility:
    kind: str
    node_id: str

    def __post_init__(self):
        if self.kind not in FACILITY_KINDS:
            raise ValueError(f"unknown facility kind {self.kind!r}; expected {FACILITY_KINDS}")


class ServicePoints:
    """Emergency facilities and shelters attached to network nodes."""

    def __init__(self, facilities: Iterable[Facility], network: RoadNetwork):
        self.facilities = sorted(facilities, key=lambda f: (f.kind, f.node_id))
        for f in self.facilities:
            if f.node_id not in network:
                raise ValueError(f"facility {f.kind} at unknown node {f.node_id!r}")

    def nodes_of_kind(self, *kinds: str) -> set[str]:
        return {f.node_id for f in self.facilities if f.kind in kinds}

    @property
    def emergency_nodes(self) -> set[str]:
        return self.nodes_of_kind("hospital", "fire_station")

    @property
    def shelter_nodes(self) -> set[str]:
        return self.nodes_of_kind("shelter")


@dataclass(frozen=True)
class HazardScenario:
    """Per-edge flood depths in meters; edges absent from the map have depth 0."""

    scenario_id: str
    edge_depth_m: Mapping[str, float] = field(default_factory=dict)
    probability_weight: float | None = None

    def __post_init__(self):
        for eid, d in self.edge_depth_m.items():
            if not (math.isfinite(d) and d >= 0):
                raise ValueError(f"scenario {self.scenario_id}: edge {eid} depth invalid: {d!r}")

    def depth(self, edge_id: str) -> float:
        return float(self.edge_depth_m.get(edge_id, 0.0))


@dataclass(frozen=True)
class HazardPolicy:
    """Piecewise-linear travel-time inflation by flood depth.

    Below depth_free_m the edge is untouched; from depth_free_m to
    depth_impassable_m the multiplier grows linearly with slope
    inflation_per_m; at or above depth_impassable_m the edge is removed.
    Defaults reflect common vehicle fording limits, configurable throughout.
    """

    depth_free_m: float = 0.10
    depth_impassable_m: float = 0.50
    inflation_per_m: float = 4.0

    def __post_init__(self):
        if not 0 <= self.depth_free_m < self.depth_impassable_m:
            raise ValueError("require 0 <= depth_free_m < depth_impassable_m")
        if self.inflation_per_m < 0:
            raise ValueError("inflation_per_m must be >= 0")

    def multiplier(self, depth_m: float) -> float | None:
        """Weight multiplier for a given depth; None means the edge is removed."""
        if depth_m >= self.depth_impassable_m:
            return None
        if depth_m < self.depth_free_m:
            return 1.0
        return 1.0 + self.inflation_per_m * (depth_m - self.depth_free_m)


@dataclass(frozen=True)
class EdgeState:
    """Conditioned state of one edge: removed, or retained with a multiplier >= 1."""

    removed: bool
    multiplier: float | None

    def __post_init__(self):
        if self.removed and self.multiplier is not None:
            raise ValueError("removed edges carry no multiplier")
        if not self.removed:
            if self.multiplier is None or self.multiplier < 1.0:
                raise ValueError(f"retained edge multiplier must be >= 1, got {self.multiplier}")


class ConditionedNetwork:
    """A road network under a hazard scenario: per-edge removal or inflation."""

    def __init__(
        self,
        base: RoadNetwork,
        states: Mapping[str, EdgeState],
        scenario_id: str = "",
        policy_id: str = "",
    ):
        missing = set(base.edges) - set(states)
        extra = set(states) - set(base.edges)
        if missing or extra:
            raise ValueError(
                f"edge states must cover exactly the base edges "
                f"(missing={sorted(missing)[:3]}, extra={sorted(extra)[:3]})"
            )
        self.base = base
        self.states = dict(states)
        self.scenario_id = scenario_id
        self.policy_id = policy_id

    def is_retained(self, edge_id: str) -> bool:
        return not self.states[edge_id].removed

    def multiplier(self, edge_id: str) -> float:
        st = self.states[edge_id]
        if st.removed:
            raise ValueError(f"edge {edge_id} is removed; it has no multiplier")
        return float(st.multiplier)

    def weight(self, edge: Edge) -> float:
        """Effective travel time of a retained edge."""
        return edge.travel_time_s * self.multiplier(edge.id)

    def retained_out_edges(self, node_id: str) -> list[Edge]:
        return [e for e in self.base.out_edges(node_id) if self.is_retained(e.id)]

    def retained_in_edges(self, node_id: str) -> list[Edge]:
        return [e for e in self.base.in_edges(node_id) if self.is_retained(e.id)]

    def with_states(self, updates: Mapping[str, EdgeState], policy_id: str | None = None):
        merged = dict(self.states)
        merged.update(updates)
        return ConditionedNetwork(
            self.base,
            merged,
            scenario_id=self.scenario_id,
            policy_id=self.policy_id if policy_id is None else policy_id,
        )
