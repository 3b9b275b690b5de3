"""The deterministic edit map: interventions rewrite features and networks.

Building edits touch only selected records and leave everything else
bit-identical. Network edits rescale the hazard-induced inflation excess on
designated evacuation edges; removal always dominates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from urbanrisk.data.records import BuildingRecord, feature_index
from urbanrisk.network.model import ConditionedNetwork, Edge, EdgeState, RoadNetwork
from urbanrisk.scenario.prompts import (
    InterventionKind,
    InterventionPrompt,
    damage_multiplier,
    flood_multiplier,
    road_multiplier,
)

_IMPERV = feature_index("infra", "imperviousness")
_DRAIN = feature_index("infra", "drainage_capacity")
_SCORE = feature_index("struct", "structural_score")
_DAMAGE = feature_index("struct", "damage_probability")


@dataclass
class EditReport:
    prompt_id: str
    building_edits: dict[str, dict] = field(default_factory=dict)
    edge_edits: dict[str, dict] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "prompt_id": self.prompt_id,
            "building_edits": self.building_edits,
            "edge_edits": self.edge_edits,
            "warnings": self.warnings,
        }


def apply_building_edits(
    prompt: InterventionPrompt, buildings: Sequence[BuildingRecord]
) -> tuple[list[BuildingRecord], EditReport]:
    """Apply the prompt's feature edits to selected buildings.

    Unselected records are returned as-is (the same objects), so locality is
    bit-exact by construction.
    """
    report = EditReport(prompt_id=prompt.prompt_id)
    if prompt.kind == InterventionKind.TRANSPORTATION_UPGRADE:
        # Network-side prompt: building features are untouched.
        return list(buildings), report

    selected = [b for b in buildings if prompt.selector.matches(b.id)]
    if not selected:
        report.warnings.append("selector matched no building; empty edit")
        return list(buildings), report

    d_imp = prompt.deltas["imperviousness_reduction"]
    d_drain = prompt.deltas["drainage_gain"]
    d_str = prompt.deltas["structural_points"]
    m_flood = flood_multiplier(d_drain)
    m_dam = damage_multiplier(d_str)

    edited: dict[str, BuildingRecord] = {}
    for rec in selected:
        if prompt.kind == InterventionKind.GREEN_INFRASTRUCTURE:
            infra = rec.features["infra"].copy()
            before_imp, before_drain = infra[_IMPERV], infra[_DRAIN]
            infra[_IMPERV] = max(0.0, infra[_IMPERV] - d_imp)
            infra[_DRAIN] = infra[_DRAIN] * (1.0 + d_drain)
            new = rec.with_features({"infra": infra})
            if rec.targets is not None:
                new = replace(
                    new,
                    targets=replace(rec.targets, flood_depth=rec.targets.flood_depth * m_flood),
                )
            report.building_edits[rec.id] = {
                "m_flood": m_flood,
                "delta_imperviousness": infra[_IMPERV] - before_imp,
                "delta_drainage_capacity": infra[_DRAIN] - before_drain,
            }
        else:  # building retrofit
            struct = rec.features["struct"].copy()
            before_score, before_dam = struct[_SCORE], struct[_DAMAGE]
            struct[_SCORE] = min(100.0, struct[_SCORE] + d_str)
            struct[_DAMAGE] = struct[_DAMAGE] * m_dam
            new = rec.with_features({"struct": struct})
            report.building_edits[rec.id] = {
                "m_dam": m_dam,
                "delta_structural_score": struct[_SCORE] - before_score,
                "delta_damage_probability": struct[_DAMAGE] - before_dam,
            }
        edited[rec.id] = new

    return [edited.get(b.id, b) for b in buildings], report


def _rebuild_with_capacity(base: RoadNetwork, capacity_updates: dict[str, float]) -> RoadNetwork:
    edges = []
    for eid, e in base.edges.items():
        if eid in capacity_updates:
            edges.append(
                Edge(
                    id=e.id,
                    frm=e.frm,
                    to=e.to,
                    travel_time_s=e.travel_time_s,
                    capacity=capacity_updates[eid],
                    is_evacuation=e.is_evacuation,
                )
            )
        else:
            edges.append(e)
    return RoadNetwork(list(base.nodes.values()), edges)


def apply_network_edits(
    prompt: InterventionPrompt, cn: ConditionedNetwork
) -> tuple[ConditionedNetwork, EditReport]:
    """Transportation upgrade: add capacity and damp inflation on evacuation edges.

    The road multiplier scales the inflation excess, multiplier' =
    1 + (multiplier - 1) * m_road, which keeps multiplier' >= 1 and makes a
    zero delta the exact identity. Removed edges stay removed; selected edges
    that are not evacuation-flagged are skipped with a warning.
    """
    if prompt.kind != InterventionKind.TRANSPORTATION_UPGRADE:
        raise ValueError(f"network edits require a transportation_upgrade prompt, got {prompt.kind.value}")
    report = EditReport(prompt_id=prompt.prompt_id)
    d_cap = prompt.deltas["capacity_gain"]
    m_road = road_multiplier(d_cap)

    capacity_updates: dict[str, float] = {}
    state_updates: dict[str, EdgeState] = {}
    for eid in sorted(cn.base.edges):
        if not prompt.selector.matches(eid):
            continue
        edge = cn.base.edges[eid]
        if not edge.is_evacuation:
            report.warnings.append(f"edge {eid} is not an evacuation edge; skipped")
            continue
        st = cn.states[eid]
        if st.removed:
            report.edge_edits[eid] = {"removed": True}
            continue
        new_mult = 1.0 + (st.multiplier - 1.0) * m_road
        capacity_updates[eid] = edge.capacity + d_cap
        state_updates[eid] = EdgeState(removed=False, multiplier=new_mult)
        report.edge_edits[eid] = {
            "m_road": m_road,
            "multiplier_before": st.multiplier,
            "multiplier_after": new_mult,
            "capacity_delta": d_cap,
        }

    if not report.edge_edits and not report.warnings:
        report.warnings.append("selector matched no edge; empty edit")

    if not capacity_updates and not state_updates:
        return cn, report

    new_base = _rebuild_with_capacity(cn.base, capacity_updates)
    states = dict(cn.states)
    states.update(state_updates)
    return (
        ConditionedNetwork(
            new_base,
            states,
            scenario_id=cn.scenario_id,
            policy_id=f"{cn.policy_id}+{prompt.prompt_id}",
        ),
        report,
    )
