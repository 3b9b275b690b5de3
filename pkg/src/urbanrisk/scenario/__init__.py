"""Intervention prompts, the deterministic feature-edit map, and counterfactual runs."""

from urbanrisk.scenario.prompts import (
    DELTA_RANGES,
    InterventionKind,
    InterventionPrompt,
    TargetSelector,
    damage_multiplier,
    flood_multiplier,
    road_multiplier,
)
from urbanrisk.scenario.edits import EditReport, apply_building_edits, apply_network_edits

__all__ = [
    "DELTA_RANGES",
    "InterventionKind",
    "InterventionPrompt",
    "TargetSelector",
    "flood_multiplier",
    "damage_multiplier",
    "road_multiplier",
    "EditReport",
    "apply_building_edits",
    "apply_network_edits",
]
