"""Building-level accessibility signals: reachability, travel time, redundancy.

Per-building evaluation is embarrassingly parallel; everything here is a pure
read of an immutable ConditionedNetwork.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from urbanrisk.network.flow import evacuation_redundancy
from urbanrisk.network.model import ConditionedNetwork
from urbanrisk.network.shortest import hazard_travel_time, shortest_route

DEFAULT_TAU_S = 900.0  # 15-minute budget


def reachability(
    cn: ConditionedNetwork,
    building_node: str,
    facility_nodes: Iterable[str],
    tau_s: float = DEFAULT_TAU_S,
) -> bool:
    """True when at least one facility is reachable within the time budget."""
    if tau_s <= 0:
        raise ValueError(f"tau must be > 0, got {tau_s}")
    return hazard_travel_time(cn, building_node, facility_nodes) <= tau_s


def reachability_prob(
    scenarios: Sequence[ConditionedNetwork],
    building_node: str,
    facility_nodes: Iterable[str],
    tau_s: float = DEFAULT_TAU_S,
    weights: Sequence[float] | None = None,
) -> float:
    """Fraction of scenarios under which the building is reachable.

    Uniform weights unless the ensemble provides probability weights.
    """
    if not scenarios:
        raise ValueError("scenario ensemble must be non-empty")
    facility_nodes = list(facility_nodes)
    if weights is None:
        weights = [1.0] * len(scenarios)
    if len(weights) != len(scenarios):
        raise ValueError("one weight per scenario required")
    total = float(sum(weights))
    if total <= 0:
        raise ValueError("scenario weights must sum to a positive value")
    hit = sum(
        w
        for cn, w in zip(scenarios, weights)
        if reachability(cn, building_node, facility_nodes, tau_s)
    )
    return hit / total


@dataclass(frozen=True)
class AccessibilitySummary:
    """Aggregate accessibility over a building set.

    mean_travel_time_s averages reachable buildings only and is None when no
    building is reachable (an undefined marker, never a silent zero).
    """

    reachability_rate: float
    mean_travel_time_s: float | None
    mean_redundancy: float
    n_buildings: int
    n_reachable: int

    def to_dict(self) -> dict:
        return {
            "reachability_rate": self.reachability_rate,
            "mean_travel_time_s": self.mean_travel_time_s,
            "mean_redundancy": self.mean_redundancy,
            "n_buildings": self.n_buildings,
            "n_reachable": self.n_reachable,
        }


def nearest_shelter(
    cn: ConditionedNetwork, building_node: str, shelter_nodes: Iterable[str]
) -> str | None:
    """Closest shelter by conditioned travel time; ties by smallest node id.

    Falls back to the smallest shelter id when none is reachable (redundancy
    to it is then zero anyway).
    """
    shelters = sorted(set(shelter_nodes))
    if not shelters:
        return None
    route = shortest_route(cn, building_node, shelters)
    if route.reachable:
        return route.destination
    return shelters[0]


def accessibility_summary(
    cn: ConditionedNetwork,
    building_nodes: Sequence[str],
    facility_nodes: Iterable[str],
    shelter_nodes: Iterable[str],
    tau_s: float = DEFAULT_TAU_S,
) -> AccessibilitySummary:
    """Reachability rate, mean conditioned travel time, and mean redundancy."""
    if not building_nodes:
        raise ValueError("need at least one building")
    facility_nodes = sorted(set(facility_nodes))
    shelter_nodes = sorted(set(shelter_nodes))

    times = []
    n_reachable = 0
    redundancies = []
    for b in building_nodes:
        t = hazard_travel_time(cn, b, facility_nodes) if facility_nodes else math.inf
        if t <= tau_s:
            n_reachable += 1
            times.append(t)
        target = nearest_shelter(cn, b, shelter_nodes)
        if target is None or target == b:
            # A building standing on the shelter node needs no route to it.
            redundancies.append(0.0)
        else:
            redundancies.append(float(evacuation_redundancy(cn, b, target)))

    return AccessibilitySummary(
        reachability_rate=n_reachable / len(building_nodes),
        mean_travel_time_s=(sum(times) / len(times)) if times else None,
        mean_redundancy=sum(redundancies) / len(redundancies),
        n_buildings=len(building_nodes),
        n_reachable=n_reachable,
    )
