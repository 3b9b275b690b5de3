"""Hazard conditioning: map per-edge flood depths to removal or weight inflation."""

from __future__ import annotations

from urbanrisk.network.model import (
    ConditionedNetwork,
    EdgeState,
    HazardPolicy,
    HazardScenario,
    RoadNetwork,
)


def condition_network(
    network: RoadNetwork,
    hazard: HazardScenario,
    policy: HazardPolicy | None = None,
) -> ConditionedNetwork:
    """Apply a hazard scenario to a network under a threshold policy.

    Edges with depth below the free threshold keep multiplier 1; between the
    thresholds the multiplier grows linearly; at or above the impassable
    threshold the edge is removed. Deterministic.

    Raises ValueError naming the edge id when the scenario references an edge
    that is not in the network.
    """
    policy = policy or HazardPolicy()
    unknown = sorted(set(hazard.edge_depth_m) - set(network.edges))
    if unknown:
        raise ValueError(f"hazard scenario {hazard.scenario_id!r} references unknown edge(s): {unknown}")

    states = {}
    for eid in network.edges:
        m = policy.multiplier(hazard.depth(eid))
        if m is None:
            states[eid] = EdgeState(removed=True, multiplier=None)
        else:
            states[eid] = EdgeState(removed=False, multiplier=m)
    return ConditionedNetwork(
        network,
        states,
        scenario_id=hazard.scenario_id,
        policy_id=f"pw-linear:{policy.depth_free_m}:{policy.depth_impassable_m}:{policy.inflation_per_m}",
    )
