"""Road network layers, hazard conditioning, and accessibility signals."""

from urbanrisk.network.model import (
    ConditionedNetwork,
    Edge,
    EdgeState,
    Facility,
    HazardPolicy,
    HazardScenario,
    Node,
    RoadNetwork,
    ServicePoints,
)
from urbanrisk.network.condition import condition_network
from urbanrisk.network.shortest import (
    UNREACHABLE,
    RouteResult,
    hazard_travel_time,
    shortest_route,
)
from urbanrisk.network.flow import evacuation_redundancy, max_edge_disjoint_paths
from urbanrisk.network.access import (
    AccessibilitySummary,
    accessibility_summary,
    reachability,
    reachability_prob,
)
from urbanrisk.network.layer import export_weight_layer, import_weight_layer

__all__ = [
    "Node",
    "Edge",
    "EdgeState",
    "Facility",
    "RoadNetwork",
    "ServicePoints",
    "HazardScenario",
    "HazardPolicy",
    "ConditionedNetwork",
    "condition_network",
    "UNREACHABLE",
    "RouteResult",
    "shortest_route",
    "hazard_travel_time",
    "max_edge_disjoint_paths",
    "evacuation_redundancy",
    "reachability",
    "reachability_prob",
    "accessibility_summary",
    "AccessibilitySummary",
    "export_weight_layer",
    "import_weight_layer",
]
