from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from urbanrisk.data.synth import SynthConfig, synthesize_city
from urbanrisk.network.condition import condition_network
from urbanrisk.network.model import Edge, HazardScenario, Node, RoadNetwork


def line_network(node_ids=("A", "B", "C", "D"), travel_time=60.0) -> RoadNetwork:
    nodes = [Node(id=n, lat=0.0, lon=i * 0.001) for i, n in enumerate(node_ids)]
    edges = [
        Edge(id=f"{a}-{b}", frm=a, to=b, travel_time_s=travel_time)
        for a, b in zip(node_ids, node_ids[1:])
    ]
    return RoadNetwork(nodes, edges)


def diamond_network() -> RoadNetwork:
    nodes = [
        Node("A", 0.0, 0.0),
        Node("B", 0.001, 0.0),
        Node("C", -0.001, 0.0),
        Node("D", 0.0, 0.002),
    ]
    edges = [
        Edge("A-B", "A", "B", 60.0),
        Edge("B-D", "B", "D", 60.0),
        Edge("A-C", "A", "C", 60.0),
        Edge("C-D", "C", "D", 60.0),
    ]
    return RoadNetwork(nodes, edges)


@pytest.fixture
def line():
    return line_network()


@pytest.fixture
def diamond():
    return diamond_network()


def conditioned(network: RoadNetwork, depths: dict[str, float] | None = None, sid="test"):
    return condition_network(network, HazardScenario(scenario_id=sid, edge_depth_m=depths or {}))


@pytest.fixture(scope="session")
def small_city():
    """A compact synthetic city shared by read-only tests."""
    return synthesize_city(SynthConfig(n_buildings=150, n_years=15, grid_side=7), seed=11)


@pytest.fixture(scope="session")
def free_flow_graphs(small_city):
    from urbanrisk.pipeline import GraphSummaryProvider

    cn0 = condition_network(small_city.network, HazardScenario(scenario_id="free-flow"))
    return GraphSummaryProvider(cn0, small_city.service_points)


@pytest.fixture(scope="session")
def city_forecaster(small_city, free_flow_graphs):
    """One trained forecaster shared by pipeline, runner, service, and CLI tests."""
    from urbanrisk.evaluation.splits import temporal_split
    from urbanrisk.forecast.training import TrainConfig
    from urbanrisk.pipeline import Forecaster, ForecasterConfig

    records = small_city.dataset.buildings
    manifest = temporal_split(records)
    fc = Forecaster(ForecasterConfig(seed=3))
    fc.fit(
        records,
        manifest,
        free_flow_graphs,
        TrainConfig(epochs=20, batch_size=128, learning_rate=2e-3, seed=1),
    )
    return fc, manifest
