"""Synthetic city generator.

Stands in for restricted real-world building data: emits a city dataset with
all six feature groups, a connected road network with service points, and a
set of labeled flood scenarios. Everything is a pure function of
(config, seed), so repeated generation is bitwise identical.

Correlations are planted on purpose (low elevation means deeper flooding,
impervious surfaces heat up, old unreinforced buildings score worse) so that
downstream learning has a recoverable signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from typing import Mapping

import numpy as np

from urbanrisk.data.records import BuildingRecord, CityDataset, TargetVector
from urbanrisk.errors import ConfigurationError
from urbanrisk.network.condition import condition_network
from urbanrisk.network.model import (
    Edge,
    Facility,
    HazardScenario,
    Node,
    RoadNetwork,
    ServicePoints,
)
from urbanrisk.network.shortest import _dijkstra

_M_PER_DEG_LAT = 111_320.0


@dataclass(frozen=True)
class SynthConfig:
    city_id: str = "synthytown"
    n_buildings: int = 1000
    start_year: int = 2011
    n_years: int = 15
    extent_km: float = 6.0
    grid_side: int = 12  # network = grid_side x grid_side intersections
    network_density: float = 1.0  # fraction of grid links kept (connectivity preserved)
    facilities_per_kind: int = 3
    flood_events_per_year: float = 3.0
    heat_events_per_year: float = 2.0
    origin_lat: float = 55.68
    origin_lon: float = 12.57

    def __post_init__(self):
        if self.n_buildings < 1:
            raise ConfigurationError("n_buildings must be >= 1")
        if self.n_years < 1:
            raise ConfigurationError("n_years must be >= 1")
        if self.grid_side < 2:
            raise ConfigurationError("grid_side must be >= 2")
        if not 0 < self.network_density <= 1:
            raise ConfigurationError("network_density must be in (0, 1]")

    @classmethod
    def from_mapping(cls, m: Mapping) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}  # type: ignore[attr-defined]
        unknown = set(m) - known
        if unknown:
            raise ConfigurationError(f"unknown synth config keys: {sorted(unknown)}")
        return cls(**m)


@dataclass
class SynthResult:
    dataset: CityDataset
    network: RoadNetwork
    service_points: ServicePoints
    scenarios: list[HazardScenario]
    zone_of_building: dict[str, str] = field(default_factory=dict)


def _elevation(x_km: float, y_km: float, extent_km: float, coeffs: np.ndarray) -> float:
    """Smooth hilly field over the city extent, in meters."""
    u, v = x_km / extent_km, y_km / extent_km
    z = 12.0 + 28.0 * u + 10.0 * v
    for k, (ax, ay, amp, ph) in enumerate(coeffs):
        z += amp * math.sin(2 * math.pi * (ax * u + ay * v) + ph)
    return z


def _build_network(cfg: SynthConfig, rng: np.random.Generator, elev_coeffs: np.ndarray):
    side = cfg.grid_side
    spacing_km = cfg.extent_km / (side - 1)
    m_per_deg_lon = _M_PER_DEG_LAT * math.cos(math.radians(cfg.origin_lat))

    nodes: list[Node] = []
    node_xy: dict[str, tuple[float, float]] = {}
    node_elev: dict[str, float] = {}
    jitter = rng.uniform(-0.08, 0.08, size=(side, side, 2)) * spacing_km
    for i in range(side):
        for j in range(side):
            nid = f"n{i:02d}{j:02d}"
            x = i * spacing_km + float(jitter[i, j, 0])
            y = j * spacing_km + float(jitter[i, j, 1])
            nodes.append(
                Node(
                    id=nid,
                    lat=cfg.origin_lat + (y * 1000.0) / _M_PER_DEG_LAT,
                    lon=cfg.origin_lon + (x * 1000.0) / m_per_deg_lon,
                )
            )
            node_xy[nid] = (x, y)
            node_elev[nid] = _elevation(x, y, cfg.extent_km, elev_coeffs)

    # Candidate undirected grid links (4-neighborhood).
    links = []
    for i in range(side):
        for j in range(side):
            if i + 1 < side:
                links.append((f"n{i:02d}{j:02d}", f"n{i + 1:02d}{j:02d}"))
            if j + 1 < side:
                links.append((f"n{i:02d}{j:02d}", f"n{i:02d}{j + 1:02d}"))

    n_keep = int(round(cfg.network_density * len(links)))
    if n_keep < len(nodes) - 1:
        raise ConfigurationError(
            f"network_density {cfg.network_density} keeps {n_keep} links; "
            f"{len(nodes) - 1} are needed for a connected network"
        )

    # Keep a random spanning set first (union-find), then top up by density.
    order = rng.permutation(len(links))
    parent = list(range(len(nodes)))
    index = {n.id: k for k, n in enumerate(nodes)}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    spanning, extras = [], []
    for li in order:
        a, b = links[int(li)]
        ra, rb = find(index[a]), find(index[b])
        if ra != rb:
            parent[ra] = rb
            spanning.append(links[int(li)])
        else:
            extras.append(links[int(li)])
    kept = spanning + extras[: max(0, n_keep - len(spanning))]
    kept.sort()

    evac_rows = {0, side // 2, side - 1}
    edges: list[Edge] = []
    for a, b in kept:
        xa, ya = node_xy[a]
        xb, yb = node_xy[b]
        length_m = math.hypot(xb - xa, yb - ya) * 1000.0
        speed = float(rng.uniform(8.0, 14.0))  # m/s
        tt = max(1.0, length_m / speed)
        capacity = float(np.round(rng.uniform(0.5, 2.0), 3))
        is_evac = int(a[1:3]) in evac_rows and int(b[1:3]) in evac_rows
        edges.append(Edge(id=f"{a}-{b}", frm=a, to=b, travel_time_s=tt, capacity=capacity, is_evacuation=is_evac))
        edges.append(Edge(id=f"{b}-{a}", frm=b, to=a, travel_time_s=tt, capacity=capacity, is_evacuation=is_evac))

    return RoadNetwork(nodes, edges), node_xy, node_elev


def _facility_nodes(cfg: SynthConfig, rng: np.random.Generator, network: RoadNetwork):
    ids = sorted(network.nodes)
    picks = rng.choice(len(ids), size=3 * cfg.facilities_per_kind, replace=False)
    facilities = []
    for k, kind in enumerate(("hospital", "fire_station", "shelter")):
        for slot in range(cfg.facilities_per_kind):
            facilities.append(Facility(kind=kind, node_id=ids[int(picks[k * cfg.facilities_per_kind + slot])]))
    return ServicePoints(facilities, network)


def _free_flow_times(network: RoadNetwork, targets: set[str]) -> dict[str, float]:
    """Travel time from every node to its nearest target node, at zero hazard."""
    cn0 = condition_network(network, HazardScenario(scenario_id="free-flow"))
    best: dict[str, float] = {nid: math.inf for nid in network.nodes}
    for t in sorted(targets):
        dist = _dijkstra(cn0, t, reverse=True)
        for nid, d in dist.items():
            if d < best[nid]:
                best[nid] = d
    return best


def _flood_scenario(
    cfg: SynthConfig,
    rng: np.random.Generator,
    network: RoadNetwork,
    node_xy: dict[str, tuple[float, float]],
    node_elev: dict[str, float],
    scenario_id: str,
) -> HazardScenario:
    elev = np.array([node_elev[n] for n in sorted(node_elev)])
    lo, hi = float(elev.min()), float(elev.max())
    epi_candidates = [n for n in sorted(node_elev) if node_elev[n] <= lo + 0.4 * (hi - lo)]
    epicenter = epi_candidates[int(rng.integers(len(epi_candidates)))]
    ex, ey = node_xy[epicenter]
    intensity = float(rng.uniform(0.35, 1.0))
    reach_km = float(rng.uniform(1.2, 3.0))

    def node_depth(nid: str) -> float:
        x, y = node_xy[nid]
        dist_km = math.hypot(x - ex, y - ey)
        elev_norm = (node_elev[nid] - lo) / (hi - lo + 1e-9)
        d = intensity * (1.0 - dist_km / reach_km) * (1.1 - elev_norm)
        return max(0.0, d)

    depths = {}
    for eid in sorted(network.edges):
        e = network.edges[eid]
        d = 0.5 * (node_depth(e.frm) + node_depth(e.to))
        if d > 1e-6:
            depths[eid] = float(round(d, 4))
    return HazardScenario(scenario_id=scenario_id, edge_depth_m=depths)


def synthesize_city(config: SynthConfig, seed: int) -> SynthResult:
    """Generate a full synthetic city. Pure function of (config, seed)."""
    rng = np.random.default_rng(seed)
    elev_coeffs = np.column_stack(
        [
            rng.uniform(0.5, 2.5, size=4),
            rng.uniform(0.5, 2.5, size=4),
            rng.uniform(2.0, 7.0, size=4),
            rng.uniform(0, 2 * math.pi, size=4),
        ]
    )
    network, node_xy, node_elev = _build_network(config, rng, elev_coeffs)
    service = _facility_nodes(config, rng, network)

    t_facility = _free_flow_times(network, service.emergency_nodes)
    t_shelter = _free_flow_times(network, service.shelter_nodes)

    elev_values = np.array(list(node_elev.values()))
    elev_lo, elev_hi = float(elev_values.min()), float(elev_values.max())
    m_per_deg_lon = _M_PER_DEG_LAT * math.cos(math.radians(config.origin_lat))
    node_ids = sorted(network.nodes)

    # Per-year hazard events and their network scenarios.
    years = list(range(config.start_year, config.start_year + config.n_years))
    scenarios: list[HazardScenario] = []
    flood_year_idx: dict[int, list[str]] = {y: [] for y in years}
    heat_year_idx: dict[int, list[str]] = {y: [] for y in years}
    year_flood_intensity: dict[int, float] = {}
    year_heat_intensity: dict[int, float] = {}
    for y in years:
        n_flood = int(rng.poisson(config.flood_events_per_year))
        n_heat = int(rng.poisson(config.heat_events_per_year))
        for k in range(n_flood):
            sid = f"flood-{y}-{k}"
            scenarios.append(_flood_scenario(config, rng, network, node_xy, node_elev, sid))
            flood_year_idx[y].append(sid)
        for k in range(n_heat):
            heat_year_idx[y].append(f"heat-{y}-{k}")
        year_flood_intensity[y] = 0.08 * n_flood + float(rng.uniform(0, 0.1))
        year_heat_intensity[y] = 0.5 * n_heat + float(rng.uniform(0, 0.5))

    # Static per-building attributes.
    n = config.n_buildings
    home_nodes = [node_ids[int(i)] for i in rng.integers(0, len(node_ids), size=n)]
    per_node_count: dict[str, int] = {}
    built_year = rng.integers(1900, config.start_year, size=n)
    floors = rng.integers(1, 9, size=n)
    footprint = np.round(rng.uniform(60, 900, size=n), 1)
    structural_score = np.round(np.clip(rng.normal(62, 16, size=n), 5, 98), 1)
    population = rng.integers(2, 220, size=n)
    median_income = np.round(rng.lognormal(10.3, 0.35, size=n), 0)
    age_dependency = np.round(rng.uniform(0.2, 0.9, size=n), 3)
    imperviousness = np.round(rng.uniform(0.05, 0.95, size=n), 3)
    drainage_capacity = np.round(rng.uniform(0.2, 1.8, size=n), 3)
    drainage_distance = np.round(rng.uniform(5, 400, size=n), 1)
    road_access = np.round(rng.uniform(3, 120, size=n), 1)
    obs_month = rng.integers(1, 13, size=(n, len(years)))
    obs_day = rng.integers(1, 28, size=(n, len(years)))
    noise = rng.normal(0, 1, size=(n, len(years), 4))
    demo_drift = rng.normal(0, 0.01, size=(n, len(years)))

    buildings: list[BuildingRecord] = []
    zone_of_building: dict[str, str] = {}
    for b in range(n):
        node = home_nodes[b]
        slot = per_node_count.get(node, 0)
        per_node_count[node] = slot + 1
        # Golden-angle ring placement keeps same-node buildings > 10 m apart
        # so synthetic output is dedup-clean by construction.
        radius_m = 30.0 + 14.0 * slot
        theta = slot * 2.399963229728653
        x_km = node_xy[node][0] + (radius_m * math.cos(theta)) / 1000.0
        y_km = node_xy[node][1] + (radius_m * math.sin(theta)) / 1000.0
        lat = config.origin_lat + (y_km * 1000.0) / _M_PER_DEG_LAT
        lon = config.origin_lon + (x_km * 1000.0) / m_per_deg_lon
        elevation = _elevation(x_km, y_km, config.extent_km, elev_coeffs)
        elev_norm = (elevation - elev_lo) / (elev_hi - elev_lo + 1e-9)
        bid = f"{config.city_id}-b{b:05d}"
        zone_of_building[bid] = f"z{int(x_km)}-{int(y_km)}"

        tf = t_facility[node] if math.isfinite(t_facility[node]) else 3600.0
        ts = t_shelter[node] if math.isfinite(t_shelter[node]) else 3600.0
        degree = network.degree(node)

        for yi, year in enumerate(years):
            age = year - int(built_year[b])
            damage_prob = float(np.clip(0.02 + 0.004 * age - 0.003 * structural_score[b], 0.005, 0.95))
            pop = float(population[b]) * (1.0 + float(demo_drift[b, yi]))
            flood_5y = sum(len(flood_year_idx.get(year - k, [])) for k in range(5))
            heat_5y = sum(len(heat_year_idx.get(year - k, [])) for k in range(5))
            precip = 620.0 + 35.0 * year_flood_intensity[year] + 4.0 * flood_5y
            summer_t = 21.0 + 0.8 * year_heat_intensity[year] + 2.0 * imperviousness[b]

            e0, e1, e2, e3 = noise[b, yi]
            flood_depth = max(
                0.0,
                0.25
                + year_flood_intensity[year]
                + 1.4 * (0.6 - elev_norm)
                + 0.25 * (imperviousness[b] - 0.5)
                - 0.2 * (drainage_capacity[b] - 1.0)
                + 0.07 * e0,
            )
            heat_stress = (
                23.0 + 6.0 * imperviousness[b] + 0.006 * pop - 2.0 * elev_norm
                + year_heat_intensity[year] + 0.6 * e1
            )
            struct_vuln = float(
                np.clip(
                    30.0 + 0.5 * age - 0.35 * structural_score[b] + 22.0 * damage_prob + 3.5 * e2,
                    0.0,
                    100.0,
                )
            )
            access = float(np.clip(math.exp(-tf / 1200.0) + 0.02 * e3, 0.0, 1.0))

            annotations = tuple(
                sorted(flood_year_idx[year] + heat_year_idx[year])
            )
            buildings.append(
                BuildingRecord(
                    id=f"{bid}-{year}",
                    city_id=config.city_id,
                    lat=lat,
                    lon=lon,
                    elevation=elevation,
                    year=year,
                    observed_on=date(year, int(obs_month[b, yi]), int(obs_day[b, yi])),
                    node_attachment=node,
                    hazard_annotations=annotations,
                    features={
                        "geo": [lat, lon, elevation],
                        "struct": [age, int(floors[b]), footprint[b], structural_score[b], damage_prob],
                        "demo": [pop, median_income[b], age_dependency[b]],
                        "infra": [drainage_distance[b], road_access[b], imperviousness[b], drainage_capacity[b]],
                        "climate": [flood_5y, heat_5y, precip, summer_t],
                        "transport": [tf, ts * 10.0, degree],
                    },
                    targets=TargetVector(
                        flood_depth=round(flood_depth, 4),
                        heat_stress=round(heat_stress, 4),
                        structural_vulnerability=round(struct_vuln, 4),
                        accessibility_score=round(access, 4),
                    ),
                )
            )

    dataset = CityDataset(city_id=config.city_id, buildings=buildings)
    return SynthResult(
        dataset=dataset,
        network=network,
        service_points=service,
        scenarios=scenarios,
        zone_of_building=zone_of_building,
    )
