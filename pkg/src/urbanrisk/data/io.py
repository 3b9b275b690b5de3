"""File formats: JSON-lines building records, CSV networks, TOML config.

Writers are deterministic (stable key order, stable row order) so that
generation under a fixed seed produces byte-identical artifacts.
"""

from __future__ import annotations

import csv
import json
import sys
from datetime import date
from pathlib import Path
from typing import Iterable

from urbanrisk.data.records import (
    FEATURE_GROUPS,
    TARGET_FIELDS,
    BuildingRecord,
    CityDataset,
    TargetVector,
)
from urbanrisk.errors import ConfigurationError
from urbanrisk.network.model import Edge, Facility, HazardScenario, Node, RoadNetwork, ServicePoints

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def _num(x) -> str:
    """Plain-float repr for CSV cells (numpy scalars repr poorly)."""
    return repr(float(x))


def record_to_dict(rec: BuildingRecord) -> dict:
    d = {
        "id": rec.id,
        "city_id": rec.city_id,
        "lat": rec.lat,
        "lon": rec.lon,
        "elevation": rec.elevation,
        "year": rec.year,
        "features": {g: rec.features[g].tolist() for g in FEATURE_GROUPS},
        "masks": {g: bool(rec.masks[g]) for g in FEATURE_GROUPS},
        "targets": None,
    }
    if rec.targets is not None:
        d["targets"] = {name: getattr(rec.targets, name) for name in TARGET_FIELDS}
    if rec.observed_on is not None:
        d["observed_on"] = rec.observed_on.isoformat()
    if rec.node_attachment is not None:
        d["node_attachment"] = rec.node_attachment
    if rec.hazard_annotations:
        d["hazard_annotations"] = list(rec.hazard_annotations)
    return d


def record_from_dict(d: dict) -> BuildingRecord:
    targets = None
    if d.get("targets") is not None:
        targets = TargetVector(**{name: d["targets"][name] for name in TARGET_FIELDS})
    observed = d.get("observed_on")
    return BuildingRecord(
        id=d["id"],
        city_id=d["city_id"],
        lat=d["lat"],
        lon=d["lon"],
        elevation=d["elevation"],
        year=d["year"],
        features=d["features"],
        masks=d.get("masks"),
        targets=targets,
        node_attachment=d.get("node_attachment"),
        observed_on=date.fromisoformat(observed) if observed else None,
        hazard_annotations=tuple(d.get("hazard_annotations", ())),
    )


def write_records_jsonl(records: Iterable[BuildingRecord], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_records_jsonl(path: Path) -> list[BuildingRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(record_from_dict(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{line_no}: bad record: {exc}") from exc
    return out


def write_network_csv(network: RoadNetwork, nodes_path: Path, edges_path: Path) -> None:
    with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "lat", "lon"])
        for nid in sorted(network.nodes):
            n = network.nodes[nid]
            w.writerow([n.id, _num(n.lat), _num(n.lon)])
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "from", "to", "travel_time_s", "capacity", "is_evacuation"])
        for eid in sorted(network.edges):
            e = network.edges[eid]
            w.writerow([e.id, e.frm, e.to, _num(e.travel_time_s), _num(e.capacity), int(e.is_evacuation)])


def read_network_csv(nodes_path: Path, edges_path: Path) -> RoadNetwork:
    nodes = []
    with open(nodes_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            nodes.append(Node(id=row["id"], lat=float(row["lat"]), lon=float(row["lon"])))
    edges = []
    with open(edges_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            edges.append(
                Edge(
                    id=row["id"],
                    frm=row["from"],
                    to=row["to"],
                    travel_time_s=float(row["travel_time_s"]),
                    capacity=float(row["capacity"]),
                    is_evacuation=bool(int(row["is_evacuation"])),
                )
            )
    return RoadNetwork(nodes, edges)


def write_facilities_csv(service: ServicePoints, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "node_id"])
        for f in service.facilities:
            w.writerow([f.kind, f.node_id])


def read_facilities_csv(path: Path, network: RoadNetwork) -> ServicePoints:
    facilities = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            facilities.append(Facility(kind=row["kind"], node_id=row["node_id"]))
    return ServicePoints(facilities, network)


def write_scenario_csv(scenario: HazardScenario, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["edge_id", "depth_m"])
        for eid in sorted(scenario.edge_depth_m):
            w.writerow([eid, _num(scenario.edge_depth_m[eid])])


def read_scenario_csv(path: Path) -> HazardScenario:
    depths = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            depths[row["edge_id"]] = float(row["depth_m"])
    return HazardScenario(scenario_id=path.stem, edge_depth_m=depths)


def write_scenario_dir(scenarios: Iterable[HazardScenario], directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for sc in scenarios:
        write_scenario_csv(sc, directory / f"{sc.scenario_id}.csv")


def read_scenario_dir(directory: Path) -> list[HazardScenario]:
    return [read_scenario_csv(p) for p in sorted(Path(directory).glob("*.csv"))]


def load_toml_config(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"invalid TOML in {path}: {exc}")


def save_dataset_dir(result, directory: Path) -> None:
    """Write a SynthResult to the on-disk layout used by the CLI."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_records_jsonl(result.dataset.buildings, directory / "buildings.jsonl")
    write_network_csv(result.network, directory / "nodes.csv", directory / "edges.csv")
    write_facilities_csv(result.service_points, directory / "facilities.csv")
    write_scenario_dir(result.scenarios, directory / "scenarios")
    zones = {bid: z for bid, z in sorted(result.zone_of_building.items())}
    (directory / "zones.json").write_text(
        json.dumps(zones, sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )


def load_dataset_dir(directory: Path):
    """Read the CLI layout back; returns (dataset, network, service, scenarios, zones)."""
    directory = Path(directory)
    records = read_records_jsonl(directory / "buildings.jsonl")
    network = read_network_csv(directory / "nodes.csv", directory / "edges.csv")
    service = read_facilities_csv(directory / "facilities.csv", network)
    scenarios = read_scenario_dir(directory / "scenarios")
    zones = json.loads((directory / "zones.json").read_text(encoding="utf-8"))
    city_ids = sorted({r.city_id for r in records})
    dataset = CityDataset(city_id=city_ids[0], buildings=records) if len(city_ids) == 1 else None
    return dataset, network, service, scenarios, zones
