"""Evaluation split manifests: temporal, spatial-block, and unseen-city.

A manifest is the single source of truth for partition assignment; its
regime constraints are auditable from the manifest plus the records alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from urbanrisk.data.records import BuildingRecord

PARTITIONS = ("train", "val", "test")

# Level-1 prompt fields derive from hazard event labels; they must not be
# built from a held-out city's data under the unseen-city regime.
EVENT_LABEL_FIELDS = frozenset(
    {
        "flood_intensity",
        "flood_duration",
        "flood_source",
        "heat_magnitude",
        "heat_duration",
    }
)

_M_PER_DEG_LAT = 111_320.0


@dataclass
class SplitManifest:
    regime: str  # temporal | spatial_block | unseen_city
    assignments: dict[str, str]
    params: dict = field(default_factory=dict)
    seed: int | None = None
    warnings: list[str] = field(default_factory=list)

    def partition_counts(self) -> dict[str, int]:
        counts = {p: 0 for p in PARTITIONS}
        for p in self.assignments.values():
            counts[p] += 1
        return counts

    def validate_partition(self, records: Sequence[BuildingRecord]) -> None:
        """Every record assigned exactly once, to a known partition."""
        ids = [r.id for r in records]
        missing = [i for i in ids if i not in self.assignments]
        if missing:
            raise ValueError(f"{len(missing)} record(s) unassigned, e.g. {missing[:3]}")
        extra = set(self.assignments) - set(ids)
        if extra:
            raise ValueError(f"manifest covers unknown record(s), e.g. {sorted(extra)[:3]}")
        bad = {p for p in self.assignments.values() if p not in PARTITIONS}
        if bad:
            raise ValueError(f"unknown partition label(s): {sorted(bad)}")

    def to_json(self) -> str:
        doc = {
            "regime": self.regime,
            "params": self.params,
            "seed": self.seed,
            "warnings": self.warnings,
            "assignments": dict(sorted(self.assignments.items())),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SplitManifest":
        doc = json.loads(text)
        return cls(
            regime=doc["regime"],
            assignments=dict(doc["assignments"]),
            params=dict(doc.get("params", {})),
            seed=doc.get("seed"),
            warnings=list(doc.get("warnings", [])),
        )


def temporal_split(
    records: Sequence[BuildingRecord], train_end: int = 2021, val_end: int = 2023
) -> SplitManifest:
    """Assign purely by record year: <= train_end, <= val_end, else test.

    Bounds are clipped (with a warning) to the dataset's year range so every
    partition stays non-empty when the data allows it.
    """
    if train_end >= val_end:
        raise ValueError("require train_end < val_end")
    years = sorted({r.year for r in records})
    if not years:
        raise ValueError("no records to split")
    warnings = []
    if years[-1] <= val_end:
        val_end = years[-1] - 1
        warnings.append(f"test window empty; clipped val_end to {val_end}")
    if train_end >= val_end:
        train_end = val_end - 1
        warnings.append(f"val window empty; clipped train_end to {train_end}")

    assignments = {}
    for r in records:
        if r.year <= train_end:
            assignments[r.id] = "train"
        elif r.year <= val_end:
            assignments[r.id] = "val"
        else:
            assignments[r.id] = "test"
    manifest = SplitManifest(
        regime="temporal",
        assignments=assignments,
        params={"train_end": train_end, "val_end": val_end},
        warnings=warnings,
    )
    counts = manifest.partition_counts()
    empty = [p for p in PARTITIONS if counts[p] == 0]
    if empty:
        raise ValueError(f"empty partition(s) after clipping: {empty}")
    return manifest


def spatial_cell_of(
    record: BuildingRecord, anchor_lat: float, anchor_lon: float, cell_km: float
) -> str:
    """Grid cell id in a local meter projection anchored at the city centroid."""
    y = (record.lat - anchor_lat) * _M_PER_DEG_LAT
    x = (record.lon - anchor_lon) * _M_PER_DEG_LAT * math.cos(math.radians(anchor_lat))
    size = cell_km * 1000.0
    return f"{math.floor(x / size)}:{math.floor(y / size)}"


def spatial_block_split(
    records: Sequence[BuildingRecord],
    cell_km: float = 1.0,
    test_frac: float = 0.2,
    seed: int = 0,
    val_frac: float = 0.0,
) -> SplitManifest:
    """Hold out whole grid cells; buildings sharing a cell share a partition."""
    import numpy as np

    if not records:
        raise ValueError("no records to split")
    if not 0 < test_frac < 1:
        raise ValueError("test_frac must be in (0, 1)")
    anchor_lat = sum(r.lat for r in records) / len(records)
    anchor_lon = sum(r.lon for r in records) / len(records)

    cell_of = {
        r.id: spatial_cell_of(r, anchor_lat, anchor_lon, cell_km) for r in records
    }
    cells = sorted(set(cell_of.values()))
    n_test = math.floor(len(cells) * test_frac)
    if n_test < 1:
        raise ValueError(
            f"{len(cells)} cell(s) cannot realize a {test_frac:.0%} held-out fraction"
        )
    n_val = math.floor(len(cells) * val_frac)

    order = np.random.default_rng(seed).permutation(len(cells))
    test_cells = {cells[int(i)] for i in order[:n_test]}
    val_cells = {cells[int(i)] for i in order[n_test : n_test + n_val]}

    assignments = {}
    for rid, cell in cell_of.items():
        if cell in test_cells:
            assignments[rid] = "test"
        elif cell in val_cells:
            assignments[rid] = "val"
        else:
            assignments[rid] = "train"
    return SplitManifest(
        regime="spatial_block",
        assignments=assignments,
        params={
            "cell_km": cell_km,
            "test_frac": test_frac,
            "val_frac": val_frac,
            "anchor_lat": anchor_lat,
            "anchor_lon": anchor_lon,
            "n_cells": len(cells),
            "n_test_cells": n_test,
        },
        seed=seed,
    )


def unseen_city_split(records: Sequence[BuildingRecord], held_out_city: str) -> SplitManifest:
    """Hold out an entire city for zero-shot evaluation.

    The manifest records that only non-label metadata of the held-out city
    may feed prompt construction; audit_prompt_fields enforces it.
    """
    cities = sorted({r.city_id for r in records})
    if len(cities) < 2:
        raise ValueError("unseen-city split needs at least 2 cities")
    if held_out_city not in cities:
        raise ValueError(f"unknown city {held_out_city!r}; dataset has {cities}")
    assignments = {
        r.id: ("test" if r.city_id == held_out_city else "train") for r in records
    }
    return SplitManifest(
        regime="unseen_city",
        assignments=assignments,
        params={
            "held_out_city": held_out_city,
            "prompt_restriction": "non-label metadata only for the held-out city",
        },
    )


def audit_prompt_fields(
    manifest: SplitManifest, city_id: str, level1_fields: Mapping | None
) -> None:
    """Refuse event-label-derived prompt fields for a held-out city."""
    if manifest.regime != "unseen_city" or not level1_fields:
        return
    if city_id != manifest.params.get("held_out_city"):
        return
    leaked = sorted(set(level1_fields) & EVENT_LABEL_FIELDS)
    if leaked:
        raise ValueError(
            f"prompt for held-out city {city_id!r} may not use event-label fields: {leaked}"
        )


def leakage_audit(manifest: SplitManifest, records: Sequence[BuildingRecord]) -> dict:
    """Regime-specific leakage checks; raises on violation, returns a summary."""
    manifest.validate_partition(records)
    by_id = {r.id: r for r in records}
    summary: dict = {"regime": manifest.regime, **manifest.partition_counts()}

    if manifest.regime == "spatial_block":
        p = manifest.params
        cells: dict[str, set[str]] = {"train": set(), "val": set(), "test": set()}
        for rid, part in manifest.assignments.items():
            cells[part].add(
                spatial_cell_of(by_id[rid], p["anchor_lat"], p["anchor_lon"], p["cell_km"])
            )
        shared = cells["test"] & (cells["train"] | cells["val"])
        if shared:
            raise ValueError(f"train/test share {len(shared)} spatial cell(s)")
        summary["shared_cells"] = 0
    elif manifest.regime == "temporal":
        p = manifest.params
        for rid, part in manifest.assignments.items():
            year = by_id[rid].year
            ok = (
                (part == "train" and year <= p["train_end"])
                or (part == "val" and p["train_end"] < year <= p["val_end"])
                or (part == "test" and year > p["val_end"])
            )
            if not ok:
                raise ValueError(f"record {rid} (year {year}) misassigned to {part}")
        summary["year_bounds"] = [p["train_end"], p["val_end"]]
    elif manifest.regime == "unseen_city":
        held = manifest.params["held_out_city"]
        for rid, part in manifest.assignments.items():
            if (by_id[rid].city_id == held) != (part == "test"):
                raise ValueError(f"record {rid} violates the unseen-city regime")
        summary["held_out_city"] = held
    return summary
