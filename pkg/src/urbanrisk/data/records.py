"""Building-level domain types: records, targets, and the per-city dataset.

Every building observation carries six named feature groups. A group is either
present (a finite vector matching the schema below) or explicitly masked out;
it is never silently absent. Masked groups keep a zero vector so downstream
array code stays shape-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Iterable, Mapping, Sequence

import numpy as np

# Named dimensions of each feature group. Order is the canonical vector layout.
FEATURE_SCHEMA: dict[str, tuple[str, ...]] = {
    "geo": ("latitude", "longitude", "elevation"),
    "struct": ("age_years", "floors", "footprint_m2", "structural_score", "damage_probability"),
    "demo": ("population", "median_income", "age_dependency"),
    "infra": ("drainage_distance_m", "road_access_m", "imperviousness", "drainage_capacity"),
    "climate": ("flood_events_5y", "heat_events_5y", "annual_precip_mm", "summer_temp_c"),
    "transport": ("time_to_facility_s", "evac_route_distance_m", "node_degree"),
}

FEATURE_GROUPS: tuple[str, ...] = tuple(FEATURE_SCHEMA)

TARGET_FIELDS: tuple[str, ...] = (
    "flood_depth",
    "heat_stress",
    "structural_vulnerability",
    "accessibility_score",
)

HORIZONS_YEARS: tuple[int, ...] = (1, 3, 5, 7, 10)


@dataclass(frozen=True)
class TargetVector:
    """Multi-task risk target for one building-year.

    structural_vulnerability is clamped to [0, 100] at construction;
    flood_depth and accessibility_score are validated, not clamped, so that
    bad upstream values surface instead of being papered over.
    """

    flood_depth: float
    heat_stress: float
    structural_vulnerability: float
    accessibility_score: float

    def __post_init__(self):
        for name in TARGET_FIELDS:
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"target {name} must be finite, got {v!r}")
        if self.flood_depth < 0:
            raise ValueError(f"flood_depth must be >= 0, got {self.flood_depth}")
        if not 0.0 <= self.accessibility_score <= 1.0:
            raise ValueError(
                f"accessibility_score must be in [0, 1], got {self.accessibility_score}"
            )
        object.__setattr__(
            self,
            "structural_vulnerability",
            min(100.0, max(0.0, float(self.structural_vulnerability))),
        )

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in TARGET_FIELDS], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float], clamp: bool = False) -> "TargetVector":
        """Build a target from a raw 4-vector, optionally clamping to valid ranges.

        clamp=True is used when decoding model samples, which may fall slightly
        outside physical ranges.
        """
        v = [float(x) for x in values]
        if len(v) != len(TARGET_FIELDS):
            raise ValueError(f"expected {len(TARGET_FIELDS)} target values, got {len(v)}")
        if clamp:
            v[0] = max(0.0, v[0])
            v[2] = min(100.0, max(0.0, v[2]))
            v[3] = min(1.0, max(0.0, v[3]))
        return cls(*v)


def _coerce_group(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    want = len(FEATURE_SCHEMA[name])
    if arr.shape != (want,):
        raise ValueError(f"feature group {name!r} must have shape ({want},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"feature group {name!r} contains non-finite values")
    return arr


@dataclass(frozen=True, eq=False)
class BuildingRecord:
    """One building's observation at a point in time.

    ``features`` maps every group name in FEATURE_SCHEMA to its vector;
    ``masks`` maps every group name to True when the group is actually
    observed (False means "explicitly missing": zero vector + mask bit).
    ``observed_on`` is the day-resolution timestamp needed by deduplication;
    ``year`` is the calendar year used everywhere else.

    eq=False: records hold numpy arrays, so generated equality would be
    ambiguous; compare fields explicitly where needed.
    """

    id: str
    city_id: str
    lat: float
    lon: float
    elevation: float
    year: int
    features: Mapping[str, np.ndarray]
    masks: Mapping[str, bool] = field(default=None)  # type: ignore[assignment]
    targets: TargetVector | None = None
    node_attachment: str | None = None
    observed_on: date | None = None
    hazard_annotations: tuple[str, ...] = ()
    split: str | None = None  # train / val / test once a manifest is applied

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon out of range: {self.lon}")
        if not math.isfinite(self.elevation):
            raise ValueError(f"elevation must be finite, got {self.elevation!r}")
        masks = dict(self.masks) if self.masks is not None else {}
        feats: dict[str, np.ndarray] = {}
        for name in FEATURE_GROUPS:
            if masks.get(name) is False:
                # Explicitly missing: mask bit wins, vector forced to zero.
                feats[name] = np.zeros(len(FEATURE_SCHEMA[name]))
            elif name in self.features:
                feats[name] = _coerce_group(name, self.features[name])
                masks.setdefault(name, True)
            else:
                raise ValueError(
                    f"record {self.id}: feature group {name!r} neither present nor masked"
                )
        unknown = set(self.features) - set(FEATURE_GROUPS)
        if unknown:
            raise ValueError(f"record {self.id}: unknown feature groups {sorted(unknown)}")
        for name in FEATURE_GROUPS:
            masks.setdefault(name, True)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "hazard_annotations", tuple(self.hazard_annotations))

    def feature_vector(self) -> np.ndarray:
        """All groups concatenated in FEATURE_GROUPS order."""
        return np.concatenate([self.features[g] for g in FEATURE_GROUPS])

    def with_features(self, updates: Mapping[str, np.ndarray]) -> "BuildingRecord":
        merged = {g: self.features[g].copy() for g in FEATURE_GROUPS}
        merged.update({k: np.asarray(v, dtype=float) for k, v in updates.items()})
        return replace(self, features=merged)


def feature_index(group: str, name: str) -> int:
    """Index of a named dimension inside its group vector."""
    return FEATURE_SCHEMA[group].index(name)


@dataclass
class CityDataset:
    """Building records of one city across years, plus forecast horizons and
    train-partition normalization statistics (attached by ``normalize``)."""

    city_id: str
    buildings: list[BuildingRecord]
    horizons: tuple[int, ...] = HORIZONS_YEARS
    normalization_stats: "NormalizationStats | None" = None  # noqa: F821

    def __post_init__(self):
        foreign = sorted({b.city_id for b in self.buildings} - {self.city_id})
        if foreign:
            raise ValueError(f"dataset for {self.city_id} contains foreign cities: {foreign}")

    def __len__(self) -> int:
        return len(self.buildings)

    def years(self) -> tuple[int, ...]:
        return tuple(sorted({b.year for b in self.buildings}))

    def by_split(self, split: str) -> list[BuildingRecord]:
        return [b for b in self.buildings if b.split == split]


def assign_splits(
    records: Iterable[BuildingRecord], assignment: Mapping[str, str]
) -> list[BuildingRecord]:
    """Return copies of ``records`` with ``split`` set from a manifest assignment."""
    out = []
    for rec in records:
        if rec.id not in assignment:
            raise KeyError(f"record {rec.id} missing from split assignment")
        out.append(replace(rec, split=assignment[rec.id]))
    return out
