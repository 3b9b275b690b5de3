"""Shared builders for compact test fixtures."""

from __future__ import annotations

from datetime import date

import numpy as np

from urbanrisk.data.records import FEATURE_SCHEMA, BuildingRecord, TargetVector


def make_record(
    rid="r1",
    city="cityA",
    lat=55.0,
    lon=12.0,
    elevation=10.0,
    year=2020,
    observed=date(2020, 6, 1),
    annotations=("flood:2020:0",),
    feature_values: dict | None = None,
    targets: TargetVector | None = None,
    masks=None,
    node=None,
) -> BuildingRecord:
    features = {g: np.arange(len(dims), dtype=float) for g, dims in FEATURE_SCHEMA.items()}
    if feature_values:
        features.update(feature_values)
    return BuildingRecord(
        id=rid,
        city_id=city,
        lat=lat,
        lon=lon,
        elevation=elevation,
        year=year,
        observed_on=observed,
        hazard_annotations=annotations,
        features=features,
        masks=masks,
        targets=targets,
        node_attachment=node,
    )


def offset_lat(meters: float) -> float:
    """Degrees of latitude spanning the given ground distance."""
    return meters / 111_320.0
