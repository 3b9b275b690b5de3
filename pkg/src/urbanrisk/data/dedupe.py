"""Near-duplicate merging of building records.

Two records merge when they lie within 10 m, were observed within 30 days of
each other, and carry identical hazard annotations. Merging keeps the earliest
record's fields (timestamp, features, targets) and averages coordinates over
every original record that flowed into the merge. Records never merge across
cities.

The merge runs to a fixpoint, so the operation is idempotent: a second pass
over its own output finds nothing to merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from urbanrisk.data.records import BuildingRecord
from urbanrisk.errors import RecordValidationError

DISTANCE_THRESHOLD_M = 10.0
TIME_THRESHOLD_DAYS = 30

_EARTH_RADIUS_M = 6_371_000.0


def ground_distance_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Equirectangular approximation of great-circle distance.

    Sub-centimeter error at city extents (< 1 degree), which is all the dedup
    rule needs.
    """
    mean_lat = math.radians((lat1 + lat2) / 2.0)
    dx = math.radians(lon2 - lon1) * math.cos(mean_lat) * _EARTH_RADIUS_M
    dy = math.radians(lat2 - lat1) * _EARTH_RADIUS_M
    return math.hypot(dx, dy)


@dataclass
class _Cluster:
    record: BuildingRecord  # representative: earliest observed_on, then smallest id
    lat_sum: float  # sums over original constituents, for exact averaging
    lon_sum: float
    weight: int

    @property
    def lat(self) -> float:
        return self.lat_sum / self.weight

    @property
    def lon(self) -> float:
        return self.lon_sum / self.weight


def _mergeable(a: _Cluster, b: _Cluster) -> bool:
    days = abs((a.record.observed_on - b.record.observed_on).days)
    if days > TIME_THRESHOLD_DAYS:
        return False
    return ground_distance_m(a.lat, a.lon, b.lat, b.lon) <= DISTANCE_THRESHOLD_M


def _representative(a: _Cluster, b: _Cluster) -> _Cluster:
    ka = (a.record.observed_on, a.record.id)
    kb = (b.record.observed_on, b.record.id)
    keep, other = (a, b) if ka <= kb else (b, a)
    return _Cluster(
        record=keep.record,
        lat_sum=keep.lat_sum + other.lat_sum,
        lon_sum=keep.lon_sum + other.lon_sum,
        weight=keep.weight + other.weight,
    )


def _merge_pass(clusters: list[_Cluster]) -> tuple[list[_Cluster], bool]:
    """One union-find pass over all mergeable pairs; returns (clusters, changed)."""
    n = len(clusters)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    changed = False
    for i in range(n):
        for j in range(i + 1, n):
            if find(i) == find(j):
                continue
            if _mergeable(clusters[i], clusters[j]):
                parent[find(j)] = find(i)
                changed = True
    if not changed:
        return clusters, False

    groups: dict[int, list[_Cluster]] = {}
    for i, c in enumerate(clusters):
        groups.setdefault(find(i), []).append(c)
    merged = []
    for members in groups.values():
        acc = members[0]
        for other in members[1:]:
            acc = _representative(acc, other)
        merged.append(acc)
    return merged, True


def deduplicate(records: Iterable[BuildingRecord]) -> list[BuildingRecord]:
    """Merge near-duplicate records; output deterministic, sorted by id.

    Raises RecordValidationError listing every record that lacks the
    timestamp or finite coordinates the merge rule depends on.
    """
    recs: Sequence[BuildingRecord] = list(records)
    diagnostics: list[tuple[str, str]] = []
    for r in recs:
        if r.observed_on is None:
            diagnostics.append((r.id, "missing observation timestamp"))
        if not (math.isfinite(r.lat) and math.isfinite(r.lon)):
            diagnostics.append((r.id, "missing or non-finite coordinates"))
    if diagnostics:
        raise RecordValidationError(diagnostics)

    # Partition by city and by exact hazard-annotation equality: records in
    # different partitions can never merge.
    partitions: dict[tuple, list[_Cluster]] = {}
    for r in sorted(recs, key=lambda x: x.id):
        key = (r.city_id, r.hazard_annotations)
        partitions.setdefault(key, []).append(
            _Cluster(record=r, lat_sum=r.lat, lon_sum=r.lon, weight=1)
        )

    out: list[BuildingRecord] = []
    for clusters in partitions.values():
        changed = True
        while changed:
            clusters, changed = _merge_pass(clusters)
        for c in clusters:
            if c.weight == 1:
                out.append(c.record)
            else:
                out.append(replace(c.record, lat=c.lat, lon=c.lon))
    out.sort(key=lambda r: r.id)
    return out
