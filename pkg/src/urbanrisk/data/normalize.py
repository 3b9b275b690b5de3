"""Train-partition-only affine normalization of features and targets.

Statistics are fit strictly on records labeled ``train``. Masked feature
groups contribute nothing to the statistics and stay zero after the
transform (zero is the mask filler, not a real observation).

Zero-variance channels get scale 1.0 and are flagged rather than dividing
by zero; the flags surface degenerate inputs to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from urbanrisk.data.records import (
    FEATURE_GROUPS,
    FEATURE_SCHEMA,
    TARGET_FIELDS,
    BuildingRecord,
    CityDataset,
)

_EPS = 1e-12


@dataclass
class NormalizationStats:
    feature_mean: dict[str, np.ndarray]
    feature_scale: dict[str, np.ndarray]
    target_mean: np.ndarray
    target_scale: np.ndarray
    zero_variance_flags: list[str] = field(default_factory=list)
    n_train: int = 0

    def transform_features(self, record: BuildingRecord) -> BuildingRecord:
        updated = {}
        for g in FEATURE_GROUPS:
            if record.masks.get(g, True):
                updated[g] = (record.features[g] - self.feature_mean[g]) / self.feature_scale[g]
            else:
                updated[g] = np.zeros_like(record.features[g])
        return record.with_features(updated)

    def inverse_features(self, record: BuildingRecord) -> BuildingRecord:
        updated = {}
        for g in FEATURE_GROUPS:
            if record.masks.get(g, True):
                updated[g] = record.features[g] * self.feature_scale[g] + self.feature_mean[g]
            else:
                updated[g] = np.zeros_like(record.features[g])
        return record.with_features(updated)

    def encode_targets(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.target_mean) / self.target_scale

    def decode_targets(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.target_scale + self.target_mean

    def to_dict(self) -> dict:
        return {
            "feature_mean": {g: self.feature_mean[g].tolist() for g in FEATURE_GROUPS},
            "feature_scale": {g: self.feature_scale[g].tolist() for g in FEATURE_GROUPS},
            "target_mean": self.target_mean.tolist(),
            "target_scale": self.target_scale.tolist(),
            "zero_variance_flags": list(self.zero_variance_flags),
            "n_train": self.n_train,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "NormalizationStats":
        return cls(
            feature_mean={g: np.asarray(d["feature_mean"][g], dtype=float) for g in FEATURE_GROUPS},
            feature_scale={
                g: np.asarray(d["feature_scale"][g], dtype=float) for g in FEATURE_GROUPS
            },
            target_mean=np.asarray(d["target_mean"], dtype=float),
            target_scale=np.asarray(d["target_scale"], dtype=float),
            zero_variance_flags=list(d.get("zero_variance_flags", [])),
            n_train=int(d.get("n_train", 0)),
        )


def _mean_scale(matrix: np.ndarray, names: Sequence[str], flags: list[str], prefix: str):
    mean = matrix.mean(axis=0)
    scale = matrix.std(axis=0)
    for i, name in enumerate(names):
        if scale[i] < _EPS:
            scale[i] = 1.0
            # Anchor to the constant itself so it normalizes to exactly 0
            # (mean() of a constant column carries float summation error).
            mean[i] = matrix[0, i]
            flags.append(f"{prefix}.{name}")
    return mean, scale


def fit_normalization(
    records: Iterable[BuildingRecord],
    split_labels: Mapping[str, str] | None = None,
) -> NormalizationStats:
    """Fit per-channel mean/scale on train records only.

    ``split_labels`` maps record id to partition; when omitted, each record's
    own ``split`` attribute is used.
    """
    train = []
    for r in records:
        label = split_labels.get(r.id) if split_labels is not None else r.split
        if label == "train":
            train.append(r)
    if not train:
        raise ValueError("no train records: cannot fit normalization statistics")

    flags: list[str] = []
    feature_mean: dict[str, np.ndarray] = {}
    feature_scale: dict[str, np.ndarray] = {}
    for g in FEATURE_GROUPS:
        observed = np.array([r.features[g] for r in train if r.masks.get(g, True)])
        if observed.size == 0:
            feature_mean[g] = np.zeros(len(FEATURE_SCHEMA[g]))
            feature_scale[g] = np.ones(len(FEATURE_SCHEMA[g]))
            flags.append(f"{g}.<all-masked>")
            continue
        feature_mean[g], feature_scale[g] = _mean_scale(observed, FEATURE_SCHEMA[g], flags, g)

    with_targets = np.array([r.targets.as_array() for r in train if r.targets is not None])
    if with_targets.size:
        target_mean, target_scale = _mean_scale(with_targets, TARGET_FIELDS, flags, "target")
    else:
        target_mean = np.zeros(len(TARGET_FIELDS))
        target_scale = np.ones(len(TARGET_FIELDS))

    return NormalizationStats(
        feature_mean=feature_mean,
        feature_scale=feature_scale,
        target_mean=target_mean,
        target_scale=target_scale,
        zero_variance_flags=flags,
        n_train=len(train),
    )


def apply_normalization(
    records: Iterable[BuildingRecord], stats: NormalizationStats
) -> list[BuildingRecord]:
    return [stats.transform_features(r) for r in records]


def denormalize_record(record: BuildingRecord, stats: NormalizationStats) -> BuildingRecord:
    return stats.inverse_features(record)


def normalize(dataset: CityDataset, split_labels: Mapping[str, str]) -> CityDataset:
    """Normalize a dataset's features using train-partition statistics.

    Returns a new CityDataset whose records carry normalized feature vectors,
    their split labels, and the fitted statistics. Test/val values outside the
    train range are transformed with the same affine map, never clipped.
    """
    stats = fit_normalization(dataset.buildings, split_labels)
    labeled = [
        replace(r, split=split_labels.get(r.id, r.split)) for r in dataset.buildings
    ]
    return CityDataset(
        city_id=dataset.city_id,
        buildings=apply_normalization(labeled, stats),
        horizons=dataset.horizons,
        normalization_stats=stats,
    )
