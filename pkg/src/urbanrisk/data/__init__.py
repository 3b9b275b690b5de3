"""Domain data model, synthetic city generation, dedup, and normalization."""

from urbanrisk.data.records import (
    FEATURE_SCHEMA,
    FEATURE_GROUPS,
    BuildingRecord,
    CityDataset,
    TargetVector,
)
from urbanrisk.data.dedupe import deduplicate
from urbanrisk.data.normalize import (
    NormalizationStats,
    apply_normalization,
    denormalize_record,
    fit_normalization,
    normalize,
)
from urbanrisk.data.synth import SynthConfig, synthesize_city

__all__ = [
    "FEATURE_SCHEMA",
    "FEATURE_GROUPS",
    "BuildingRecord",
    "CityDataset",
    "TargetVector",
    "deduplicate",
    "NormalizationStats",
    "fit_normalization",
    "apply_normalization",
    "denormalize_record",
    "normalize",
    "SynthConfig",
    "synthesize_city",
]
