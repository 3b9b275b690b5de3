"""Split manifests with leakage controls and the metric suite."""

from urbanrisk.evaluation.splits import (
    SplitManifest,
    audit_prompt_fields,
    leakage_audit,
    spatial_block_split,
    spatial_cell_of,
    temporal_split,
    unseen_city_split,
)
from urbanrisk.evaluation.metrics import (
    accuracy,
    auroc,
    ece,
    interval_coverage,
    macro_f1,
    mae,
    reliability_bins,
    risk_sensitivity,
    rmse,
)
from urbanrisk.evaluation.report import MetricReport, subgroup_report

__all__ = [
    "SplitManifest",
    "temporal_split",
    "spatial_block_split",
    "unseen_city_split",
    "spatial_cell_of",
    "leakage_audit",
    "audit_prompt_fields",
    "accuracy",
    "macro_f1",
    "mae",
    "rmse",
    "auroc",
    "ece",
    "reliability_bins",
    "interval_coverage",
    "risk_sensitivity",
    "MetricReport",
    "subgroup_report",
]
