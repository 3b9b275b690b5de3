"""Metric reports with stable serialization, and per-stratum diagnostics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

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

_FIELD_ORDER = (
    "accuracy",
    "macro_f1",
    "mae",
    "rmse",
    "auroc",
    "recall_at_top_q",
    "fnr_high_risk",
    "ece",
    "coverage_90",
    "reachability_rate",
    "mean_hazard_travel_time_s",
    "mean_redundancy",
)


@dataclass
class MetricReport:
    values: dict = field(default_factory=dict)
    reliability: list[dict] = field(default_factory=list)
    subgroups: dict[str, "MetricReport"] = field(default_factory=dict)
    gaps: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for key in ("ece", "coverage_90"):
            v = self.values.get(key)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{key} must lie in [0, 1], got {v}")

    def to_dict(self) -> dict:
        ordered = {k: self.values.get(k) for k in _FIELD_ORDER if k in self.values}
        ordered.update({k: v for k, v in self.values.items() if k not in _FIELD_ORDER})
        out = {"metrics": ordered}
        if self.reliability:
            out["reliability_bins"] = self.reliability
        if self.subgroups:
            out["subgroups"] = {k: v.to_dict() for k, v in sorted(self.subgroups.items())}
        if self.gaps:
            out["gaps"] = dict(sorted(self.gaps.items()))
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def reliability_csv(self) -> str:
        lines = ["bin,lo,hi,count,confidence,accuracy"]
        for r in self.reliability:
            conf = "" if r["confidence"] is None else repr(r["confidence"])
            acc = "" if r["accuracy"] is None else repr(r["accuracy"])
            lines.append(f"{r['bin']},{r['lo']},{r['hi']},{r['count']},{conf},{acc}")
        return "\n".join(lines) + "\n"


def build_report(
    y_true_class: Sequence[int] | None = None,
    y_pred_class: Sequence[int] | None = None,
    y_true_reg: Sequence[float] | None = None,
    y_pred_reg: Sequence[float] | None = None,
    probs: Sequence[float] | None = None,
    outcomes: Sequence[int] | None = None,
    ci_lows: Sequence[float] | None = None,
    ci_highs: Sequence[float] | None = None,
    truths: Sequence[float] | None = None,
    scores: Sequence[float] | None = None,
    risk_labels: Sequence[int] | None = None,
    record_ids: Sequence[str] | None = None,
    top_q: float | None = None,
    accessibility: Mapping | None = None,
) -> MetricReport:
    """Assemble whichever metric families the inputs support."""
    values: dict = {}
    reliability: list[dict] = []
    if y_true_class is not None and y_pred_class is not None:
        values["accuracy"] = accuracy(y_true_class, y_pred_class)
        values["macro_f1"] = macro_f1(y_true_class, y_pred_class)
    if y_true_reg is not None and y_pred_reg is not None:
        values["mae"] = mae(y_true_reg, y_pred_reg)
        values["rmse"] = rmse(y_true_reg, y_pred_reg)
    if probs is not None and outcomes is not None:
        values["ece"] = ece(probs, outcomes)
        values["auroc"] = auroc(outcomes, probs)
        reliability = reliability_bins(probs, outcomes)
    if ci_lows is not None and ci_highs is not None and truths is not None:
        values["coverage_90"] = interval_coverage(ci_lows, ci_highs, truths)
    if scores is not None and risk_labels is not None and top_q is not None:
        rs = risk_sensitivity(
            scores, risk_labels, record_ids or [str(i) for i in range(len(scores))], top_q
        )
        values["recall_at_top_q"] = rs["recall_at_top_q"]
        values["fnr_high_risk"] = rs["fnr_high_risk"]
        values["top_q"] = top_q
    if accessibility is not None:
        values["reachability_rate"] = accessibility.get("reachability_rate")
        values["mean_hazard_travel_time_s"] = accessibility.get("mean_travel_time_s")
        values["mean_redundancy"] = accessibility.get("mean_redundancy")
    return MetricReport(values=values, reliability=reliability)


def subgroup_report(
    strata: Sequence[str],
    y_true: Sequence[int],
    y_pred: Sequence[int],
    probs: Sequence[float] | None = None,
) -> MetricReport:
    """Per-stratum classification metrics plus max-minus-min gaps.

    Strata with fewer than 2 records are flagged and excluded from gaps.
    """
    strata = np.asarray(strata)
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if not (len(strata) == len(y_true) == len(y_pred)):
        raise ValueError("strata and labels must have equal length")

    top = MetricReport(values={})
    usable: dict[str, dict] = {}
    for name in sorted(set(strata.tolist())):
        mask = strata == name
        if int(mask.sum()) < 2:
            top.notes.append(f"stratum {name!r} has <2 records; excluded from gaps")
            continue
        values = {
            "accuracy": accuracy(y_true[mask], y_pred[mask]),
            "macro_f1": macro_f1(y_true[mask], y_pred[mask]),
        }
        positives = y_true[mask] == 1
        if positives.any():
            fn = float(np.sum(positives & (y_pred[mask] != 1)))
            values["fnr_high_risk"] = fn / float(positives.sum())
        if probs is not None:
            p = np.asarray(probs)[mask]
            values["ece"] = ece(p, y_true[mask])
        usable[str(name)] = values
        top.subgroups[str(name)] = MetricReport(values=values)

    metric_names = sorted({m for v in usable.values() for m in v})
    for m in metric_names:
        present = [v[m] for v in usable.values() if v.get(m) is not None]
        if len(present) >= 2:
            top.gaps[m] = max(present) - min(present)
    return top
