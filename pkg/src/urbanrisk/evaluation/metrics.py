"""Prediction, calibration, and risk-sensitivity metrics.

All pure functions over plain arrays; nothing here touches model internals,
so the metric suite doubles as an independent check on pipeline outputs.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def _paired(a, b, name_a: str, name_b: str):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"{name_a} and {name_b} must have equal length, got {a.shape} vs {b.shape}")
    if len(a) == 0:
        raise ValueError(f"{name_a} must be non-empty")
    return a, b


def accuracy(y_true, y_pred) -> float:
    t, p = _paired(y_true, y_pred, "labels", "predictions")
    return float(np.mean(t == p))


def macro_f1(y_true, y_pred) -> float:
    t, p = _paired(y_true, y_pred, "labels", "predictions")
    classes = sorted(set(t.tolist()) | set(p.tolist()))
    scores = []
    for c in classes:
        tp = float(np.sum((t == c) & (p == c)))
        fp = float(np.sum((t != c) & (p == c)))
        fn = float(np.sum((t == c) & (p != c)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        scores.append(
            2 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
    return float(np.mean(scores))


def mae(y_true, y_pred) -> float:
    t, p = _paired(y_true, y_pred, "truth", "predictions")
    return float(np.mean(np.abs(t - p)))


def rmse(y_true, y_pred) -> float:
    t, p = _paired(y_true, y_pred, "truth", "predictions")
    return float(np.sqrt(np.mean((t - p) ** 2)))


def auroc(labels, scores) -> float | None:
    """Rank statistic with midrank tie handling; None if one class is absent."""
    y, s = _paired(labels, scores, "labels", "scores")
    pos = int(np.sum(y == 1))
    neg = int(np.sum(y == 0))
    if pos == 0 or neg == 0:
        return None
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s), dtype=float)
    sorted_scores = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[y == 1]))
    u = rank_sum_pos - pos * (pos + 1) / 2.0
    return u / (pos * neg)


def reliability_bins(probs, outcomes, bins: int = 10) -> list[dict]:
    """Equal-width reliability diagram rows: count, confidence, accuracy."""
    p, o = _paired(probs, outcomes, "probabilities", "outcomes")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    rows = []
    for b in range(bins):
        lo, hi = b / bins, (b + 1) / bins
        mask = (p >= lo) & (p < hi) if b < bins - 1 else (p >= lo) & (p <= hi)
        n = int(mask.sum())
        rows.append(
            {
                "bin": b,
                "lo": lo,
                "hi": hi,
                "count": n,
                "confidence": float(p[mask].mean()) if n else None,
                "accuracy": float(np.mean(o[mask])) if n else None,
            }
        )
    return rows


def ece(probs, outcomes, bins: int = 10) -> float:
    """Expected calibration error over equal-width bins; empty bins contribute 0."""
    rows = reliability_bins(probs, outcomes, bins)
    total = sum(r["count"] for r in rows)
    acc = 0.0
    for r in rows:
        if r["count"]:
            acc += (r["count"] / total) * abs(r["accuracy"] - r["confidence"])
    return acc


def interval_coverage(ci_lows, ci_highs, truths) -> float:
    """Fraction of truths inside the closed intervals."""
    lo = np.asarray(ci_lows, dtype=float)
    hi = np.asarray(ci_highs, dtype=float)
    t = np.asarray(truths, dtype=float)
    if not (lo.shape == hi.shape == t.shape):
        raise ValueError("interval bounds and truths must have equal shape")
    if np.any(lo > hi):
        bad = int(np.argmax(lo > hi))
        raise ValueError(f"inverted interval at index {bad}: [{lo[bad]}, {hi[bad]}]")
    return float(np.mean((t >= lo) & (t <= hi)))


def risk_sensitivity(
    scores: Sequence[float], labels: Sequence[int], ids: Sequence[str], q: float
) -> dict:
    """Recall and false-negative rate at the top-q% operating point.

    Records are ranked by descending score with ties broken by id, the top
    floor(q% of N) (at least 1) are flagged high risk, and recall/FNR are
    computed for the positive class at that induced threshold.
    """
    if not 0 < q < 100:
        raise ValueError(f"q must be in (0, 100), got {q}")
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if not (len(s) == len(y) == len(ids)):
        raise ValueError("scores, labels, and ids must have equal length")
    order = sorted(range(len(s)), key=lambda i: (-s[i], ids[i]))
    k = max(1, math.floor(q / 100.0 * len(s)))
    top = set(order[:k])
    positives = np.flatnonzero(y == 1)
    if len(positives) == 0:
        return {"recall_at_top_q": None, "fnr_high_risk": None, "cutoff_rank": k}
    hits = sum(1 for i in positives if i in top)
    recall = hits / len(positives)
    return {
        "recall_at_top_q": recall,
        "fnr_high_risk": 1.0 - recall,
        "cutoff_rank": k,
    }
