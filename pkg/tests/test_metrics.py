from __future__ import annotations

import numpy as np
import pytest

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

from oracles import (
    naive_accuracy,
    naive_auroc,
    naive_ece,
    naive_macro_f1,
    naive_mae,
    naive_recall_at_top_q,
    naive_rmse,
)


class TestECE:
    def test_perfect_degenerate_predictions(self):
        probs = [0.0, 1.0, 1.0, 0.0]
        outcomes = [0, 1, 1, 0]
        assert ece(probs, outcomes) == 0.0

    def test_hand_case_point_eight(self):
        # 10 predictions at 0.8 with 6 successes: |0.6 - 0.8| = 0.2
        probs = [0.8] * 10
        outcomes = [1] * 6 + [0] * 4
        assert ece(probs, outcomes) == pytest.approx(0.2)

    def test_half_positive_at_half_confidence(self):
        probs = [0.5] * 10
        outcomes = [1, 0] * 5
        assert ece(probs, outcomes) == pytest.approx(0.0)

    def test_matches_naive_on_random_inputs(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rng.uniform(size=50)
            o = (rng.uniform(size=50) < p).astype(int)
            assert ece(p, o) == pytest.approx(naive_ece(p.tolist(), o.tolist()), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            ece([0.5], [1, 0])

    def test_invalid_probability(self):
        with pytest.raises(ValueError, match="probabilities"):
            ece([1.2], [1])

    def test_bins_partition_unit_interval(self):
        rows = reliability_bins([0.05, 0.95, 1.0], [0, 1, 1])
        assert rows[0]["count"] == 1
        assert rows[-1]["count"] == 2  # p = 1.0 falls in the last closed bin
        assert rows[0]["lo"] == 0.0 and rows[-1]["hi"] == 1.0


class TestCoverage:
    def test_all_enclosing(self):
        assert interval_coverage([-10] * 5, [10] * 5, [0, 1, -3, 9.9, -9.9]) == 1.0

    def test_zero_width_at_truth_closed(self):
        assert interval_coverage([2.0], [2.0], [2.0]) == 1.0

    def test_normal_quantiles(self):
        rng = np.random.default_rng(17)
        x = rng.normal(size=10_000)
        cov = interval_coverage([-1.645] * len(x), [1.645] * len(x), x)
        assert cov == pytest.approx(0.90, abs=0.02)

    def test_monotone_under_widening(self):
        rng = np.random.default_rng(3)
        truths = rng.normal(size=200)
        lows = truths - rng.uniform(0, 1, size=200)
        highs = truths + rng.uniform(0, 1, size=200) - 0.8  # some misses
        highs = np.maximum(highs, lows)
        base = interval_coverage(lows, highs, truths)
        widened = interval_coverage(lows - 0.5, highs + 0.5, truths)
        assert widened >= base

    def test_inverted_interval_rejected(self):
        with pytest.raises(ValueError, match="inverted"):
            interval_coverage([1.0], [0.5], [0.7])


class TestRiskSensitivity:
    def test_perfect_ranking(self):
        scores = [0.9, 0.8, 0.2, 0.1, 0.05]
        labels = [1, 1, 0, 0, 0]
        out = risk_sensitivity(scores, labels, list("abcde"), q=40)
        assert out["recall_at_top_q"] == 1.0
        assert out["fnr_high_risk"] == 0.0

    def test_inverted_ranking(self):
        scores = [0.1, 0.2, 0.9, 0.95, 0.99]
        labels = [1, 1, 0, 0, 0]
        out = risk_sensitivity(scores, labels, list("abcde"), q=40)
        assert out["recall_at_top_q"] == 0.0
        assert out["fnr_high_risk"] == 1.0

    def test_matches_bruteforce_on_random_case(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            scores = rng.uniform(size=20).round(2)  # rounded to force ties
            labels = rng.integers(0, 2, size=20)
            ids = [f"i{k:02d}" for k in range(20)]
            for q in (10, 25, 50):
                got = risk_sensitivity(scores, labels, ids, q)["recall_at_top_q"]
                want = naive_recall_at_top_q(scores.tolist(), labels.tolist(), ids, q)
                assert got == want

    def test_no_positives_gives_undefined_marker(self):
        out = risk_sensitivity([0.5, 0.4], [0, 0], ["a", "b"], q=50)
        assert out["recall_at_top_q"] is None
        assert out["fnr_high_risk"] is None

    def test_q_range_validated(self):
        with pytest.raises(ValueError, match="q must be"):
            risk_sensitivity([0.5], [1], ["a"], q=0)


class TestBasicMetricsAgainstNaive:
    def test_fifty_item_random_cases(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            y_true = rng.integers(0, 3, size=50)
            y_pred = rng.integers(0, 3, size=50)
            assert accuracy(y_true, y_pred) == pytest.approx(
                naive_accuracy(y_true.tolist(), y_pred.tolist())
            )
            assert macro_f1(y_true, y_pred) == pytest.approx(
                naive_macro_f1(y_true.tolist(), y_pred.tolist())
            )
            a = rng.normal(size=50)
            b = rng.normal(size=50)
            assert mae(a, b) == pytest.approx(naive_mae(a.tolist(), b.tolist()))
            assert rmse(a, b) == pytest.approx(naive_rmse(a.tolist(), b.tolist()))
            labels = rng.integers(0, 2, size=50)
            scores = rng.uniform(size=50).round(1)  # ties included
            assert auroc(labels, scores) == pytest.approx(
                naive_auroc(labels.tolist(), scores.tolist())
            )

    def test_auroc_single_class_undefined(self):
        assert auroc([1, 1], [0.2, 0.4]) is None
