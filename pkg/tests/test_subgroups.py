from __future__ import annotations

import json

import pytest

from urbanrisk.evaluation.report import MetricReport, build_report, subgroup_report


class TestSubgroupReport:
    def test_identical_strata_zero_gaps(self):
        strata = ["a"] * 10 + ["b"] * 10
        y_true = [1, 0, 1, 0, 1, 0, 1, 0, 1, 0] * 2
        y_pred = [1, 0, 1, 0, 0, 0, 1, 1, 1, 0] * 2
        report = subgroup_report(strata, y_true, y_pred)
        assert report.gaps["accuracy"] == 0.0
        assert report.gaps["macro_f1"] == 0.0

    def test_hand_built_confusions(self):
        # stratum a: 2 positives, 1 missed -> FNR 0.5; accuracy 3/4
        # stratum b: 2 positives, 0 missed -> FNR 0.0; accuracy 4/4
        strata = ["a"] * 4 + ["b"] * 4
        y_true = [1, 1, 0, 0, 1, 1, 0, 0]
        y_pred = [1, 0, 0, 0, 1, 1, 0, 0]
        report = subgroup_report(strata, y_true, y_pred)
        assert report.subgroups["a"].values["fnr_high_risk"] == pytest.approx(0.5)
        assert report.subgroups["b"].values["fnr_high_risk"] == pytest.approx(0.0)
        assert report.gaps["fnr_high_risk"] == pytest.approx(0.5)
        assert report.gaps["accuracy"] == pytest.approx(0.25)

    def test_quintile_labels_give_five_reports(self):
        strata = [str(q) for q in range(1, 6) for _ in range(4)]
        y_true = [1, 0, 1, 0] * 5
        y_pred = [1, 0, 0, 0] * 5
        report = subgroup_report(strata, y_true, y_pred)
        assert len(report.subgroups) == 5

    def test_tiny_stratum_flagged_and_excluded(self):
        strata = ["big"] * 6 + ["tiny"]
        y_true = [1, 0, 1, 0, 1, 0, 1]
        y_pred = [1, 0, 1, 0, 1, 0, 1]
        report = subgroup_report(strata, y_true, y_pred)
        assert "tiny" not in report.subgroups
        assert any("tiny" in n for n in report.notes)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            subgroup_report(["a"], [1, 0], [1, 0])


class TestMetricReport:
    def test_stable_key_order(self):
        r = build_report(
            y_true_class=[1, 0, 1],
            y_pred_class=[1, 0, 0],
            y_true_reg=[1.0, 2.0, 3.0],
            y_pred_reg=[1.1, 1.9, 3.2],
        )
        keys = list(r.to_dict()["metrics"])
        assert keys.index("accuracy") < keys.index("mae")
        # serialization parse-back preserves order
        parsed = json.loads(r.to_json())
        assert list(parsed["metrics"]) == keys

    def test_probability_bounds_validated(self):
        with pytest.raises(ValueError, match="ece"):
            MetricReport(values={"ece": 1.4})

    def test_reliability_csv_export(self):
        r = build_report(probs=[0.1, 0.9, 0.95], outcomes=[0, 1, 1])
        csv = r.reliability_csv()
        lines = csv.strip().split("\n")
        assert lines[0] == "bin,lo,hi,count,confidence,accuracy"
        assert len(lines) == 11

    def test_accessibility_block(self):
        r = build_report(
            accessibility={
                "reachability_rate": 0.8,
                "mean_travel_time_s": 412.0,
                "mean_redundancy": 1.5,
            }
        )
        assert r.values["reachability_rate"] == 0.8
        assert r.values["mean_hazard_travel_time_s"] == 412.0
