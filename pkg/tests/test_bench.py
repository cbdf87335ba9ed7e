"""Benchmark metrics: confusion, accuracy, macro F1, age-group mapping."""

import numpy as np
import pytest

from screencensus.bench import (
    BenchmarkReport,
    evaluate,
    format_report_table,
    map_fine_age_to_groups,
    report_to_json,
    select_subset,
)
from screencensus.classifier import AGE_CLASSES
from screencensus.errors import InputError


def naive_one_vs_rest_f1(predicted, true, positive):
    tp = sum(1 for p, t in zip(predicted, true) if p == positive and t == positive)
    fp = sum(1 for p, t in zip(predicted, true) if p == positive and t != positive)
    fn = sum(1 for p, t in zip(predicted, true) if p != positive and t == positive)
    if tp == 0 and (fp + fn) >= 0:
        precision = tp / (tp + fp) if (tp + fp) else 0.0
        recall = tp / (tp + fn) if (tp + fn) else 0.0
    else:
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


class TestEvaluate:
    def test_perfect_predictions(self):
        labels = ["A", "B", "A", "B"]
        rep = evaluate(labels, labels, ("A", "B"))
        assert rep.accuracy == 1.0
        assert rep.macro_f1 == 1.0

    def test_hand_case(self):
        # truth [A,A,B], predicted [A,B,B]: accuracy 2/3, both class F1s
        # 2/3, macro 2/3
        rep = evaluate(["A", "B", "B"], ["A", "A", "B"], ("A", "B"))
        assert abs(rep.accuracy - 2 / 3) < 1e-12
        assert abs(rep.macro_f1 - 2 / 3) < 1e-12
        np.testing.assert_array_equal(rep.confusion, [[1, 1], [0, 1]])

    def test_matches_naive_oracle_binary(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 60))
            true = [("A", "B")[i] for i in rng.integers(0, 2, n)]
            pred = [("A", "B")[i] for i in rng.integers(0, 2, n)]
            rep = evaluate(pred, true, ("A", "B"))
            oracle = np.mean([naive_one_vs_rest_f1(pred, true, c) for c in "AB"])
            assert abs(rep.macro_f1 - oracle) <= 1e-12

    def test_permutation_invariance(self, rng):
        n = 40
        true = [AGE_CLASSES[i] for i in rng.integers(0, 9, n)]
        pred = [AGE_CLASSES[i] for i in rng.integers(0, 9, n)]
        rep_a = evaluate(pred, true, AGE_CLASSES)
        order = rng.permutation(n)
        rep_b = evaluate([pred[i] for i in order], [true[i] for i in order],
                         AGE_CLASSES)
        assert rep_a.accuracy == rep_b.accuracy
        assert rep_a.macro_f1 == rep_b.macro_f1
        np.testing.assert_array_equal(rep_a.confusion, rep_b.confusion)

    def test_absent_class_scores_zero(self):
        rep = evaluate(["A", "A"], ["A", "A"], ("A", "B"))
        assert rep.accuracy == 1.0
        assert abs(rep.macro_f1 - 0.5) < 1e-12  # F1_B = 0 by convention

    def test_errors(self):
        with pytest.raises(InputError):
            evaluate(["A"], ["A", "B"], ("A", "B"))
        with pytest.raises(InputError):
            evaluate([], [], ("A", "B"))
        with pytest.raises(InputError):
            evaluate(["C"], ["A"], ("A", "B"))
        with pytest.raises(InputError):
            evaluate(["A"], ["C"], ("A", "B"))

    def test_report_consistency_checked(self):
        with pytest.raises(InputError):
            BenchmarkReport("t", "m", 0.9, 0.9, np.array([[1, 0], [0, 1]]),
                            ("A", "B"), 2)


class TestAgeMapping:
    def test_boundaries(self):
        assert map_fine_age_to_groups(0) == "0-2"
        assert map_fine_age_to_groups(2) == "0-2"
        assert map_fine_age_to_groups(3) == "3-9"
        assert map_fine_age_to_groups(50) == "50-59"
        assert map_fine_age_to_groups(69) == "60-69"
        assert map_fine_age_to_groups(70) == "70+"
        assert map_fine_age_to_groups(100) == "70+"

    def test_exhaustive_partition(self):
        # every integer age maps to exactly one group, and group order is
        # monotone in age
        seen_groups = []
        for age in range(0, 101):
            group = map_fine_age_to_groups(age)
            assert group in AGE_CLASSES
            if group not in seen_groups:
                seen_groups.append(group)
        assert seen_groups == list(AGE_CLASSES)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            map_fine_age_to_groups(-1)
        with pytest.raises(InputError):
            map_fine_age_to_groups(101)


class TestReportOutput:
    def test_table_contains_reference_context(self):
        rep = evaluate(["A", "B"], ["A", "B"], ("A", "B"), task="gender",
                       model_name="trained-head")
        table = format_report_table([rep])
        assert "trained-head Gender" in table
        assert "not asserted" in table
        assert "97.50" in table

    def test_json_roundtrip(self):
        rep = evaluate(["A", "B"], ["A", "B"], ("A", "B"), task="gender",
                       model_name="m")
        import json

        doc = json.loads(report_to_json([rep], "fingerprint"))
        assert doc["config_fingerprint"] == "fingerprint"
        assert doc["reports"][0]["accuracy"] == 1.0


class TestSubset:
    def test_deterministic_and_sorted(self):
        a = select_subset(1000, 100, seed=5)
        b = select_subset(1000, 100, seed=5)
        np.testing.assert_array_equal(a, b)
        assert np.all(np.diff(a) > 0)
        assert len(set(a.tolist())) == 100

    def test_limit_zero_rejected(self):
        with pytest.raises(InputError):
            select_subset(10, 0, seed=1)

    def test_limit_none_full(self):
        np.testing.assert_array_equal(select_subset(5, None, 0), np.arange(5))
