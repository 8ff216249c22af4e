import numpy as np
import pytest

from oracles import brute_force_auc
from semshift.cohorts import Relation
from semshift.metrics import (
    PERFORMANCE_CSV_HEADER,
    MetricError,
    PerformanceRecord,
    auc,
    macro_average_auc,
    ppv_at_recall,
    pr_curve,
    read_performance_csv,
    roc_curve,
    write_performance_csv,
)


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [False, False, True, True]) == 1.0

    def test_all_ties_is_half(self):
        assert auc([0.4] * 6, [True, False, True, False, False, True]) == 0.5

    def test_hand_counted(self):
        assert auc([0.1, 0.4, 0.35, 0.8], [False, False, True, True]) == 0.75

    def test_single_class_errors(self):
        with pytest.raises(MetricError, match="undefined AUC"):
            auc([0.1, 0.2], [True, True])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(2, 50))
            scores = rng.choice([0.1, 0.25, 0.5, 0.7, 0.9], size=n)
            positives = rng.random(n) < 0.4
            if positives.all() or not positives.any():
                continue
            assert abs(auc(scores, positives) - brute_force_auc(scores, positives)) <= 1e-12

    def test_complement_sums_to_one(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            scores = rng.normal(size=30)
            positives = rng.random(30) < 0.5
            if positives.all() or not positives.any():
                continue
            assert auc(scores, positives) + auc(scores, ~positives) == pytest.approx(1.0, abs=1e-12)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(2)
        scores = rng.normal(size=40)
        positives = rng.random(40) < 0.5
        base = auc(scores, positives)
        assert auc(np.exp(scores), positives) == pytest.approx(base, abs=1e-12)
        assert auc(3.0 * scores + 7.0, positives) == pytest.approx(base, abs=1e-12)


class TestRocCurve:
    def test_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(3)
        scores = rng.normal(size=50)
        positives = rng.random(50) < 0.4
        curve = roc_curve(scores, positives)
        assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
        assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
        assert (np.diff(curve.fpr) >= 0).all()
        assert (np.diff(curve.tpr) >= 0).all()
        assert (np.diff(curve.thresholds) < 0).all()

    def test_trapezoid_equals_rank_statistic(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(3, 60))
            scores = rng.choice(np.linspace(0, 1, 7), size=n)
            positives = rng.random(n) < 0.5
            if positives.all() or not positives.any():
                continue
            assert abs(roc_curve(scores, positives).auc - auc(scores, positives)) <= 1e-12


class TestPrCurve:
    def test_perfect_classifier(self):
        curve = pr_curve([0.9, 0.8, 0.2, 0.1], [True, True, False, False])
        achieved = curve.precisions[curve.thresholds >= 0.8]
        assert (achieved == 1.0).all()
        assert curve.ap == pytest.approx(1.0, abs=1e-12)

    def test_hand_enumeration(self):
        curve = pr_curve([0.9, 0.8, 0.7], [True, False, True])
        assert list(curve.recalls) == [0.0, 0.5, 0.5, 1.0]
        assert list(curve.precisions) == pytest.approx([1.0, 1.0, 0.5, 2.0 / 3.0], abs=1e-12)
        assert curve.ap == pytest.approx(0.5 * 1.0 + 0.5 * 2.0 / 3.0, abs=1e-12)

    def test_no_positives_errors(self):
        with pytest.raises(MetricError):
            pr_curve([0.4, 0.2], [False, False])

    def test_recall_spans_unit_interval(self):
        rng = np.random.default_rng(5)
        scores = rng.normal(size=30)
        positives = rng.random(30) < 0.3
        positives[0] = True
        curve = pr_curve(scores, positives)
        assert curve.recalls[0] == 0.0 and curve.recalls[-1] == 1.0

    def test_ap_bounds_and_prevalence(self):
        rng = np.random.default_rng(6)
        aps = []
        prevalence = 0.3
        for _ in range(200):
            scores = rng.normal(size=60)
            positives = rng.random(60) < prevalence
            if not positives.any():
                continue
            ap = pr_curve(scores, positives).ap
            assert ap <= 1.0 + 1e-12
            aps.append(ap - positives.mean())
        # random scores: average precision concentrates at prevalence
        assert float(np.mean(aps)) >= -0.01


class TestPpvAtRecall:
    def test_perfect_classifier(self):
        assert ppv_at_recall([0.9, 0.8, 0.2], [True, True, False], 0.9) == 1.0

    def test_hand_ranking(self):
        # 10 examples, positives at ranks 1,2,3,4,7: the recall floor is first
        # reached at depth 7, where precision is 5/7
        scores = [10, 9, 8, 7, 6, 5, 4, 3, 2, 1]
        positives = [True, True, True, True, False, False, True, False, False, False]
        assert ppv_at_recall(scores, positives, 0.9) == pytest.approx(5.0 / 7.0, abs=1e-12)

    def test_floor_zero_gives_top_threshold(self):
        scores = [0.9, 0.8, 0.7]
        positives = [False, True, True]
        assert ppv_at_recall(scores, positives, 0.0) == 0.0  # top-1 is a negative

    def test_invalid_floor(self):
        with pytest.raises(MetricError):
            ppv_at_recall([0.5], [True], 1.5)

    def test_no_positives_errors(self):
        with pytest.raises(MetricError):
            ppv_at_recall([0.5, 0.4], [False, False], 0.9)


class TestMacroAverage:
    def test_constant(self):
        assert macro_average_auc((0.7, 0.7, 0.7)) == 0.7

    def test_reference_row(self):
        # per-class AUCs from the bundled reference table's first row
        assert macro_average_auc((0.975534, 0.993217, 0.937577)) == pytest.approx(
            0.968776, abs=1e-6
        )

    def test_spread(self):
        assert macro_average_auc((1.0, 0.0, 0.5)) == 0.5

    def test_requires_three_finite(self):
        with pytest.raises(MetricError):
            macro_average_auc((0.5, 0.5))
        with pytest.raises(MetricError):
            macro_average_auc((0.5, float("nan"), 0.5))


class TestPerformanceCsv:
    def test_header_and_roundtrip(self, tmp_path):
        rec = PerformanceRecord(
            train_name="a train",
            test_name="b test",
            relation=Relation.EXTERNAL,
            mcd=0.244537,
            auc_yes=0.9,
            auc_no=0.8,
            auc_maybe=0.7,
            ppv_yes=0.6,
            ppv_no=0.5,
            ppv_maybe=0.4,
        )
        path = tmp_path / "perf.csv"
        write_performance_csv([rec], path)
        first_line = path.read_text().splitlines()[0]
        assert first_line == ",".join(PERFORMANCE_CSV_HEADER)
        assert (
            first_line
            == "train_set,test_set,relation,mcd,auc_yes,auc_no,auc_maybe,ppv_yes,ppv_no,ppv_maybe,macro_auc"
        )
        back = read_performance_csv(path)
        assert back == [rec]
        assert back[0].macro_auc == pytest.approx(0.8, abs=1e-12)
