"""Per-class ROC / precision-recall evaluation.

AUC follows the Mann-Whitney formulation, P(score+ > score-) + half credit for
ties (midranks), which equals the trapezoidal area under the ROC curve. The
precision-recall machinery does not interpolate between thresholds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cohorts import Relation


class MetricError(ValueError):
    pass


def _scores_and_mask(scores, positives):
    s = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(positives, dtype=bool)
    if s.shape != pos.shape or s.ndim != 1:
        raise MetricError("scores and positives must be aligned 1-D sequences")
    if not np.all(np.isfinite(s)):
        raise MetricError("scores must be finite")
    return s, pos


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their ranks."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(scores, positives) -> float:
    """One-vs-rest ROC AUC: P(score+ > score-) + 0.5 P(tie)."""
    s, pos = _scores_and_mask(scores, positives)
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("undefined AUC: ground truth contains a single class")
    ranks = _midranks(s)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray  # descending; leading +inf anchor
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


@dataclass(frozen=True)
class PrCurve:
    thresholds: np.ndarray  # descending; leading +inf anchor at recall 0
    recalls: np.ndarray
    precisions: np.ndarray
    ap: float


def _threshold_sweep(scores, positives):
    """Cumulative TP/FP counts at each distinct threshold, descending."""
    s, pos = _scores_and_mask(scores, positives)
    order = np.argsort(-s, kind="mergesort")
    s_sorted = s[order]
    pos_sorted = pos[order]
    distinct = np.flatnonzero(np.diff(s_sorted) != 0.0)
    last = np.concatenate([distinct, [len(s_sorted) - 1]])
    tp = np.cumsum(pos_sorted)[last].astype(np.float64)
    fp = (last + 1.0) - tp
    return s_sorted[last], tp, fp, int(pos.sum()), int((~pos).sum())


def roc_curve(scores, positives) -> RocCurve:
    """ROC points at every distinct threshold; starts at (0, 0), ends at (1, 1)."""
    thresholds, tp, fp, n_pos, n_neg = _threshold_sweep(scores, positives)
    if n_pos == 0 or n_neg == 0:
        raise MetricError("undefined ROC: ground truth contains a single class")
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    thresholds = np.concatenate([[np.inf], thresholds])
    area = float(np.trapezoid(tpr, fpr))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=area)


def pr_curve(scores, positives) -> PrCurve:
    """Precision-recall points at every distinct threshold, descending.

    Average precision is the step sum over descending thresholds,
    sum_i (r_i - r_{i-1}) p_i with r_0 = 0; no interpolation.
    """
    thresholds, tp, fp, n_pos, _ = _threshold_sweep(scores, positives)
    if n_pos == 0:
        raise MetricError("precision-recall undefined without positives")
    recalls = tp / n_pos
    precisions = tp / (tp + fp)
    ap = float(np.sum(np.diff(np.concatenate([[0.0], recalls])) * precisions))
    return PrCurve(
        thresholds=np.concatenate([[np.inf], thresholds]),
        recalls=np.concatenate([[0.0], recalls]),
        precisions=np.concatenate([[1.0], precisions]),
        ap=ap,
    )


def ppv_at_recall(scores, positives, recall_floor: float = 0.9) -> float:
    """Precision at the largest threshold whose recall is >= the floor."""
    if not 0.0 <= recall_floor <= 1.0:
        raise MetricError(f"recall floor must be in [0, 1], got {recall_floor}")
    thresholds, tp, fp, n_pos, _ = _threshold_sweep(scores, positives)
    if n_pos == 0:
        raise MetricError("PPV at a recall floor undefined without positives")
    recalls = tp / n_pos
    hit = np.flatnonzero(recalls >= recall_floor)
    if hit.size == 0:  # unreachable for floor <= 1: the lowest threshold has recall 1
        raise MetricError(f"recall floor {recall_floor} not reachable")
    k = int(hit[0])
    return float(tp[k] / (tp[k] + fp[k]))


def macro_average_auc(per_class) -> float:
    """Unweighted mean of the per-class AUCs."""
    values = np.asarray(list(per_class), dtype=np.float64)
    if values.shape != (3,):
        raise MetricError(f"expected 3 per-class values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise MetricError("per-class AUCs must be finite")
    if values[0] == values[1] == values[2]:
        return float(values[0])
    return float(values.mean())


PERFORMANCE_CSV_HEADER = [
    "train_set",
    "test_set",
    "relation",
    "mcd",
    "auc_yes",
    "auc_no",
    "auc_maybe",
    "ppv_yes",
    "ppv_no",
    "ppv_maybe",
    "macro_auc",
]


@dataclass(frozen=True)
class PerformanceRecord:
    """One train-to-test evaluation: per-class AUC and PPV plus the pair MCD."""

    train_name: str
    test_name: str
    relation: Relation
    mcd: float
    auc_yes: float
    auc_no: float
    auc_maybe: float
    ppv_yes: float
    ppv_no: float
    ppv_maybe: float

    @property
    def macro_auc(self) -> float:
        return macro_average_auc((self.auc_yes, self.auc_no, self.auc_maybe))

    def csv_row(self) -> list:
        return [
            self.train_name,
            self.test_name,
            self.relation.value,
            repr(self.mcd),
            repr(self.auc_yes),
            repr(self.auc_no),
            repr(self.auc_maybe),
            repr(self.ppv_yes),
            repr(self.ppv_no),
            repr(self.ppv_maybe),
            repr(self.macro_auc),
        ]


def write_performance_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PERFORMANCE_CSV_HEADER)
        for rec in records:
            writer.writerow(rec.csv_row())


def read_performance_csv(path) -> list:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != PERFORMANCE_CSV_HEADER:
            raise MetricError(f"unexpected performance CSV header: {reader.fieldnames}")
        for row in reader:
            records.append(
                PerformanceRecord(
                    train_name=row["train_set"],
                    test_name=row["test_set"],
                    relation=Relation(row["relation"]),
                    mcd=float(row["mcd"]),
                    auc_yes=float(row["auc_yes"]),
                    auc_no=float(row["auc_no"]),
                    auc_maybe=float(row["auc_maybe"]),
                    ppv_yes=float(row["ppv_yes"]),
                    ppv_no=float(row["ppv_no"]),
                    ppv_maybe=float(row["ppv_maybe"]),
                )
            )
    return records
