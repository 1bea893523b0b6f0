"""Evaluation battery: one-vs-all confusion metrics and ROC/AUC curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .records import ACUITY_LEVELS


@dataclass(frozen=True)
class ClassMetrics:
    acuity: int
    tp: int
    tn: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    # metric names whose denominator was zero (their value is reported as 0)
    zero_denominator: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "acuity": self.acuity, "tp": self.tp, "tn": self.tn,
            "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "zero_denominator": list(self.zero_denominator),
        }


@dataclass(frozen=True)
class MetricsReport:
    per_class: tuple[ClassMetrics, ...]
    accuracy: float
    n: int

    def for_class(self, acuity: int) -> ClassMetrics:
        for entry in self.per_class:
            if entry.acuity == acuity:
                return entry
        raise DataError(f"no metrics for acuity {acuity}")

    def macro_precision(self) -> float:
        return float(np.mean([m.precision for m in self.per_class]))

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n": self.n,
            "per_class": [m.as_dict() for m in self.per_class],
        }


def class_metrics_from_counts(acuity: int, tp: int, tn: int, fp: int, fn: int) -> ClassMetrics:
    """Precision/recall/F1 from raw one-vs-all counts; 0/0 defined as 0."""
    flags = []
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, flags = 0.0, flags + ["precision"]
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, flags = 0.0, flags + ["recall"]
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, flags = 0.0, flags + ["f1"]
    return ClassMetrics(acuity=acuity, tp=tp, tn=tn, fp=fp, fn=fn,
                        precision=precision, recall=recall, f1=f1,
                        zero_denominator=tuple(flags))


def evaluate(predictions, truth) -> MetricsReport:
    """One-vs-all confusion per acuity level plus overall accuracy."""
    predictions = np.asarray(predictions, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predictions.shape != truth.shape or predictions.ndim != 1:
        raise DataError(
            f"predictions and truth must be equal-length vectors, got "
            f"{predictions.shape} vs {truth.shape}")
    if predictions.shape[0] == 0:
        raise DataError("cannot evaluate an empty prediction set")
    per_class = []
    for acuity in ACUITY_LEVELS:
        pred_pos = predictions == acuity
        true_pos = truth == acuity
        tp = int(np.sum(pred_pos & true_pos))
        fp = int(np.sum(pred_pos & ~true_pos))
        fn = int(np.sum(~pred_pos & true_pos))
        tn = int(np.sum(~pred_pos & ~true_pos))
        per_class.append(class_metrics_from_counts(acuity, tp, tn, fp, fn))
    accuracy = float(np.mean(predictions == truth))
    return MetricsReport(per_class=tuple(per_class), accuracy=accuracy,
                         n=int(predictions.shape[0]))


def format_metrics_table(report: MetricsReport) -> str:
    """Aligned plain-text table: one row per acuity plus overall accuracy."""
    header = f"{'acuity':>6} {'tp':>7} {'tn':>7} {'fp':>7} {'fn':>7} " \
             f"{'precision':>9} {'recall':>9} {'f1':>9}"
    lines = [header, "-" * len(header)]
    for m in report.per_class:
        lines.append(f"{m.acuity:>6} {m.tp:>7} {m.tn:>7} {m.fp:>7} {m.fn:>7} "
                     f"{m.precision:>9.4f} {m.recall:>9.4f} {m.f1:>9.4f}")
    lines.append(f"accuracy {report.accuracy:.4f}  (n={report.n})")
    return "\n".join(lines)


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (false positive rate, true positive rate)
    auc: float


def roc_auc(scores, truth, positive_class: int) -> RocCurve:
    """One-vs-all ROC by descending-score threshold sweep, AUC by trapezoids.

    Tied scores move together across the threshold, so the curve's diagonal
    segments give AUC = P(score_pos > score_neg) + 0.5 * P(equal).
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise DataError(
            f"scores and truth must be equal-length vectors, got "
            f"{scores.shape} vs {truth.shape}")
    positive = truth == positive_class
    n_pos = int(positive.sum())
    n_neg = int(scores.shape[0] - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            f"ROC needs both positive and negative examples of class {positive_class}")
    points = [(0.0, 0.0)]
    for threshold in np.unique(scores)[::-1]:
        called = scores >= threshold
        tpr = float(np.sum(called & positive)) / n_pos
        fpr = float(np.sum(called & ~positive)) / n_neg
        points.append((fpr, tpr))
    auc = 0.0
    for (fpr0, tpr0), (fpr1, tpr1) in zip(points, points[1:]):
        auc += (fpr1 - fpr0) * (tpr1 + tpr0) / 2.0
    return RocCurve(points=tuple(points), auc=float(auc))


def roc_points_csv(curve: RocCurve) -> str:
    lines = ["fpr,tpr"]
    lines.extend(f"{fpr:.10g},{tpr:.10g}" for fpr, tpr in curve.points)
    return "\n".join(lines) + "\n"
