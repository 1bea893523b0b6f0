"""Exploratory analyses: feature/target correlation and acuity-binned histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ZeroVarianceError
from .records import TriageRecord


def pearson_correlation(matrix, target) -> list[float]:
    """Pearson r of each matrix column against the target vector."""
    matrix = np.asarray(matrix, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if matrix.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {matrix.shape}")
    if matrix.shape[0] != target.shape[0]:
        raise DataError(
            f"row count mismatch: {matrix.shape[0]} features vs {target.shape[0]} targets")
    if matrix.shape[0] < 2:
        raise DataError("correlation needs at least two rows")
    target_centered = target - target.mean()
    target_ss = float(target_centered @ target_centered)
    if target_ss == 0.0:
        raise ZeroVarianceError("target")
    coefficients = []
    for j in range(matrix.shape[1]):
        column = matrix[:, j] - matrix[:, j].mean()
        column_ss = float(column @ column)
        if column_ss == 0.0:
            raise ZeroVarianceError(f"column {j}")
        coefficients.append(float(column @ target_centered) / math.sqrt(column_ss * target_ss))
    return coefficients


@dataclass(frozen=True)
class FeatureBin:
    lower: float            # inclusive
    upper: float            # exclusive
    counts: dict[int, int]  # per-acuity record counts

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def bin_distribution(records: list[TriageRecord], feature: str,
                     bin_width: float) -> list[FeatureBin]:
    """Histogram of a vital on half-open bins [k*w, (k+1)*w), split by acuity."""
    if bin_width <= 0:
        raise DataError(f"bin width must be positive, got {bin_width}")
    counts: dict[int, dict[int, int]] = {}
    for i, rec in enumerate(records):
        value = rec.vitals.get(feature)
        if value is None:
            raise DataError(f"missing feature {feature!r} in row {i}")
        if rec.acuity is None:
            raise DataError(f"missing acuity in row {i}")
        k = math.floor(value / bin_width)
        counts.setdefault(k, {}).setdefault(rec.acuity, 0)
        counts[k][rec.acuity] += 1
    return [
        FeatureBin(lower=k * bin_width, upper=(k + 1) * bin_width,
                   counts=dict(sorted(counts[k].items())))
        for k in sorted(counts)
    ]
