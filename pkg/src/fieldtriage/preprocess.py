"""Cleaning, normalization, rebalancing, and splitting of triage records.

The cleaning pass runs in a fixed order — exact duplicates, then incomplete
rows, then physiologically implausible rows — so the per-step removal counts
in the report are reproducible and add up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ZeroVarianceError
from .records import (VITAL_FIELDS, TriageRecord, feature_values, in_bounds)


@dataclass(frozen=True)
class PreprocessReport:
    initial: int
    duplicates_removed: int
    missing_removed: int
    outliers_removed: int
    final: int

    def as_dict(self) -> dict:
        return {
            "initial": self.initial,
            "duplicates_removed": self.duplicates_removed,
            "missing_removed": self.missing_removed,
            "outliers_removed": self.outliers_removed,
            "final": self.final,
        }


def remove_duplicates(records: list[TriageRecord]) -> list[TriageRecord]:
    """Drop rows identical across every column, keeping the first occurrence."""
    seen = set()
    kept = []
    for rec in records:
        key = rec.key()
        if key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    return kept


def remove_missing(records: list[TriageRecord]) -> list[TriageRecord]:
    """Drop rows lacking any of the six vitals or the acuity label."""
    return [r for r in records if r.vitals.complete() and r.acuity is not None]


def remove_outliers(records: list[TriageRecord]) -> list[TriageRecord]:
    """Drop rows with any vital strictly outside its plausibility bounds."""
    return [r for r in records if in_bounds(r.vitals)]


def preprocess(records: list[TriageRecord]) -> tuple[list[TriageRecord], PreprocessReport]:
    initial = len(records)
    deduped = remove_duplicates(records)
    complete = remove_missing(deduped)
    plausible = remove_outliers(complete)
    report = PreprocessReport(
        initial=initial,
        duplicates_removed=initial - len(deduped),
        missing_removed=len(deduped) - len(complete),
        outliers_removed=len(complete) - len(plausible),
        final=len(plausible),
    )
    return plausible, report


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature mean and population standard deviation for z-scoring."""
    features: tuple[str, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "features": list(self.features),
            "means": list(self.means),
            "stds": list(self.stds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationParams":
        try:
            return cls(
                features=tuple(data["features"]),
                means=tuple(float(m) for m in data["means"]),
                stds=tuple(float(s) for s in data["stds"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed normalization params: {exc}") from exc


def feature_matrix(records: list[TriageRecord], features) -> np.ndarray:
    """(n, len(features)) float64 matrix; missing values are an error."""
    rows = [feature_values(rec, features, row_index=i) for i, rec in enumerate(records)]
    return np.asarray(rows, dtype=np.float64).reshape(len(records), len(features))


def label_vector(records: list[TriageRecord]) -> np.ndarray:
    labels = []
    for i, rec in enumerate(records):
        if rec.acuity is None:
            raise DataError(f"missing acuity in row {i}")
        labels.append(rec.acuity)
    return np.asarray(labels, dtype=np.int64)


def fit_normalization(records: list[TriageRecord],
                      features=VITAL_FIELDS) -> NormalizationParams:
    if not records:
        raise DataError("cannot fit normalization on an empty dataset")
    matrix = feature_matrix(records, features)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population denominator (ddof=0)
    for feature, std in zip(features, stds):
        if std == 0.0:
            raise ZeroVarianceError(feature)
    return NormalizationParams(tuple(features), tuple(means.tolist()), tuple(stds.tolist()))


def apply_normalization(matrix: np.ndarray, params: NormalizationParams) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[1] != len(params.features):
        raise DataError(
            f"feature count mismatch: matrix has {matrix.shape[1]}, "
            f"params have {len(params.features)}")
    means = np.asarray(params.means)
    stds = np.asarray(params.stds)
    return (matrix - means) / stds


def rebalance(records: list[TriageRecord], seed: int) -> list[TriageRecord]:
    """Down-sample every class to the size of the rarest one.

    Sampling is without replacement and seeded; the output preserves the
    original relative order of the kept rows.
    """
    by_class: dict[int, list[int]] = {}
    for i, rec in enumerate(records):
        if rec.acuity is None:
            raise DataError(f"missing acuity in row {i}")
        by_class.setdefault(rec.acuity, []).append(i)
    if not by_class:
        return []
    target = min(len(idx) for idx in by_class.values())
    rng = np.random.default_rng(seed)
    kept: list[int] = []
    for acuity in sorted(by_class):
        indices = by_class[acuity]
        chosen = rng.choice(len(indices), size=target, replace=False)
        kept.extend(indices[i] for i in chosen)
    kept.sort()
    return [records[i] for i in kept]


def train_test_split(records: list[TriageRecord], ratio: float,
                     seed: int) -> tuple[list[TriageRecord], list[TriageRecord]]:
    """Seeded shuffle, then cut: the first floor(n * ratio) rows train."""
    if not 0.0 <= ratio <= 1.0:
        raise DataError(f"split ratio must be in [0, 1], got {ratio}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    cut = int(len(records) * ratio)
    train = [records[i] for i in order[:cut]]
    test = [records[i] for i in order[cut:]]
    return train, test
