"""Uniform prediction over any trained model type.

Each model carries the feature names it consumes (and, for networks, its
normalization parameters), so callers can hand over raw triage records and
get acuity predictions back regardless of model family.
"""

from __future__ import annotations

import numpy as np

from .ensemble import EnsembleModel, ensemble_predict_batch
from .errors import DataError, OutOfRangeError
from .mlp import (MlpModel, TriageLabel, classify_vitals, predict_batch,
                  probabilities_batch)
from .preprocess import apply_normalization, feature_matrix
from .records import TriageRecord, VitalSigns, bound_violations
from .tree import DecisionTree, tree_predict_batch, tree_predict_proba_batch


def model_features(model) -> tuple[str, ...]:
    if isinstance(model, MlpModel):
        if model.normalization is None:
            raise DataError("network has no bound normalization parameters")
        return tuple(model.normalization.features)
    if isinstance(model, DecisionTree):
        return tuple(model.features)
    if isinstance(model, EnsembleModel):
        return tuple(model.features)
    raise DataError(f"unknown model type: {type(model).__name__}")


def _ensemble_probabilities(model: EnsembleModel, matrix: np.ndarray) -> np.ndarray:
    per_learner = np.stack([
        probabilities_batch(l.model, matrix[:, list(l.feature_pair)])
        for l in model.learners
    ], axis=0)
    return per_learner.mean(axis=0)


def make_classifier(model):
    """Wrap any supported model as a VitalSigns -> TriageLabel callable.

    Every family gets the same guard rails as the network path: vitals
    outside the plausibility bounds raise OutOfRangeError (the sensor-fault
    signal) and a missing required feature raises DataError.
    """
    if isinstance(model, MlpModel):
        if model.normalization is None:
            raise DataError("network has no bound normalization parameters")
        return lambda vitals: classify_vitals(model, vitals)
    features = model_features(model)

    def classify(vitals: VitalSigns) -> TriageLabel:
        violations = bound_violations(vitals)
        if violations:
            raise OutOfRangeError(
                f"vitals out of plausible range: {', '.join(violations)}")
        values = []
        for feature in features:
            value = vitals.get(feature)
            if value is None:
                raise DataError(f"missing feature {feature!r}")
            values.append(value)
        row = np.asarray([values], dtype=float)
        if isinstance(model, DecisionTree):
            acuity = int(tree_predict_batch(model, row)[0])
            probabilities = tree_predict_proba_batch(model, row)[0]
        else:
            if model.normalization is not None:
                row = apply_normalization(row, model.normalization)
            acuity = int(ensemble_predict_batch(model, row)[0])
            probabilities = _ensemble_probabilities(model, row)[0]
        return TriageLabel(acuity=acuity,
                           probabilities=tuple(float(p) for p in probabilities))

    return classify


def predict_records(model, records: list[TriageRecord]) -> np.ndarray:
    """Acuity predictions for raw records, honoring the model's own features."""
    matrix = feature_matrix(records, model_features(model))
    if isinstance(model, MlpModel):
        return predict_batch(model, apply_normalization(matrix, model.normalization))
    if isinstance(model, DecisionTree):
        return tree_predict_batch(model, matrix)
    if model.normalization is not None:
        matrix = apply_normalization(matrix, model.normalization)
    return ensemble_predict_batch(model, matrix)


def score_records(model, records: list[TriageRecord]) -> np.ndarray:
    """(n, 5) per-class scores for ROC sweeps: softmax output for networks,
    leaf class shares for trees, mean learner probability for ensembles."""
    matrix = feature_matrix(records, model_features(model))
    if isinstance(model, MlpModel):
        return probabilities_batch(model, apply_normalization(matrix, model.normalization))
    if isinstance(model, DecisionTree):
        return tree_predict_proba_batch(model, matrix)
    if model.normalization is not None:
        matrix = apply_normalization(matrix, model.normalization)
    return _ensemble_probabilities(model, matrix)
