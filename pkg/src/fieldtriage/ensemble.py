"""Pairwise-feature ensemble: ten small networks, one per feature pair.

Each weak learner sees two of the five vitals (the ten unordered pairs in
lexicographic order) and is a 2-input network with two 16-unit hidden
layers. Prediction is plurality vote; ties fall back to summed class
probabilities, then to the more severe class.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DataError
from .mlp import (MlpModel, TrainConfig, build_network, mlp_train,
                  probabilities_batch)
from .preprocess import NormalizationParams
from .records import ACUITY_LEVELS, FIVE_FEATURES
from .seeds import derive_seed

WEAK_HIDDEN_WIDTHS = (16, 16)
FEATURE_PAIRS = tuple(combinations(range(len(FIVE_FEATURES)), 2))

_CLASSES = len(ACUITY_LEVELS)


@dataclass(frozen=True)
class WeakLearner:
    feature_pair: tuple[int, int]
    model: MlpModel


@dataclass(frozen=True)
class EnsembleModel:
    learners: tuple[WeakLearner, ...]
    features: tuple[str, ...]
    normalization: NormalizationParams | None = None

    def validate(self) -> None:
        if len(self.learners) != len(FEATURE_PAIRS):
            raise DataError(f"ensemble must have {len(FEATURE_PAIRS)} learners")
        pairs = tuple(l.feature_pair for l in self.learners)
        if pairs != FEATURE_PAIRS:
            raise DataError(f"unexpected feature pair enumeration: {pairs}")


def ensemble_fit(inputs: np.ndarray, labels: np.ndarray,
                 config: TrainConfig | None = None, seed: int = 0,
                 features: tuple[str, ...] = FIVE_FEATURES) -> EnsembleModel:
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != len(FIVE_FEATURES):
        raise DataError(
            f"ensemble expects exactly {len(FIVE_FEATURES)} features, "
            f"got shape {inputs.shape}")
    if len(features) != len(FIVE_FEATURES):
        raise DataError(f"expected {len(FIVE_FEATURES)} feature names, got {len(features)}")
    config = config if config is not None else TrainConfig(seed=seed)
    learners = []
    for pair in FEATURE_PAIRS:
        learner_seed = derive_seed(seed, "ensemble", pair)
        model = build_network(2, WEAK_HIDDEN_WIDTHS, seed=learner_seed)
        model, _ = mlp_train(model, inputs[:, pair], labels,
                             TrainConfig(learning_rate=config.learning_rate,
                                         batch_size=config.batch_size,
                                         epochs=config.epochs,
                                         seed=learner_seed))
        learners.append(WeakLearner(feature_pair=pair, model=model))
    return EnsembleModel(learners=tuple(learners), features=tuple(features))


def _vote_matrix(model: EnsembleModel, inputs: np.ndarray):
    """Per-learner class probabilities: shape (learners, rows, classes)."""
    stacks = [probabilities_batch(l.model, inputs[:, list(l.feature_pair)])
              for l in model.learners]
    return np.stack(stacks, axis=0)


def ensemble_predict_batch(model: EnsembleModel, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != len(FIVE_FEATURES):
        raise DataError(f"expected shape (n, {len(FIVE_FEATURES)}), got {inputs.shape}")
    probabilities = _vote_matrix(model, inputs)
    votes = probabilities.argmax(axis=2)                     # (learners, rows)
    tallies = np.zeros((inputs.shape[0], _CLASSES))
    for learner_votes in votes:
        tallies[np.arange(inputs.shape[0]), learner_votes] += 1.0
    summed = probabilities.sum(axis=0)                       # (rows, classes)
    out = np.empty(inputs.shape[0], dtype=np.int64)
    for i in range(inputs.shape[0]):
        leaders = np.nonzero(tallies[i] == tallies[i].max())[0]
        if leaders.shape[0] > 1:
            strongest = summed[i, leaders].max()
            leaders = leaders[summed[i, leaders] == strongest]
        out[i] = leaders[0] + 1  # lowest index = most severe
    return out


def ensemble_predict(model: EnsembleModel, feature_vector) -> int:
    vector = np.asarray(feature_vector, dtype=np.float64)
    if vector.shape != (len(FIVE_FEATURES),):
        raise DataError(
            f"feature vector shape {vector.shape} does not match "
            f"{len(FIVE_FEATURES)} ensemble features")
    return int(ensemble_predict_batch(model, vector.reshape(1, -1))[0])
