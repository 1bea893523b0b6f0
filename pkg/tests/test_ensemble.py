"""Unit tests for the pairwise-feature voting ensemble."""

import numpy as np
import pytest

from fieldtriage.ensemble import (
    FEATURE_PAIRS,
    WEAK_HIDDEN_WIDTHS,
    EnsembleModel,
    WeakLearner,
    ensemble_fit,
    ensemble_predict,
    ensemble_predict_batch,
)
from fieldtriage.errors import DataError
from fieldtriage.mlp import MlpModel, TrainConfig
from fieldtriage.records import FIVE_FEATURES


def test_feature_pairs_are_lexicographic_over_five_vitals():
    assert FEATURE_PAIRS == ((0, 1), (0, 2), (0, 3), (0, 4),
                             (1, 2), (1, 3), (1, 4),
                             (2, 3), (2, 4), (3, 4))
    assert len(FIVE_FEATURES) == 5


def constant_learner(pair, logits):
    """A weak learner whose probabilities ignore the inputs entirely."""
    model = MlpModel(weights=[np.zeros((2, 5))],
                     biases=[np.asarray(logits, dtype=np.float64)])
    return WeakLearner(feature_pair=pair, model=model)


def constant_ensemble(logit_rows):
    learners = tuple(constant_learner(pair, row)
                     for pair, row in zip(FEATURE_PAIRS, logit_rows))
    model = EnsembleModel(learners=learners, features=FIVE_FEATURES)
    model.validate()
    return model


def one_hot_logits(class_index, strength=2.0):
    row = [0.0] * 5
    row[class_index] = strength
    return row


ANY_ROW = np.zeros((1, 5))


def test_unanimous_vote():
    model = constant_ensemble([one_hot_logits(2)] * 10)
    assert ensemble_predict_batch(model, ANY_ROW)[0] == 3


def test_plurality_wins_without_tie():
    rows = ([one_hot_logits(0)] * 2 + [one_hot_logits(1)] * 3
            + [one_hot_logits(3)] * 5)
    model = constant_ensemble(rows)
    assert ensemble_predict_batch(model, ANY_ROW)[0] == 4


def test_vote_tie_resolved_by_summed_probabilities():
    # Five weak votes for class 2, five confident votes for class 4: the
    # vote counts tie and the probability mass must decide.
    rows = [one_hot_logits(1, strength=1.0)] * 5 + [one_hot_logits(3, strength=3.0)] * 5
    model = constant_ensemble(rows)
    assert ensemble_predict_batch(model, ANY_ROW)[0] == 4


def test_full_tie_resolved_toward_severe(monkeypatch):
    # Votes tie 5-5 and the summed probabilities tie bitwise (every value is
    # an exact binary fraction, so addition order cannot perturb the sums);
    # severity must break the deadlock. Softmax outputs can never tie exactly
    # across mirrored learners, so the probability source is stubbed.
    import fieldtriage.ensemble as ensemble_module

    vote_2 = [0.09375, 0.09375, 0.625, 0.09375, 0.09375]
    vote_3 = [0.09375, 0.09375, 0.09375, 0.625, 0.09375]
    crafted = np.array([vote_2] * 5 + [vote_3] * 5).reshape(10, 1, 5)
    monkeypatch.setattr(ensemble_module, "_vote_matrix",
                        lambda model, inputs: crafted)
    model = constant_ensemble([one_hot_logits(0)] * 10)
    assert ensemble_predict_batch(model, ANY_ROW)[0] == 3


def test_predict_single_vector_matches_batch():
    model = constant_ensemble([one_hot_logits(4)] * 10)
    assert ensemble_predict(model, [0.0] * 5) == 5


def test_validate_rejects_wrong_learner_count():
    learners = tuple(constant_learner(pair, one_hot_logits(0))
                     for pair in FEATURE_PAIRS[:9])
    with pytest.raises(DataError, match="10"):
        EnsembleModel(learners=learners, features=FIVE_FEATURES).validate()


def test_validate_rejects_wrong_pair_order():
    shuffled = FEATURE_PAIRS[::-1]
    learners = tuple(constant_learner(pair, one_hot_logits(0)) for pair in shuffled)
    with pytest.raises(DataError, match="pair"):
        EnsembleModel(learners=learners, features=FIVE_FEATURES).validate()


def test_predict_shape_validation():
    model = constant_ensemble([one_hot_logits(0)] * 10)
    with pytest.raises(DataError):
        ensemble_predict(model, [0.0] * 3)
    with pytest.raises(DataError):
        ensemble_predict_batch(model, np.zeros((4, 3)))


# ---------------------------------------------------------------- fitting


def five_feature_toy(n=120, seed=0):
    rng = np.random.default_rng(seed)
    half = n // 2
    low = rng.normal(loc=-2.0, scale=0.3, size=(half, 5))
    high = rng.normal(loc=2.0, scale=0.3, size=(n - half, 5))
    inputs = np.vstack([low, high])
    labels = np.concatenate([np.full(half, 1), np.full(n - half, 5)])
    return inputs, labels


def test_fit_produces_ten_pairwise_learners():
    inputs, labels = five_feature_toy(n=40, seed=1)
    model = ensemble_fit(inputs, labels,
                         config=TrainConfig(epochs=1, batch_size=16, seed=2), seed=2)
    model.validate()
    assert tuple(l.feature_pair for l in model.learners) == FEATURE_PAIRS
    for learner in model.learners:
        assert learner.model.layer_sizes == (2,) + WEAK_HIDDEN_WIDTHS + (5,)


def test_fit_gives_each_learner_its_own_stream():
    inputs, labels = five_feature_toy(n=40, seed=3)
    model = ensemble_fit(inputs, labels,
                         config=TrainConfig(epochs=1, batch_size=16, seed=4), seed=4)
    first, second = model.learners[0].model, model.learners[1].model
    assert any(not np.array_equal(a, b)
               for a, b in zip(first.weights, second.weights))


def test_fit_is_deterministic_under_seed():
    inputs, labels = five_feature_toy(n=60, seed=5)
    config = TrainConfig(epochs=3, batch_size=16, learning_rate=0.01, seed=6)
    model_a = ensemble_fit(inputs, labels, config=config, seed=6)
    model_b = ensemble_fit(inputs, labels, config=config, seed=6)
    for la, lb in zip(model_a.learners, model_b.learners):
        for w_a, w_b in zip(la.model.weights, lb.model.weights):
            assert np.array_equal(w_a, w_b)
    model_c = ensemble_fit(inputs, labels, config=config, seed=7)
    assert any(not np.array_equal(a, b)
               for a, b in zip(model_a.learners[0].model.weights,
                               model_c.learners[0].model.weights))


def test_fit_learns_separable_toy():
    inputs, labels = five_feature_toy(n=120, seed=8)
    config = TrainConfig(epochs=20, batch_size=16, learning_rate=0.01, seed=9)
    model = ensemble_fit(inputs, labels, config=config, seed=9)
    accuracy = float(np.mean(ensemble_predict_batch(model, inputs) == labels))
    assert accuracy >= 0.95


def test_fit_rejects_wrong_feature_count():
    with pytest.raises(DataError, match="5"):
        ensemble_fit(np.zeros((10, 3)), np.ones(10, dtype=int))
    inputs, labels = five_feature_toy(n=20, seed=10)
    with pytest.raises(DataError, match="feature names"):
        ensemble_fit(inputs, labels, features=("a", "b"))
