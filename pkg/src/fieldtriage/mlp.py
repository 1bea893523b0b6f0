"""Dense feed-forward acuity classifier, written against numpy only.

Architecture: an input layer over the chosen vitals, seven ReLU hidden
layers, and a five-way softmax head (one unit per acuity level). Training is
mini-batch gradient descent with Adam-style adaptive steps. Everything is
deterministic under a fixed seed: same data + seed → bit-identical weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, OutOfRangeError
from .preprocess import NormalizationParams, apply_normalization
from .records import ACUITY_LEVELS, VitalSigns, bound_violations

OUTPUT_CLASSES = len(ACUITY_LEVELS)
HIDDEN_LAYER_COUNT = 7
DEFAULT_HIDDEN_WIDTHS = (64, 64, 32, 32, 16, 16, 8)


@dataclass(frozen=True)
class TriageLabel:
    acuity: int
    probabilities: tuple[float, ...]


def label_from_probabilities(probabilities) -> TriageLabel:
    """Pick the arg-max class; exact ties go to the more severe (lower) acuity."""
    probs = tuple(float(p) for p in probabilities)
    if len(probs) != OUTPUT_CLASSES:
        raise DataError(f"expected {OUTPUT_CLASSES} class probabilities, got {len(probs)}")
    return TriageLabel(acuity=int(np.argmax(probs)) + 1, probabilities=probs)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 128
    epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DataError(f"learning rate must be positive, got {self.learning_rate}")
        if self.batch_size <= 0:
            raise DataError(f"batch size must be positive, got {self.batch_size}")
        if self.epochs <= 0:
            raise DataError(f"epoch count must be positive, got {self.epochs}")


@dataclass
class MlpModel:
    weights: list[np.ndarray]          # per layer, shape (fan_in, fan_out)
    biases: list[np.ndarray]           # per layer, shape (fan_out,)
    normalization: NormalizationParams | None = None
    seed: int = 0

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def validate(self) -> None:
        if self.weights[-1].shape[1] != OUTPUT_CLASSES:
            raise DataError(f"output layer must have {OUTPUT_CLASSES} units")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape[1] != b.shape[0]:
                raise DataError(f"layer {i}: bias length {b.shape[0]} != width {w.shape[1]}")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise DataError(f"layer {i}: fan-in disagrees with previous layer width")


def build_network(input_dim: int, hidden_widths, seed: int,
                  output_dim: int = OUTPUT_CLASSES) -> MlpModel:
    """Glorot-uniform weights, zero biases, for an arbitrary hidden stack."""
    if input_dim < 1:
        raise DataError(f"input dimension must be >= 1, got {input_dim}")
    widths = [int(w) for w in hidden_widths]
    if any(w < 1 for w in widths):
        raise DataError(f"hidden widths must all be >= 1, got {widths}")
    sizes = [input_dim] + widths + [output_dim]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, seed=seed)


def mlp_init(input_dim: int, hidden_widths, seed: int) -> MlpModel:
    """Public constructor: the deployed topology has exactly seven hidden layers."""
    widths = list(hidden_widths)
    if len(widths) != HIDDEN_LAYER_COUNT:
        raise DataError(
            f"expected exactly {HIDDEN_LAYER_COUNT} hidden widths, got {len(widths)}")
    return build_network(input_dim, widths, seed)


def _forward_batch(model: MlpModel, inputs: np.ndarray):
    """Returns (pre-activations per layer, activations per layer incl. input)."""
    activations = [inputs]
    pre_activations = []
    current = inputs
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = current @ w + b
        pre_activations.append(z)
        current = z if i == last else np.maximum(z, 0.0)
        activations.append(current)
    return pre_activations, activations


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def mlp_forward(model: MlpModel, feature_vector) -> TriageLabel:
    vector = np.asarray(feature_vector, dtype=np.float64)
    if vector.shape != (model.input_dim,):
        raise DataError(
            f"feature vector shape {vector.shape} does not match input dim {model.input_dim}")
    _, activations = _forward_batch(model, vector.reshape(1, -1))
    return label_from_probabilities(softmax(activations[-1])[0])


def predict_batch(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Vectorized acuity predictions (argmax; ties to the more severe class)."""
    _, activations = _forward_batch(model, np.asarray(inputs, dtype=np.float64))
    return np.argmax(activations[-1], axis=1) + 1


def probabilities_batch(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    _, activations = _forward_batch(model, np.asarray(inputs, dtype=np.float64))
    return softmax(activations[-1])


def _one_hot(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min() < 1 or labels.max() > OUTPUT_CLASSES:
        raise DataError("labels must be acuity levels 1..5")
    encoded = np.zeros((labels.shape[0], OUTPUT_CLASSES))
    encoded[np.arange(labels.shape[0]), labels - 1] = 1.0
    return encoded


def mlp_loss_and_grad(model: MlpModel, inputs: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch plus exact backprop gradients.

    Returns (loss, weight gradients, bias gradients) with gradients shaped
    exactly like the model's parameter lists.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.shape[0] == 0:
        raise DataError("empty batch")
    targets = _one_hot(labels)
    pre_activations, activations = _forward_batch(model, inputs)

    logits = pre_activations[-1]
    # Log-sum-exp form keeps the loss finite even for very confident logits.
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    loss = float(-(targets * log_probs).sum(axis=1).mean())

    batch = inputs.shape[0]
    delta = (np.exp(log_probs) - targets) / batch
    weight_grads = [np.empty(0)] * len(model.weights)
    bias_grads = [np.empty(0)] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        weight_grads[i] = activations[i].T @ delta
        bias_grads[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (pre_activations[i - 1] > 0.0)
    return loss, weight_grads, bias_grads


def mlp_train(model: MlpModel, inputs: np.ndarray, labels: np.ndarray,
              config: TrainConfig) -> tuple[MlpModel, list[float]]:
    """Adam-style mini-batch training; returns the model and per-epoch mean loss."""
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if inputs.shape[0] == 0:
        raise DataError("empty training set")
    if inputs.shape[0] != labels.shape[0]:
        raise DataError(f"{inputs.shape[0]} feature rows vs {labels.shape[0]} labels")

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    step = 0

    rng = np.random.default_rng(config.seed)
    history: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(inputs.shape[0])
        epoch_losses = []
        for start in range(0, inputs.shape[0], config.batch_size):
            batch_idx = order[start:start + config.batch_size]
            loss, grad_w, grad_b = mlp_loss_and_grad(model, inputs[batch_idx],
                                                     labels[batch_idx])
            epoch_losses.append(loss)
            step += 1
            correction1 = 1.0 - beta1 ** step
            correction2 = 1.0 - beta2 ** step
            for i in range(len(model.weights)):
                m_w[i] = beta1 * m_w[i] + (1 - beta1) * grad_w[i]
                v_w[i] = beta2 * v_w[i] + (1 - beta2) * grad_w[i] ** 2
                model.weights[i] -= (config.learning_rate * (m_w[i] / correction1)
                                     / (np.sqrt(v_w[i] / correction2) + eps))
                m_b[i] = beta1 * m_b[i] + (1 - beta1) * grad_b[i]
                v_b[i] = beta2 * v_b[i] + (1 - beta2) * grad_b[i] ** 2
                model.biases[i] -= (config.learning_rate * (m_b[i] / correction1)
                                    / (np.sqrt(v_b[i] / correction2) + eps))
        history.append(float(np.mean(epoch_losses)))
    return model, history


def classify_vitals(model: MlpModel, vitals: VitalSigns) -> TriageLabel:
    """The single inference entry point: raw vitals in, triage label out.

    Vitals outside the plausibility bounds indicate a sensor fault and are
    rejected rather than scored.
    """
    if model.normalization is None:
        raise DataError("model has no bound normalization parameters")
    violations = bound_violations(vitals)
    if violations:
        raise OutOfRangeError(f"vitals out of plausible range: {', '.join(violations)}")
    values = []
    for feature in model.normalization.features:
        value = vitals.get(feature)
        if value is None:
            raise DataError(f"missing feature {feature!r}")
        values.append(value)
    row = apply_normalization(np.asarray([values]), model.normalization)
    return mlp_forward(model, row[0])
