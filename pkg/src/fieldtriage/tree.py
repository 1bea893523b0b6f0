"""Greedy CART decision tree for acuity classification, numpy only.

Splits minimize weighted child Gini impurity; candidate thresholds are the
midpoints between consecutive distinct sorted feature values. Ties prefer the
lowest feature index, then the lowest threshold. Descent goes left when
value < threshold, so a value exactly at the threshold goes right. Leaf
predictions are the majority class, ties resolved toward the more severe
(lower-numbered) acuity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .records import ACUITY_LEVELS

_CLASSES = len(ACUITY_LEVELS)


@dataclass(frozen=True)
class LeafNode:
    counts: tuple[int, ...]   # training records per acuity 1..5
    prediction: int


@dataclass
class SplitNode:
    feature: int
    threshold: float
    left: "SplitNode | LeafNode | None" = None
    right: "SplitNode | LeafNode | None" = None


@dataclass
class DecisionTree:
    root: SplitNode | LeafNode
    features: tuple[str, ...]
    max_depth: int | None = None
    min_samples: int = 2

    def node_count(self) -> int:
        count, stack = 0, [self.root]
        while stack:
            node = stack.pop()
            count += 1
            if isinstance(node, SplitNode):
                stack.extend((node.left, node.right))
        return count

    def depth(self) -> int:
        deepest, stack = 0, [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            deepest = max(deepest, d)
            if isinstance(node, SplitNode):
                stack.extend(((node.left, d + 1), (node.right, d + 1)))
        return deepest


def gini_impurity(labels) -> float:
    """1 - sum of squared class shares; 0 for a pure set."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DataError("gini impurity of an empty label set is undefined")
    _, counts = np.unique(labels, return_counts=True)
    shares = counts / labels.size
    return float(1.0 - (shares ** 2).sum())


def _class_counts(labels: np.ndarray) -> np.ndarray:
    return np.bincount(labels, minlength=_CLASSES + 1)[1:]


def _make_leaf(labels: np.ndarray) -> LeafNode:
    counts = _class_counts(labels)
    # argmax returns the first maximum, i.e. the most severe class on ties
    return LeafNode(counts=tuple(int(c) for c in counts),
                    prediction=int(np.argmax(counts)) + 1)


def _best_split(inputs: np.ndarray, labels: np.ndarray):
    """Lowest-weighted-Gini (feature, threshold) over all midpoint candidates.

    Returns None when no feature has two distinct values. The per-feature
    sweep is vectorized: one sort, then cumulative one-hot class counts give
    every prefix/suffix Gini in closed form.
    """
    n = labels.shape[0]
    one_hot = np.zeros((n, _CLASSES))
    one_hot[np.arange(n), labels - 1] = 1.0

    best = None  # (score, feature, threshold)
    for feature in range(inputs.shape[1]):
        values = inputs[:, feature]
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        boundaries = np.nonzero(sorted_values[1:] != sorted_values[:-1])[0] + 1
        if boundaries.size == 0:
            continue
        left_counts = np.cumsum(one_hot[order], axis=0)[boundaries - 1]
        right_counts = _class_counts(labels) - left_counts
        n_left = boundaries.astype(np.float64)
        n_right = n - n_left
        # weighted Gini = [n_l(1 - sum p_l^2) + n_r(1 - sum p_r^2)] / n
        score = (n_left - (left_counts ** 2).sum(axis=1) / n_left
                 + n_right - (right_counts ** 2).sum(axis=1) / n_right) / n
        pick = int(np.argmin(score))  # first minimum -> lowest threshold
        thresholds = (sorted_values[boundaries - 1] + sorted_values[boundaries]) / 2.0
        if best is None or score[pick] < best[0]:
            best = (float(score[pick]), feature, float(thresholds[pick]))
    return best


def tree_fit(inputs: np.ndarray, labels: np.ndarray,
             max_depth: int | None = None, min_samples: int = 2,
             features: tuple[str, ...] | None = None) -> DecisionTree:
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if inputs.shape[0] == 0:
        raise DataError("empty training set")
    if inputs.shape[0] != labels.shape[0]:
        raise DataError(f"{inputs.shape[0]} feature rows vs {labels.shape[0]} labels")
    if labels.min() < 1 or labels.max() > _CLASSES:
        raise DataError("labels must be acuity levels 1..5")
    feature_names = tuple(features) if features is not None \
        else tuple(f"f{i}" for i in range(inputs.shape[1]))
    if len(feature_names) != inputs.shape[1]:
        raise DataError(f"{len(feature_names)} feature names for {inputs.shape[1]} columns")

    tree = DecisionTree(root=LeafNode((0,) * _CLASSES, _CLASSES),
                        features=feature_names,
                        max_depth=max_depth, min_samples=min_samples)

    def attach(parent, side, node):
        if parent is None:
            tree.root = node
        elif side == "left":
            parent.left = node
        else:
            parent.right = node

    # Explicit stack instead of recursion: depth is data-dependent and
    # unbounded when max_depth is None.
    stack = [(np.arange(labels.shape[0]), 0, None, None)]
    while stack:
        idx, depth, parent, side = stack.pop()
        node_labels = labels[idx]
        pure = bool((node_labels == node_labels[0]).all())
        depth_capped = max_depth is not None and depth >= max_depth
        if pure or depth_capped or idx.shape[0] < min_samples:
            attach(parent, side, _make_leaf(node_labels))
            continue
        split = _best_split(inputs[idx], node_labels)
        if split is None:  # mixed labels but every feature constant
            attach(parent, side, _make_leaf(node_labels))
            continue
        _, feature, threshold = split
        node = SplitNode(feature=feature, threshold=threshold)
        attach(parent, side, node)
        goes_left = inputs[idx, feature] < threshold
        stack.append((idx[goes_left], depth + 1, node, "left"))
        stack.append((idx[~goes_left], depth + 1, node, "right"))
    return tree


def tree_predict(tree: DecisionTree, feature_vector) -> int:
    vector = np.asarray(feature_vector, dtype=np.float64)
    if vector.shape != (len(tree.features),):
        raise DataError(
            f"feature vector shape {vector.shape} does not match "
            f"{len(tree.features)} tree features")
    node = tree.root
    while isinstance(node, SplitNode):
        node = node.left if vector[node.feature] < node.threshold else node.right
    return node.prediction


def tree_predict_batch(tree: DecisionTree, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    out = np.empty(inputs.shape[0], dtype=np.int64)
    for i in range(inputs.shape[0]):
        node = tree.root
        while isinstance(node, SplitNode):
            node = node.left if inputs[i, node.feature] < node.threshold else node.right
        out[i] = node.prediction
    return out


def tree_predict_proba_batch(tree: DecisionTree, inputs: np.ndarray) -> np.ndarray:
    """Per-class scores from leaf training-count shares."""
    inputs = np.asarray(inputs, dtype=np.float64)
    out = np.empty((inputs.shape[0], _CLASSES))
    for i in range(inputs.shape[0]):
        node = tree.root
        while isinstance(node, SplitNode):
            node = node.left if inputs[i, node.feature] < node.threshold else node.right
        counts = np.asarray(node.counts, dtype=np.float64)
        out[i] = counts / counts.sum() if counts.sum() > 0 else 1.0 / _CLASSES
    return out
