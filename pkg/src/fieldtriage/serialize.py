"""Model persistence: self-describing JSON for networks, trees, and ensembles.

Files carry a version field so readers can reject formats they do not
understand: "artemis-mlp/1", "artemis-tree/1", "artemis-ensemble/1".
"""

from __future__ import annotations

import json

import numpy as np

from .ensemble import EnsembleModel, WeakLearner
from .errors import DataError
from .mlp import MlpModel
from .preprocess import NormalizationParams
from .tree import DecisionTree, LeafNode, SplitNode

MLP_FORMAT = "artemis-mlp/1"
TREE_FORMAT = "artemis-tree/1"
ENSEMBLE_FORMAT = "artemis-ensemble/1"


def _mlp_to_dict(model: MlpModel) -> dict:
    return {
        "format": MLP_FORMAT,
        "layer_sizes": list(model.layer_sizes),
        "weights": [w.tolist() for w in model.weights],   # row-major per layer
        "biases": [b.tolist() for b in model.biases],
        "features": list(model.normalization.features) if model.normalization else None,
        "normalization": model.normalization.as_dict() if model.normalization else None,
        "seed": model.seed,
    }


def _mlp_from_dict(data: dict) -> MlpModel:
    if data.get("format") != MLP_FORMAT:
        raise DataError(f"not a {MLP_FORMAT} file (format={data.get('format')!r})")
    try:
        weights = [np.asarray(w, dtype=np.float64) for w in data["weights"]]
        biases = [np.asarray(b, dtype=np.float64) for b in data["biases"]]
        norm = data.get("normalization")
        model = MlpModel(
            weights=weights,
            biases=biases,
            normalization=NormalizationParams.from_dict(norm) if norm else None,
            seed=int(data.get("seed", 0)),
        )
        sizes = tuple(data["layer_sizes"])
        if model.layer_sizes != sizes:
            raise DataError(
                f"declared layer sizes {sizes} disagree with weights {model.layer_sizes}")
        model.validate()
        return model
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed network file: {exc}") from exc


def _tree_nodes_to_list(root) -> list[dict]:
    """Flatten the tree into a preorder node table with child indexes.

    A nested representation would make both this codec and the JSON layer
    recurse once per level, and unlimited-depth trees routinely exceed the
    interpreter's recursion ceiling. The flat table keeps JSON nesting
    constant and guarantees children sit at higher indexes than parents.
    """
    entries: list[dict] = []
    stack = [(root, None, None)]  # (node, parent entry index, child slot)
    while stack:
        node, parent_index, slot = stack.pop()
        index = len(entries)
        if isinstance(node, LeafNode):
            entries.append({"kind": "leaf", "counts": list(node.counts),
                            "prediction": node.prediction})
        else:
            entries.append({"kind": "split", "feature": node.feature,
                            "threshold": node.threshold, "left": -1, "right": -1})
            stack.append((node.right, index, "right"))
            stack.append((node.left, index, "left"))
        if parent_index is not None:
            entries[parent_index][slot] = index
    return entries


def _tree_nodes_from_list(entries: list):
    if not isinstance(entries, list) or not entries:
        raise DataError("tree file must carry a non-empty node table")
    built: list = []
    for entry in entries:
        kind = entry.get("kind")
        if kind == "leaf":
            built.append(LeafNode(counts=tuple(int(c) for c in entry["counts"]),
                                  prediction=int(entry["prediction"])))
        elif kind == "split":
            built.append(SplitNode(feature=int(entry["feature"]),
                                   threshold=float(entry["threshold"])))
        else:
            raise DataError(f"unknown tree node kind: {kind!r}")
    for i, entry in enumerate(entries):
        if entry.get("kind") != "split":
            continue
        left, right = int(entry["left"]), int(entry["right"])
        for child in (left, right):
            # children must point forward: rules out cycles and dangling refs
            if child <= i or child >= len(built):
                raise DataError(
                    f"tree node {i} has an invalid child index {child}")
        built[i].left = built[left]
        built[i].right = built[right]
    return built[0]


def _tree_to_dict(tree: DecisionTree) -> dict:
    return {
        "format": TREE_FORMAT,
        "features": list(tree.features),
        "max_depth": tree.max_depth,
        "min_samples": tree.min_samples,
        "nodes": _tree_nodes_to_list(tree.root),
    }


def _tree_from_dict(data: dict) -> DecisionTree:
    if data.get("format") != TREE_FORMAT:
        raise DataError(f"not a {TREE_FORMAT} file (format={data.get('format')!r})")
    try:
        return DecisionTree(
            root=_tree_nodes_from_list(data["nodes"]),
            features=tuple(data["features"]),
            max_depth=data.get("max_depth"),
            min_samples=int(data.get("min_samples", 2)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed tree file: {exc}") from exc


def _ensemble_to_dict(model: EnsembleModel) -> dict:
    return {
        "format": ENSEMBLE_FORMAT,
        "features": list(model.features),
        "normalization": model.normalization.as_dict() if model.normalization else None,
        "learners": [
            {"feature_pair": list(l.feature_pair), "model": _mlp_to_dict(l.model)}
            for l in model.learners
        ],
    }


def _ensemble_from_dict(data: dict) -> EnsembleModel:
    if data.get("format") != ENSEMBLE_FORMAT:
        raise DataError(f"not an {ENSEMBLE_FORMAT} file (format={data.get('format')!r})")
    try:
        learners = tuple(
            WeakLearner(feature_pair=tuple(int(i) for i in l["feature_pair"]),
                        model=_mlp_from_dict(l["model"]))
            for l in data["learners"]
        )
        norm = data.get("normalization")
        model = EnsembleModel(
            learners=learners, features=tuple(data["features"]),
            normalization=NormalizationParams.from_dict(norm) if norm else None)
        model.validate()
        return model
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed ensemble file: {exc}") from exc


_TO_DICT = [(MlpModel, _mlp_to_dict), (DecisionTree, _tree_to_dict),
            (EnsembleModel, _ensemble_to_dict)]
_FROM_DICT = {MLP_FORMAT: _mlp_from_dict, TREE_FORMAT: _tree_from_dict,
              ENSEMBLE_FORMAT: _ensemble_from_dict}


def model_to_dict(model) -> dict:
    for kind, encode in _TO_DICT:
        if isinstance(model, kind):
            return encode(model)
    raise DataError(f"cannot serialize object of type {type(model).__name__}")


def model_from_dict(data: dict):
    decode = _FROM_DICT.get(data.get("format"))
    if decode is None:
        raise DataError(f"unknown model format: {data.get('format')!r}")
    return decode(data)


def save_model(path: str, model) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
        fh.write("\n")


def load_model(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError("model file must contain a JSON object")
    return model_from_dict(data)
