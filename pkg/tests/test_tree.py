"""Unit tests for the greedy decision tree: impurity, splits, stopping, predict."""

import numpy as np
import pytest

from fieldtriage.errors import DataError
from fieldtriage.tree import (
    DecisionTree,
    LeafNode,
    SplitNode,
    gini_impurity,
    tree_fit,
    tree_predict,
    tree_predict_batch,
    tree_predict_proba_batch,
)

# ---------------------------------------------------------------- impurity


def test_gini_pure_set_is_zero():
    assert gini_impurity([3, 3, 3, 3]) == 0.0


def test_gini_even_two_class_split():
    assert gini_impurity([1, 5]) == pytest.approx(0.5, abs=1e-15)


def test_gini_hand_value():
    # shares 1/2, 1/4, 1/4 -> 1 - (1/4 + 1/16 + 1/16) = 0.625
    assert gini_impurity([1, 1, 2, 3]) == pytest.approx(0.625, abs=1e-15)


def test_gini_empty_rejected():
    with pytest.raises(DataError, match="empty"):
        gini_impurity([])


# ---------------------------------------------------------------- fitting


def test_single_record_is_a_leaf():
    tree = tree_fit(np.array([[1.0, 2.0]]), np.array([4]))
    assert isinstance(tree.root, LeafNode)
    assert tree.root.prediction == 4
    assert tree.root.counts == (0, 0, 0, 1, 0)
    assert tree.node_count() == 1
    assert tree.depth() == 0


def test_separable_one_dimension_midpoint_threshold():
    inputs = np.array([[1.0], [2.0], [3.0], [4.0]])
    labels = np.array([1, 1, 5, 5])
    tree = tree_fit(inputs, labels)
    root = tree.root
    assert isinstance(root, SplitNode)
    assert root.feature == 0
    assert root.threshold == pytest.approx(2.5)
    assert tree.depth() == 1
    assert list(tree_predict_batch(tree, inputs)) == [1, 1, 5, 5]


def test_value_at_threshold_goes_right():
    inputs = np.array([[1.0], [2.0], [3.0], [4.0]])
    labels = np.array([1, 1, 5, 5])
    tree = tree_fit(inputs, labels)
    assert tree_predict(tree, [tree.root.threshold]) == 5
    assert tree_predict(tree, [tree.root.threshold - 1e-9]) == 1


def test_feature_tie_prefers_lowest_index():
    # Both columns separate the classes perfectly; the tie must go to column 0.
    inputs = np.array([[0.0, 10.0], [1.0, 11.0]])
    labels = np.array([1, 5])
    tree = tree_fit(inputs, labels)
    assert tree.root.feature == 0
    assert tree.root.threshold == pytest.approx(0.5)


def test_threshold_tie_prefers_lowest_value():
    # Peeling one sample off either end leaves the same weighted impurity,
    # and every division here is dyadic (10/4, n=5 applied to both), so the
    # two candidate scores are bitwise equal; the sweep must keep the lower
    # midpoint.
    inputs = np.arange(5.0).reshape(-1, 1)
    labels = np.array([1, 5, 5, 5, 1])
    tree = tree_fit(inputs, labels)
    assert tree.root.threshold == pytest.approx(0.5)


def test_constant_features_yield_majority_leaf_tie_to_severe():
    inputs = np.ones((4, 2))
    labels = np.array([2, 4, 2, 4])
    tree = tree_fit(inputs, labels)
    assert isinstance(tree.root, LeafNode)
    assert tree.root.prediction == 2  # tie between 2 and 4 -> more severe
    assert tree.root.counts == (0, 2, 0, 2, 0)


def test_max_depth_zero_gives_majority_stump():
    inputs = np.array([[0.0], [1.0], [2.0]])
    labels = np.array([5, 5, 1])
    tree = tree_fit(inputs, labels, max_depth=0)
    assert isinstance(tree.root, LeafNode)
    assert tree.root.prediction == 5
    assert tree.max_depth == 0


def test_max_depth_one_caps_children_as_leaves():
    rng = np.random.default_rng(0)
    inputs = rng.normal(size=(50, 3))
    labels = rng.integers(1, 6, size=50)
    tree = tree_fit(inputs, labels, max_depth=1)
    assert tree.depth() <= 1
    if isinstance(tree.root, SplitNode):
        assert isinstance(tree.root.left, LeafNode)
        assert isinstance(tree.root.right, LeafNode)


def test_min_samples_stops_small_nodes():
    inputs = np.array([[0.0], [1.0], [2.0], [3.0]])
    labels = np.array([1, 2, 3, 4])
    tree = tree_fit(inputs, labels, min_samples=5)
    assert isinstance(tree.root, LeafNode)
    assert tree.root.prediction == 1  # four-way tie -> most severe


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_unlimited_tree_memorizes_distinct_rows(seed):
    rng = np.random.default_rng(seed)
    inputs = rng.normal(size=(60, 3))
    labels = rng.integers(1, 6, size=60)
    tree = tree_fit(inputs, labels)
    assert np.array_equal(tree_predict_batch(tree, inputs), labels)


def test_deep_chain_exceeds_recursion_limits():
    # Alternating labels force a long one-sided chain; fit and predict must
    # both survive depths far past the interpreter's recursion ceiling.
    n = 1500
    inputs = np.arange(n, dtype=np.float64).reshape(-1, 1)
    labels = np.where(np.arange(n) % 2 == 0, 1, 5)
    tree = tree_fit(inputs, labels)
    assert tree.depth() > 1000
    assert np.array_equal(tree_predict_batch(tree, inputs), labels)
    assert tree.node_count() == 2 * n - 1


def test_fit_validation_errors():
    with pytest.raises(DataError, match="empty"):
        tree_fit(np.zeros((0, 2)), np.array([], dtype=int))
    with pytest.raises(DataError, match="rows"):
        tree_fit(np.zeros((3, 2)), np.array([1, 2]))
    with pytest.raises(DataError, match="1..5"):
        tree_fit(np.zeros((2, 1)), np.array([1, 6]))
    with pytest.raises(DataError, match="feature names"):
        tree_fit(np.zeros((2, 2)), np.array([1, 2]), features=("only_one",))


def test_feature_names_default_and_explicit():
    tree = tree_fit(np.array([[0.0, 1.0]]), np.array([3]))
    assert tree.features == ("f0", "f1")
    named = tree_fit(np.array([[0.0]]), np.array([3]), features=("heart_rate",))
    assert named.features == ("heart_rate",)


# ---------------------------------------------------------------- prediction


def hand_built_tree():
    """Depth-3 tree over two features, built node by node.

               f0 < 10
              /        \
         f1 < 5       leaf 4
           /    \
      leaf 1   f0 < 3
               /     \
           leaf 2   leaf 3
    """
    root = SplitNode(feature=0, threshold=10.0)
    root.right = LeafNode(counts=(0, 0, 0, 7, 0), prediction=4)
    inner = SplitNode(feature=1, threshold=5.0)
    root.left = inner
    inner.left = LeafNode(counts=(3, 0, 0, 0, 0), prediction=1)
    deep = SplitNode(feature=0, threshold=3.0)
    inner.right = deep
    deep.left = LeafNode(counts=(0, 2, 0, 0, 0), prediction=2)
    deep.right = LeafNode(counts=(0, 0, 4, 0, 0), prediction=3)
    return DecisionTree(root=root, features=("f0", "f1"))


@pytest.mark.parametrize("vector,expected", [
    ([12.0, 0.0], 4),    # right at root
    ([10.0, 0.0], 4),    # equality at root also goes right
    ([2.0, 1.0], 1),     # left, then f1 below 5
    ([2.0, 5.0], 2),     # f1 equality goes right, then 2.0 < 3.0 goes deep-left
    ([2.9, 6.0], 2),     # deep left
    ([3.0, 6.0], 3),     # equality at the deep split goes right
])
def test_hand_built_tree_routing(vector, expected):
    tree = hand_built_tree()
    assert tree_predict(tree, vector) == expected
    assert tree_predict_batch(tree, np.array([vector]))[0] == expected


def test_predict_rejects_wrong_width():
    tree = hand_built_tree()
    with pytest.raises(DataError, match="2"):
        tree_predict(tree, [1.0])


def test_tree_structure_counts():
    tree = hand_built_tree()
    assert tree.node_count() == 7
    assert tree.depth() == 3


def test_proba_batch_reflects_leaf_shares():
    inputs = np.ones((4, 1))
    labels = np.array([2, 4, 2, 4])
    tree = tree_fit(inputs, labels)
    probs = tree_predict_proba_batch(tree, np.array([[1.0]]))
    assert probs[0] == pytest.approx([0.0, 0.5, 0.0, 0.5, 0.0])


def test_proba_batch_pure_leaves_are_one_hot():
    inputs = np.array([[1.0], [2.0], [3.0], [4.0]])
    labels = np.array([1, 1, 5, 5])
    tree = tree_fit(inputs, labels)
    probs = tree_predict_proba_batch(tree, inputs)
    assert np.allclose(probs.sum(axis=1), 1.0)
    assert probs[0] == pytest.approx([1.0, 0.0, 0.0, 0.0, 0.0])
    assert probs[-1] == pytest.approx([0.0, 0.0, 0.0, 0.0, 1.0])
