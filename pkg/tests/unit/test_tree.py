"""Tests for CART and random trees."""

import numpy as np
import pytest

from binsleuth.learners import Dataset, EmptyDataset, ModelSpecError, predict, train_random_tree, train_tree
from binsleuth.learners.tree import LEAF, TreeStructure, default_max_features, grow_tree


def weighted_gini(y_left, y_right):
    def gini(part):
        if not part:
            return 0.0
        counts = np.bincount(part)
        p = counts / len(part)
        return 1.0 - float(np.sum(p ** 2))
    n = len(y_left) + len(y_right)
    return (len(y_left) * gini(y_left) + len(y_right) * gini(y_right)) / n


def all_candidate_splits(X, y, min_leaf):
    """Weighted Gini of every midpoint split leaving min_leaf rows on each side."""
    scores = []
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        for lo, hi in zip(values[:-1], values[1:]):
            threshold = (lo + hi) / 2
            left = [int(v) for v in y[X[:, j] < threshold]]
            right = [int(v) for v in y[X[:, j] >= threshold]]
            if len(left) >= min_leaf and len(right) >= min_leaf:
                scores.append((weighted_gini(left, right), j, threshold))
    return scores


def nudge_within_cell(value, thresholds, fraction):
    """Move value toward the next threshold above it without reaching it."""
    above = [t for t in thresholds if t > value]
    ceiling = min(above) if above else value + 1.0
    return value + fraction * (ceiling - value)


class TestDecisionTree:
    """Test growth, stopping and prediction."""

    def test_separable_single_split(self, separable_1d):
        """Test that two separable groups need exactly one midpoint split."""
        model = train_tree(separable_1d, min_leaf=1)

        assert model.tree.node_count == 3
        assert model.tree.threshold[0] == pytest.approx(0.5)
        assert np.array_equal(model.predict_indices(separable_1d.X), separable_1d.y)

    def test_pure_data_is_a_leaf(self):
        """Test that a single-class dataset yields a root leaf."""
        data = Dataset(X=np.array([[0.0], [1.0], [2.0]]), labels=["A"] * 3, classes=["A"])
        model = train_tree(data, min_leaf=1)
        assert model.depth == 0
        assert model.tree.feature[0] == LEAF

    def test_xor_needs_depth_two(self, xor_2d):
        """Test that XOR is fitted through a zero-gain root split."""
        model = train_tree(xor_2d, min_leaf=1)
        assert model.depth >= 2
        assert np.array_equal(model.predict_indices(xor_2d.X), xor_2d.y)

    def test_root_split_is_greedy_optimum(self, xor_2d, blobs):
        """Test the root split against an exhaustive candidate search."""
        for data in (xor_2d, blobs):
            tree = train_tree(data, min_leaf=1).tree
            candidates = all_candidate_splits(data.X, data.y, 1)
            best = min(score for score, _, _ in candidates)
            go_left = data.X[:, tree.feature[0]] < tree.threshold[0]
            chosen = weighted_gini([int(v) for v in data.y[go_left]], [int(v) for v in data.y[~go_left]])
            assert chosen == pytest.approx(best, abs=1e-12)

    def test_ties_prefer_lowest_feature(self, separable_1d):
        """Test that duplicate columns resolve to the first."""
        duplicated = Dataset(
            X=np.hstack([separable_1d.X, separable_1d.X]),
            labels=separable_1d.labels,
            classes=separable_1d.classes,
        )
        assert train_tree(duplicated, min_leaf=1).tree.feature[0] == 0

    def test_min_leaf_stops_small_nodes(self, separable_1d):
        """Test that min_leaf blocks splits that would leave too few rows."""
        assert train_tree(separable_1d, min_leaf=3).depth == 0
        assert train_tree(separable_1d, min_leaf=2).depth == 1

    def test_constant_features_give_leaf(self):
        """Test that constant features leave a mixed root leaf."""
        data = Dataset(X=np.ones((4, 3)), labels=["A", "B", "A", "B"], classes=["A", "B"])
        model = train_tree(data, min_leaf=1)
        assert model.depth == 0
        assert model.predict_scores(np.ones(3)).tolist() == [[0.5, 0.5]]

    def test_blobs_fit_exactly(self, blobs):
        """Test that an unpruned tree fits blobs exactly."""
        model = train_tree(blobs, min_leaf=1)
        assert np.array_equal(model.predict_indices(blobs.X), blobs.y)

    def test_leaf_distributions_are_probabilities(self, blobs):
        """Test that leaf scores sum to one."""
        scores = train_tree(blobs, min_leaf=5).predict_scores(blobs.X)
        assert np.allclose(scores.sum(axis=1), 1.0)

    def test_moves_inside_a_threshold_cell_keep_the_prediction(self, blobs):
        """Test that changing a feature without crossing a learned threshold changes nothing."""
        model = train_tree(blobs, min_leaf=2)
        used = model.tree.thresholds_used()

        for row in blobs.X:
            before = predict(model, row)
            for feature in range(blobs.n_features):
                for fraction in (0.5, 0.99):
                    moved = row.copy()
                    moved[feature] = nudge_within_cell(row[feature], used.get(feature, []), fraction)
                    assert predict(model, moved) == before

    def test_validation(self, separable_1d):
        """Test the min_leaf and empty-dataset checks."""
        with pytest.raises(ModelSpecError):
            train_tree(separable_1d, min_leaf=0)
        with pytest.raises(EmptyDataset):
            train_tree(Dataset(X=np.zeros((0, 1)), labels=[], classes=["A"]))


class TestTreeStructure:
    """Test the flat node arrays."""

    def test_dict_round_trip(self, blobs):
        """Test that rebuilt arrays route rows to the same leaves."""
        tree = train_tree(blobs, min_leaf=1).tree
        rebuilt = TreeStructure.from_dict(tree.to_dict(), 3, 4)
        assert np.array_equal(rebuilt.apply(blobs.X), tree.apply(blobs.X))

    def test_rejects_bad_child_index(self, separable_1d):
        """Test that a child pointing past the node arrays is rejected."""
        data = train_tree(separable_1d, min_leaf=1).tree.to_dict()
        data["left"][0] = 99
        with pytest.raises(ValueError):
            TreeStructure.from_dict(data, 2, 1)

    def test_rejects_child_before_parent(self, blobs):
        """Test that a child index not after its parent is rejected, so cycles cannot load."""
        data = train_tree(blobs, min_leaf=1).tree.to_dict()
        inner = next(i for i, f in enumerate(data["feature"]) if f != LEAF and i > 0)
        data["left"][inner] = inner
        with pytest.raises(ValueError, match="child"):
            TreeStructure.from_dict(data, 3, 4)

    @pytest.mark.parametrize("feature", [1, 5, -2])
    def test_rejects_split_feature_outside_dimension(self, separable_1d, feature):
        """Test that a split on a feature the model does not have is rejected."""
        data = train_tree(separable_1d, min_leaf=1).tree.to_dict()
        data["feature"][0] = feature
        with pytest.raises(ValueError, match="feature"):
            TreeStructure.from_dict(data, 2, 1)

    def test_thresholds_used(self, separable_1d):
        """Test listing the thresholds per split feature."""
        tree = train_tree(separable_1d, min_leaf=1).tree
        assert tree.thresholds_used() == {0: [pytest.approx(0.5)]}


class TestRandomTree:
    """Test per-node feature subsampling."""

    def test_default_feature_count(self):
        """Test floor(sqrt(d)) with a floor of one."""
        assert default_max_features(260) == 16
        assert default_max_features(65536) == 256
        assert default_max_features(1) == 1

    def test_seeded_determinism(self, blobs):
        """Test that one seed grows one tree."""
        a = train_random_tree(blobs, seed=4)
        b = train_random_tree(blobs, seed=4)
        assert a.tree.to_dict() == b.tree.to_dict()
        assert a.max_features == 2

    def test_fits_training_data(self, blobs):
        """Test that a random tree fits its training rows."""
        model = train_random_tree(blobs, seed=1)
        assert np.array_equal(model.predict_indices(blobs.X), blobs.y)

    def test_grow_tree_respects_feature_budget(self, blobs):
        """Test growth with a single candidate feature per node."""
        rng = np.random.default_rng(0)
        tree = grow_tree(blobs.X, blobs.y, 3, min_leaf=1, max_features=1, rng=rng)
        assert tree.node_count >= 3

    def test_candidate_enumeration_sanity(self):
        """Test the exhaustive split helper on a three-point example."""
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0, 1, 1])
        scores = all_candidate_splits(X, y, 1)
        assert [round(s, 6) for s, _, _ in scores] == [0.0, round(1 / 3, 6)]
        assert [j for _, j, _ in scores] == [0, 0]
