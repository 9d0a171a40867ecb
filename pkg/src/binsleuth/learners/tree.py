"""
CART decision trees with Gini impurity.

Trees are unpruned. A node becomes a leaf when it is pure, when it holds fewer
than ``2 * min_leaf`` instances, or when no threshold leaves ``min_leaf``
instances on both sides. Splits that do not lower impurity are still taken,
which lets the tree resolve XOR-like interactions.

Candidate thresholds are midpoints between consecutive distinct values;
``x < threshold`` goes left. Among equally good splits the lowest feature
index wins, then the lowest threshold.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..types import FeatureSet
from .base_model import EmptyDataset, Model, ModelKind, ModelSpecError
from .dataset import Dataset

logger = logging.getLogger(__name__)

LEAF = -1

# Upper bound on cumulative-count cells per split-search chunk.
_CHUNK_CELLS = 1 << 22


@dataclass
class TreeStructure:
    """Flat node arrays; node 0 is the root, leaves have feature == -1."""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.node_count else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            internal = self.feature[nodes] != LEAF
            if not internal.any():
                return nodes
            r = rows[internal]
            n = nodes[internal]
            go_left = X[r, self.feature[n]] < self.threshold[n]
            nodes[internal] = np.where(go_left, self.left[n], self.right[n])

    def distributions(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def thresholds_used(self) -> Dict[int, List[float]]:
        """Sorted thresholds per split feature."""
        used: Dict[int, List[float]] = {}
        for f, t in zip(self.feature, self.threshold):
            if f != LEAF:
                used.setdefault(int(f), []).append(float(t))
        return {f: sorted(ts) for f, ts in used.items()}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n_classes: int, feature_dim: int) -> "TreeStructure":
        """Rebuild node arrays, rejecting feature indices or children that would escape the tree."""
        tree = cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=np.float64).reshape(-1, n_classes),
        )
        sizes = {tree.feature.size, tree.threshold.size, tree.left.size, tree.right.size, tree.value.shape[0]}
        if len(sizes) != 1 or tree.feature.size == 0:
            raise ValueError("tree node arrays differ in length")
        internal = tree.feature != LEAF
        if internal.any():
            features = tree.feature[internal]
            if features.min() < 0 or features.max() >= feature_dim:
                raise ValueError(f"tree split feature out of range [0, {feature_dim})")
            nodes = np.flatnonzero(internal)
            for children in (tree.left[internal], tree.right[internal]):
                if (children <= nodes).any() or children.max() >= tree.node_count:
                    raise ValueError("tree child index out of range")
        return tree


@dataclass
class _Split:
    impurity: float
    feature: int
    threshold: float


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    features: np.ndarray,
    min_leaf: int,
) -> Optional[_Split]:
    """Lowest weighted Gini over ``features`` (ascending), or None."""
    n = y.size
    left_n = np.arange(1, n, dtype=np.float64)[:, None]
    right_n = n - left_n
    chunk = max(1, _CHUNK_CELLS // (n * n_classes))
    best: Optional[_Split] = None

    for start in range(0, features.size, chunk):
        cols = features[start:start + chunk]
        values = X[:, cols]
        order = np.argsort(values, axis=0, kind="stable")
        sorted_values = np.take_along_axis(values, order, axis=0)
        sorted_y = y[order]

        onehot = sorted_y[:, :, None] == np.arange(n_classes)
        left_counts = np.cumsum(onehot, axis=0)[:-1]
        right_counts = onehot.sum(axis=0)[None] - left_counts

        left_gini = 1.0 - np.sum((left_counts / left_n[:, :, None]) ** 2, axis=2)
        right_gini = 1.0 - np.sum((right_counts / right_n[:, :, None]) ** 2, axis=2)
        weighted = (left_n * left_gini + right_n * right_gini) / n

        valid = (sorted_values[:-1] < sorted_values[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
        if not valid.any():
            continue
        weighted = np.where(valid, weighted, np.inf)

        # Feature-major flattening: ties go to the earlier feature, then the lower value.
        flat = weighted.T.ravel()
        pos = int(np.argmin(flat))
        score = float(flat[pos])
        if best is not None and not score < best.impurity:
            continue
        col, row = divmod(pos, n - 1)
        lo = float(sorted_values[row, col])
        hi = float(sorted_values[row + 1, col])
        threshold = (lo + hi) / 2.0
        if not lo < threshold <= hi:
            threshold = hi
        best = _Split(impurity=score, feature=int(cols[col]), threshold=threshold)

    return best


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    min_leaf: int = 1,
    max_features: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> TreeStructure:
    """
    Grow a tree iteratively (depth-first, left child first).

    With ``max_features`` each node draws that many features without
    replacement from the ones that are not constant in the node.
    """
    features: List[int] = []
    thresholds: List[float] = []
    lefts: List[int] = []
    rights: List[int] = []
    values: List[np.ndarray] = []

    def new_node(indices: np.ndarray) -> int:
        counts = np.bincount(y[indices], minlength=n_classes)
        features.append(LEAF)
        thresholds.append(0.0)
        lefts.append(LEAF)
        rights.append(LEAF)
        values.append(counts / indices.size)
        return len(features) - 1

    stack = [(new_node(np.arange(y.size)), np.arange(y.size))]
    while stack:
        node, indices = stack.pop()
        node_y = y[indices]
        if np.count_nonzero(values[node]) <= 1 or indices.size < 2 * min_leaf:
            continue

        node_X = X[indices]
        active = np.flatnonzero(node_X.max(axis=0) > node_X.min(axis=0))
        if active.size == 0:
            continue
        if max_features is not None and active.size > max_features:
            active = np.sort(rng.choice(active, size=max_features, replace=False))

        split = _best_split(node_X[:, active], node_y, n_classes, np.arange(active.size), min_leaf)
        if split is None:
            continue

        feature = int(active[split.feature])
        go_left = node_X[:, feature] < split.threshold
        left_idx, right_idx = indices[go_left], indices[~go_left]

        features[node] = feature
        thresholds[node] = split.threshold
        lefts[node] = new_node(left_idx)
        rights[node] = new_node(right_idx)
        stack.append((rights[node], right_idx))
        stack.append((lefts[node], left_idx))

    return TreeStructure(
        feature=np.asarray(features, dtype=np.int64),
        threshold=np.asarray(thresholds, dtype=np.float64),
        left=np.asarray(lefts, dtype=np.int64),
        right=np.asarray(rights, dtype=np.int64),
        value=np.vstack(values),
    )


class DecisionTreeModel(Model):
    """Single CART tree; scores are the reached leaf's class distribution."""

    def __init__(self, classes: Sequence[str], feature_dim: int, feature_set: FeatureSet,
                 tree: TreeStructure, min_leaf: int):
        super().__init__(classes, feature_dim, feature_set)
        self.tree = tree
        self.min_leaf = int(min_leaf)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.TREE

    @property
    def depth(self) -> int:
        return self.tree.depth

    def _scores(self, X: np.ndarray) -> np.ndarray:
        return self.tree.distributions(X)

    def get_parameters(self) -> Dict[str, Any]:
        return {"min_leaf": self.min_leaf, "tree": self.tree.to_dict()}

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        tree = TreeStructure.from_dict(params["tree"], len(classes), feature_dim)
        return cls(classes, feature_dim, feature_set, tree, params["min_leaf"])


class RandomTreeModel(DecisionTreeModel):
    """Unpruned tree with per-node random feature subsets, grown on all rows."""

    def __init__(self, classes, feature_dim, feature_set, tree, min_leaf, max_features: int, seed: int):
        super().__init__(classes, feature_dim, feature_set, tree, min_leaf)
        self.max_features = int(max_features)
        self.seed = int(seed)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.RANDOM_TREE

    def get_parameters(self) -> Dict[str, Any]:
        params = super().get_parameters()
        params.update({"max_features": self.max_features, "seed": self.seed})
        return params

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        tree = TreeStructure.from_dict(params["tree"], len(classes), feature_dim)
        return cls(classes, feature_dim, feature_set, tree, params["min_leaf"],
                   params["max_features"], params["seed"])


def default_max_features(feature_dim: int) -> int:
    """floor(sqrt(d)), at least 1."""
    return max(1, math.isqrt(feature_dim))


def check_trainable(data: Dataset, min_leaf: int) -> None:
    if len(data) == 0:
        raise EmptyDataset("Tree training needs at least one instance")
    if min_leaf < 1:
        raise ModelSpecError(f"min_leaf={min_leaf} must be at least 1")


def train_tree(data: Dataset, min_leaf: int = 2) -> DecisionTreeModel:
    """
    Grow an unpruned CART tree on every feature.

    Raises:
        EmptyDataset: If the dataset has no rows
    """
    check_trainable(data, min_leaf)
    tree = grow_tree(data.X, data.y, len(data.classes), min_leaf=min_leaf)
    logger.debug(f"Grew tree with {tree.node_count} nodes, depth {tree.depth}")
    return DecisionTreeModel(data.classes, data.n_features, data.feature_set, tree, min_leaf)


def train_random_tree(
    data: Dataset,
    min_leaf: int = 1,
    seed: int = 42,
    max_features: Optional[int] = None,
) -> RandomTreeModel:
    """Grow one randomized tree on the full data (no bootstrap)."""
    check_trainable(data, min_leaf)
    k = max_features or default_max_features(data.n_features)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    tree = grow_tree(data.X, data.y, len(data.classes), min_leaf=min_leaf, max_features=k, rng=rng)
    return RandomTreeModel(data.classes, data.n_features, data.feature_set, tree, min_leaf, k, seed)
