"""
Random forest of CART trees.

Tree ``i`` draws its bootstrap rows and per-node feature subsets from
``SeedSequence(seed).spawn(trees)[i]``, so the forest is identical whatever
the number of worker threads.
"""

import logging
from typing import Any, Dict, List, Sequence

import numpy as np

from ..core.workers import ordered_map
from ..types import FeatureSet
from .base_model import Model, ModelKind, ModelSpecError
from .dataset import Dataset
from .tree import TreeStructure, check_trainable, default_max_features, grow_tree

logger = logging.getLogger(__name__)


class RandomForestModel(Model):
    """Scores are the fraction of trees voting for each class."""

    def __init__(
        self,
        classes: Sequence[str],
        feature_dim: int,
        feature_set: FeatureSet,
        trees: List[TreeStructure],
        seed: int,
        bootstrap: bool,
        min_leaf: int,
        max_features: int,
    ):
        super().__init__(classes, feature_dim, feature_set)
        self.trees = list(trees)
        self.seed = int(seed)
        self.bootstrap = bool(bootstrap)
        self.min_leaf = int(min_leaf)
        self.max_features = int(max_features)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.FOREST

    def _scores(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros((X.shape[0], self.n_classes))
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            votes[rows, np.argmax(tree.distributions(X), axis=1)] += 1.0
        return votes / len(self.trees)

    def get_parameters(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "min_leaf": self.min_leaf,
            "max_features": self.max_features,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        trees = [TreeStructure.from_dict(t, len(classes), feature_dim) for t in params["trees"]]
        if not trees:
            raise ValueError("forest has no trees")
        return cls(classes, feature_dim, feature_set, trees, params["seed"],
                   params["bootstrap"], params["min_leaf"], params["max_features"])


def train_forest(
    data: Dataset,
    trees: int = 100,
    seed: int = 42,
    bootstrap: bool = True,
    min_leaf: int = 1,
    jobs: int = 1,
) -> RandomForestModel:
    """
    Grow ``trees`` randomized trees, each considering floor(sqrt(d)) features per node.

    Raises:
        EmptyDataset: If the dataset has no rows
        ModelSpecError: If trees < 1
    """
    check_trainable(data, min_leaf)
    if trees < 1:
        raise ModelSpecError(f"trees={trees} must be at least 1")

    n = len(data)
    y = data.y
    n_classes = len(data.classes)
    max_features = default_max_features(data.n_features)
    children = np.random.SeedSequence(int(seed)).spawn(trees)

    def grow(child: np.random.SeedSequence) -> TreeStructure:
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        return grow_tree(data.X[rows], y[rows], n_classes, min_leaf=min_leaf,
                         max_features=max_features, rng=rng)

    logger.debug(f"Growing {trees} trees on {n} instances ({max_features} features per node)")
    grown = ordered_map(grow, children, jobs)
    return RandomForestModel(data.classes, data.n_features, data.feature_set, grown,
                             seed, bootstrap, min_leaf, max_features)
