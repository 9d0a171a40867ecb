"""k-nearest-neighbour classifier with Euclidean distance."""

import logging
from typing import Any, Dict, Sequence

import numpy as np

from ..types import FeatureSet
from .base_model import EmptyDataset, Model, ModelKind, ModelSpecError
from .dataset import Dataset

logger = logging.getLogger(__name__)

# Upper bound on floats held by one block of pairwise differences.
_BLOCK_FLOATS = 1 << 22


class KNNModel(Model):
    """Stores the training matrix; scores are neighbour vote fractions."""

    def __init__(
        self,
        classes: Sequence[str],
        feature_set: FeatureSet,
        X: np.ndarray,
        y: np.ndarray,
        k: int,
    ):
        X = np.asarray(X, dtype=np.float64)
        super().__init__(classes, X.shape[1], feature_set)
        self.X = X
        self.y = np.asarray(y, dtype=np.int64)
        self.k = int(k)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.KNN

    def neighbours(self, X: np.ndarray) -> np.ndarray:
        """Indices of the k nearest training rows; equal distances keep training order."""
        X = self._check_matrix(X)
        result = np.empty((X.shape[0], self.k), dtype=np.int64)
        step = max(1, _BLOCK_FLOATS // max(1, self.X.size))
        for start in range(0, X.shape[0], step):
            block = X[start:start + step]
            diff = block[:, None, :] - self.X[None, :, :]
            distances = np.einsum("qtd,qtd->qt", diff, diff)
            order = np.argsort(distances, axis=1, kind="stable")
            result[start:start + block.shape[0]] = order[:, :self.k]
        return result

    def _scores(self, X: np.ndarray) -> np.ndarray:
        votes = self.y[self.neighbours(X)]
        counts = np.stack([np.bincount(row, minlength=self.n_classes) for row in votes])
        return counts / self.k

    def get_parameters(self) -> Dict[str, Any]:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        X = np.asarray(params["X"], dtype=np.float64).reshape(-1, feature_dim)
        y = np.asarray(params["y"], dtype=np.int64)
        k = int(params["k"])
        if y.ndim != 1 or y.size != X.shape[0]:
            raise ValueError(f"k-NN has {X.shape[0]} rows but {y.size} labels")
        if y.size and (y.min() < 0 or y.max() >= len(classes)):
            raise ValueError(f"k-NN label outside [0, {len(classes)})")
        if k < 1 or k > y.size:
            raise ValueError(f"k={k} must lie in [1, {y.size}]")
        return cls(classes, feature_set, X, y, k)


def train_knn(data: Dataset, k: int = 1) -> KNNModel:
    """
    Memorize the training set.

    Raises:
        EmptyDataset: If the dataset has no rows
        ModelSpecError: If k < 1 or k exceeds the row count
    """
    if len(data) == 0:
        raise EmptyDataset("k-NN needs at least one training instance")
    if k < 1 or k > len(data):
        raise ModelSpecError(f"k={k} must lie in [1, {len(data)}]")
    logger.debug(f"Training {k}-NN on {len(data)} instances")
    return KNNModel(data.classes, data.feature_set, data.X.copy(), data.y, k)
