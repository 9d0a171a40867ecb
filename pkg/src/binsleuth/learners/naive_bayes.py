"""Gaussian naive Bayes."""

import logging
from typing import Any, Dict, Sequence

import numpy as np

from ..types import FeatureSet
from .base_model import EmptyDataset, Model, ModelKind
from .dataset import Dataset

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-9


def softmax_rows(log_scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax tolerant of -inf entries."""
    shifted = log_scores - np.max(log_scores, axis=1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=1, keepdims=True)


class GaussianNBModel(Model):
    """Per-class, per-feature normal densities with frequency priors."""

    def __init__(
        self,
        classes: Sequence[str],
        feature_set: FeatureSet,
        means: np.ndarray,
        variances: np.ndarray,
        priors: np.ndarray,
    ):
        means = np.asarray(means, dtype=np.float64)
        super().__init__(classes, means.shape[1], feature_set)
        self.means = means
        self.variances = np.asarray(variances, dtype=np.float64)
        self.priors = np.asarray(priors, dtype=np.float64)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.GNB

    def joint_log_likelihood(self, X) -> np.ndarray:
        """log P(c) + sum_j log N(x_j; mean_cj, var_cj), one column per class."""
        X = self._check_matrix(X)
        with np.errstate(divide="ignore"):
            log_priors = np.log(self.priors)
        normalizer = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances), axis=1)
        joint = np.empty((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            sq = (X - self.means[c]) ** 2 / self.variances[c]
            joint[:, c] = log_priors[c] + normalizer[c] - 0.5 * sq.sum(axis=1)
        return joint

    def _scores(self, X: np.ndarray) -> np.ndarray:
        return softmax_rows(self.joint_log_likelihood(X))

    def get_parameters(self) -> Dict[str, Any]:
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "priors": self.priors.tolist(),
        }

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        shape = (len(classes), feature_dim)
        return cls(
            classes,
            feature_set,
            np.asarray(params["means"], dtype=np.float64).reshape(shape),
            np.asarray(params["variances"], dtype=np.float64).reshape(shape),
            np.asarray(params["priors"], dtype=np.float64).reshape(len(classes)),
        )


def train_gnb(data: Dataset) -> GaussianNBModel:
    """
    Estimate class frequencies, means and population variances (floored at 1e-9).

    A class without training rows gets prior 0 and never wins.

    Raises:
        EmptyDataset: If the dataset has no rows
    """
    if len(data) == 0:
        raise EmptyDataset("Naive Bayes needs at least one training instance")

    y = data.y
    n_classes = len(data.classes)
    counts = np.bincount(y, minlength=n_classes)
    if np.count_nonzero(counts) == 1:
        logger.warning("Training naive Bayes on a single class")

    means = np.zeros((n_classes, data.n_features))
    variances = np.ones((n_classes, data.n_features))
    for c in range(n_classes):
        rows = data.X[y == c]
        if rows.shape[0] == 0:
            continue
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), VARIANCE_FLOOR)

    return GaussianNBModel(data.classes, data.feature_set, means, variances, counts / len(data))
