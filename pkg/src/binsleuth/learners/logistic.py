"""
Multinomial logistic regression trained by full-batch gradient descent.

Weights form a C x (d + 1) matrix whose last column is the bias. The loss is
mean cross-entropy plus ``l2 / 2`` times the squared norm of the non-bias
weights.
"""

import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..types import FeatureSet
from .base_model import EmptyDataset, Model, ModelKind, ModelSpecError, NonFinite
from .dataset import Dataset
from .naive_bayes import softmax_rows

logger = logging.getLogger(__name__)


def add_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def loss_and_gradient(W: np.ndarray, X_aug: np.ndarray, Y: np.ndarray, l2: float) -> Tuple[float, np.ndarray]:
    """
    Regularized cross-entropy and its gradient.

    Args:
        W: C x (d+1) weights, bias last
        X_aug: n x (d+1) inputs with a trailing column of ones
        Y: n x C one-hot targets
        l2: penalty on the non-bias weights
    """
    n = X_aug.shape[0]
    logits = X_aug @ W.T
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm

    penalized = W[:, :-1]
    loss = -np.sum(Y * log_probs) / n + 0.5 * l2 * np.sum(penalized ** 2)

    gradient = (np.exp(log_probs) - Y).T @ X_aug / n
    gradient[:, :-1] += l2 * penalized
    return float(loss), gradient


class LogisticRegressionModel(Model):
    """Softmax over per-class linear scores."""

    def __init__(
        self,
        classes: Sequence[str],
        feature_set: FeatureSet,
        weights: np.ndarray,
        l2: float = 1e-4,
        epochs: int = 500,
        learn_rate: float = 0.5,
        loss_history: Sequence[float] = (),
    ):
        weights = np.asarray(weights, dtype=np.float64)
        super().__init__(classes, weights.shape[1] - 1, feature_set)
        self.weights = weights
        self.l2 = float(l2)
        self.epochs = int(epochs)
        self.learn_rate = float(learn_rate)
        self.loss_history: List[float] = list(loss_history)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.LOGREG

    def _scores(self, X: np.ndarray) -> np.ndarray:
        return softmax_rows(add_bias(X) @ self.weights.T)

    def get_parameters(self) -> Dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "l2": self.l2,
            "epochs": self.epochs,
            "learn_rate": self.learn_rate,
        }

    @classmethod
    def from_parameters(cls, classes, feature_dim, feature_set, params):
        weights = np.asarray(params["weights"], dtype=np.float64).reshape(len(classes), feature_dim + 1)
        return cls(classes, feature_set, weights, params["l2"], params["epochs"], params["learn_rate"])


def train_logreg(
    data: Dataset,
    l2: float = 1e-4,
    epochs: int = 500,
    learn_rate: float = 0.5,
) -> LogisticRegressionModel:
    """
    Gradient descent from zero weights.

    ``loss_history[i]`` is the loss before update ``i``.

    Raises:
        EmptyDataset: If the dataset has no rows
        ModelSpecError: If a hyperparameter is out of range
        NonFinite: If the loss or gradient stops being finite
    """
    if len(data) == 0:
        raise EmptyDataset("Logistic regression needs at least one training instance")
    if l2 < 0 or epochs < 1 or not learn_rate > 0:
        raise ModelSpecError(f"Invalid logreg settings l2={l2}, epochs={epochs}, learn_rate={learn_rate}")

    X_aug = add_bias(data.X)
    Y = np.eye(len(data.classes))[data.y]
    W = np.zeros((len(data.classes), X_aug.shape[1]))
    history: List[float] = []

    for epoch in range(epochs):
        loss, gradient = loss_and_gradient(W, X_aug, Y, l2)
        if not np.isfinite(loss) or not np.all(np.isfinite(gradient)):
            raise NonFinite(f"Loss diverged at epoch {epoch} (learn_rate={learn_rate})")
        history.append(loss)
        W = W - learn_rate * gradient

    if not np.all(np.isfinite(W)):
        raise NonFinite(f"Weights diverged after {epochs} epochs (learn_rate={learn_rate})")
    logger.debug(f"Logistic regression loss {history[0]:.6f} -> {history[-1]:.6f} over {epochs} epochs")
    return LogisticRegressionModel(data.classes, data.feature_set, W, l2, epochs, learn_rate, history)
