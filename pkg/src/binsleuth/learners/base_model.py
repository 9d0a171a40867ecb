"""
Base classifier interface shared by every learner.

Models are immutable after training. ``predict_scores`` returns one row of
nonnegative class scores per input summing to 1; the predicted label is the
first maximal entry, so ties resolve to the smallest class index.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ..types import BinSleuthError, FeatureSet, FeatureVector


class ModelKind(str, Enum):
    """Serialized model kinds, also the prefixes of model spec strings."""
    KNN = "knn"
    GNB = "gnb"
    TREE = "tree"
    RANDOM_TREE = "rtree"
    FOREST = "forest"
    LOGREG = "logreg"


class LearnerError(BinSleuthError):
    """Base class for training and prediction failures."""
    pass


class EmptyDataset(LearnerError):
    """Training or evaluation was given no instances."""
    pass


class DimensionMismatch(LearnerError):
    """Vector dimensionality differs from what the model or dataset expects."""
    pass


class NonFinite(LearnerError):
    """Training diverged to NaN or infinity."""
    pass


class MalformedModel(LearnerError):
    """A model document cannot be decoded."""
    pass


class UnsupportedVersion(LearnerError):
    """A model document uses an unknown format_version."""
    pass


class ModelSpecError(LearnerError):
    """A model spec string or hyperparameter is invalid."""
    pass


class UnknownClass(LearnerError):
    """A class name is not present in the dataset."""
    pass


@dataclass
class Prediction:
    """Predicted label with per-class scores."""
    label: str
    scores: Dict[str, float]


class Model(ABC):
    """Abstract trained classifier."""

    def __init__(self, classes: Sequence[str], feature_dim: int, feature_set: FeatureSet):
        self.classes: List[str] = list(classes)
        self.feature_dim = int(feature_dim)
        self.feature_set = FeatureSet(feature_set)

    @property
    @abstractmethod
    def kind(self) -> ModelKind:
        """Kind recorded in serialized documents."""
        pass

    @abstractmethod
    def _scores(self, X: np.ndarray) -> np.ndarray:
        """Per-class scores for a validated n x feature_dim matrix."""
        pass

    @abstractmethod
    def get_parameters(self) -> Dict[str, Any]:
        """JSON-serializable learned state."""
        pass

    @classmethod
    @abstractmethod
    def from_parameters(
        cls,
        classes: Sequence[str],
        feature_dim: int,
        feature_set: FeatureSet,
        params: Dict[str, Any],
    ) -> "Model":
        """Rebuild a model from :meth:`get_parameters` output."""
        pass

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def _check_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.feature_dim:
            raise DimensionMismatch(
                f"{self.kind.value} model expects {self.feature_dim} features, got {X.shape[-1]}"
            )
        return X

    def predict_scores(self, X) -> np.ndarray:
        """n x C score matrix; each row sums to 1."""
        return self._scores(self._check_matrix(X))

    def predict_indices(self, X) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)

    def predict_labels(self, X) -> List[str]:
        return [self.classes[i] for i in self.predict_indices(X)]


def predict(model: Model, vector: Union[FeatureVector, Sequence[float], np.ndarray]) -> Prediction:
    """
    Classify one vector.

    Raises:
        DimensionMismatch: If the vector length differs from the model's feature_dim
    """
    values = vector.values if isinstance(vector, FeatureVector) else vector
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size != model.feature_dim:
        raise DimensionMismatch(
            f"{model.kind.value} model expects {model.feature_dim} features, got {values.size}"
        )
    scores = model.predict_scores(values)[0]
    best = int(np.argmax(scores))
    return Prediction(
        label=model.classes[best],
        scores={name: float(score) for name, score in zip(model.classes, scores)},
    )
