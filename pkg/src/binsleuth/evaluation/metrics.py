"""Confusion matrices, per-class metrics and evaluation reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..types import BinSleuthError


class EvaluationError(BinSleuthError):
    """Base class for evaluation failures."""
    pass


class ClassMismatch(EvaluationError):
    """Two datasets that must describe the same files do not."""
    pass


@dataclass
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""
    classes: List[str]
    counts: Optional[np.ndarray] = None

    def __post_init__(self):
        size = len(self.classes)
        if self.counts is None:
            self.counts = np.zeros((size, size), dtype=np.int64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (size, size):
            raise ValueError(f"Confusion counts must be {size}x{size}, got {self.counts.shape}")

    @classmethod
    def from_indices(cls, classes: Sequence[str], true: Sequence[int], predicted: Sequence[int]) -> "ConfusionMatrix":
        matrix = cls(list(classes))
        np.add.at(matrix.counts, (np.asarray(true, dtype=np.int64), np.asarray(predicted, dtype=np.int64)), 1)
        return matrix

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if other.classes != self.classes:
            raise ClassMismatch("Cannot merge confusion matrices over different classes")
        return ConfusionMatrix(self.classes, self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"classes": list(self.classes), "counts": self.counts.tolist()}


@dataclass
class ClassMetrics:
    """Precision, recall and F-measure of one class; 0/0 is reported as 0."""
    label: str
    precision: float
    recall: float
    f_measure: float
    support: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "support": self.support,
        }


def _ratio(numerator: float, denominator: float) -> float:
    return float(numerator / denominator) if denominator else 0.0


def per_class_metrics(confusion: ConfusionMatrix) -> List[ClassMetrics]:
    counts = confusion.counts
    true_positive = np.diag(counts)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    metrics = []
    for i, label in enumerate(confusion.classes):
        precision = _ratio(true_positive[i], predicted[i])
        recall = _ratio(true_positive[i], actual[i])
        f_measure = _ratio(2 * precision * recall, precision + recall)
        metrics.append(ClassMetrics(label, precision, recall, f_measure, int(actual[i])))
    return metrics


@dataclass
class EvalReport:
    """Pooled cross-validation result."""
    accuracy: float
    per_class: List[ClassMetrics]
    confusion: ConfusionMatrix
    fold_count: int
    seed: int
    model_spec: str = ""
    feature_set: str = ""
    fold_accuracies: List[float] = field(default_factory=list)
    fold_sizes: List[int] = field(default_factory=list)

    @classmethod
    def from_confusion(cls, confusion: ConfusionMatrix, fold_count: int, seed: int, **kwargs) -> "EvalReport":
        return cls(
            accuracy=confusion.accuracy,
            per_class=per_class_metrics(confusion),
            confusion=confusion,
            fold_count=fold_count,
            seed=seed,
            **kwargs,
        )

    def class_metrics(self, label: str) -> ClassMetrics:
        for metrics in self.per_class:
            if metrics.label == label:
                return metrics
        raise KeyError(label)

    def f_measure(self, label: str) -> float:
        return self.class_metrics(label).f_measure

    def weighted_fold_accuracy(self) -> Optional[float]:
        """Fold-size weighted mean of fold accuracies (equals ``accuracy``)."""
        if not self.fold_sizes:
            return None
        sizes = np.asarray(self.fold_sizes, dtype=np.float64)
        return float(np.dot(self.fold_accuracies, sizes) / sizes.sum())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "per_class": {m.label: m.to_dict() for m in self.per_class},
            "confusion": self.confusion.to_dict(),
            "fold_count": self.fold_count,
            "fold_accuracies": list(self.fold_accuracies),
            "fold_sizes": list(self.fold_sizes),
            "seed": self.seed,
            "model_spec": self.model_spec,
            "feature_set": self.feature_set,
        }
