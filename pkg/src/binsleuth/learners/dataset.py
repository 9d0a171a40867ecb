"""Labeled feature matrices used for training and evaluation."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..features import bigram_dense
from ..types import BigramVector, FeatureSet, FeatureVector
from .base_model import DimensionMismatch, EmptyDataset, LearnerError, UnknownClass

logger = logging.getLogger(__name__)

_DIM_TO_SET = {fs.dimension: fs for fs in FeatureSet}


def feature_set_for(dim: int) -> FeatureSet:
    try:
        return _DIM_TO_SET[dim]
    except KeyError:
        raise DimensionMismatch(f"No feature set has {dim} dimensions") from None


def select_columns(X: np.ndarray, source: FeatureSet, target: FeatureSet) -> np.ndarray:
    """Project a matrix from one feature set to another (only hist+endian -> hist)."""
    source, target = FeatureSet(source), FeatureSet(target)
    if source is target:
        return X
    if source is FeatureSet.HIST_ENDIAN and target is FeatureSet.HISTOGRAM:
        if X.shape[-1] != FeatureSet.HIST_ENDIAN.dimension:
            raise DimensionMismatch(f"Expected {FeatureSet.HIST_ENDIAN.dimension} columns, got {X.shape[-1]}")
        return X[..., :FeatureSet.HISTOGRAM.dimension]
    raise DimensionMismatch(f"Cannot derive {target.value} features from {source.value}")


def first_appearance(labels: Sequence[str]) -> List[str]:
    return list(dict.fromkeys(labels))


@dataclass
class Dataset:
    """n x d float64 matrix with one label and source id per row.

    ``classes`` fixes the class order used for scores, tie-breaks and
    confusion matrices.
    """
    X: np.ndarray
    labels: List[str]
    classes: List[str]
    source_ids: List[str] = field(default_factory=list)
    feature_set: FeatureSet = FeatureSet.HIST_ENDIAN

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise DimensionMismatch(f"Feature matrix must be 2-D, got shape {self.X.shape}")
        self.labels = list(self.labels)
        self.classes = list(self.classes)
        if not self.source_ids:
            self.source_ids = [f"#{i}" for i in range(len(self.labels))]
        if len(self.labels) != self.X.shape[0] or len(self.source_ids) != self.X.shape[0]:
            raise LearnerError(
                f"{self.X.shape[0]} rows but {len(self.labels)} labels and {len(self.source_ids)} source ids"
            )
        unknown = set(self.labels) - set(self.classes)
        if unknown:
            raise UnknownClass(f"Labels not in class list: {sorted(unknown)}")
        # Small hand-built matrices keep the default tag; only select() relies on it.
        self.feature_set = FeatureSet(self.feature_set)

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], classes: Optional[Sequence[str]] = None) -> "Dataset":
        """
        Stack labeled feature vectors.

        Raises:
            EmptyDataset: If no vectors are given
            DimensionMismatch: If vectors differ in length
            LearnerError: If a vector has no label
        """
        if not vectors:
            raise EmptyDataset("No feature vectors to build a dataset from")
        dims = {len(v.values) for v in vectors}
        if len(dims) != 1:
            raise DimensionMismatch(f"Feature vectors have mixed lengths {sorted(dims)}")
        missing = [v.source_id for v in vectors if not v.label]
        if missing:
            raise LearnerError(f"{len(missing)} vectors have no label, first: {missing[0]}")

        labels = [v.label for v in vectors]
        return cls(
            X=np.array([v.values for v in vectors], dtype=np.float64),
            labels=labels,
            classes=list(classes) if classes is not None else first_appearance(labels),
            source_ids=[v.source_id for v in vectors],
            feature_set=feature_set_for(dims.pop()),
        )

    @classmethod
    def from_bigrams(cls, vectors: Sequence[BigramVector], classes: Optional[Sequence[str]] = None) -> "Dataset":
        """Dense 65536-column dataset from sparse bigram vectors."""
        if not vectors:
            raise EmptyDataset("No bigram vectors to build a dataset from")
        missing = [v.source_id for v in vectors if not v.label]
        if missing:
            raise LearnerError(f"{len(missing)} bigram vectors have no label, first: {missing[0]}")
        labels = [v.label for v in vectors]
        return cls(
            X=np.vstack([bigram_dense(v) for v in vectors]),
            labels=labels,
            classes=list(classes) if classes is not None else first_appearance(labels),
            source_ids=[v.source_id for v in vectors],
            feature_set=FeatureSet.BIGRAM,
        )

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def y(self) -> np.ndarray:
        """Class index of every row."""
        index = {name: i for i, name in enumerate(self.classes)}
        return np.array([index[label] for label in self.labels], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=len(self.classes))

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Rows at ``indices``; the class list is kept whole."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            X=self.X[indices],
            labels=[self.labels[i] for i in indices],
            classes=self.classes,
            source_ids=[self.source_ids[i] for i in indices],
            feature_set=self.feature_set,
        )

    def restrict(self, classes: Sequence[str]) -> "Dataset":
        """
        Keep only rows of the named classes, in this dataset's class order.

        Raises:
            UnknownClass: If a name is not one of the dataset's classes
            EmptyDataset: If no row remains
        """
        wanted = set(classes)
        unknown = wanted - set(self.classes)
        if unknown:
            raise UnknownClass(f"Unknown classes: {sorted(unknown)}")
        rows = [i for i, label in enumerate(self.labels) if label in wanted]
        if not rows:
            raise EmptyDataset(f"No instances of {sorted(wanted)}")
        kept = [name for name in self.classes if name in wanted]
        restricted = self.subset(rows)
        restricted.classes = kept
        logger.debug(f"Restricted dataset to {len(kept)} classes, {len(rows)} rows")
        return restricted

    def select(self, feature_set: FeatureSet) -> "Dataset":
        """Same rows with the columns of ``feature_set``."""
        feature_set = FeatureSet(feature_set)
        return Dataset(
            X=select_columns(self.X, self.feature_set, feature_set),
            labels=self.labels,
            classes=self.classes,
            source_ids=self.source_ids,
            feature_set=feature_set,
        )
