"""
Stratified k-fold cross-validation with a pooled confusion matrix.

Folds are built per class in class order: the class's row indices are
shuffled by a PCG64 generator seeded with the master seed and dealt
round-robin, continuing from where the previous class stopped. Every fold
model is trained with the same seed, and fold results are merged in fold
order so the report does not depend on scheduling.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from ..core.config_models import LearnerDefaults
from ..core.workers import ordered_map
from ..features import make_rng
from ..learners.base_model import EmptyDataset
from ..learners.dataset import Dataset
from ..learners.factory import ModelFactory, ModelSpec, parse_model_spec
from .metrics import ConfusionMatrix, EvalReport, EvaluationError

logger = logging.getLogger(__name__)


def stratified_folds(data: Dataset, k: int, seed: int) -> List[np.ndarray]:
    """
    Partition row indices into ``k`` folds, balanced per class.

    Raises:
        EvaluationError: If k < 2
        EmptyDataset: If the dataset has no rows
    """
    if k < 2:
        raise EvaluationError(f"Cross-validation needs at least 2 folds, got {k}")
    if len(data) == 0:
        raise EmptyDataset("Cannot fold an empty dataset")

    rng = make_rng(seed)
    y = data.y
    folds: List[List[int]] = [[] for _ in range(k)]
    offset = 0
    for c in range(len(data.classes)):
        members = rng.permutation(np.flatnonzero(y == c))
        for j, index in enumerate(members):
            folds[(offset + j) % k].append(int(index))
        offset = (offset + members.size) % k
    return [np.array(sorted(fold), dtype=np.int64) for fold in folds]


def cross_validate(
    data: Dataset,
    model_spec: "ModelSpec | str",
    k: int = 10,
    seed: int = 42,
    defaults: Optional[LearnerDefaults] = None,
    jobs: int = 1,
    folds: Optional[Sequence[np.ndarray]] = None,
) -> EvalReport:
    """
    Train on k-1 folds, predict the held-out fold, pool all predictions.

    Empty folds are skipped. ``folds`` overrides the stratified split.
    """
    spec = parse_model_spec(model_spec) if isinstance(model_spec, str) else model_spec
    if folds is None:
        folds = stratified_folds(data, k, seed)
    y = data.y
    all_rows = np.arange(len(data))
    active = [np.asarray(fold, dtype=np.int64) for fold in folds if len(fold)]

    def run_fold(test_rows: np.ndarray) -> ConfusionMatrix:
        train_rows = np.setdiff1d(all_rows, test_rows, assume_unique=True)
        model = ModelFactory.train(data.subset(train_rows), spec, seed=seed, defaults=defaults)
        predicted = model.predict_indices(data.X[test_rows])
        return ConfusionMatrix.from_indices(data.classes, y[test_rows], predicted)

    logger.info(f"Cross-validating {spec} over {len(active)} folds ({len(data)} instances)")
    fold_matrices = ordered_map(run_fold, active, jobs)

    pooled = ConfusionMatrix(list(data.classes))
    for matrix in fold_matrices:
        pooled = pooled.merge(matrix)

    return EvalReport.from_confusion(
        pooled,
        fold_count=len(folds),
        seed=seed,
        model_spec=str(spec),
        feature_set=data.feature_set.value,
        fold_accuracies=[m.accuracy for m in fold_matrices],
        fold_sizes=[m.total for m in fold_matrices],
    )
