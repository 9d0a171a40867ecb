"""
Experiments built on cross-validation: the fragment-size sweep and the
bigram versus hist+endian comparison.

The sweep holds out fold 0 of a 2-fold stratified split. Models are trained
on full-sample vectors of fold 1 and scored on fragments of the fold-0 files,
regenerated for every size with seed ``derive_seed(seed, size, source_id)``.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.config_models import LearnerDefaults
from ..core.workers import ordered_map
from ..features import MIN_FRAGMENT_BYTES, FragmentTooSmall, derive_seed, featurize_fragment
from ..learners.dataset import Dataset, select_columns
from ..learners.factory import ModelFactory, parse_model_spec
from ..types import CodeSample, FeatureSet
from .cross_validation import cross_validate, stratified_folds
from .metrics import ClassMismatch, EvalReport

logger = logging.getLogger(__name__)

DEFAULT_COMPARISON_MODELS = ("tree", "forest")


@dataclass
class SweepRow:
    size: int
    model: str
    accuracy: float


@dataclass
class SweepResult:
    """Accuracy per (fragment size, model); sizes ascend within each model."""
    rows: List[SweepRow] = field(default_factory=list)
    seed: int = 0
    test_count: int = 0
    train_count: int = 0
    full_accuracy: Dict[str, float] = field(default_factory=dict)

    @property
    def models(self) -> List[str]:
        return list(dict.fromkeys(row.model for row in self.rows))

    @property
    def sizes(self) -> List[int]:
        return sorted({row.size for row in self.rows})

    def series(self, model: str) -> List[SweepRow]:
        return [row for row in self.rows if row.model == model]

    def accuracy(self, size: int, model: str) -> float:
        for row in self.rows:
            if row.size == size and row.model == model:
                return row.accuracy
        raise KeyError((size, model))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "test_count": self.test_count,
            "train_count": self.train_count,
            "full_accuracy": dict(self.full_accuracy),
            "rows": [{"size": r.size, "model": r.model, "accuracy": r.accuracy} for r in self.rows],
        }


def _aligned_samples(data: Dataset, samples: Sequence[CodeSample]) -> List[CodeSample]:
    by_id = {sample.source_id: sample for sample in samples}
    missing = [sid for sid in data.source_ids if sid not in by_id]
    if missing:
        raise ClassMismatch(f"{len(missing)} dataset rows have no code sample, first: {missing[0]}")
    return [by_id[sid] for sid in data.source_ids]


def size_sweep(
    full_data: Dataset,
    samples: Sequence[CodeSample],
    sizes: Sequence[int],
    model_specs: Sequence[str],
    seed: int = 42,
    defaults: Optional[LearnerDefaults] = None,
    jobs: int = 1,
) -> SweepResult:
    """
    Accuracy of full-sample models on fragments of unseen files.

    Args:
        full_data: Full-sample dataset (hist or hist+endian)
        samples: Code samples whose source ids cover every dataset row
        sizes: Fragment sizes, each at least 4 bytes
        model_specs: Model spec strings

    Raises:
        FragmentTooSmall: If a size is below 4
        ClassMismatch: If a dataset row has no code sample
    """
    sizes = sorted(set(int(s) for s in sizes))
    if not sizes or sizes[0] < MIN_FRAGMENT_BYTES:
        raise FragmentTooSmall(f"Sweep sizes must be at least {MIN_FRAGMENT_BYTES} bytes: {sizes}")
    specs = [parse_model_spec(spec) for spec in model_specs]
    aligned = _aligned_samples(full_data, samples)

    test_rows, train_rows = stratified_folds(full_data, 2, seed)
    train = full_data.subset(train_rows)
    y_test = full_data.y[test_rows]
    logger.info(f"Size sweep: {len(train_rows)} training files, {len(test_rows)} held-out files, {len(sizes)} sizes")

    def fragments(size: int) -> np.ndarray:
        vectors = [
            featurize_fragment(aligned[i], size, derive_seed(seed, size, aligned[i].source_id)).values
            for i in test_rows
        ]
        X = np.array(vectors, dtype=np.float64)
        return select_columns(X, FeatureSet.HIST_ENDIAN, full_data.feature_set)

    fragment_sets = dict(zip(sizes, ordered_map(fragments, sizes, jobs)))

    result = SweepResult(seed=seed, test_count=len(test_rows), train_count=len(train_rows))
    for spec in specs:
        model = ModelFactory.train(train, spec, seed=seed, defaults=defaults, jobs=jobs)
        name = str(spec)
        result.full_accuracy[name] = float(np.mean(model.predict_indices(full_data.X[test_rows]) == y_test))
        for size in sizes:
            predicted = model.predict_indices(fragment_sets[size])
            result.rows.append(SweepRow(size=size, model=name, accuracy=float(np.mean(predicted == y_test))))
        logger.info(f"Swept {name}: full-sample holdout accuracy {result.full_accuracy[name]:.4f}")
    return result


@dataclass
class ComparisonEntry:
    model_spec: str
    bigram: EvalReport
    endian: EvalReport


@dataclass
class ComparisonResult:
    """Paired reports on identical folds."""
    classes: List[str]
    entries: List[ComparisonEntry]
    seed: int
    folds: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": list(self.classes),
            "seed": self.seed,
            "folds": self.folds,
            "models": {
                e.model_spec: {"bigram": e.bigram.to_dict(), "hist+endian": e.endian.to_dict()}
                for e in self.entries
            },
        }


def compare_bigram_endian(
    twin_data_bigram: Dataset,
    twin_data_endian: Dataset,
    k: int = 10,
    seed: int = 42,
    model_specs: Sequence[str] = DEFAULT_COMPARISON_MODELS,
    defaults: Optional[LearnerDefaults] = None,
    jobs: int = 1,
) -> ComparisonResult:
    """
    Cross-validate each model on both representations with shared folds.

    Raises:
        ClassMismatch: If classes, labels or source ids differ between the datasets
    """
    if twin_data_bigram.classes != twin_data_endian.classes:
        raise ClassMismatch(
            f"Class lists differ: {twin_data_bigram.classes} vs {twin_data_endian.classes}"
        )
    if twin_data_bigram.source_ids != twin_data_endian.source_ids:
        raise ClassMismatch("Datasets do not describe the same files in the same order")
    if twin_data_bigram.labels != twin_data_endian.labels:
        raise ClassMismatch("Datasets label the same files differently")

    folds = stratified_folds(twin_data_endian, k, seed)
    entries = []
    for spec in model_specs:
        bigram = cross_validate(twin_data_bigram, spec, k, seed, defaults, jobs, folds=folds)
        endian = cross_validate(twin_data_endian, spec, k, seed, defaults, jobs, folds=folds)
        entries.append(ComparisonEntry(model_spec=str(parse_model_spec(spec)), bigram=bigram, endian=endian))
    return ComparisonResult(classes=list(twin_data_endian.classes), entries=entries, seed=seed, folds=k)
