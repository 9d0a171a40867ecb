"""Cross-validation, metrics and experiment harnesses."""

from .cross_validation import cross_validate, stratified_folds
from .experiments import (
    ComparisonEntry,
    ComparisonResult,
    SweepResult,
    SweepRow,
    compare_bigram_endian,
    size_sweep,
)
from .metrics import ClassMetrics, ClassMismatch, ConfusionMatrix, EvalReport, EvaluationError, per_class_metrics
from .reporter import ReportRenderer, save_report

__all__ = [
    "ClassMetrics",
    "ClassMismatch",
    "ComparisonEntry",
    "ComparisonResult",
    "ConfusionMatrix",
    "EvalReport",
    "EvaluationError",
    "ReportRenderer",
    "SweepResult",
    "SweepRow",
    "compare_bigram_endian",
    "cross_validate",
    "per_class_metrics",
    "save_report",
    "size_sweep",
    "stratified_folds",
]
