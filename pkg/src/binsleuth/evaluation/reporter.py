"""
Report rendering and saving.

JSON reports embed a provenance block and use sorted keys; text reports are
aligned columns for people; sweep results also go to a plot-ready CSV
``size,model,accuracy``.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..artifacts import canonical_json, write_provenance_sidecar, write_text
from .experiments import ComparisonResult, SweepResult
from .metrics import EvalReport

logger = logging.getLogger(__name__)

SWEEP_HEADER = ["size", "model", "accuracy"]


def _table(header: List[str], rows: List[List[str]]) -> str:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]
    lines = []
    for row in [header, *rows]:
        cells = [str(cell).ljust(width) if i == 0 else str(cell).rjust(width)
                 for i, (cell, width) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


class ReportRenderer:
    """Renders evaluation results as JSON, text and CSV."""

    def __init__(self, provenance: Optional[Dict[str, Any]] = None):
        self.provenance = provenance
        self.logger = logging.getLogger(__name__)

    def _with_provenance(self, body: Dict[str, Any]) -> Dict[str, Any]:
        if self.provenance is not None:
            body = dict(body)
            body["provenance"] = self.provenance
        return body

    def report_json(self, report: EvalReport) -> str:
        return canonical_json(self._with_provenance(report.to_dict()))

    def report_text(self, report: EvalReport) -> str:
        lines = [
            f"model: {report.model_spec}  features: {report.feature_set}  "
            f"folds: {report.fold_count}  seed: {report.seed}",
            f"accuracy: {report.accuracy:.4f} ({int(report.confusion.counts.trace())}/{report.confusion.total})",
            "",
            _table(
                ["class", "precision", "recall", "f_measure", "support"],
                [[m.label, f"{m.precision:.4f}", f"{m.recall:.4f}", f"{m.f_measure:.4f}", str(m.support)]
                 for m in report.per_class],
            ),
            "",
            "confusion (rows = true, columns = predicted):",
            _table(
                ["", *report.confusion.classes],
                [[label, *(str(v) for v in row)]
                 for label, row in zip(report.confusion.classes, report.confusion.counts.tolist())],
            ),
        ]
        return "\n".join(lines) + "\n"

    def sweep_json(self, result: SweepResult) -> str:
        return canonical_json(self._with_provenance(result.to_dict()))

    def sweep_csv(self, result: SweepResult) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in result.rows:
            writer.writerow([row.size, row.model, f"{row.accuracy:.6f}"])
        return buffer.getvalue()

    def sweep_text(self, result: SweepResult) -> str:
        models = result.models
        rows = [[str(size), *(f"{result.accuracy(size, m):.4f}" for m in models)] for size in result.sizes]
        rows.append(["full", *(f"{result.full_accuracy.get(m, float('nan')):.4f}" for m in models)])
        return _table(["size", *models], rows) + "\n"

    def comparison_json(self, result: ComparisonResult) -> str:
        return canonical_json(self._with_provenance(result.to_dict()))

    def comparison_text(self, result: ComparisonResult) -> str:
        rows = []
        for entry in result.entries:
            for label in result.classes:
                rows.append([
                    entry.model_spec,
                    label,
                    f"{entry.bigram.f_measure(label):.4f}",
                    f"{entry.endian.f_measure(label):.4f}",
                ])
        return _table(["model", "class", "bigram_f", "hist+endian_f"], rows) + "\n"


def save_report(
    path: Union[str, Path],
    text: str,
    provenance: Optional[Dict[str, Any]] = None,
) -> None:
    """Write a rendered report; CSV files get a provenance sidecar."""
    path = Path(path)
    write_text(path, text)
    if path.suffix.lower() == ".csv" and provenance is not None:
        write_provenance_sidecar(path, provenance)
