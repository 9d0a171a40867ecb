"""CSV dumps of feature and bigram vectors."""

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Union

from .artifacts import atomic_open
from .features import FEATURE_DIM, FeatureError
from .types import BigramVector, FeatureVector

logger = logging.getLogger(__name__)

META_COLUMNS = ["label", "source_id", "code_len", "sampled_len"]
FEATURE_COLUMNS = [f"f{i:03d}" for i in range(FEATURE_DIM)]
FEATURE_HEADER = META_COLUMNS + FEATURE_COLUMNS
BIGRAM_HEADER = ["label", "source_id", "index", "value"]


class FeatureFileError(FeatureError):
    """A feature CSV is malformed."""
    pass


def format_value(value: float) -> str:
    """Nine significant digits."""
    return f"{value:.9g}"


def feature_rows(vectors: Iterable[FeatureVector]) -> Iterable[List[str]]:
    for vector in vectors:
        yield [
            vector.label or "",
            vector.source_id,
            str(vector.code_len),
            str(vector.sampled_len),
            *(format_value(v) for v in vector.values),
        ]


def render_feature_csv(vectors: Iterable[FeatureVector]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FEATURE_HEADER)
    writer.writerows(feature_rows(vectors))
    return buffer.getvalue()


def write_feature_csv(path: Union[str, Path], vectors: Iterable[FeatureVector]) -> int:
    """Atomically write feature vectors; returns the row count."""
    vectors = list(vectors)
    with atomic_open(path) as f:
        f.write(render_feature_csv(vectors))
    logger.info(f"Wrote {len(vectors)} feature rows to {path}")
    return len(vectors)


def read_feature_csv(path: Union[str, Path]) -> List[FeatureVector]:
    """
    Read a feature CSV back into vectors; an empty label field becomes None.

    Raises:
        FeatureFileError: If the header or a row does not match the layout
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != FEATURE_HEADER:
            raise FeatureFileError(f"{path} does not have the {len(FEATURE_HEADER)}-column feature header")

        vectors = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(FEATURE_HEADER):
                raise FeatureFileError(f"{path}:{line_no}: expected {len(FEATURE_HEADER)} columns, got {len(row)}")
            try:
                vectors.append(FeatureVector(
                    values=tuple(float(v) for v in row[4:]),
                    source_id=row[1],
                    code_len=int(row[2]),
                    sampled_len=int(row[3]),
                    label=row[0] or None,
                ))
            except ValueError as e:
                raise FeatureFileError(f"{path}:{line_no}: {e}") from None
    return vectors


def bigram_rows(vectors: Iterable[BigramVector]) -> Iterable[List[str]]:
    """One row per nonzero entry in ascending index order."""
    for vector in vectors:
        for index in sorted(vector.counts):
            yield [vector.label or "", vector.source_id, str(index), format_value(vector.counts[index])]


def render_bigram_csv(vectors: Iterable[BigramVector]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BIGRAM_HEADER)
    writer.writerows(bigram_rows(vectors))
    return buffer.getvalue()


def write_bigram_csv(path: Union[str, Path], vectors: Iterable[BigramVector]) -> int:
    """Atomically write a sparse bigram dump; returns the row count."""
    vectors = list(vectors)
    with atomic_open(path) as f:
        f.write(render_bigram_csv(vectors))
    rows = sum(len(v.counts) for v in vectors)
    logger.info(f"Wrote {rows} bigram rows to {path}")
    return rows
