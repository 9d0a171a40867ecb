"""
Label manifests and dataset assembly.

A manifest is JSON lines, one entry per line::

    {"path": "bin/ls", "label": "mips", "endian": "big", "wordsize": 32, "mode": "elf"}

Relative paths resolve against the manifest's directory. Endianness and word
size are metadata only; they never become features.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from ..carver import carve_bytes
from ..core.workers import ordered_map
from ..features import bigram_features, derive_seed, featurize
from ..learners.base_model import EmptyDataset
from ..learners.dataset import Dataset, first_appearance
from ..types import BinSleuthError, CarveMode, Endianness, FeatureSet, LabeledSample

logger = logging.getLogger(__name__)


class CorpusError(BinSleuthError):
    """Base class for corpus failures."""
    pass


class MalformedManifest(CorpusError):
    """A manifest line is not a valid entry, or a path repeats."""
    pass


class AllFilesFailed(CorpusError):
    """No manifest entry could be carved and featurized."""
    pass


class ManifestEntry(BaseModel):
    """One labeled input file."""
    path: str = Field(description="File path, relative to the manifest directory unless absolute")
    label: str = Field(description="Architecture label")
    endian: Optional[Endianness] = Field(default=None, description="Byte order metadata")
    wordsize: Optional[int] = Field(default=None, ge=8, description="Word size in bits")
    mode: CarveMode = Field(default=CarveMode.ELF, description="elf carves code sections, raw takes the whole file")

    model_config = {"extra": "forbid", "frozen": True}

    @field_validator('path', 'label')
    @classmethod
    def not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("must not be empty")
        return v


@dataclass
class DatasetManifest:
    """Validated manifest entries in file order."""
    entries: List[ManifestEntry] = field(default_factory=list)
    base_dir: Path = field(default_factory=Path)

    def __len__(self) -> int:
        return len(self.entries)

    def resolve(self, entry: ManifestEntry) -> Path:
        path = Path(entry.path)
        return path if path.is_absolute() else self.base_dir / path

    @property
    def missing(self) -> List[ManifestEntry]:
        """Entries whose file does not exist."""
        return [entry for entry in self.entries if not self.resolve(entry).is_file()]

    @property
    def labels(self) -> List[str]:
        return first_appearance([entry.label for entry in self.entries])

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(entry.model_dump(mode="json", exclude_none=True), sort_keys=True)
            for entry in self.entries
        ]
        return "".join(line + "\n" for line in lines)


def parse_manifest(text: str, base_dir: Union[str, Path] = ".") -> DatasetManifest:
    """
    Parse JSON-lines manifest text; blank lines are ignored.

    Raises:
        MalformedManifest: On invalid JSON, an invalid entry or a duplicate path
    """
    entries: List[ManifestEntry] = []
    seen = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise ValueError("entry must be a JSON object")
            entry = ManifestEntry(**raw)
        except (ValueError, TypeError, ValidationError) as e:
            raise MalformedManifest(f"line {line_no}: {e}") from None
        if entry.path in seen:
            raise MalformedManifest(f"line {line_no}: duplicate path {entry.path}")
        seen.add(entry.path)
        entries.append(entry)
    return DatasetManifest(entries=entries, base_dir=Path(base_dir))


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """Read a manifest file and report (not fail on) missing inputs."""
    path = Path(path)
    manifest = parse_manifest(path.read_text(encoding="utf-8"), base_dir=path.parent)
    for entry in manifest.missing:
        logger.warning(f"Manifest entry not found: {manifest.resolve(entry)}")
    logger.info(f"Loaded manifest {path} with {len(manifest)} entries")
    return manifest


@dataclass
class SkippedFile:
    path: str
    error: str
    message: str


@dataclass
class CarvedCorpus:
    samples: List[LabeledSample]
    skipped: List[SkippedFile]


@dataclass
class DatasetBuild:
    """Result of :func:`build_dataset`."""
    dataset: Dataset
    samples: List[LabeledSample]
    vectors: list
    skipped: List[SkippedFile]

    @property
    def skip_report(self) -> List[Tuple[str, str]]:
        return [(s.path, f"{s.error}: {s.message}") for s in self.skipped]


def carve_manifest(manifest: DatasetManifest, jobs: int = 1) -> CarvedCorpus:
    """Carve every entry; unreadable or uncarvable files go to the skip list."""

    def carve(entry: ManifestEntry):
        try:
            data = manifest.resolve(entry).read_bytes()
            sample = carve_bytes(data, entry.mode, source_id=entry.path)
        except (OSError, BinSleuthError) as e:
            return SkippedFile(entry.path, type(e).__name__, str(e))
        return LabeledSample(
            sample=sample,
            label=entry.label,
            endian=entry.endian,
            wordsize=entry.wordsize,
            metadata={"mode": entry.mode.value},
        )

    results = ordered_map(carve, manifest.entries, jobs)
    samples = [r for r in results if isinstance(r, LabeledSample)]
    skipped = [r for r in results if isinstance(r, SkippedFile)]
    for skip in skipped:
        logger.warning(f"Skipping {skip.path}: {skip.error}: {skip.message}")
    logger.info(f"Carved {len(samples)} of {len(manifest)} manifest entries")
    return CarvedCorpus(samples=samples, skipped=skipped)


def featurize_samples(
    samples: Sequence[LabeledSample],
    feature_set: FeatureSet = FeatureSet.HIST_ENDIAN,
    max_bytes: Optional[int] = None,
    seed: int = 42,
    jobs: int = 1,
) -> Tuple[list, List[SkippedFile]]:
    """Vectors for every sample (fragment seeds derived from (seed, source id))."""
    feature_set = FeatureSet(feature_set)

    def compute(item: LabeledSample):
        try:
            if feature_set is FeatureSet.BIGRAM:
                return bigram_features(item.sample, item.label)
            return featurize(item.sample, item.label, max_bytes=max_bytes,
                             seed=derive_seed(seed, item.sample.source_id))
        except BinSleuthError as e:
            return SkippedFile(item.sample.source_id, type(e).__name__, str(e))

    results = ordered_map(compute, samples, jobs)
    vectors = [r for r in results if not isinstance(r, SkippedFile)]
    skipped = [r for r in results if isinstance(r, SkippedFile)]
    return vectors, skipped


def build_dataset(
    manifest: DatasetManifest,
    feature_set: FeatureSet = FeatureSet.HIST_ENDIAN,
    max_bytes: Optional[int] = None,
    seed: int = 42,
    jobs: int = 1,
) -> DatasetBuild:
    """
    Carve and featurize every manifest entry into a dataset.

    Classes are ordered by first appearance among the files that succeeded.

    Raises:
        EmptyDataset: If the manifest has no entries
        AllFilesFailed: If every entry failed
    """
    if not manifest.entries:
        raise EmptyDataset("Manifest has no entries")
    feature_set = FeatureSet(feature_set)

    carved = carve_manifest(manifest, jobs)
    vectors, failed = featurize_samples(carved.samples, feature_set, max_bytes, seed, jobs)
    for skip in failed:
        logger.warning(f"Skipping {skip.path}: {skip.error}: {skip.message}")
    skipped = carved.skipped + failed
    if not vectors:
        raise AllFilesFailed(f"All {len(manifest)} manifest entries failed")

    failed_ids = {s.path for s in failed}
    samples = [s for s in carved.samples if s.sample.source_id not in failed_ids]

    if feature_set is FeatureSet.BIGRAM:
        dataset = Dataset.from_bigrams(vectors)
    else:
        dataset = Dataset.from_vectors(vectors)
        if feature_set is FeatureSet.HISTOGRAM:
            dataset = dataset.select(FeatureSet.HISTOGRAM)
    logger.info(f"Built {feature_set.value} dataset: {len(dataset)} instances, {len(dataset.classes)} classes, "
                f"{len(skipped)} skipped")
    return DatasetBuild(dataset=dataset, samples=samples, vectors=vectors, skipped=skipped)


def build_paired_datasets(
    manifest: DatasetManifest,
    seed: int = 42,
    jobs: int = 1,
) -> Tuple[Dataset, Dataset, List[SkippedFile]]:
    """
    Bigram and hist+endian datasets over the same files in the same order.

    Files are carved once; a file that fails either featurization is dropped
    from both datasets.

    Raises:
        EmptyDataset: If the manifest has no entries
        AllFilesFailed: If no file survives both featurizations
    """
    if not manifest.entries:
        raise EmptyDataset("Manifest has no entries")
    carved = carve_manifest(manifest, jobs)
    bigrams, bigram_failed = featurize_samples(carved.samples, FeatureSet.BIGRAM, None, seed, jobs)
    vectors, vector_failed = featurize_samples(carved.samples, FeatureSet.HIST_ENDIAN, None, seed, jobs)

    failed = {s.path: s for s in bigram_failed + vector_failed}
    for skip in failed.values():
        logger.warning(f"Skipping {skip.path}: {skip.error}: {skip.message}")
    bigrams = [v for v in bigrams if v.source_id not in failed]
    vectors = [v for v in vectors if v.source_id not in failed]
    if not vectors:
        raise AllFilesFailed(f"All {len(manifest)} manifest entries failed")

    classes = first_appearance([v.label for v in vectors])
    endian = Dataset.from_vectors(vectors, classes)
    bigram = Dataset.from_bigrams(bigrams, classes)
    return bigram, endian, carved.skipped + list(failed.values())
