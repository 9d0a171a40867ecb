"""
Shared types and data models for binsleuth.

This module contains the value types passed between the carver, feature,
learner and corpus layers, kept here to avoid circular imports.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple


class BinSleuthError(Exception):
    """Base class for every domain error raised by binsleuth."""
    pass


class Endianness(str, Enum):
    """Byte order of multi-byte values."""
    BIG = "big"
    LITTLE = "little"


class CarveMode(str, Enum):
    """How code bytes are extracted from an input file."""
    ELF = "elf"
    RAW = "raw"


class FeatureSet(str, Enum):
    """Feature representation a dataset or model works on."""
    HISTOGRAM = "hist"
    HIST_ENDIAN = "hist+endian"
    BIGRAM = "bigram"

    @property
    def dimension(self) -> int:
        return {
            FeatureSet.HISTOGRAM: 256,
            FeatureSet.HIST_ENDIAN: 260,
            FeatureSet.BIGRAM: 65536,
        }[self]


@dataclass(frozen=True)
class CodeSample:
    """Executable bytes carved from one input, with provenance.

    ``section_lengths`` records the length of every carved section in file
    order; byte pairs are never formed across these boundaries.
    """
    data: bytes
    source_id: str
    section_lengths: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.section_lengths:
            object.__setattr__(self, "section_lengths", (len(self.data),) if self.data else ())
        if sum(self.section_lengths) != len(self.data):
            raise ValueError(
                f"Section lengths {self.section_lengths} do not cover {len(self.data)} bytes"
            )

    @property
    def section_count(self) -> int:
        return len(self.section_lengths)

    @property
    def code_len(self) -> int:
        return len(self.data)


@dataclass
class FeatureVector:
    """The 260-entry feature vector of one sample.

    Indices 0..255 hold the normalized byte-value histogram, 256..259 the
    endian pattern frequencies in the order 0xFFFE, 0xFEFF, 0x0001, 0x0100.
    """
    values: Tuple[float, ...]
    source_id: str
    code_len: int
    sampled_len: int
    label: Optional[str] = None


@dataclass
class BigramVector:
    """Sparse normalized 2-byte frequency vector (index = first*256 + second)."""
    counts: Dict[int, float]
    source_id: str
    label: Optional[str] = None


@dataclass
class LabeledSample:
    """A carved sample bound to its manifest label and metadata."""
    sample: CodeSample
    label: str
    endian: Optional[Endianness] = None
    wordsize: Optional[int] = None
    metadata: Dict[str, str] = field(default_factory=dict)
