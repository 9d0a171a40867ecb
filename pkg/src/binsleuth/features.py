"""
Feature generation from carved code.

The main vector has 260 entries: a 256-bin byte-value histogram normalized by
the number of code bytes, followed by the frequencies of the byte pairs
FF FE, FE FF, 00 01 and 01 00. Pairs are scanned with stride 1 inside each
carved section; a pair never spans two sections.

Random fragments use numpy's PCG64 ``Generator`` seeded with
``SeedSequence(seed)``. Per-call RNGs are created from the seed, so results
depend only on (sample, max_bytes, seed). The draw order is fixed: first the
histogram positions (without replacement), then the pair offsets (with
replacement). Per-file seeds come from :func:`derive_seed`.
"""

import hashlib
import logging
from typing import Dict, Optional, Tuple

import numpy as np

from .types import BigramVector, BinSleuthError, CodeSample, FeatureVector

logger = logging.getLogger(__name__)

HISTOGRAM_BINS = 256
FEATURE_DIM = 260
BIGRAM_DIM = 65536
MIN_FRAGMENT_BYTES = 4

# Order matches feature indices 256..259.
ENDIAN_PATTERNS: Tuple[Tuple[int, int], ...] = (
    (0xFF, 0xFE),
    (0xFE, 0xFF),
    (0x00, 0x01),
    (0x01, 0x00),
)
_PATTERN_CODES = np.array([(a << 8) | b for a, b in ENDIAN_PATTERNS], dtype=np.int64)


class FeatureError(BinSleuthError):
    """Base class for featurization failures."""
    pass


class EmptyCode(FeatureError):
    """The sample holds no code bytes."""
    pass


class TooShort(EmptyCode):
    """No byte pair exists inside any section."""
    pass


class FragmentTooSmall(FeatureError):
    """Requested fragment size is below the four-byte minimum."""
    pass


class DomainError(FeatureError):
    """Arguments outside the mathematical domain of the operation."""
    pass


def derive_seed(master: int, *keys) -> int:
    """Stable 64-bit child seed for (master, keys...), e.g. (seed, path)."""
    digest = hashlib.sha256(str(int(master)).encode())
    for key in keys:
        digest.update(b"\x00")
        digest.update(str(key).encode("utf-8"))
    return int.from_bytes(digest.digest()[:8], "big")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _as_array(sample: CodeSample) -> np.ndarray:
    if not sample.data:
        raise EmptyCode(f"No code bytes in {sample.source_id or 'sample'}")
    return np.frombuffer(sample.data, dtype=np.uint8)


def _pair_codes(sample: CodeSample, arr: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Codes ``a*256+b`` for every adjacent pair and a mask of within-section pairs."""
    if arr.size < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=bool)
    codes = (arr[:-1].astype(np.int64) << 8) | arr[1:]
    valid = np.ones(codes.size, dtype=bool)
    starts = np.cumsum(sample.section_lengths)[:-1]
    starts = starts[(starts > 0) & (starts < arr.size)]
    valid[starts - 1] = False
    return codes, valid


def byte_histogram(sample: CodeSample) -> np.ndarray:
    """Normalized 256-bin byte-value histogram.

    Raises:
        EmptyCode: If the sample is empty
    """
    arr = _as_array(sample)
    return np.bincount(arr, minlength=HISTOGRAM_BINS) / arr.size


def endian_counts(sample: CodeSample) -> np.ndarray:
    """Within-section frequencies of the four endian patterns over total code bytes."""
    if not sample.data:
        return np.zeros(len(ENDIAN_PATTERNS))
    arr = np.frombuffer(sample.data, dtype=np.uint8)
    codes, valid = _pair_codes(sample, arr)
    hits = codes[valid]
    return np.array([np.count_nonzero(hits == code) for code in _PATTERN_CODES]) / arr.size


def featurize_full(sample: CodeSample, label: Optional[str] = None) -> FeatureVector:
    """Full-sample 260-entry feature vector."""
    histogram = byte_histogram(sample)
    values = np.concatenate([histogram, endian_counts(sample)])
    return FeatureVector(
        values=tuple(values.tolist()),
        source_id=sample.source_id,
        code_len=sample.code_len,
        sampled_len=sample.code_len,
        label=label,
    )


def featurize_fragment(
    sample: CodeSample,
    max_bytes: int,
    seed: int,
    label: Optional[str] = None,
) -> FeatureVector:
    """
    Feature vector of a random fragment of at most ``max_bytes`` bytes.

    The histogram uses M = min(max_bytes, code_len) positions drawn without
    replacement, normalized by M. Endian features use M offsets drawn with
    replacement from [0, code_len - 2]; a draw whose window crosses a section
    boundary matches nothing. Counters are divided by M.

    Raises:
        FragmentTooSmall: If max_bytes < 4
        EmptyCode: If the sample is empty
    """
    if max_bytes < MIN_FRAGMENT_BYTES:
        raise FragmentTooSmall(f"Fragment size {max_bytes} below {MIN_FRAGMENT_BYTES} bytes")
    arr = _as_array(sample)
    n = arr.size
    m = min(int(max_bytes), n)
    rng = make_rng(seed)

    positions = rng.choice(n, size=m, replace=False)
    histogram = np.bincount(arr[positions], minlength=HISTOGRAM_BINS) / m

    endian = np.zeros(len(ENDIAN_PATTERNS))
    if n >= 2:
        codes, valid = _pair_codes(sample, arr)
        offsets = rng.integers(0, n - 1, size=m)
        drawn = codes[offsets][valid[offsets]]
        endian = np.array([np.count_nonzero(drawn == code) for code in _PATTERN_CODES]) / m

    return FeatureVector(
        values=tuple(np.concatenate([histogram, endian]).tolist()),
        source_id=sample.source_id,
        code_len=n,
        sampled_len=m,
        label=label,
    )


def featurize(
    sample: CodeSample,
    label: Optional[str] = None,
    max_bytes: Optional[int] = None,
    seed: int = 0,
) -> FeatureVector:
    """Full-sample vector, or a fragment when ``max_bytes`` is given."""
    if max_bytes is None:
        return featurize_full(sample, label)
    return featurize_fragment(sample, max_bytes, seed, label)


def bigram_features(sample: CodeSample, label: Optional[str] = None) -> BigramVector:
    """
    Sparse 64k-entry bigram frequencies (index = first_byte * 256 + second_byte).

    Raises:
        EmptyCode: If the sample is empty
        TooShort: If no section holds two bytes
    """
    arr = _as_array(sample)
    codes, valid = _pair_codes(sample, arr)
    within = codes[valid]
    if within.size == 0:
        raise TooShort(f"No within-section byte pair in {sample.source_id or 'sample'}")
    counts = np.bincount(within, minlength=BIGRAM_DIM)
    nonzero = np.flatnonzero(counts)
    frequencies: Dict[int, float] = {
        int(index): float(counts[index] / within.size) for index in nonzero
    }
    return BigramVector(counts=frequencies, source_id=sample.source_id, label=label)


def bigram_dense(vector: BigramVector) -> np.ndarray:
    """Dense 65536-entry view of a sparse bigram vector."""
    dense = np.zeros(BIGRAM_DIM)
    if vector.counts:
        indices = np.fromiter(vector.counts.keys(), dtype=np.int64, count=len(vector.counts))
        dense[indices] = np.fromiter(vector.counts.values(), dtype=np.float64, count=len(vector.counts))
    return dense


def opcode_density(opcode_bits: float, avg_instruction_bits: float) -> float:
    """Share of instruction bits spent on the opcode.

    Raises:
        DomainError: If either argument is not positive or opcode_bits exceeds the instruction width
    """
    if opcode_bits <= 0 or avg_instruction_bits <= 0:
        raise DomainError("opcode_bits and avg_instruction_bits must be positive")
    if opcode_bits > avg_instruction_bits:
        raise DomainError(f"opcode_bits {opcode_bits} exceed instruction width {avg_instruction_bits}")
    return opcode_bits / avg_instruction_bits
