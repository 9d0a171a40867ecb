"""
Synthetic multi-ISA corpus generator.

Every file is a stream of fixed-length instructions. The top ``opcode_bits``
bits of the leading byte(s) hold an opcode drawn from the ISA's skewed
alphabet; the remaining bytes are uniform noise, except that with
``immediate_prob`` the last ``immediate_bytes`` bytes carry an immediate in
the ISA's byte order. Immediates come from a fixed pool: 1 (p 0.4); 2, 4
and 8 (p 0.1 each); and a high address rooted at 0xFFFE (p 0.3), which is
0xFFFE in a 2-byte field and 0xFFFE0000 | r16 in a 4-byte field.

File ``i`` of an ISA draws from ``derive_seed(seed, stem, i)`` where the stem
is the ISA name without a -be/-le suffix. Pool choices and r16 are drawn for
every instruction regardless of byte order, so file ``i`` of two endian twins
consumes the same random stream and the pair differs only in the order of
immediate bytes.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..artifacts import atomic_open, write_text
from ..features import derive_seed, make_rng, opcode_density
from ..types import CarveMode, CodeSample, Endianness, LabeledSample
from .manifest import CorpusError, DatasetManifest, ManifestEntry

logger = logging.getLogger(__name__)

IMMEDIATE_POOL = (1, 2, 4, 8)
IMMEDIATE_POOL_PROBS = (0.4, 0.1, 0.1, 0.1, 0.3)
HIGH_ADDRESS_ROOT = 0xFFFE
TWIN_SUFFIXES = ("-be", "-le")


class BadSpec(CorpusError):
    """A synthetic ISA spec or generation request is invalid."""
    pass


class OpcodeEntry(BaseModel):
    """Opcode value (right-aligned in opcode_bits) and its probability."""
    value: int = Field(ge=0)
    prob: float = Field(ge=0.0, le=1.0)

    model_config = {"extra": "forbid", "frozen": True}


class SynthIsaSpec(BaseModel):
    """Parameters of one synthetic instruction set."""
    name: str = Field(min_length=1)
    instruction_len_bytes: int = Field(description="Fixed instruction length: 2, 4 or 8")
    opcode_bits: int = Field(ge=1)
    opcode_alphabet: List[OpcodeEntry] = Field(min_length=1)
    endianness: Endianness
    immediate_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    immediate_bytes: int = Field(default=2, description="Immediate field width: 0, 2 or 4")
    word_size_bits: int = Field(default=32, ge=8)

    model_config = {"extra": "forbid", "frozen": True}

    @model_validator(mode="after")
    def check_consistency(self) -> "SynthIsaSpec":
        length = self.instruction_len_bytes
        if length not in (2, 4, 8):
            raise ValueError(f"instruction_len_bytes must be 2, 4 or 8, got {length}")
        if self.opcode_bits > 8 * length:
            raise ValueError(f"opcode_bits {self.opcode_bits} exceed {8 * length}-bit instructions")
        total = sum(entry.prob for entry in self.opcode_alphabet)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"opcode probabilities sum to {total}, not 1")
        limit = 1 << self.opcode_bits
        for entry in self.opcode_alphabet:
            if entry.value >= limit:
                raise ValueError(f"opcode {entry.value:#x} does not fit in {self.opcode_bits} bits")
        if self.immediate_bytes not in (0, 2, 4):
            raise ValueError(f"immediate_bytes must be 0, 2 or 4, got {self.immediate_bytes}")
        if self.immediate_bytes > length - self.opcode_bytes:
            raise ValueError(f"{self.immediate_bytes}-byte immediates overlap the opcode")
        if self.immediate_prob > 0 and self.immediate_bytes == 0:
            raise ValueError("immediate_prob > 0 needs immediate_bytes > 0")
        return self

    @property
    def opcode_bytes(self) -> int:
        return math.ceil(self.opcode_bits / 8)

    def opcode_density(self) -> float:
        return opcode_density(self.opcode_bits, 8 * self.instruction_len_bytes)


def build_spec(data: Dict[str, Any]) -> SynthIsaSpec:
    """Validate a spec mapping.

    Raises:
        BadSpec: If any field is invalid
    """
    try:
        return SynthIsaSpec(**data)
    except (ValidationError, TypeError) as e:
        raise BadSpec(f"Invalid synthetic ISA spec {data.get('name', '?')!r}: {e}") from None


def twin_stem(name: str) -> str:
    """Spec name without a trailing -be or -le."""
    for suffix in TWIN_SUFFIXES:
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def make_twin_specs(base: SynthIsaSpec) -> Tuple[SynthIsaSpec, SynthIsaSpec]:
    """Big- and little-endian variants named ``<stem>-be`` and ``<stem>-le``."""
    stem = twin_stem(base.name)
    big = base.model_copy(update={"name": f"{stem}-be", "endianness": Endianness.BIG})
    little = base.model_copy(update={"name": f"{stem}-le", "endianness": Endianness.LITTLE})
    return big, little


def _alphabet(values: Sequence[Tuple[int, float]]) -> List[Dict[str, float]]:
    return [{"value": v, "prob": p} for v, p in values]


def default_isa_specs() -> List[SynthIsaSpec]:
    """Built-in pack: six distinct ISAs plus one endian-twin pair."""
    risc = build_spec({
        "name": "risc32",
        "instruction_len_bytes": 4,
        "opcode_bits": 6,
        "opcode_alphabet": _alphabet([(0x23, 0.3), (0x2B, 0.2), (0x09, 0.2), (0x0F, 0.1), (0x04, 0.1), (0x03, 0.1)]),
        "endianness": "big",
        "immediate_prob": 0.15,
        "immediate_bytes": 2,
        "word_size_bits": 32,
    })
    others = [
        {
            "name": "cond32", "instruction_len_bytes": 4, "opcode_bits": 4,
            "opcode_alphabet": _alphabet([(0xE, 0.85), (0xF, 0.1), (0x7, 0.05)]),
            "endianness": "little", "immediate_prob": 0.1, "immediate_bytes": 2, "word_size_bits": 32,
        },
        {
            "name": "wide64", "instruction_len_bytes": 8, "opcode_bits": 8,
            "opcode_alphabet": _alphabet([(0x47, 0.4), (0xA4, 0.3), (0x6B, 0.3)]),
            "endianness": "big", "immediate_prob": 0.1, "immediate_bytes": 4, "word_size_bits": 64,
        },
        {
            "name": "dense16", "instruction_len_bytes": 2, "opcode_bits": 8,
            "opcode_alphabet": _alphabet([(0x55, 0.4), (0x5A, 0.2), (0x66, 0.2), (0x69, 0.2)]),
            "endianness": "little", "immediate_prob": 0.0, "immediate_bytes": 0, "word_size_bits": 16,
        },
        {
            "name": "var32", "instruction_len_bytes": 4, "opcode_bits": 8,
            "opcode_alphabet": _alphabet([(0x48, 0.5), (0x89, 0.3), (0xC7, 0.2)]),
            "endianness": "little", "immediate_prob": 0.1, "immediate_bytes": 2, "word_size_bits": 32,
        },
        {
            "name": "spark32", "instruction_len_bytes": 4, "opcode_bits": 8,
            "opcode_alphabet": _alphabet([(0xD0, 0.3), (0x81, 0.3), (0x40, 0.4)]),
            "endianness": "big", "immediate_prob": 0.1, "immediate_bytes": 2, "word_size_bits": 32,
        },
        {
            "name": "avr16", "instruction_len_bytes": 2, "opcode_bits": 4,
            "opcode_alphabet": _alphabet([(0x9, 0.5), (0xB, 0.5)]),
            "endianness": "little", "immediate_prob": 0.0, "immediate_bytes": 0, "word_size_bits": 8,
        },
    ]
    return [*make_twin_specs(risc), *(build_spec(spec) for spec in others)]


def load_synth_specs(path: Union[str, Path]) -> List[SynthIsaSpec]:
    """
    Read specs from YAML or JSON: a list, or a mapping with a ``specs`` list.
    Entries with ``twin: true`` expand into their -be/-le pair.

    Raises:
        BadSpec: If the file structure or an entry is invalid
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            if path.suffix.lower() in [".yaml", ".yml"]:
                document = yaml.safe_load(f)
            else:
                document = json.load(f)
        except (yaml.YAMLError, ValueError) as e:
            raise BadSpec(f"Cannot parse {path}: {e}") from None

    if isinstance(document, dict):
        document = document.get("specs")
    if not isinstance(document, list) or not document:
        raise BadSpec(f"{path} must contain a non-empty list of specs")

    specs: List[SynthIsaSpec] = []
    for raw in document:
        if not isinstance(raw, dict):
            raise BadSpec(f"Spec entries must be mappings, got {type(raw).__name__}")
        raw = dict(raw)
        twin = bool(raw.pop("twin", False))
        spec = build_spec(raw)
        specs.extend(make_twin_specs(spec) if twin else [spec])

    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise BadSpec(f"Duplicate spec names in {path}: {names}")
    logger.info(f"Loaded {len(specs)} synthetic ISA specs from {path}")
    return specs


def _immediate_values(spec: SynthIsaSpec, pool_choice: np.ndarray, low16: np.ndarray) -> np.ndarray:
    width = spec.immediate_bytes
    high = np.full(pool_choice.size, HIGH_ADDRESS_ROOT, dtype=np.int64)
    if width == 4:
        high = (HIGH_ADDRESS_ROOT << 16) | low16
    table = np.array(IMMEDIATE_POOL, dtype=np.int64)
    small = table[np.minimum(pool_choice, len(IMMEDIATE_POOL) - 1)]
    return np.where(pool_choice < len(IMMEDIATE_POOL), small, high)


def generate_file(spec: SynthIsaSpec, n_bytes: int, rng: np.random.Generator) -> bytes:
    """One file of ``n_bytes // instruction_len_bytes`` instructions."""
    length = spec.instruction_len_bytes
    count = n_bytes // length
    raw = rng.integers(0, 256, size=(count, length), dtype=np.uint8)

    values = np.array([entry.value for entry in spec.opcode_alphabet], dtype=np.int64)
    probs = np.array([entry.prob for entry in spec.opcode_alphabet], dtype=np.float64)
    opcodes = values[rng.choice(values.size, size=count, p=probs / probs.sum())]

    field_bits = spec.opcode_bytes * 8
    shift = field_bits - spec.opcode_bits
    placed = opcodes << shift
    mask = ((1 << spec.opcode_bits) - 1) << shift
    for j in range(spec.opcode_bytes):
        byte_shift = (spec.opcode_bytes - 1 - j) * 8
        mask_byte = (mask >> byte_shift) & 0xFF
        opcode_byte = ((placed >> byte_shift) & 0xFF).astype(np.uint8)
        raw[:, j] = (raw[:, j] & np.uint8(0xFF ^ mask_byte)) | opcode_byte

    carries = rng.random(count) < spec.immediate_prob
    pool_choice = rng.choice(len(IMMEDIATE_POOL_PROBS), size=count, p=IMMEDIATE_POOL_PROBS)
    low16 = rng.integers(0, 1 << 16, size=count, dtype=np.int64)

    width = spec.immediate_bytes
    if width and carries.any():
        immediates = _immediate_values(spec, pool_choice, low16)
        encoded = np.stack(
            [(immediates >> (8 * (width - 1 - j))) & 0xFF for j in range(width)], axis=1
        ).astype(np.uint8)
        if spec.endianness is Endianness.LITTLE:
            encoded = encoded[:, ::-1]
        raw[carries, length - width:] = encoded[carries]

    return raw.tobytes()


def sample_path(spec_name: str, index: int) -> str:
    """Corpus-relative path, also used as the sample's source id."""
    return f"{spec_name}/{spec_name}_{index:04d}.bin"


def gen_synth_corpus(
    specs: Sequence[SynthIsaSpec],
    files_per_spec: int,
    bytes_per_file: int,
    seed: int = 42,
) -> List[LabeledSample]:
    """
    Generate a labeled corpus; the label of each sample is its spec name.

    Raises:
        BadSpec: If the request is inconsistent with the specs
    """
    if not specs:
        raise BadSpec("No synthetic ISA specs given")
    if files_per_spec < 1:
        raise BadSpec(f"files_per_spec must be at least 1, got {files_per_spec}")
    max_len = max(spec.instruction_len_bytes for spec in specs)
    if bytes_per_file < max_len or bytes_per_file % max_len:
        raise BadSpec(f"bytes_per_file {bytes_per_file} is not a positive multiple of {max_len}")
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise BadSpec(f"Duplicate spec names: {names}")

    corpus: List[LabeledSample] = []
    for spec in specs:
        stem = twin_stem(spec.name)
        for file_index in range(files_per_spec):
            rng = make_rng(derive_seed(seed, stem, file_index))
            data = generate_file(spec, bytes_per_file, rng)
            corpus.append(LabeledSample(
                sample=CodeSample(data=data, source_id=sample_path(spec.name, file_index)),
                label=spec.name,
                endian=spec.endianness,
                wordsize=spec.word_size_bits,
            ))
    logger.info(f"Generated {len(corpus)} synthetic files ({len(specs)} ISAs x {files_per_spec})")
    return corpus


def write_synth_corpus(
    out_dir: Union[str, Path],
    corpus: Sequence[LabeledSample],
    manifest_name: str = "manifest.jsonl",
) -> Path:
    """Write raw ``.bin`` files plus a raw-mode manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    entries = []
    for item in corpus:
        target = out_dir / item.sample.source_id
        with atomic_open(target, "wb") as f:
            f.write(item.sample.data)
        entries.append(ManifestEntry(
            path=item.sample.source_id,
            label=item.label,
            endian=item.endian,
            wordsize=item.wordsize,
            mode=CarveMode.RAW,
        ))
    manifest_path = out_dir / manifest_name
    write_text(manifest_path, DatasetManifest(entries=entries, base_dir=out_dir).to_jsonl())
    logger.info(f"Wrote {len(entries)} synthetic files and {manifest_path}")
    return manifest_path


def synth_samples(corpus: Sequence[LabeledSample]) -> List[CodeSample]:
    return [item.sample for item in corpus]


def spec_summary(specs: Sequence[SynthIsaSpec]) -> List[Dict[str, Any]]:
    """Name, byte order and opcode density per spec."""
    return [
        {
            "name": spec.name,
            "endianness": spec.endianness.value,
            "instruction_len_bytes": spec.instruction_len_bytes,
            "opcode_density": spec.opcode_density(),
        }
        for spec in specs
    ]
