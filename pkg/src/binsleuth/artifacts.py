"""
Artifact writing: atomic file replacement, input digests and provenance.

Every JSON artifact is serialized with sorted keys and no timestamps, so two
runs with identical inputs and seed produce byte-identical files.
"""

import hashlib
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Optional, TextIO, Union

from . import __version__
from .types import BinSleuthError

logger = logging.getLogger(__name__)

PROVENANCE_SUFFIX = ".provenance.json"


class ArtifactError(BinSleuthError):
    """Raised when an output artifact cannot be written."""
    pass


@contextmanager
def atomic_open(file_path: Union[str, Path], mode: str = 'w', encoding: str = 'utf-8') -> Iterator[TextIO]:
    """
    Open a temporary sibling of ``file_path`` and move it into place on success.

    Args:
        file_path: Final destination
        mode: 'w' or 'wb'

    Raises:
        ArtifactError: If writing or the final rename fails
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    fd, temp_name = tempfile.mkstemp(prefix=f"tmp_{file_path.name}", dir=str(file_path.parent))
    os.close(fd)
    temp_path = Path(temp_name)

    try:
        if 'b' in mode:
            handle = open(temp_path, mode)
        else:
            handle = open(temp_path, mode, encoding=encoding, newline='')
        with handle:
            yield handle
        temp_path.replace(file_path)
    except Exception as e:
        if temp_path.exists():
            try:
                temp_path.unlink()
            except OSError:
                pass
        if isinstance(e, BinSleuthError):
            raise
        raise ArtifactError(f"Failed to write {file_path}: {e}") from e


def canonical_json(data: Dict[str, Any]) -> str:
    """Serialize with sorted keys, two-space indent and a trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(file_path: Union[str, Path], data: Dict[str, Any]) -> None:
    """Atomically write a canonical JSON document."""
    with atomic_open(file_path) as f:
        f.write(canonical_json(data))
    logger.info(f"Wrote {file_path}")


def write_text(file_path: Union[str, Path], text: str) -> None:
    """Atomically write a text artifact."""
    with atomic_open(file_path) as f:
        f.write(text)
    logger.info(f"Wrote {file_path}")


def sha256_file(file_path: Union[str, Path]) -> str:
    """Hex sha256 digest of a file's bytes, read in chunks."""
    digest = hashlib.sha256()
    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_provenance(seed: int, inputs: Optional[Iterable[Union[str, Path]]] = None) -> Dict[str, Any]:
    """
    Provenance block embedded in (or written beside) every artifact.

    Inputs that no longer exist are recorded with a null digest.
    """
    digests: Dict[str, Optional[str]] = {}
    for path in inputs or ():
        path = Path(path)
        digests[str(path)] = sha256_file(path) if path.is_file() else None
    return {
        "seed": int(seed),
        "tool_version": __version__,
        "inputs": digests,
    }


def provenance_path(artifact_path: Union[str, Path]) -> Path:
    """Sidecar location for artifacts whose format cannot carry metadata."""
    artifact_path = Path(artifact_path)
    return artifact_path.with_name(artifact_path.name + PROVENANCE_SUFFIX)


def write_provenance_sidecar(artifact_path: Union[str, Path], provenance: Dict[str, Any]) -> Path:
    """Write ``<artifact>.provenance.json`` including the artifact's own digest."""
    sidecar = provenance_path(artifact_path)
    document = dict(provenance)
    document["artifact"] = {"path": str(artifact_path), "sha256": sha256_file(artifact_path)}
    write_json(sidecar, document)
    return sidecar
