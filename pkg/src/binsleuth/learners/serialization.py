"""Versioned JSON model documents."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..artifacts import atomic_open, canonical_json
from .base_model import MalformedModel, Model, ModelKind, UnsupportedVersion
from .factory import ModelFactory

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
REQUIRED_KEYS = ("format_version", "kind", "classes", "feature_dim", "feature_set", "params")


def model_to_dict(model: Model, provenance: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    document = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind.value,
        "classes": list(model.classes),
        "feature_dim": model.feature_dim,
        "feature_set": model.feature_set.value,
        "params": model.get_parameters(),
    }
    if provenance is not None:
        document["provenance"] = provenance
    return document


def save_model(model: Model, provenance: Optional[Dict[str, Any]] = None) -> bytes:
    """Serialize with sorted keys; identical models give identical bytes."""
    return canonical_json(model_to_dict(model, provenance)).encode("utf-8")


def load_model(document: Union[bytes, str]) -> Model:
    """
    Rebuild a model from :func:`save_model` output.

    Raises:
        MalformedModel: If the document is not valid JSON or misses fields
        UnsupportedVersion: If format_version is not 1
    """
    try:
        data = json.loads(document)
    except (ValueError, UnicodeDecodeError) as e:
        raise MalformedModel(f"Model document is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise MalformedModel("Model document must be a JSON object")

    missing = [key for key in REQUIRED_KEYS if key not in data]
    if "format_version" not in missing and data["format_version"] != FORMAT_VERSION:
        raise UnsupportedVersion(f"Unsupported model format_version {data['format_version']!r}")
    if missing:
        raise MalformedModel(f"Model document is missing {', '.join(missing)}")

    try:
        kind = ModelKind(data["kind"])
        classes = data["classes"]
        feature_dim = int(data["feature_dim"])
        if not isinstance(classes, list) or not classes or not all(isinstance(c, str) for c in classes):
            raise ValueError("classes must be a non-empty list of strings")
        if feature_dim < 1:
            raise ValueError("feature_dim must be positive")
        model_class = ModelFactory.model_class(kind)
        model = model_class.from_parameters(classes, feature_dim, data["feature_set"], data["params"])
    except (KeyError, ValueError, TypeError, AttributeError) as e:
        raise MalformedModel(f"Invalid model document: {e}") from None

    if model.feature_dim != feature_dim:
        raise MalformedModel(f"Parameters imply {model.feature_dim} features, header says {feature_dim}")
    return model


def save_model_file(path: Union[str, Path], model: Model, provenance: Optional[Dict[str, Any]] = None) -> None:
    with atomic_open(path, "wb") as f:
        f.write(save_model(model, provenance))
    logger.info(f"Saved {model.kind.value} model to {path}")


def load_model_file(path: Union[str, Path]) -> Model:
    return load_model(Path(path).read_bytes())
