"""Shared fixtures and hypothesis profiles."""

import logging
import os

import hypothesis
import numpy as np
import pytest

from binsleuth.corpus import default_isa_specs, gen_synth_corpus, write_synth_corpus
from binsleuth.learners import Dataset
from binsleuth.types import CodeSample

np.seterr(all="warn")

hypothesis.settings.register_profile("dev", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("fuzz", max_examples=10_000, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def separable_1d():
    """A at {0.1, 0.2}, B at {0.8, 0.9}."""
    return Dataset(
        X=np.array([[0.1], [0.2], [0.8], [0.9]]),
        labels=["A", "A", "B", "B"],
        classes=["A", "B"],
    )


@pytest.fixture
def xor_2d():
    return Dataset(
        X=np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
        labels=["A", "B", "B", "A"],
        classes=["A", "B"],
    )


@pytest.fixture
def blobs():
    """Three well separated Gaussian blobs in 4 dimensions, 20 points each."""
    rng = np.random.default_rng(7)
    centers = np.array([[0.0, 0.0, 0.0, 0.0], [5.0, 5.0, 0.0, 0.0], [0.0, 5.0, 5.0, 5.0]])
    X = np.vstack([center + rng.normal(scale=0.3, size=(20, 4)) for center in centers])
    labels = [name for name in ("a", "b", "c") for _ in range(20)]
    return Dataset(X=X, labels=labels, classes=["a", "b", "c"])


@pytest.fixture
def code_sample():
    return CodeSample(data=bytes([0x00, 0x01, 0x00, 0x01]), source_id="tiny")


@pytest.fixture(scope="session")
def small_synth_corpus():
    """Eight synthetic ISAs, 12 files of 4 KiB each."""
    return gen_synth_corpus(default_isa_specs(), files_per_spec=12, bytes_per_file=4096, seed=3)


@pytest.fixture
def synth_dir(tmp_path, small_synth_corpus):
    """The small synthetic corpus on disk; returns the manifest path."""
    return write_synth_corpus(tmp_path / "corpus", small_synth_corpus)


@pytest.fixture(autouse=True)
def restore_root_logger():
    """Undo the CLI's ``logging.basicConfig(force=True)`` after each test."""
    root = logging.getLogger()
    level = root.level
    yield
    for handler in root.handlers[:]:
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)
    root.setLevel(level)
