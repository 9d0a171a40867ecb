"""Labeled corpora: JSON-lines manifests and the synthetic ISA generator."""

from .manifest import (
    AllFilesFailed,
    CarvedCorpus,
    CorpusError,
    DatasetBuild,
    DatasetManifest,
    MalformedManifest,
    ManifestEntry,
    SkippedFile,
    build_dataset,
    build_paired_datasets,
    carve_manifest,
    featurize_samples,
    load_manifest,
    parse_manifest,
)
from .synth import (
    BadSpec,
    SynthIsaSpec,
    build_spec,
    default_isa_specs,
    gen_synth_corpus,
    generate_file,
    load_synth_specs,
    make_twin_specs,
    sample_path,
    spec_summary,
    synth_samples,
    twin_stem,
    write_synth_corpus,
)

__all__ = [
    "AllFilesFailed",
    "BadSpec",
    "CarvedCorpus",
    "CorpusError",
    "DatasetBuild",
    "DatasetManifest",
    "MalformedManifest",
    "ManifestEntry",
    "SkippedFile",
    "SynthIsaSpec",
    "build_dataset",
    "build_paired_datasets",
    "build_spec",
    "carve_manifest",
    "default_isa_specs",
    "featurize_samples",
    "gen_synth_corpus",
    "generate_file",
    "load_manifest",
    "load_synth_specs",
    "make_twin_specs",
    "parse_manifest",
    "sample_path",
    "spec_summary",
    "synth_samples",
    "twin_stem",
    "write_synth_corpus",
]
