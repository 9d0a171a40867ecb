"""
Command-line interface for binsleuth.

Subcommands carve code out of object files, dump feature CSVs, train and
apply classifiers, and run the cross-validation, fragment-size and bigram
comparison experiments on labeled or synthetic corpora.

Exit codes: 0 on success, 1 on a domain error, 2 on a usage or
configuration error. Errors are printed as ``<ErrorName>: <message>`` on
stderr; logs also go to stderr so stdout stays machine-readable.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .artifacts import atomic_open, build_provenance, canonical_json, write_provenance_sidecar
from .carver import carve_code, carve_raw, parse_elf
from .core.config_manager import ConfigError, ConfigManager
from .core.config_models import AppConfig, LoggingConfig
from .corpus import (
    AllFilesFailed,
    DatasetManifest,
    build_dataset,
    build_paired_datasets,
    carve_manifest,
    default_isa_specs,
    featurize_samples,
    gen_synth_corpus,
    load_manifest,
    load_synth_specs,
    spec_summary,
    write_synth_corpus,
)
from .evaluation import ReportRenderer, compare_bigram_endian, cross_validate, save_report, size_sweep
from .feature_io import read_feature_csv, render_bigram_csv, render_feature_csv, write_bigram_csv, write_feature_csv
from .features import bigram_dense, bigram_features, derive_seed, featurize
from .learners import (
    Dataset,
    ModelSpecError,
    load_model_file,
    parse_model_spec,
    predict,
    save_model_file,
    train_model,
)
from .learners.dataset import select_columns
from .types import BinSleuthError, CodeSample, FeatureSet, LabeledSample

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ModelSpecError, ConfigError)


@dataclass
class CliConfig:
    """Resolved settings shared by every subcommand."""
    command: str
    seed: int
    jobs: int
    app: AppConfig


def configure_logging(config: LoggingConfig, verbose: bool = False, quiet: bool = False) -> None:
    """Configure the root logger once, on stderr."""
    level = config.level.value
    if verbose:
        level = "DEBUG"
    elif quiet:
        level = "ERROR"
    logging.basicConfig(level=getattr(logging, level), format=config.format, stream=sys.stderr, force=True)


def _size_list(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def _class_list(text: str) -> List[str]:
    classes = [part.strip() for part in text.split(",") if part.strip()]
    if not classes:
        raise argparse.ArgumentTypeError("empty class list")
    return classes


def _positive_int(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {value}")
    return value


def _seed_value(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}")


def _add_common_options(parser: argparse.ArgumentParser, default=None) -> None:
    # Subparsers use SUPPRESS so flags given before the subcommand survive.
    parser.add_argument("--config", type=Path, default=default,
                        help="Configuration file (YAML or JSON); falls back to BINSLEUTH_CONFIG")
    parser.add_argument("--seed", type=_seed_value, default=default,
                        help="Master seed; falls back to BINSLEUTH_SEED, then the config file")
    parser.add_argument("--jobs", type=_positive_int, default=default,
                        help="Worker threads (outputs do not depend on this)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", default=default or False,
                           help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", default=default or False,
                           help="Errors only")


def _add_feature_set(parser: argparse.ArgumentParser, allow_bigram: bool = False) -> None:
    choices = [FeatureSet.HISTOGRAM.value, FeatureSet.HIST_ENDIAN.value]
    if allow_bigram:
        choices.append(FeatureSet.BIGRAM.value)
    parser.add_argument("--feature-set", choices=choices, default=FeatureSet.HIST_ENDIAN.value,
                        help="Feature representation (default: hist+endian)")


def _add_dataset_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--features", type=Path, help="Labeled feature CSV from 'featurize'")
    source.add_argument("--manifest", type=Path, help="JSON-lines manifest of labeled files")
    parser.add_argument("--classes", type=_class_list,
                        help="Comma-separated classes to keep (default: all)")


def create_parser() -> argparse.ArgumentParser:
    """Create the command-line argument parser."""
    parser = argparse.ArgumentParser(
        description="Identify the architecture and endianness of compiled object code",
        prog="binsleuth"
    )
    _add_common_options(parser)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, default=argparse.SUPPRESS)

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Carve command
    carve_parser = subparsers.add_parser("carve", parents=[common], help="Extract executable code bytes")
    carve_parser.add_argument("file", type=Path, help="Input object file")
    carve_parser.add_argument("--raw", action="store_true", help="Treat the whole file as code")
    carve_parser.add_argument("--out", type=Path, help="Write code bytes here instead of stdout")

    # Featurize command
    featurize_parser = subparsers.add_parser("featurize", parents=[common], help="Write a feature CSV")
    source = featurize_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--manifest", type=Path, help="JSON-lines manifest of labeled files")
    source.add_argument("--files", type=Path, nargs="+", help="Unlabeled input files")
    featurize_parser.add_argument("--raw", action="store_true", help="Treat --files as raw code")
    featurize_parser.add_argument("--label", help="Label for every --files row")
    featurize_parser.add_argument("--max-bytes", type=_positive_int,
                                  help="Sample at most this many bytes per file")
    featurize_parser.add_argument("--out", type=Path, help="CSV output (default: stdout)")
    featurize_parser.add_argument("--feature-set", choices=[FeatureSet.HIST_ENDIAN.value, FeatureSet.BIGRAM.value],
                                  default=FeatureSet.HIST_ENDIAN.value,
                                  help="hist+endian (260 columns) or a sparse bigram dump")

    # Train command
    train_parser = subparsers.add_parser("train", parents=[common], help="Train and save a model")
    _add_dataset_source(train_parser)
    train_parser.add_argument("--model", default="tree", help="Model spec, e.g. knn:k=3 (default: tree)")
    train_parser.add_argument("--out", type=Path, required=True, help="Model JSON output")
    _add_feature_set(train_parser)

    # Predict command
    predict_parser = subparsers.add_parser("predict", parents=[common], help="Classify files")
    predict_parser.add_argument("files", type=Path, nargs="+", help="Input files")
    predict_parser.add_argument("--model", type=Path, required=True, help="Model JSON from 'train'")
    predict_parser.add_argument("--raw", action="store_true", help="Treat inputs as raw code")
    predict_parser.add_argument("--max-bytes", type=_positive_int,
                                help="Classify a sampled fragment of at most this many bytes")
    predict_parser.add_argument("--format", choices=["text", "json"], default="text")

    # Eval command
    eval_parser = subparsers.add_parser("eval", parents=[common], help="Stratified k-fold cross-validation")
    _add_dataset_source(eval_parser)
    eval_parser.add_argument("--model", default="tree", help="Model spec (default: tree)")
    eval_parser.add_argument("--folds", type=int, help="Number of folds (default: from config, 10)")
    eval_parser.add_argument("--format", choices=["json", "text"], default="json")
    eval_parser.add_argument("--out", type=Path, help="Report output (default: stdout)")
    _add_feature_set(eval_parser, allow_bigram=True)

    # Sweep command
    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="Accuracy versus fragment size")
    sweep_parser.add_argument("--manifest", type=Path, required=True, help="JSON-lines manifest")
    sweep_parser.add_argument("--sizes", type=_size_list, help="Comma-separated fragment sizes in bytes")
    sweep_parser.add_argument("--models", nargs="+", help="Model specs (default: from config)")
    sweep_parser.add_argument("--classes", type=_class_list, help="Comma-separated classes to keep")
    sweep_parser.add_argument("--format", choices=["csv", "json", "text"], default="csv")
    sweep_parser.add_argument("--out", type=Path, help="Output file (default: stdout)")
    _add_feature_set(sweep_parser)

    # Synth command
    synth_parser = subparsers.add_parser("synth", parents=[common], help="Generate a synthetic ISA corpus")
    synth_parser.add_argument("--specs", type=Path, help="YAML/JSON ISA specs (default: built-in pack)")
    synth_parser.add_argument("--out", type=Path, required=True, help="Output directory")
    synth_parser.add_argument("--files-per-spec", type=_positive_int, help="Files per ISA")
    synth_parser.add_argument("--bytes-per-file", type=_positive_int, help="Bytes per file")

    # Compare command
    compare_parser = subparsers.add_parser("compare", parents=[common],
                                           help="Bigram versus hist+endian on shared folds")
    compare_parser.add_argument("--manifest", type=Path, required=True, help="JSON-lines manifest")
    compare_parser.add_argument("--classes", type=_class_list, help="Comma-separated classes to keep")
    compare_parser.add_argument("--models", nargs="+", default=["tree", "forest"],
                                help="Model specs (default: tree forest)")
    compare_parser.add_argument("--folds", type=int, help="Number of folds (default: from config, 10)")
    compare_parser.add_argument("--format", choices=["json", "text"], default="json")
    compare_parser.add_argument("--out", type=Path, help="Report output (default: stdout)")

    # Config command
    config_parser = subparsers.add_parser("config", parents=[common], help="Show the resolved configuration")
    config_parser.add_argument("--show", action="store_true", help="Print the configuration (default)")
    config_parser.add_argument("--format", choices=["yaml", "json"], default="yaml")

    # Version command
    subparsers.add_parser("version", help="Show version information")

    return parser


def _emit(text: str, out: Optional[Path], provenance=None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        save_report(out, text, provenance)
        logger.info(f"Wrote {out}")


def _manifest_inputs(manifest_path: Path, manifest: DatasetManifest) -> List[Path]:
    return [manifest_path, *(manifest.resolve(entry) for entry in manifest.entries)]


def _carve_input(path: Path, raw: bool) -> CodeSample:
    data = path.read_bytes()
    if raw:
        return carve_raw(data, source_id=str(path))
    return carve_code(parse_elf(data), data, source_id=str(path))


def _load_dataset(args, ctx: CliConfig, feature_set: FeatureSet) -> Tuple[Dataset, List[Path]]:
    """Dataset from --features or --manifest, restricted to --classes."""
    if args.features is not None:
        if feature_set is FeatureSet.BIGRAM:
            raise ModelSpecError("Bigram features need --manifest; feature CSVs hold hist+endian vectors")
        dataset = Dataset.from_vectors(read_feature_csv(args.features))
        if feature_set is FeatureSet.HISTOGRAM:
            dataset = dataset.select(FeatureSet.HISTOGRAM)
        inputs = [args.features]
    else:
        manifest = load_manifest(args.manifest)
        build = build_dataset(manifest, feature_set, seed=ctx.seed, jobs=ctx.jobs)
        dataset = build.dataset
        inputs = _manifest_inputs(args.manifest, manifest)
    if args.classes:
        dataset = dataset.restrict(args.classes)
    return dataset, inputs


def handle_carve_command(args, ctx: CliConfig) -> int:
    """Handle the carve command."""
    data = args.file.read_bytes()
    if args.raw:
        sample = carve_raw(data, source_id=str(args.file))
        machine = None
    else:
        image = parse_elf(data)
        sample = carve_code(image, data, source_id=str(args.file))
        machine = image.machine

    noun = "section" if sample.section_count == 1 else "sections"
    summary = f"{sample.section_count} {noun}, {sample.code_len} bytes"
    if machine is not None:
        summary += f", e_machine {machine}"

    if args.out is not None:
        with atomic_open(args.out, "wb") as f:
            f.write(sample.data)
        print(summary)
    else:
        sys.stdout.buffer.write(sample.data)
        sys.stdout.flush()
        print(summary, file=sys.stderr)
    return EXIT_OK


def handle_featurize_command(args, ctx: CliConfig) -> int:
    """Handle the featurize command."""
    feature_set = FeatureSet(args.feature_set)
    if args.manifest is not None:
        manifest = load_manifest(args.manifest)
        carved = carve_manifest(manifest, ctx.jobs)
        samples = carved.samples
        skipped = list(carved.skipped)
        inputs = _manifest_inputs(args.manifest, manifest)
    else:
        samples, skipped = [], []
        for path in args.files:
            try:
                samples.append(LabeledSample(sample=_carve_input(path, args.raw), label=args.label or ""))
            except (OSError, BinSleuthError) as e:
                logger.warning(f"Skipping {path}: {type(e).__name__}: {e}")
                skipped.append(path)
        inputs = list(args.files)

    vectors, failed = featurize_samples(samples, feature_set, args.max_bytes, ctx.seed, ctx.jobs)
    for skip in failed:
        logger.warning(f"Skipping {skip.path}: {skip.error}: {skip.message}")
    if not vectors:
        raise AllFilesFailed("No input could be featurized")
    for vector in vectors:
        if not vector.label:
            vector.label = None

    if args.out is None:
        logger.info(f"Featurized {len(vectors)} inputs to stdout with seed {ctx.seed}; no provenance sidecar")
        render = render_bigram_csv if feature_set is FeatureSet.BIGRAM else render_feature_csv
        sys.stdout.write(render(vectors))
        return EXIT_OK

    if feature_set is FeatureSet.BIGRAM:
        rows = write_bigram_csv(args.out, vectors)
    else:
        rows = write_feature_csv(args.out, vectors)
    write_provenance_sidecar(args.out, build_provenance(ctx.seed, inputs))
    print(f"{rows} rows written to {args.out} ({len(skipped) + len(failed)} inputs skipped)")
    return EXIT_OK


def handle_train_command(args, ctx: CliConfig) -> int:
    """Handle the train command."""
    spec = parse_model_spec(args.model)
    dataset, inputs = _load_dataset(args, ctx, FeatureSet(args.feature_set))
    model = train_model(dataset, spec, seed=ctx.seed, defaults=ctx.app.learners, jobs=ctx.jobs)
    provenance = build_provenance(ctx.seed, inputs)
    provenance["model_spec"] = str(spec)
    save_model_file(args.out, model, provenance)
    print(f"Trained {spec} on {len(dataset)} instances ({len(dataset.classes)} classes) -> {args.out}")
    return EXIT_OK


def _model_input(model, sample: CodeSample, max_bytes: Optional[int], seed: int) -> np.ndarray:
    if model.feature_set is FeatureSet.BIGRAM:
        return bigram_dense(bigram_features(sample))
    vector = featurize(sample, max_bytes=max_bytes, seed=derive_seed(seed, sample.source_id))
    values = np.asarray(vector.values, dtype=np.float64)
    if model.feature_set is FeatureSet.HISTOGRAM:
        return select_columns(values[None, :], FeatureSet.HIST_ENDIAN, FeatureSet.HISTOGRAM)[0]
    return values


def handle_predict_command(args, ctx: CliConfig) -> int:
    """Handle the predict command."""
    model = load_model_file(args.model)
    results = []
    for path in args.files:
        sample = _carve_input(path, args.raw)
        prediction = predict(model, _model_input(model, sample, args.max_bytes, ctx.seed))
        results.append({"file": str(path), "label": prediction.label, "scores": prediction.scores})

    if args.format == "json":
        sys.stdout.write(canonical_json({"model": str(args.model), "seed": ctx.seed, "predictions": results}))
    else:
        logger.info(f"Predicted {len(results)} inputs with seed {ctx.seed}")
        for result in results:
            score = result["scores"][result["label"]]
            print(f"{result['file']}\t{result['label']}\t{score:.4f}")
    return EXIT_OK


def handle_eval_command(args, ctx: CliConfig) -> int:
    """Handle the eval command."""
    spec = parse_model_spec(args.model)
    folds = args.folds if args.folds is not None else ctx.app.evaluation.folds
    dataset, inputs = _load_dataset(args, ctx, FeatureSet(args.feature_set))
    report = cross_validate(dataset, spec, k=folds, seed=ctx.seed, defaults=ctx.app.learners, jobs=ctx.jobs)

    renderer = ReportRenderer(build_provenance(ctx.seed, inputs))
    text = renderer.report_json(report) if args.format == "json" else renderer.report_text(report)
    _emit(text, args.out, renderer.provenance)
    logger.info(f"{spec}: accuracy {report.accuracy:.4f} over {folds} folds")
    return EXIT_OK


def handle_sweep_command(args, ctx: CliConfig) -> int:
    """Handle the sweep command."""
    feature_set = FeatureSet(args.feature_set)
    sizes = args.sizes or ctx.app.evaluation.sweep_sizes
    models = args.models or ctx.app.evaluation.sweep_models
    for model in models:
        parse_model_spec(model)

    manifest = load_manifest(args.manifest)
    build = build_dataset(manifest, feature_set, seed=ctx.seed, jobs=ctx.jobs)
    dataset = build.dataset.restrict(args.classes) if args.classes else build.dataset
    samples = [item.sample for item in build.samples]
    result = size_sweep(dataset, samples, sizes, models, seed=ctx.seed, defaults=ctx.app.learners, jobs=ctx.jobs)

    renderer = ReportRenderer(build_provenance(ctx.seed, _manifest_inputs(args.manifest, manifest)))
    if args.format == "csv":
        text = renderer.sweep_csv(result)
    elif args.format == "json":
        text = renderer.sweep_json(result)
    else:
        text = renderer.sweep_text(result)
    _emit(text, args.out, renderer.provenance)
    return EXIT_OK


def handle_synth_command(args, ctx: CliConfig) -> int:
    """Handle the synth command."""
    specs = load_synth_specs(args.specs) if args.specs is not None else default_isa_specs()
    files_per_spec = args.files_per_spec or ctx.app.synth.files_per_spec
    bytes_per_file = args.bytes_per_file or ctx.app.synth.bytes_per_file

    corpus = gen_synth_corpus(specs, files_per_spec, bytes_per_file, seed=ctx.seed)
    manifest_path = write_synth_corpus(args.out, corpus)
    inputs = [args.specs] if args.specs is not None else []
    provenance = build_provenance(ctx.seed, inputs)
    provenance["specs"] = spec_summary(specs)
    provenance["files_per_spec"] = files_per_spec
    provenance["bytes_per_file"] = bytes_per_file
    write_provenance_sidecar(manifest_path, provenance)

    for row in spec_summary(specs):
        print(f"{row['name']}: {row['endianness']}, {row['instruction_len_bytes']}-byte instructions, "
              f"opcode density {row['opcode_density']:.3f}")
    print(f"{len(corpus)} files -> {manifest_path}")
    return EXIT_OK


def handle_compare_command(args, ctx: CliConfig) -> int:
    """Handle the compare command."""
    folds = args.folds if args.folds is not None else ctx.app.evaluation.folds
    for model in args.models:
        parse_model_spec(model)

    manifest = load_manifest(args.manifest)
    bigram, endian, _ = build_paired_datasets(manifest, seed=ctx.seed, jobs=ctx.jobs)
    if args.classes:
        bigram = bigram.restrict(args.classes)
        endian = endian.restrict(args.classes)
    result = compare_bigram_endian(bigram, endian, k=folds, seed=ctx.seed, model_specs=args.models,
                                   defaults=ctx.app.learners, jobs=ctx.jobs)

    renderer = ReportRenderer(build_provenance(ctx.seed, _manifest_inputs(args.manifest, manifest)))
    text = renderer.comparison_json(result) if args.format == "json" else renderer.comparison_text(result)
    _emit(text, args.out, renderer.provenance)
    return EXIT_OK


def handle_config_command(args, manager: ConfigManager, ctx: CliConfig) -> int:
    """Handle the config command."""
    if not manager.update_config(seed=ctx.seed, jobs=ctx.jobs):
        raise ConfigError(f"Cannot apply seed {ctx.seed} and jobs {ctx.jobs}")
    sys.stdout.write(manager.dump(args.format))
    return EXIT_OK


def handle_version_command() -> int:
    """Handle the version command."""
    print(f"binsleuth {__version__}")
    return EXIT_OK


HANDLERS = {
    "carve": handle_carve_command,
    "featurize": handle_featurize_command,
    "train": handle_train_command,
    "predict": handle_predict_command,
    "eval": handle_eval_command,
    "sweep": handle_sweep_command,
    "synth": handle_synth_command,
    "compare": handle_compare_command,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.command == "version":
        return handle_version_command()

    try:
        manager = ConfigManager(args.config)
        app = manager.config
        configure_logging(app.logging, args.verbose, args.quiet)
        ctx = CliConfig(
            command=args.command,
            seed=manager.resolve_seed(args.seed),
            jobs=args.jobs or app.jobs,
            app=app,
        )
        logger.debug(f"Running {ctx.command} with seed {ctx.seed}, {ctx.jobs} job(s)")

        if args.command == "config":
            return handle_config_command(args, manager, ctx)
        return HANDLERS[args.command](args, ctx)

    except USAGE_ERRORS as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BinSleuthError, OSError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except KeyboardInterrupt:
        print("Interrupted", file=sys.stderr)
        return EXIT_DOMAIN


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main CLI entry point."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
