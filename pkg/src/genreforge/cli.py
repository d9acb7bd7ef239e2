"""``genreforge`` command line: extract, train, predict, compare.

Exit codes: 0 success, 1 operational failure, 2 empty or invalid corpus.
Logs go to stderr; results go to stdout or files.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .audio_io import load_wav, scan_dataset
from .config import ConfigError, RunConfig, dump_config, load_config, parse_assignment
from .errors import GenreForgeError, NoAudioFound
from .evaluate import ModelConfig, accuracy, compare_models
from .features import AnalysisConfig, extract_features
from .models import MODEL_KINDS, TrainedModel, fit_model, load_model, save_model
from .preprocess import (
    ScalerKind,
    apply_scaler,
    fit_scaler,
    read_feature_csv,
    stratified_split,
    write_feature_csv,
)

log = logging.getLogger("genreforge")

EXIT_OK, EXIT_FAILURE, EXIT_BAD_CORPUS = 0, 1, 2


def _extract_one(job):
    path, analysis = job
    try:
        return path, extract_features(load_wav(path), analysis).values, None
    except (GenreForgeError, OSError, ValueError) as exc:
        return path, None, f"{type(exc).__name__}: {exc}"


def _run_config(args) -> RunConfig:
    overrides = {}
    for item in args.set or []:
        overrides.update(parse_assignment(item))
    for key in ("seed", "val_fraction", "scaler"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return load_config(args.config, overrides)


def cmd_extract(args) -> int:
    cfg = _run_config(args)
    analysis = cfg.analysis()
    try:
        manifest = scan_dataset(args.data)
    except (NoAudioFound, NotADirectoryError) as exc:
        log.error("%s", exc)
        return EXIT_BAD_CORPUS

    jobs = [(path, analysis) for path, _ in manifest.entries]
    workers = args.jobs or os.cpu_count() or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_one, jobs, chunksize=4))
    else:
        results = [_extract_one(job) for job in jobs]

    rows = []
    for (path, label), (_, values, error) in zip(manifest.entries, results):
        if error is not None:
            log.warning("skipping %s: %s", path, error)
            continue
        rows.append((path, label, values))
    if not rows:
        log.error("no clip under %s could be decoded", args.data)
        return EXIT_BAD_CORPUS
    try:
        write_feature_csv(args.out, rows, analysis.feature_names())
    except OSError as exc:
        log.error("cannot write %s: %s", args.out, exc)
        return EXIT_FAILURE
    log.info("wrote %d rows (%d skipped) to %s", len(rows), len(results) - len(rows), args.out)
    return EXIT_OK


def _prepare(args, cfg: RunConfig):
    analysis = cfg.analysis()
    data = read_feature_csv(args.features, expected_names=analysis.feature_names())
    train, val = stratified_split(data, cfg.val_fraction, cfg.seed)
    scaler = fit_scaler(train, ScalerKind(cfg.scaler))
    return analysis, apply_scaler(train, scaler), apply_scaler(val, scaler), scaler


def cmd_train(args) -> int:
    cfg = _run_config(args)
    try:
        analysis, train, val, scaler = _prepare(args, cfg)
        model = fit_model(args.model, train, **cfg.hyperparameters(args.model))
    except (GenreForgeError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE

    trained = TrainedModel(
        kind=args.model,
        model=model,
        label_names=train.label_names,
        feature_names=train.feature_names,
        scaler=scaler,
        metadata={
            "seed": cfg.seed,
            "val_fraction": cfg.val_fraction,
            "n_train": len(train),
            "n_val": len(val),
            "analysis": analysis.to_dict(),
        },
    )
    try:
        save_model(trained, args.out)
    except OSError as exc:
        log.error("cannot write %s: %s", args.out, exc)
        return EXIT_FAILURE
    print(f"train accuracy: {accuracy(model.predict(train.features), train.labels):.4f}")
    print(f"validation accuracy: {accuracy(model.predict(val.features), val.labels):.4f}")
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        trained = load_model(args.model)
        analysis = AnalysisConfig(**trained.metadata.get("analysis", {}))
        clip = load_wav(args.audio)
        features = extract_features(clip, analysis)
        scores = trained.scores(features.values)[0]
        index = int(trained.predict(features.values)[0])
    except (GenreForgeError, OSError, TypeError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE
    print(trained.label_names[index])
    for name, score in zip(trained.label_names, scores):
        print(f"  {name}: {score:.4f}")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _run_config(args)
    try:
        analysis, train, val, _ = _prepare(args, cfg)
    except (GenreForgeError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILURE

    kinds = args.models.split(",") if args.models else list(MODEL_KINDS)
    configs = [ModelConfig(kind, cfg.hyperparameters(kind)) for kind in kinds]
    report = compare_models(train, val, configs, segment_duration_s=analysis.segment_s)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out / "config.toml").write_text(dump_config(cfg), encoding="utf-8")
    top = report.top
    if top is not None:
        (out / f"confusion_{top.model_kind}.csv").write_text(top.confusion.to_csv(), encoding="utf-8")
        title = f"Confusion matrix: {top.model_kind} (validation)"
        (out / f"confusion_{top.model_kind}.svg").write_text(top.confusion.to_svg(title), encoding="utf-8")
    sys.stdout.write(report.to_text())
    return EXIT_OK if top is not None else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat TOML file of run settings")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    split = argparse.ArgumentParser(add_help=False)
    split.add_argument("--seed", type=int)
    split.add_argument("--val-fraction", dest="val_fraction", type=float)
    split.add_argument("--scaler", choices=[k.value for k in ScalerKind])

    parser = argparse.ArgumentParser(prog="genreforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="compute the feature CSV of a dataset")
    p.add_argument("--data", required=True, help="dataset root laid out as <root>/<genre>/*.wav")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", parents=[common, split], help="fit one model on a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="classify one WAV file")
    p.add_argument("--model", required=True, help="model file written by 'train'")
    p.add_argument("audio")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", parents=[common, split], help="fit and rank all four models")
    p.add_argument("--features", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--models", help=f"comma-separated subset of {','.join(MODEL_KINDS)}")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config: %s", exc)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
