"""Command-line entry point: preprocess, train, resume, generate,
train-classifier, evaluate, make-toy-dataset."""

import argparse
import json
import sys
from pathlib import Path

from powergan.cli.config import RunConfig, load_run_config, write_effective_config
from powergan.errors import PowerGANError


def _add_common(parser):
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--seed", type=int, help="root random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powergan",
        description="Train and evaluate a conditional progressive 1-D WGAN for appliance power traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="house CSVs -> balanced normalized window dataset")
    p.add_argument("--csv", action="append", required=True, help="house CSV (repeatable)")
    p.add_argument("--column-map", required=True, help="JSON {csv column: appliance label}")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--window-length", type=int, help="samples per window")
    _add_common(p)

    p = sub.add_parser("train", help="run the progressive training procedure")
    p.add_argument("--windows-dir", required=True, help="preprocessed dataset directory")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--resume", help="checkpoint directory to continue from")
    _add_common(p)

    p = sub.add_parser("resume", help="continue training from a checkpoint")
    p.add_argument("--ckpt", required=True, help="checkpoint directory")
    p.add_argument("--windows-dir", required=True)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("generate", help="sample labeled traces from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--format", choices=("csv", "pgw1"), default="csv")
    p.add_argument("--out", required=True, help="CSV file or PGW1 directory")
    _add_common(p)

    p = sub.add_parser("train-classifier", help="fit the evaluation classifier on a real corpus")
    p.add_argument("--real-dir", required=True)
    p.add_argument("--extra-dir", action="append", default=[], help="extra corpus (repeatable)")
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("evaluate", help="score a generated corpus against a real one")
    p.add_argument("--real-dir", required=True)
    p.add_argument("--fake-dir", required=True)
    p.add_argument("--classifier", required=True, help="trained classifier directory")
    p.add_argument("--out", required=True, help="report JSON path")
    _add_common(p)

    p = sub.add_parser("make-toy-dataset", help="emit the synthetic two-class fixture corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--events-per-class", type=int, default=64)
    _add_common(p)

    return parser


def _config_for(args) -> RunConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides[("run", "seed")] = args.seed
    if getattr(args, "window_length", None) is not None:
        overrides[("data", "window_length")] = args.window_length
    return load_run_config(getattr(args, "config", None), overrides)


def _echo(config: RunConfig, out_dir=None):
    text = config.to_ini()
    print(text, end="")
    if out_dir is not None:
        write_effective_config(config, out_dir)


def _cmd_preprocess(args) -> int:
    from powergan.data_pipeline.pipeline import preprocess

    config = _config_for(args)
    _echo(config, args.out_dir)
    summary = preprocess(
        [Path(c) for c in args.csv],
        args.column_map,
        args.out_dir,
        seed=config.seed,
        window_length=config["data"]["window_length"],
        filter_params=config.filter_params(),
        max_fill_s=config["data"]["max_fill_s"],
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _load_training_data(windows_dir):
    from powergan.data_pipeline.pgw import read_dataset
    from powergan.trainer import TrainingData

    stacks, manifest = read_dataset(windows_dir)
    return TrainingData.from_stacks(stacks), manifest


def _cmd_train(args) -> int:
    from powergan.trainer import resume as resume_training
    from powergan.trainer import train

    data, manifest = _load_training_data(args.windows_dir)
    if args.resume:
        ckpt_path, _ = resume_training(args.resume, data, args.out_dir)
    else:
        config = _config_for(args)
        net = dict(config["net"])
        net["n_classes"] = len(data.label_names)
        from powergan.nets import NetConfig

        _echo(config, args.out_dir)
        ckpt_path, _ = train(
            data,
            config.schedule(),
            NetConfig(**net),
            config.loss_config(),
            args.out_dir,
            normalization=manifest,
        )
    print(f"final checkpoint: {ckpt_path}")
    return 0


def _cmd_resume(args) -> int:
    from powergan.trainer import resume as resume_training

    data, _ = _load_training_data(args.windows_dir)
    ckpt_path, _ = resume_training(args.ckpt, data, args.out_dir)
    print(f"final checkpoint: {ckpt_path}")
    return 0


def _cmd_generate(args) -> int:
    from powergan.synthesis import GenerationRequest, export_csv, export_pgw, generate_with_stats
    from powergan.trainer import load_checkpoint

    config = _config_for(args)
    ckpt = load_checkpoint(args.ckpt)
    request = GenerationRequest(label=args.label, count=args.count, seed=config.seed)
    windows, stats = generate_with_stats(ckpt, request)
    if args.format == "csv":
        export_csv(windows, args.out)
    else:
        export_pgw(windows, args.out, ckpt.normalization)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


def _cmd_train_classifier(args) -> int:
    from powergan.evaluation import save_classifier, train_classifier
    from powergan.evaluation.report import denormalized_stacks

    config = _config_for(args)
    _echo(config, args.out_dir)
    stacks = denormalized_stacks(args.real_dir)
    extra = [denormalized_stacks(d) for d in args.extra_dir]
    from powergan.evaluation import ClassifierConfig

    cls_cfg = ClassifierConfig(
        n_classes=len(stacks),
        base_channels=config["classifier"]["base_channels"],
        embedding_dim=config["classifier"]["embedding_dim"],
    )
    model, summary = train_classifier(
        stacks,
        seed=config.seed,
        extra_stacks=extra,
        config=cls_cfg,
        epochs=config["classifier"]["epochs"],
        batch_size=config["classifier"]["batch_size"],
        lr=config["classifier"]["lr"],
    )
    save_classifier(model, summary["label_names"], args.out_dir)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_evaluate(args) -> int:
    from powergan.evaluation import evaluate_corpora

    config = _config_for(args)
    report = evaluate_corpora(args.real_dir, args.fake_dir, args.classifier, seed=config.seed, out_path=args.out)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_make_toy(args) -> int:
    from powergan.cli.toy import make_toy_dataset

    config = _config_for(args)
    _echo(config, args.out_dir)
    summary = make_toy_dataset(args.out_dir, seed=config.seed, events_per_class=args.events_per_class)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


_HANDLERS = {
    "preprocess": _cmd_preprocess,
    "train": _cmd_train,
    "resume": _cmd_resume,
    "generate": _cmd_generate,
    "train-classifier": _cmd_train_classifier,
    "evaluate": _cmd_evaluate,
    "make-toy-dataset": _cmd_make_toy,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except PowerGANError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())
