"""Command line driver: split, select, train, eval, predict, bench.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
Outputs go to ``--out`` under fixed file names; every run also writes
``run_<command>.json`` echoing the resolved options.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from .dataset import DatasetError, DatasetTable, class_manifest, load_csv, stratified_split
from .features import SelectionPolicy, rank_and_select
from .metrics import (REFERENCE_HYPERPARAMETERS, confusion, cross_entropy_loss, measure_apt,
                      metrics_from_confusion, render_report)
from .model_io import ModelFormatError, load_model, save_model
from .preprocess import apply_plan, fit_plan
from .tree import TrainConfig, TrainedModel, count_nodes, induce_tree, predict_many, prune_reduced_error, tree_depth

log = logging.getLogger("entgrove")

SEED_ENV = "ENTGROVE_SEED"
MAX_SEED = (1 << 64) - 1


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _fraction(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("must be strictly between 0 and 1")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _policy(text: str) -> SelectionPolicy:
    try:
        return SelectionPolicy.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _delimiter(text: str) -> str:
    text = {"\\t": "\t", "tab": "\t"}.get(text, text)
    if len(text) != 1:
        raise argparse.ArgumentTypeError("delimiter must be a single character")
    return text


def _criterion(text: str) -> str:
    return text.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entgrove", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p, label_required=True):
        p.add_argument("--data", required=True, help="input CSV with a header row")
        p.add_argument("--label", required=label_required, help="name of the class column")
        p.add_argument("--delimiter", type=_delimiter, default=",")

    def split_args(p):
        p.add_argument("--seed", type=_seed, default=0, help=f"overridden by ${SEED_ENV}")
        p.add_argument("--train-fraction", type=_fraction, default=0.75)

    def select_args(p):
        p.add_argument("--select", type=_policy, default=SelectionPolicy("min_gain", 0.0),
                       metavar="{top-k=N,min-gain=T}")
        p.add_argument("--rank-by", type=_criterion, choices=["gain", "gain_ratio"], default="gain")

    p = sub.add_parser("split", parents=[common], help="stratified train/validation split and class manifest")
    data_args(p)
    split_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", parents=[common], help="fit preprocessing and rank features by entropy")
    data_args(p)
    split_args(p)
    select_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", parents=[common], help="run the full pipeline and save model.json")
    data_args(p)
    split_args(p)
    select_args(p)
    p.add_argument("--criterion", type=_criterion, choices=["gain", "gain_ratio"], default="gain_ratio")
    p.add_argument("--max-depth", type=_positive, default=None)
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-gain", type=float, default=0.0)
    p.add_argument("--prune", action="store_true",
                   help="reduced-error pruning on a stratified slice of the training portion")
    p.add_argument("--prune-fraction", type=_fraction, default=0.75,
                   help="share of the training portion used for growing when --prune is set")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a saved model on a labelled CSV")
    p.add_argument("--model", required=True)
    data_args(p, label_required=False)
    p.add_argument("--subset", choices=["all", "train", "validation"], default="all",
                   help="rows to evaluate; train/validation replay the model's recorded split")
    p.add_argument("--repetitions", type=_positive, default=1)
    p.add_argument("--reference", action="store_true", help="append published comparison rows")
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", parents=[common], help="classify rows of a CSV")
    p.add_argument("--model", required=True)
    data_args(p, label_required=False)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", parents=[common], help="average prediction time per sample")
    p.add_argument("--model", required=True)
    data_args(p, label_required=False)
    p.add_argument("--repetitions", type=_positive, default=10)
    p.add_argument("--out", required=True)
    return parser


def _resolved(args) -> dict:
    out = {}
    for k, v in vars(args).items():
        out[k] = str(v) if isinstance(v, SelectionPolicy) else v
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / f"run_{args.command}.json", _resolved(args))
    return out


def _load_split(args):
    table = load_csv(args.data, args.label, args.delimiter)
    if table.dropped_row_count:
        log.warning("dropped %d malformed rows from %s", table.dropped_row_count, args.data)
    split = stratified_split(table, args.train_fraction, args.seed)
    return table, split


def cmd_split(args) -> int:
    table, split = _load_split(args)
    out = _outdir(args)
    _write_json(out / "split.json", split.to_dict())
    _write_json(out / "manifest.json", class_manifest(table).to_dict())
    print(f"train {len(split.train_indices)} rows, validation {len(split.validation_indices)} rows")
    return 0


def _fit_and_select(args, table: DatasetTable, split):
    train_raw = table.subset(split.train_indices)
    plan = fit_plan(train_raw)
    train = apply_plan(plan, train_raw)
    with warnings.catch_warnings():
        # reported once through the logger below
        warnings.simplefilter("ignore", UserWarning)
        selection = rank_and_select(train, args.select, args.rank_by)
    for note in selection.warnings:
        log.warning(note)
    return plan, train, selection


def cmd_select(args) -> int:
    table, split = _load_split(args)
    plan, _, selection = _fit_and_select(args, table, split)
    out = _outdir(args)
    _write_json(out / "plan.json", plan.to_dict())
    _write_json(out / "selection.json", selection.to_dict())
    for s in selection.scores:
        mark = "*" if s.feature in selection.selected else " "
        print(f"{mark} {s.feature:<24} gain={s.information_gain:.6f} ratio={s.gain_ratio:.6f}")
    return 0


def cmd_train(args) -> int:
    table, split = _load_split(args)
    plan, train, selection = _fit_and_select(args, table, split)
    if not selection.selected:
        raise DatasetError(f"selection policy {args.select} kept no features")
    config = TrainConfig(args.criterion, args.max_depth, args.min_samples_split, args.min_gain,
                         args.prune, args.seed)
    provenance = {
        "data": str(args.data),
        "label": args.label,
        "delimiter": args.delimiter,
        "seed": args.seed,
        "train_fraction": args.train_fraction,
        "selection_policy": str(args.select),
        "rank_by": args.rank_by,
    }
    grow_table, prune_table = train, None
    if args.prune:
        inner = stratified_split(train, args.prune_fraction, args.seed)
        grow_table, prune_table = train.subset(inner.train_indices), train.subset(inner.validation_indices)
        provenance["prune_fraction"] = args.prune_fraction
    model = induce_tree(grow_table, config, plan, selection.selected, provenance)
    if prune_table is not None:
        before = count_nodes(model.root)
        model = prune_reduced_error(model, prune_table)
        log.info("pruning: %d -> %d nodes", before, count_nodes(model.root))

    out = _outdir(args)
    artifact = save_model(model, out / "model.json")
    _write_json(out / "plan.json", plan.to_dict())
    _write_json(out / "selection.json", selection.to_dict())
    _write_json(out / "manifest.json", class_manifest(table).to_dict())
    print(f"model {out / 'model.json'}: {count_nodes(model.root)} nodes, depth {tree_depth(model.root)}, "
          f"{len(model.selected_features)} features, digest {artifact.content_digest}")
    return 0


def _model_kinds(model: TrainedModel) -> dict:
    if model.plan is not None:
        return model.plan.kinds
    return dict(zip(model.selected_features, model.feature_kinds))


def _header(path, delimiter: str) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [h.strip() for h in next(csv.reader(fh, delimiter=delimiter), [])]


def _load_for_model(args, model: TrainedModel, labelled: bool):
    label = args.label or model.provenance.get("label")
    if not labelled and label not in _header(args.data, args.delimiter):
        label = None
    if labelled and label is None:
        raise DatasetError("no label column given and none recorded in the model")
    table = load_csv(args.data, label, args.delimiter, kinds=_model_kinds(model))
    if table.dropped_row_count:
        log.warning("dropped %d malformed rows from %s", table.dropped_row_count, args.data)
    return table


def _evaluate(model: TrainedModel, table: DatasetTable, repetitions: int):
    features = model.transform(table)
    X = model.matrix(features)
    truth = features.labels()
    unknown = sorted(set(truth) - set(model.class_order))
    order = tuple(model.class_order) + tuple(unknown)
    predicted, probas = predict_many(model, X)
    if unknown:
        probas = np.hstack([probas, np.zeros((len(truth), len(unknown)))])
    cm = confusion(truth, predicted, order)
    loss = cross_entropy_loss(probas, truth, order)
    apt = measure_apt(model, X, repetitions)
    meta = {
        "criterion": model.config.criterion,
        "config": model.config.to_dict(),
        "selected_features": list(model.selected_features),
        "nodes": count_nodes(model.root),
        "depth": tree_depth(model.root),
        "reference_hyperparameters": REFERENCE_HYPERPARAMETERS,
    }
    return metrics_from_confusion(cm, loss, apt, meta)


def cmd_eval(args) -> int:
    model = load_model(args.model)
    table = _load_for_model(args, model, labelled=True)
    if args.subset != "all":
        prov = model.provenance
        split = stratified_split(table, prov["train_fraction"], prov["seed"])
        idx = split.train_indices if args.subset == "train" else split.validation_indices
        table = table.subset(idx)
    report = _evaluate(model, table, args.repetitions)
    report.model_meta["subset"] = args.subset
    text, js = render_report(report, reference=args.reference)
    out = _outdir(args)
    (out / "report.json").write_text(js + "\n", encoding="utf-8")
    (out / "report.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    print(f"accuracy {report.accuracy:.6f}  loss {report.loss:.6f}  rows {report.n_rows}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    table = _load_for_model(args, model, labelled=False)
    X = model.matrix(model.transform(table))
    predicted, probas = predict_many(model, X)
    out = _outdir(args)
    path = out / "predictions.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "predicted"] + [f"p_{c}" for c in model.class_order])
        for i, (label, p) in enumerate(zip(predicted, probas)):
            w.writerow([i, label] + [repr(float(v)) for v in p])
    print(f"{len(predicted)} predictions written to {path}")
    return 0


def cmd_bench(args) -> int:
    model = load_model(args.model)
    table = _load_for_model(args, model, labelled=False)
    X = model.matrix(model.transform(table))
    apt = measure_apt(model, X, args.repetitions)
    out = _outdir(args)
    report_path = out / "report.json"
    if report_path.is_file():
        doc = json.loads(report_path.read_text(encoding="utf-8"))
        doc["apt_ms"] = apt
        report_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    elif table.label_column is not None:
        report = _evaluate(model, table, 1)
        report_path.write_text(replace(report, apt_ms=apt).to_json() + "\n", encoding="utf-8")
    else:
        _write_json(out / "bench.json", {"apt_ms": apt, "rows": int(X.shape[0]),
                                         "repetitions": args.repetitions})
    print(f"APT {apt:.6f} ms/sample over {X.shape[0]} rows x {args.repetitions} repetitions")
    return 0


COMMANDS = {
    "split": cmd_split,
    "select": cmd_select,
    "train": cmd_train,
    "eval": cmd_eval,
    "predict": cmd_predict,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = _seed(env_seed)
        except argparse.ArgumentTypeError as e:
            parser.print_usage(sys.stderr)
            print(f"entgrove: error: ${SEED_ENV}: {e}", file=sys.stderr)
            return 2
    try:
        return COMMANDS[args.command](args)
    except (DatasetError, ModelFormatError, ValueError, OSError, KeyError) as e:
        print(f"entgrove {args.command}: error: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
