"""Batch command-line surface: train / predict / tune / learning-curve / eval / inspect.

Option precedence is flags > --config JSON file > built-in defaults. The
config file is a flat JSON object whose keys are the long option names with
underscores (e.g. ``{"kernel": "laplacian", "gamma": 0.01}``). ``--threads``
(or the SHIFTKERNEL_THREADS environment variable) caps internal parallelism.

Exit codes: 0 success, 2 input/format error, 3 dimension/compatibility
error, 4 numerical failure, 5 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import evaluation, krr, model_selection
from .data import (
    Nucleus,
    SplitSpec,
    join,
    load_descriptors,
    load_targets,
    split,
)
from .errors import (
    CapacityError,
    ConditioningError,
    ConfigError,
    DataValueError,
    DimensionError,
    FormatError,
    SearchError,
    SizeError,
    UnresolvedReferenceError,
)
from .kernels import KernelConfig

EXIT_INPUT = 2
EXIT_DIMENSION = 3
EXIT_NUMERICAL = 4
EXIT_CONFIG = 5

_DEFAULTS = {
    "kernel": "laplacian",
    "gamma": 1.0,
    "lam": 1e-8,
    "qubits": 10,
    "scale": 1.5,
    "reps": 40,
    "layout": "npqc",
    "nucleus": "13C",
    "split_mode": "atom-level",
    "test_count": 0,
    "seed": 0,
    "trials": 100,
    "folds": 10,
    "threads": 0,
    "stats_over": "eval",
    "format": "csv",
}


def _threads(value: int) -> int:
    if value and value > 0:
        return value
    env = os.environ.get("SHIFTKERNEL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SHIFTKERNEL_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def _merge(args: argparse.Namespace) -> dict:
    """flags > config file > defaults."""
    merged = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except FileNotFoundError:
            raise FormatError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise FormatError(f"{config_path}: invalid JSON: {exc}") from None
        unknown = set(loaded) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(loaded)
    for key, value in vars(args).items():
        if value is not None and key in merged:
            merged[key] = value
    return merged


def _kernel_config(opts: dict) -> KernelConfig:
    return KernelConfig(
        kind=opts["kernel"],
        gamma=float(opts["gamma"]),
        qubits=int(opts["qubits"]),
        scale=float(opts["scale"]),
        repetitions=int(opts["reps"]),
        layout=opts["layout"],
    )


def _load_dataset(descriptor_path, target_path, nucleus_label):
    for p in (descriptor_path, target_path):
        if not os.path.exists(p):
            raise FormatError(f"input file not found: {p}")
    descriptors = load_descriptors(descriptor_path)
    targets = load_targets(target_path)
    nucleus = Nucleus.from_label(nucleus_label)
    return descriptors, targets, join(descriptors, targets, nucleus)


def cmd_train(args) -> int:
    opts = _merge(args)
    threads = _threads(int(opts["threads"]))
    _, _, data = _load_dataset(args.descriptors, args.targets, opts["nucleus"])
    cfg = _kernel_config(opts)
    test_count = int(opts["test_count"])
    if test_count > 0:
        train, _held = split(
            data, SplitSpec(seed=int(opts["seed"]), test_count=test_count, mode=opts["split_mode"])
        )
    else:
        train = data
    model = krr.fit(train, cfg, float(opts["lam"]), threads=threads, seed=int(opts["seed"]))
    os.makedirs(args.out_dir, exist_ok=True)
    model_path = os.path.join(args.out_dir, "model.skrr")
    krr.save_model(model, model_path)
    pred = krr.predict_batch(model, train.descriptor_matrix(), threads=threads)
    metrics = evaluation.compute_metrics(pred, train.sigmas)
    evaluation.write_metrics(
        [("train", metrics)], os.path.join(args.out_dir, "train_metrics.csv")
    )
    print(f"wrote {model_path} (N={len(train)}, train MAE {metrics.mae:.6g} ppm)")
    return 0


def cmd_predict(args) -> int:
    if not os.path.exists(args.model):
        raise FormatError(f"model file not found: {args.model}")
    if not os.path.exists(args.descriptors):
        raise FormatError(f"descriptor file not found: {args.descriptors}")
    model = krr.load_model(args.model)
    descriptors = load_descriptors(args.descriptors)
    if descriptors.dimension != model.dimension:
        raise DimensionError(
            f"model expects dimension {model.dimension}, descriptor file has "
            f"{descriptors.dimension}"
        )
    threads = _threads(args.threads or 0)
    X = (
        np.stack([s.descriptor for s in descriptors.samples])
        if descriptors.samples
        else np.empty((0, descriptors.dimension))
    )
    sigma_hat = krr.predict_batch(model, X, threads=threads) if len(X) else np.empty(0)
    lines = ["molecule_id,atom_index,sigma_hat_ppm" + (",delta_hat_ppm" if args.shifts else "")]
    for s, sig in zip(descriptors.samples, sigma_hat):
        row = f"{s.molecule_id},{s.atom_index},{sig:.17g}"
        if args.shifts:
            row += f",{evaluation.to_shift(float(sig), model.nucleus):.17g}"
        lines.append(row)
    out = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_tune(args) -> int:
    opts = _merge(args)
    threads = _threads(int(opts["threads"]))
    _, _, data = _load_dataset(args.descriptors, args.targets, opts["nucleus"])
    cfg = _kernel_config(opts)
    space = model_selection.SearchSpace(trials=int(opts["trials"]), seed=int(opts["seed"]))
    best, log = model_selection.random_search(
        data, space, k=int(opts["folds"]), cfg_template=cfg, threads=threads
    )
    model_selection.write_trial_log(log, args.out)
    print(
        f"best trial {best.trial}: cv MAE {best.cv_mae:.6g} ppm, "
        f"hyperparameters {best.hyperparameters}"
    )
    return 0


def cmd_learning_curve(args) -> int:
    opts = _merge(args)
    threads = _threads(int(opts["threads"]))
    _, _, data = _load_dataset(args.descriptors, args.targets, opts["nucleus"])
    sizes = [int(s) for s in args.sizes.split(",") if s]
    if not sizes:
        raise ConfigError("--sizes must list at least one training size")
    holdout_count = args.holdout_count or max(1, len(data) // 5)
    pool, holdout = split(
        data,
        SplitSpec(seed=int(opts["seed"]), test_count=holdout_count, mode=opts["split_mode"]),
    )
    cfg = _kernel_config(opts)
    search = None
    if args.tune:
        search = model_selection.SearchSpace(trials=int(opts["trials"]), seed=int(opts["seed"]))
    rows = evaluation.learning_curve(
        pool,
        sizes,
        holdout,
        cfg,
        search,
        seed=int(opts["seed"]),
        lam=float(opts["lam"]),
        k=int(opts["folds"]),
        threads=threads,
    )
    evaluation.write_learning_curve(rows, args.out, fmt=opts["format"])
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_eval(args) -> int:
    opts = _merge(args)
    threads = _threads(int(opts["threads"]))
    if not os.path.exists(args.model):
        raise FormatError(f"model file not found: {args.model}")
    model = krr.load_model(args.model)
    for p in (args.descriptors, args.targets):
        if not os.path.exists(p):
            raise FormatError(f"input file not found: {p}")
    descriptors = load_descriptors(args.descriptors)
    targets = load_targets(args.targets)
    per_molecule, aggregate = evaluation.evaluate_external(
        model, descriptors, targets, stats_over=opts["stats_over"], threads=threads
    )
    reports = []
    if args.per_molecule:
        reports.extend(per_molecule)
    reports.append(("aggregate", aggregate))
    evaluation.write_metrics(reports, args.out, fmt=opts["format"])
    print(f"aggregate MAE {aggregate.mae:.6g} ppm over {aggregate.n} atoms")
    return 0


def cmd_inspect(args) -> int:
    if not os.path.exists(args.descriptors):
        raise FormatError(f"descriptor file not found: {args.descriptors}")
    dset = load_descriptors(args.descriptors)
    molecules = len({s.molecule_id for s in dset.samples})
    print(f"source_model: {dset.source_model}")
    print(f"format_version: {dset.format_version}")
    print(f"dimension: {dset.dimension}")
    print(f"samples: {len(dset)}")
    print(f"molecules: {molecules}")
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--threads", type=int, help="parallelism cap (0 = machine default)")
    p.add_argument("--seed", type=int, help="RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftkernel",
        description="Kernel ridge regression for atom-level NMR shielding prediction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and write model + training metrics")
    p.add_argument("--descriptors", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--nucleus")
    p.add_argument("--kernel", choices=["laplacian", "gaussian", "quantum"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--qubits", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--reps", dest="reps", type=int)
    p.add_argument("--layout", choices=["product-ry", "npqc"])
    p.add_argument("--test-count", dest="test_count", type=int)
    p.add_argument("--split-mode", dest="split_mode", choices=["atom-level", "molecule-level"])
    p.add_argument("--out-dir", dest="out_dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict shielding constants (and shifts)")
    p.add_argument("--model", required=True)
    p.add_argument("--descriptors", required=True)
    p.add_argument("--out")
    p.add_argument("--shifts", action="store_true")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("tune", help="random hyperparameter search with k-fold CV")
    p.add_argument("--descriptors", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--nucleus")
    p.add_argument("--kernel", choices=["laplacian", "gaussian", "quantum"])
    p.add_argument("--qubits", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--reps", dest="reps", type=int)
    p.add_argument("--layout", choices=["product-ry", "npqc"])
    p.add_argument("--trials", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("learning-curve", help="test MAE vs training size")
    p.add_argument("--descriptors", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--nucleus")
    p.add_argument("--sizes", required=True, help="comma-separated training sizes")
    p.add_argument("--holdout-count", dest="holdout_count", type=int)
    p.add_argument("--kernel", choices=["laplacian", "gaussian", "quantum"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--qubits", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--reps", dest="reps", type=int)
    p.add_argument("--layout", choices=["product-ry", "npqc"])
    p.add_argument("--tune", action="store_true", help="tune hyperparameters per size")
    p.add_argument("--trials", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--split-mode", dest="split_mode", choices=["atom-level", "molecule-level"])
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_learning_curve)

    p = sub.add_parser("eval", help="evaluate a model on an external test set")
    p.add_argument("--model", required=True)
    p.add_argument("--descriptors", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--per-molecule", dest="per_molecule", action="store_true")
    p.add_argument("--stats-over", dest="stats_over", choices=["eval", "train"])
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="print descriptor manifest info")
    p.add_argument("--descriptors", required=True)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, UnresolvedReferenceError, DataValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ConditioningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, SizeError, CapacityError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
