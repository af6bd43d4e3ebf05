"""Error metrics, shift conversion, learning curves and report files.

Conventions fixed here so reported numbers are reproducible: STD uses the
population formula (divide by N) and IQR uses linear interpolation between
order statistics (the "type 7" quantile rule). Both are computed over the
reference values of the evaluated set by default; ``stats_over="train"``
switches them to a supplied training target array. Report files render
floats with 17 significant digits and are written atomically
(temp-then-rename).
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import krr
from .data import DescriptorSet, LabeledDataset, Nucleus, TargetTable, join, sample_subset
from .errors import DataValueError, SizeError
from .kernels import KernelConfig
from .krr import KrrModel
from .model_selection import SearchSpace, random_search


@dataclass
class MetricsReport:
    """Error statistics of one evaluation plus dispersion of its references."""

    mae: float
    rmse: float
    maxae: float
    std: float
    iqr: float
    mae_over_std: float  # percent; NaN when std == 0
    n: int


@dataclass(frozen=True)
class ShiftRecord:
    """One atom's predicted shielding and the derived chemical shift."""

    molecule_id: str
    atom_index: int
    nucleus: str
    sigma_hat: float
    delta_hat: float


def compute_metrics(predicted, reference, stats_reference=None) -> MetricsReport:
    """All six metric fields for one prediction run.

    ``stats_reference`` overrides the array used for STD/IQR (e.g. training
    targets instead of the evaluated references).
    """
    pred = np.asarray(predicted, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if pred.shape != ref.shape or pred.ndim != 1:
        raise SizeError(f"prediction/reference shapes differ: {pred.shape} vs {ref.shape}")
    if pred.size == 0:
        raise SizeError("cannot compute metrics on empty arrays")
    err = np.abs(pred - ref)
    stats = ref if stats_reference is None else np.asarray(stats_reference, dtype=float)
    std = float(stats.std())  # population convention
    iqr = float(np.percentile(stats, 75) - np.percentile(stats, 25))
    mae = float(err.mean())
    return MetricsReport(
        mae=mae,
        rmse=float(np.sqrt(np.mean(err**2))),
        maxae=float(err.max()),
        std=std,
        iqr=iqr,
        mae_over_std=100.0 * mae / std if std > 0 else float("nan"),
        n=int(pred.size),
    )


def to_shift(sigma_hat: float, nucleus: Nucleus) -> float:
    """Chemical shift delta = sigma_ref - sigma_hat (ppm)."""
    if not np.isfinite(sigma_hat):
        raise DataValueError(f"non-finite shielding value {sigma_hat}")
    return nucleus.sigma_ref - sigma_hat


@dataclass
class LearningCurveRow:
    train_size: int
    test_mae: float
    hyperparameters: dict
    wall_time: float


def learning_curve(
    data: LabeledDataset,
    sizes,
    holdout: LabeledDataset,
    cfg: KernelConfig,
    search: SearchSpace | None,
    seed: int,
    lam: float = 1e-8,
    k: int = 10,
    threads: int = 1,
) -> list[LearningCurveRow]:
    """Test MAE as a function of training size, one row per requested size.

    Row i subsamples with seed ``seed ^ i`` so duplicate sizes stay
    independent yet reproducible. With ``search`` set, each subset is tuned by
    random search before the final fit; otherwise (cfg, lam) are used as-is.
    """
    sizes = [int(s) for s in sizes]
    for s in sizes:
        if s > len(data):
            raise SizeError(f"learning-curve size {s} exceeds pool of {len(data)}")
    X_hold = holdout.descriptor_matrix()
    rows = []
    for i, size in enumerate(sizes):
        t0 = time.perf_counter()
        subset = sample_subset(data, size, seed ^ i)
        row_cfg, row_lam = cfg, lam
        if search is not None:
            best, _ = random_search(subset, search, k=k, cfg_template=cfg, threads=threads)
            p = best.hyperparameters
            row_lam = p["lambda"]
            if cfg.kind != "quantum":
                row_cfg = KernelConfig(kind=cfg.kind, gamma=p["gamma"])
        model = krr.fit(subset, row_cfg, row_lam, threads=threads, seed=seed ^ i)
        pred = krr.predict_batch(model, X_hold, threads=threads)
        mae = float(np.mean(np.abs(pred - holdout.sigmas)))
        rows.append(
            LearningCurveRow(
                train_size=size,
                test_mae=mae,
                hyperparameters={
                    "gamma": None if row_cfg.kind == "quantum" else row_cfg.gamma,
                    "lambda": row_lam,
                    "c": row_cfg.scale if row_cfg.kind == "quantum" else None,
                    "R": row_cfg.repetitions if row_cfg.kind == "quantum" else None,
                },
                wall_time=time.perf_counter() - t0,
            )
        )
    return rows


def evaluate_external(
    model: KrrModel,
    descriptors: DescriptorSet,
    targets: TargetTable,
    stats_over: str = "eval",
    train_targets=None,
    threads: int = 1,
) -> tuple[list[tuple[str, MetricsReport]], MetricsReport]:
    """Per-molecule metrics (sorted by molecule_id) plus the pooled aggregate."""
    data = join(descriptors, targets, model.nucleus, strict=True)
    if len(data) == 0:
        raise SizeError(f"no {model.nucleus.label} targets match the descriptor set")
    pred = krr.predict_batch(model, data.descriptor_matrix(), threads=threads)
    stats_ref = train_targets if stats_over == "train" else None
    by_mol: dict[str, list[int]] = {}
    for i, s in enumerate(data.samples):
        by_mol.setdefault(s.molecule_id, []).append(i)
    per_molecule = [
        (mol, compute_metrics(pred[idx], data.sigmas[idx], stats_reference=stats_ref))
        for mol, idx in sorted(by_mol.items())
    ]
    aggregate = compute_metrics(pred, data.sigmas, stats_reference=stats_ref)
    return per_molecule, aggregate


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.17g}"


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


LEARNING_CURVE_COLUMNS = "train_size,test_mae_ppm,gamma,lambda,c,R,wall_time_s"
METRICS_COLUMNS = "scope,n,mae,rmse,maxae,std,iqr,mae_over_std_pct"


def write_learning_curve(rows: list[LearningCurveRow], path, fmt: str = "csv") -> None:
    records = [
        {
            "train_size": r.train_size,
            "test_mae_ppm": r.test_mae,
            "gamma": r.hyperparameters["gamma"],
            "lambda": r.hyperparameters["lambda"],
            "c": r.hyperparameters["c"],
            "R": r.hyperparameters["R"],
            "wall_time_s": r.wall_time,
        }
        for r in rows
    ]
    _write_records(records, LEARNING_CURVE_COLUMNS.split(","), path, fmt)


def write_metrics(named_reports: list[tuple[str, MetricsReport]], path, fmt: str = "csv") -> None:
    records = [
        {
            "scope": name,
            "n": m.n,
            "mae": m.mae,
            "rmse": m.rmse,
            "maxae": m.maxae,
            "std": m.std,
            "iqr": m.iqr,
            "mae_over_std_pct": m.mae_over_std,
        }
        for name, m in named_reports
    ]
    _write_records(records, METRICS_COLUMNS.split(","), path, fmt)


def _write_records(records: list[dict], columns: list[str], path, fmt: str) -> None:
    if fmt == "csv":
        lines = [",".join(columns)]
        for rec in records:
            lines.append(",".join(_fmt(rec[c]) if not isinstance(rec[c], str) else rec[c] for c in columns))
        _atomic_write(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        _atomic_write(path, json.dumps(records, indent=2, sort_keys=True) + "\n")
    else:
        raise DataValueError(f"unknown report format {fmt!r}")
