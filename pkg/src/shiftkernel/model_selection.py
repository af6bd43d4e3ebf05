"""k-fold cross-validation and seeded hyperparameter search.

The tuning protocol mirrors the classical/quantum regressor setup: classical
kernels search (gamma, lambda) log-uniformly at random; the quantum kernel
fixes (c, R) per grid point and searches only lambda. All sampling is drawn
from a single seeded generator so identical (data, space, seed) produce
identical trial logs. Default ranges: gamma in [1e-7, 1e2], lambda in
[1e-12, 1e-1], both log-uniform.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import krr
from .data import LabeledDataset
from .errors import ConfigError, SearchError, SizeError
from .kernels import KernelConfig

DEFAULT_GAMMA_RANGE = (1e-7, 1e2)
DEFAULT_LAMBDA_RANGE = (1e-12, 1e-1)


@dataclass
class SearchSpace:
    """Log-uniform search intervals plus the trial budget and seed."""

    gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE
    lambda_range: tuple[float, float] = DEFAULT_LAMBDA_RANGE
    trials: int = 100
    seed: int = 0
    c_grid: tuple[float, ...] = (1.5,)
    R_grid: tuple[int, ...] = (40,)

    def __post_init__(self):
        for name, (lo, hi) in (("gamma", self.gamma_range), ("lambda", self.lambda_range)):
            if not (0 < lo <= hi):
                raise ConfigError(f"{name}_range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")


@dataclass
class TrialResult:
    """One evaluated hyperparameter point."""

    trial: int
    hyperparameters: dict
    cv_mae: float
    fold_maes: list[float]
    wall_time: float


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Partition 0..n-1 into k seeded folds with sizes differing by at most 1."""
    if not 2 <= k <= n:
        raise SizeError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    folds, start = [], 0
    for size in sizes:
        folds.append(np.sort(perm[start : start + size]))
        start += size
    return folds


def cv_score(
    data: LabeledDataset,
    cfg: KernelConfig,
    lam: float,
    k: int = 10,
    seed: int = 0,
    threads: int = 1,
) -> tuple[float, list[float]]:
    """Mean k-fold MAE: fit on each fold's complement, score on the fold.

    Returns (mean of fold MAEs, per-fold MAEs).
    """
    folds = kfold_indices(len(data), k, seed)
    all_idx = np.arange(len(data))
    fold_maes = []
    for fold in folds:
        mask = np.ones(len(data), dtype=bool)
        mask[fold] = False
        train = data.take(all_idx[mask].tolist())
        test = data.take(fold.tolist())
        model = krr.fit(train, cfg, lam, threads=threads)
        pred = krr.predict_batch(model, test.descriptor_matrix(), threads=threads)
        fold_maes.append(float(np.mean(np.abs(pred - test.sigmas))))
    return float(np.mean(fold_maes)), fold_maes


def _log_uniform(rng, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_search(
    data: LabeledDataset,
    space: SearchSpace,
    k: int = 10,
    cfg_template: KernelConfig | None = None,
    threads: int = 1,
) -> tuple[TrialResult, list[TrialResult]]:
    """Seeded log-uniform random search; returns (best, full trial log).

    Classical kernels sample (gamma, lambda); the quantum kernel keeps its
    (c, R) from the template and samples lambda only. Ties on cv_mae go to
    the earlier trial.
    """
    cfg_template = cfg_template or KernelConfig(kind="gaussian")
    rng = np.random.default_rng(space.seed)
    log, failures = [], []
    for t in range(space.trials):
        lam = _log_uniform(rng, *space.lambda_range)
        if cfg_template.kind == "quantum":
            cfg = cfg_template
            params = {
                "gamma": None,
                "lambda": lam,
                "c": cfg.scale,
                "R": cfg.repetitions,
            }
        else:
            gamma = _log_uniform(rng, *space.gamma_range)
            cfg = KernelConfig(kind=cfg_template.kind, gamma=gamma)
            params = {"gamma": gamma, "lambda": lam, "c": None, "R": None}
        t0 = time.perf_counter()
        try:
            mae, fold_maes = cv_score(data, cfg, lam, k=k, seed=space.seed, threads=threads)
        except Exception as exc:  # noqa: BLE001 - a bad trial must not kill the search
            failures.append(f"trial {t} ({params}): {exc}")
            continue
        log.append(
            TrialResult(
                trial=t,
                hyperparameters=params,
                cv_mae=mae,
                fold_maes=fold_maes,
                wall_time=time.perf_counter() - t0,
            )
        )
    if not log:
        raise SearchError("all trials failed:\n" + "\n".join(failures))
    best = min(log, key=lambda r: (r.cv_mae, r.trial))
    return best, log


def grid_search(
    data: LabeledDataset,
    c_grid,
    R_grid,
    lambda_space: SearchSpace,
    k: int = 10,
    n_qubits: int = 10,
    layout: str = "npqc",
    threads: int = 1,
) -> tuple[TrialResult, list[TrialResult]]:
    """Exhaustive (c, R) grid for the quantum kernel with nested lambda search.

    The outer log holds one entry per grid point (its best nested trial);
    the returned best is the argmin of the outer log.
    """
    c_grid, R_grid = list(c_grid), list(R_grid)
    if not c_grid or not R_grid:
        raise ConfigError("c_grid and R_grid must be nonempty")
    outer = []
    idx = 0
    for c in c_grid:
        for R in R_grid:
            cfg = KernelConfig(
                kind="quantum", qubits=n_qubits, scale=c, repetitions=R, layout=layout
            )
            t0 = time.perf_counter()
            best, _ = random_search(data, lambda_space, k=k, cfg_template=cfg, threads=threads)
            outer.append(
                TrialResult(
                    trial=idx,
                    hyperparameters={
                        "gamma": None,
                        "lambda": best.hyperparameters["lambda"],
                        "c": c,
                        "R": R,
                    },
                    cv_mae=best.cv_mae,
                    fold_maes=best.fold_maes,
                    wall_time=time.perf_counter() - t0,
                )
            )
            idx += 1
    best = min(outer, key=lambda r: (r.cv_mae, r.trial))
    return best, outer


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.17g}"


def write_trial_log(trials: list[TrialResult], path) -> None:
    """Emit the trial log CSV: trial,gamma,lambda,c,R,cv_mae,wall_time_s."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("trial,gamma,lambda,c,R,cv_mae,wall_time_s\n")
        for r in trials:
            p = r.hyperparameters
            fh.write(
                f"{r.trial},{_cell(p['gamma'])},{_cell(p['lambda'])},"
                f"{_cell(p['c'])},{_cell(p['R'])},{_cell(r.cv_mae)},{_cell(r.wall_time)}\n"
            )
