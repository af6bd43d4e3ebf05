"""Classical exponential kernels and Gram matrix assembly.

Both kernels have the form ``exp(-gamma * ||x - y||_p^p)`` with p=1
(laplacian) or p=2 (gaussian). Training Grams are assembled from the upper
triangle only and mirrored, so symmetry and the unit diagonal are exact.
Distance sums accumulate in float64 throughout.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError, DataValueError, DimensionError, FormatError, SizeError

GRAM_MAGIC = b"GRAMV1\x00\x00"

_P_BY_KIND = {"laplacian": 1, "gaussian": 2}


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family plus hyperparameters.

    ``gamma`` applies to the classical kernels; the quantum fields are
    consumed by the quantum-kernel module (``kind="quantum"`` delegates
    there, see :mod:`shiftkernel.qkernel`).
    """

    kind: str
    gamma: float = 1.0
    qubits: int = 10
    scale: float = 1.5
    repetitions: int = 40
    layout: str = "npqc"

    def __post_init__(self):
        if self.kind not in ("laplacian", "gaussian", "quantum"):
            raise ConfigError(f"unknown kernel kind {self.kind!r}")
        if self.kind in _P_BY_KIND and not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if self.kind == "quantum":
            if self.qubits < 1:
                raise ConfigError(f"qubits must be >= 1, got {self.qubits}")
            if not self.scale > 0:
                raise ConfigError(f"scale must be > 0, got {self.scale}")
            if self.repetitions < 1:
                raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")


@dataclass
class GramMatrix:
    """Dense kernel matrix with its row/column sample counts."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DimensionError(f"Gram matrix must be 2-D, got shape {self.values.shape}")

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_cols(self):
        return self.values.shape[1]


def _check_vectors(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionError(f"vector lengths differ: {x.shape[0]} vs {y.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataValueError("non-finite descriptor component")
    return x, y


def eval_pair(x, y, cfg: KernelConfig) -> float:
    """Classical kernel value exp(-gamma * ||x-y||_p^p); 1.0 iff x == y."""
    if cfg.kind not in _P_BY_KIND:
        raise ConfigError(f"eval_pair handles classical kernels only, got {cfg.kind!r}")
    x, y = _check_vectors(x, y)
    d = np.abs(x - y)
    dist = float(np.sum(d)) if cfg.kind == "laplacian" else float(np.sum(d * d))
    return float(np.exp(-cfg.gamma * dist))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise SizeError(f"need a nonempty 2-D sample array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataValueError("non-finite descriptor component")
    return X


def _pairwise(A: np.ndarray, B: np.ndarray, cfg: KernelConfig, threads: int) -> np.ndarray:
    metric = "cityblock" if cfg.kind == "laplacian" else "sqeuclidean"
    if threads <= 1 or A.shape[0] < 2 * threads:
        D = cdist(A, B, metric=metric)
    else:
        # Block-parallel over disjoint row ranges; cdist releases the GIL.
        bounds = np.linspace(0, A.shape[0], threads + 1).astype(int)
        D = np.empty((A.shape[0], B.shape[0]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(lambda lo=lo, hi=hi: D.__setitem__(slice(lo, hi), cdist(A[lo:hi], B, metric=metric)))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futures:
                f.result()
    return np.exp(-cfg.gamma * D)


def gram(X, cfg: KernelConfig, threads: int = 1) -> GramMatrix:
    """Symmetric training Gram with exact unit diagonal."""
    if cfg.kind == "quantum":
        raise ConfigError("quantum Grams are built by shiftkernel.qkernel.qgram")
    X = _as_matrix(X)
    K = _pairwise(X, X, cfg, threads)
    upper = np.triu(K, k=1)
    K = upper + upper.T
    np.fill_diagonal(K, 1.0)
    return GramMatrix(values=K)


def cross_gram(X_test, X_train, cfg: KernelConfig, threads: int = 1) -> GramMatrix:
    """Rectangular Gram: entry (t, i) = k(X_test[t], X_train[i])."""
    if cfg.kind == "quantum":
        raise ConfigError("quantum Grams are built by shiftkernel.qkernel.qcross_gram")
    A = _as_matrix(X_test)
    B = _as_matrix(X_train)
    if A.shape[1] != B.shape[1]:
        raise DimensionError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    return GramMatrix(values=_pairwise(A, B, cfg, threads))


def save_gram(gm: GramMatrix, path) -> None:
    """Write the binary Gram cache: magic, two little-endian int64 dims, row-major float64."""
    with open(path, "wb") as fh:
        fh.write(GRAM_MAGIC)
        fh.write(struct.pack("<qq", gm.n_rows, gm.n_cols))
        fh.write(np.ascontiguousarray(gm.values, dtype="<f8").tobytes())


def load_gram(path) -> GramMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != GRAM_MAGIC:
            raise FormatError(f"{path}: bad Gram cache magic {magic!r}")
        rows, cols = struct.unpack("<qq", fh.read(16))
        payload = fh.read()
    expected = rows * cols * 8
    if len(payload) != expected:
        raise FormatError(f"{path}: truncated Gram cache ({len(payload)} of {expected} bytes)")
    values = np.frombuffer(payload, dtype="<f8").reshape(rows, cols).copy()
    return GramMatrix(values=values)
