"""Kernel ridge regression on classical and quantum kernels.

Fitting solves (K + lambda*I) alpha = sigma with a Cholesky factorization;
if that fails, diagonal jitter is added starting at 1e-10 and escalated x10
up to 1e-6 before giving up. Prediction is sum_i alpha_i k(G_i, x) against
the stored training descriptors. A fitted model is immutable and safe for
concurrent prediction.

Model files are a versioned little-endian binary container: a magic + format
version, a length-prefixed JSON header (kernel config, nucleus, lambda,
metadata), then length-prefixed float64 sections for alpha, the training
descriptors and, for quantum kernels, the feature scaler.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import kernels
from .data import LabeledDataset, Nucleus
from .errors import (
    ConditioningError,
    ConfigError,
    DimensionError,
    FormatError,
    SizeError,
    VersionError,
)
from .kernels import KernelConfig
from .qkernel import EmbeddingSpec, FeatureScaler, fit_scaler, qcross_gram, qgram

MODEL_MAGIC = b"SKRR"
MODEL_VERSION = 1
INTERPOLATION_LAMBDA = 1e-12
RESIDUAL_TOL = 1e-6
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass
class KrrModel:
    """Fitted regressor: kernel config, ridge weight, coefficients, training data."""

    kernel_config: KernelConfig
    lam: float
    alpha: np.ndarray
    training_descriptors: np.ndarray
    nucleus: Nucleus
    embedding_spec: EmbeddingSpec | None = None
    fit_metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.training_descriptors = np.asarray(self.training_descriptors, dtype=float)
        if self.alpha.shape[0] != self.training_descriptors.shape[0]:
            raise SizeError(
                f"alpha length {self.alpha.shape[0]} != training size "
                f"{self.training_descriptors.shape[0]}"
            )
        if self.alpha.shape[0] == 0:
            raise SizeError("model must have at least one training sample")

    @property
    def dimension(self) -> int:
        return self.training_descriptors.shape[1]


def build_embedding_spec(cfg: KernelConfig, scaler: FeatureScaler) -> EmbeddingSpec:
    return EmbeddingSpec(
        n_qubits=cfg.qubits,
        scale=cfg.scale,
        repetitions=cfg.repetitions,
        layout=cfg.layout,
        scaler=scaler,
    )


def training_gram(X: np.ndarray, cfg: KernelConfig, threads: int = 1):
    """(Gram matrix, embedding spec or None) for either kernel family."""
    if cfg.kind == "quantum":
        spec = build_embedding_spec(cfg, fit_scaler(X))
        return qgram(X, spec), spec
    return kernels.gram(X, cfg, threads=threads), None


def _solve_spd(K: np.ndarray, lam: float, sigma: np.ndarray) -> tuple[np.ndarray, float]:
    n = K.shape[0]
    A_true = K + lam * np.eye(n)
    tol = RESIDUAL_TOL * max(1.0, np.max(np.abs(sigma)))
    # Residuals for iterative refinement are computed in extended precision:
    # the float64 residual floor alone can exceed the fit tolerance at tiny
    # lambda, and near-singular systems oscillate around their floor, so the
    # best iterate seen over a fixed budget is kept.
    A_ext = A_true.astype(np.longdouble)
    sigma_ext = sigma.astype(np.longdouble)
    floor = n * np.finfo(float).eps * max(1.0, np.max(np.abs(sigma)))
    for jitter in _JITTERS:
        A = A_true if jitter == 0.0 else K + (lam + jitter) * np.eye(n)
        try:
            factor = cho_factor(A, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        # Refinement against the un-jittered matrix recovers accuracy lost
        # to rounding (tiny lambda) or to the jitter itself.
        alpha = cho_solve(factor, sigma, check_finite=False)
        best_alpha, best_resid = alpha, np.inf
        for _ in range(20):
            resid = (sigma_ext - A_ext @ alpha.astype(np.longdouble)).astype(float)
            resid_norm = np.max(np.abs(resid))
            if resid_norm < best_resid:
                best_alpha, best_resid = alpha, resid_norm
            if resid_norm <= floor:
                break
            alpha = alpha + cho_solve(factor, resid, check_finite=False)
        if best_resid <= tol:
            return best_alpha, jitter
    raise ConditioningError("Cholesky solve of K + lambda*I failed", _JITTERS[-1])


def fit(
    data: LabeledDataset,
    cfg: KernelConfig,
    lam: float,
    interpolate: bool = False,
    threads: int = 1,
    seed: int | None = None,
) -> KrrModel:
    """Fit KRR coefficients alpha = (K + lambda*I)^-1 sigma.

    ``lam == 0`` is only accepted with ``interpolate=True``, which substitutes
    a tiny ridge (1e-12) so the solve stays positive definite.
    """
    if len(data) < 1:
        raise SizeError("cannot fit on an empty dataset")
    if lam <= 0:
        if not (interpolate and lam == 0):
            raise ConfigError(f"lambda must be > 0 (got {lam}); use interpolate=True for lambda=0")
        lam = INTERPOLATION_LAMBDA
    X = data.descriptor_matrix()
    gm, spec = training_gram(X, cfg, threads=threads)
    alpha, jitter = _solve_spd(gm.values, lam, data.sigmas)
    return KrrModel(
        kernel_config=cfg,
        lam=lam,
        alpha=alpha,
        training_descriptors=X,
        nucleus=data.nucleus,
        embedding_spec=spec,
        fit_metadata={
            "train_size": len(data),
            "seed": seed,
            "timestamp": time.time(),
            "jitter": jitter,
        },
    )


def _cross(model: KrrModel, X: np.ndarray, threads: int = 1) -> np.ndarray:
    if model.kernel_config.kind == "quantum":
        return qcross_gram(X, model.training_descriptors, model.embedding_spec).values
    return kernels.cross_gram(
        X, model.training_descriptors, model.kernel_config, threads=threads
    ).values


def predict(model: KrrModel, x) -> float:
    """Predicted shielding constant for one descriptor vector (ppm)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dimension,):
        raise DimensionError(
            f"model expects dimension {model.dimension}, got {x.shape}"
        )
    return float(_cross(model, x.reshape(1, -1))[0] @ model.alpha)


def predict_batch(model: KrrModel, X, threads: int = 1) -> np.ndarray:
    """Vectorized prediction; equals element-wise predict to within rounding."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.empty(0)
    X = np.atleast_2d(X)
    if X.shape[1] != model.dimension:
        raise DimensionError(
            f"model expects dimension {model.dimension}, got {X.shape[1]}"
        )
    return _cross(model, X, threads=threads) @ model.alpha


def _pack_array(arr: np.ndarray) -> bytes:
    payload = np.ascontiguousarray(arr, dtype="<f8").tobytes()
    return struct.pack("<Q", len(payload)) + payload


def save_model(model: KrrModel, path) -> None:
    cfg = model.kernel_config
    header = {
        "kernel": {
            "kind": cfg.kind,
            "gamma": cfg.gamma,
            "qubits": cfg.qubits,
            "scale": cfg.scale,
            "repetitions": cfg.repetitions,
            "layout": cfg.layout,
        },
        "lambda": model.lam,
        "nucleus": model.nucleus.label,
        "n_train": int(model.alpha.shape[0]),
        "dimension": int(model.dimension),
        "has_scaler": model.embedding_spec is not None,
        "fit_metadata": model.fit_metadata,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", MODEL_VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(_pack_array(model.alpha))
        fh.write(_pack_array(model.training_descriptors))
        if model.embedding_spec is not None:
            fh.write(_pack_array(model.embedding_spec.scaler.mean))
            fh.write(_pack_array(model.embedding_spec.scaler.std))


def _read_exact(fh, n: int, path) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"{path}: truncated model file")
    return data


def _read_array(fh, path) -> np.ndarray:
    (length,) = struct.unpack("<Q", _read_exact(fh, 8, path))
    return np.frombuffer(_read_exact(fh, length, path), dtype="<f8").copy()


def load_model(path) -> KrrModel:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, path) != MODEL_MAGIC:
            raise FormatError(f"{path}: not a shiftkernel model file (bad magic)")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, path))
        if version > MODEL_VERSION:
            raise VersionError(
                f"{path}: model format version {version} is newer than supported {MODEL_VERSION}"
            )
        (hlen,) = struct.unpack("<Q", _read_exact(fh, 8, path))
        try:
            header = json.loads(_read_exact(fh, hlen, path).decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: corrupt model header: {exc}") from None
        kc = header["kernel"]
        cfg = KernelConfig(
            kind=kc["kind"],
            gamma=kc["gamma"],
            qubits=kc["qubits"],
            scale=kc["scale"],
            repetitions=kc["repetitions"],
            layout=kc["layout"],
        )
        alpha = _read_array(fh, path)
        X = _read_array(fh, path).reshape(header["n_train"], header["dimension"])
        spec = None
        if header["has_scaler"]:
            mean = _read_array(fh, path)
            std = _read_array(fh, path)
            spec = build_embedding_spec(cfg, FeatureScaler(mean=mean, std=std))
    return KrrModel(
        kernel_config=cfg,
        lam=header["lambda"],
        alpha=alpha,
        training_descriptors=X,
        nucleus=Nucleus.from_label(header["nucleus"]),
        embedding_spec=spec,
        fit_metadata=header.get("fit_metadata", {}),
    )
