"""Fidelity quantum kernel: descriptor embedding circuits and Gram assembly.

Features are z-scored with a scaler fitted on the training set, multiplied by
the scale factor c, and placed into rotation slots cyclically: global slot s
carries the angle of feature ``s mod D``, so every feature is reused about
``slots / D`` times and any D up to the slot capacity is supported.

Two layouts are provided:

* ``product-ry`` - one RY per qubit per repetition block (n*R slots), no
  entanglement. Its kernel has a closed form (a product of cos^2 factors),
  which makes it an analytic oracle independent of the simulator.
* ``npqc`` - an initial RY(pi/2) layer, then R blocks of data rotations
  (RY then RZ on every qubit, 2n*R slots) each followed by a CZ entangler on
  neighbouring pairs whose offset alternates per block. Its fidelity kernel
  behaves like a Gaussian kernel at small scaled distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DataValueError, DimensionError, SizeError
from .kernels import GramMatrix
from .statevector import Circuit, Gate, fidelity, init_zero, run

LAYOUTS = ("product-ry", "npqc")


@dataclass
class FeatureScaler:
    """Per-dimension (mean, std); std of constant dimensions is forced to 1."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.std = np.asarray(self.std, dtype=float)
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise DimensionError("scaler mean/std must be 1-D and equally long")
        if np.any(self.std <= 0):
            raise DataValueError("scaler std components must be > 0")

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.mean.shape[0]:
            raise DimensionError(
                f"scaler fitted for dimension {self.mean.shape[0]}, got {X.shape[1]}"
            )
        return (X - self.mean) / self.std


@dataclass
class EmbeddingSpec:
    """Embedding circuit shape plus the fitted feature scaler."""

    n_qubits: int = 10
    scale: float = 1.5
    repetitions: int = 40
    layout: str = "npqc"
    scaler: FeatureScaler | None = None

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise DataValueError(f"unknown layout {self.layout!r}; expected one of {LAYOUTS}")
        if self.n_qubits < 1 or self.repetitions < 1 or not self.scale > 0:
            raise DataValueError(
                f"invalid embedding spec: n={self.n_qubits}, c={self.scale}, R={self.repetitions}"
            )

    @property
    def slots_per_block(self) -> int:
        return self.n_qubits if self.layout == "product-ry" else 2 * self.n_qubits

    @property
    def slot_capacity(self) -> int:
        return self.slots_per_block * self.repetitions

    def check_dimension(self, dim: int):
        if dim > self.slot_capacity:
            needed = -(-dim // self.slots_per_block)  # ceil
            raise CapacityError(
                f"descriptor dimension {dim} exceeds slot capacity {self.slot_capacity} "
                f"(n={self.n_qubits}, R={self.repetitions}, layout={self.layout}); "
                f"need R >= {needed}"
            )


def fit_scaler(X_train) -> FeatureScaler:
    """Per-dimension population mean/std over the training vectors."""
    X = np.atleast_2d(np.asarray(X_train, dtype=float))
    if X.shape[0] == 0:
        raise SizeError("cannot fit a scaler on an empty training set")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population convention (divide by N)
    std = np.where(std > 0, std, 1.0)
    return FeatureScaler(mean=mean, std=std)


def _slot_angles(x, spec: EmbeddingSpec) -> np.ndarray:
    """Scaled angles extended cyclically over every rotation slot."""
    if spec.scaler is None:
        raise DataValueError("embedding spec has no fitted scaler")
    z = spec.scaler.transform(np.asarray(x, dtype=float).reshape(1, -1))[0]
    spec.check_dimension(z.shape[0])
    angles = spec.scale * z
    idx = np.arange(spec.slot_capacity) % angles.shape[0]
    return angles[idx]


def _entangler_pairs(n: int, block: int) -> list[tuple[int, int]]:
    offset = block % 2
    pairs = []
    for q in range(offset, n - 1 + offset, 2):
        a, b = q % n, (q + 1) % n
        if a != b:
            pairs.append((a, b))
    return pairs


def embed(x, spec: EmbeddingSpec) -> Circuit:
    """Deterministic embedding circuit for one descriptor vector."""
    slots = _slot_angles(x, spec)
    n = spec.n_qubits
    circ = Circuit(n_qubits=n)
    s = 0
    if spec.layout == "npqc":
        for q in range(n):
            circ.add(Gate("ry", (q,), np.pi / 2))
    for block in range(spec.repetitions):
        for q in range(n):
            circ.add(Gate("ry", (q,), slots[s]))
            s += 1
        if spec.layout == "npqc":
            for q in range(n):
                circ.add(Gate("rz", (q,), slots[s]))
                s += 1
            for a, b in _entangler_pairs(n, block):
                circ.add(Gate("cz", (a, b)))
    return circ


def qkernel_pair(x, y, spec: EmbeddingSpec) -> float:
    """Fidelity |<psi(x)|psi(y)>|^2 between the embedded states."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionError(f"vector lengths differ: {x.shape} vs {y.shape}")
    return fidelity(run(embed(x, spec)), run(embed(y, spec)))


def embed_states(X, spec: EmbeddingSpec) -> np.ndarray:
    """Statevectors of all samples at once, shape (N, 2^n).

    Equivalent to ``run(embed(x, spec))`` row by row, but applies each circuit
    layer to the whole batch so Gram assembly stays fast.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise SizeError("need at least one sample")
    spec.check_dimension(X.shape[1])
    if spec.scaler is None:
        raise DataValueError("embedding spec has no fitted scaler")
    angles = spec.scale * spec.scaler.transform(X)  # (N, D)
    slot_idx = np.arange(spec.slot_capacity) % X.shape[1]

    n = spec.n_qubits
    N = X.shape[0]
    amps = np.zeros((N, 2**n), dtype=complex)
    amps[:, 0] = 1.0

    def ry(q: int, theta: np.ndarray):
        view = amps.reshape(N, -1, 2, 2**q)
        h = theta.reshape(-1, 1, 1) / 2.0
        c, sn = np.cos(h), np.sin(h)
        a0 = view[:, :, 0, :].copy()
        a1 = view[:, :, 1, :]
        view[:, :, 0, :] = c * a0 - sn * a1
        view[:, :, 1, :] = sn * a0 + c * a1

    def rz(q: int, theta: np.ndarray):
        view = amps.reshape(N, -1, 2, 2**q)
        h = theta.reshape(-1, 1, 1) / 2.0
        view[:, :, 0, :] *= np.exp(-1j * h)
        view[:, :, 1, :] *= np.exp(1j * h)

    def cz(q1: int, q2: int):
        lo, hi = sorted((q1, q2))
        view = amps.reshape(N, 2 ** (n - 1 - hi), 2, 2 ** (hi - lo - 1), 2, 2**lo)
        view[:, :, 1, :, 1, :] *= -1.0

    s = 0
    if spec.layout == "npqc":
        half = np.full(N, np.pi / 2)
        for q in range(n):
            ry(q, half)
    for block in range(spec.repetitions):
        for q in range(n):
            ry(q, angles[:, slot_idx[s]])
            s += 1
        if spec.layout == "npqc":
            for q in range(n):
                rz(q, angles[:, slot_idx[s]])
                s += 1
            for a, b in _entangler_pairs(n, block):
                cz(a, b)
    return amps


def qgram(X, spec: EmbeddingSpec) -> GramMatrix:
    """Symmetric quantum Gram; each distinct sample's state is computed once."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    # Collapse duplicate descriptor rows before embedding, then gather: equal
    # inputs share one Gram entry exactly, and the unit diagonal propagates to
    # every pair of duplicates.
    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    states = embed_states(uniq, spec)
    overlap = states.conj() @ states.T
    # |<i|j>|^2 is bitwise symmetric: the paired dot products are exact
    # conjugates, so no triangle mirroring is needed.
    K = np.abs(overlap) ** 2
    np.fill_diagonal(K, 1.0)
    inverse = inverse.ravel()
    return GramMatrix(values=K[np.ix_(inverse, inverse)])


def qcross_gram(X_test, X_train, spec: EmbeddingSpec) -> GramMatrix:
    """Rectangular quantum Gram: entry (t, i) = qkernel_pair(X_test[t], X_train[i])."""
    A = embed_states(X_test, spec)
    B = embed_states(X_train, spec)
    return GramMatrix(values=np.abs(A.conj() @ B.T) ** 2)
