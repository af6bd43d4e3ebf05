"""Dense statevector simulator for the embedding circuits.

Amplitudes are stored as a contiguous complex128 array indexed by the
computational basis integer, with qubit 0 as the least significant bit.
The gate set is {RY, RZ, CZ}; there is no measurement or noise, kernels are
evaluated from exact state fidelities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DataValueError, DimensionError

MAX_QUBITS = 16


@dataclass(frozen=True)
class Gate:
    """A single gate: kind in {"ry", "rz", "cz"}, target qubit indices, angle."""

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind in ("ry", "rz"):
            if len(self.qubits) != 1:
                raise DimensionError(f"{self.kind} takes one target, got {self.qubits}")
            if not np.isfinite(self.angle):
                raise DataValueError(f"non-finite rotation angle for {self.kind}")
        elif self.kind == "cz":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise DimensionError(f"cz needs two distinct qubits, got {self.qubits}")
        else:
            raise DataValueError(f"unknown gate kind {self.kind!r}")


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"gate target {q} out of range for {self.n_qubits} qubits")

    def add(self, gate: Gate):
        self._check(gate)
        self.gates.append(gate)

    def inverse(self) -> "Circuit":
        """Gate-wise inverse (reversed order, negated rotation angles)."""
        inv = []
        for g in reversed(self.gates):
            if g.kind == "cz":
                inv.append(g)
            else:
                inv.append(Gate(g.kind, g.qubits, -g.angle))
        return Circuit(self.n_qubits, inv)


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise DimensionError(
                f"expected {2**self.n_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


def init_zero(n: int) -> Statevector:
    """The |0...0> state on n qubits (1 <= n <= 16)."""
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside supported range 1..{MAX_QUBITS}")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return Statevector(n_qubits=n, amplitudes=amps)


def _apply_inplace(amps: np.ndarray, n: int, gate: Gate) -> None:
    if gate.kind == "cz":
        q1, q2 = sorted(gate.qubits)
        view = amps.reshape(2 ** (n - 1 - q2), 2, 2 ** (q2 - q1 - 1), 2, 2**q1)
        view[:, 1, :, 1, :] *= -1.0
        return
    (q,) = gate.qubits
    view = amps.reshape(-1, 2, 2**q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    half = gate.angle / 2.0
    if gate.kind == "ry":
        c, s = np.cos(half), np.sin(half)
        view[:, 0, :] = c * a0 - s * a1
        view[:, 1, :] = s * a0 + c * a1
    else:  # rz
        view[:, 0, :] = np.exp(-1j * half) * a0
        view[:, 1, :] = np.exp(1j * half) * a1


def apply(state: Statevector, gate: Gate) -> Statevector:
    """Apply one gate, returning a new Statevector (inputs are not mutated)."""
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"gate target {q} out of range for {state.n_qubits} qubits")
    amps = state.amplitudes.copy()
    _apply_inplace(amps, state.n_qubits, gate)
    return Statevector(n_qubits=state.n_qubits, amplitudes=amps)


def run(circuit: Circuit) -> Statevector:
    """Execute the circuit on |0...0>."""
    state = init_zero(circuit.n_qubits)
    amps = state.amplitudes
    for gate in circuit.gates:
        _apply_inplace(amps, circuit.n_qubits, gate)
    return Statevector(n_qubits=circuit.n_qubits, amplitudes=amps)


def fidelity(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2, symmetric and invariant under global phase."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(np.abs(overlap) ** 2)


def gate_matrix(gate: Gate) -> np.ndarray:
    """The gate's unitary on its own qubits (used by the dense test oracle)."""
    if gate.kind == "ry":
        h = gate.angle / 2.0
        return np.array([[np.cos(h), -np.sin(h)], [np.sin(h), np.cos(h)]], dtype=complex)
    if gate.kind == "rz":
        h = gate.angle / 2.0
        return np.diag([np.exp(-1j * h), np.exp(1j * h)])
    return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
