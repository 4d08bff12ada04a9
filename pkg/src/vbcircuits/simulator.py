"""Dense statevector simulation over the gate set {RY, X, CNOT, CZ}.

Amplitudes are indexed with qubit 0 as the most significant bit, so the
array reshaped to ``(2,) * n`` has qubit ``q`` on axis ``q``. Gates are
applied in place by slicing that view; no unitary is ever built.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .pauli import StructureError

GATE_KINDS = ("RY", "X", "CNOT", "CZ")
NORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Gate:
    """One gate. ``param`` links an RY angle to a variational parameter slot."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    param: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in GATE_KINDS:
            raise StructureError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in ("CNOT", "CZ") else 1
        if len(self.qubits) != arity:
            raise StructureError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != arity:
            raise StructureError(f"{self.kind} qubits must be distinct, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise StructureError(f"negative qubit index in {self.qubits}")
        if self.kind == "RY":
            if self.angle is None and self.param is None:
                raise StructureError("RY needs an angle or a parameter slot")
        elif self.angle is not None or self.param is not None:
            raise StructureError(f"{self.kind} takes no angle")

    def label(self) -> str:
        qs = ",".join(map(str, self.qubits))
        if self.kind != "RY":
            return f"{self.kind}({qs})"
        if self.param is not None:
            return f"RY({qs})[param #{self.param}]"
        return f"RY({qs})[{self.angle:.6g}]"


def ry(qubit: int, angle: float | None = None, param: int | None = None) -> Gate:
    return Gate("RY", (qubit,), angle=angle, param=param)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def cz(a: int, b: int) -> Gate:
    return Gate("CZ", (a, b))


def x(qubit: int) -> Gate:
    return Gate("X", (qubit,))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_parameters: int = field(default=-1)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise StructureError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise StructureError(f"{g.label()} out of range for {self.n_qubits} qubits")
        slots = {g.param for g in self.gates if g.param is not None}
        n_params = self.n_parameters if self.n_parameters >= 0 else len(slots)
        if slots != set(range(n_params)):
            raise StructureError(
                f"parameter slots {sorted(slots)} do not cover 0..{n_params - 1} exactly")
        object.__setattr__(self, "n_parameters", n_params)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise StructureError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> StateVector:
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Basis state from a bitstring, qubit 0 first: ``basis("10")`` is |10>."""
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


# --- kernels ---------------------------------------------------------------
# ``psi`` has shape (batch, 2, 2, ..., 2); qubit q lives on axis q + 1.

def _axis_index(n: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * (n + 1)
    for q, v in fixed.items():
        idx[q + 1] = v
    return tuple(idx)


def _apply_ry(psi: np.ndarray, n: int, q: int, angles: np.ndarray) -> None:
    shape = (-1,) + (1,) * (n - 1)
    c = np.cos(angles / 2).reshape(shape)
    s = np.sin(angles / 2).reshape(shape)
    i0, i1 = _axis_index(n, {q: 0}), _axis_index(n, {q: 1})
    a0 = psi[i0].copy()
    a1 = psi[i1]
    psi[i0] = c * a0 - s * a1
    psi[i1] = s * a0 + c * a1


def _apply_x(psi: np.ndarray, n: int, q: int) -> None:
    i0, i1 = _axis_index(n, {q: 0}), _axis_index(n, {q: 1})
    psi[i0], psi[i1] = psi[i1].copy(), psi[i0].copy()


def _apply_cnot(psi: np.ndarray, n: int, control: int, target: int) -> None:
    i0 = _axis_index(n, {control: 1, target: 0})
    i1 = _axis_index(n, {control: 1, target: 1})
    psi[i0], psi[i1] = psi[i1].copy(), psi[i0].copy()


def _apply_cz(psi: np.ndarray, n: int, a: int, b: int) -> None:
    psi[_axis_index(n, {a: 1, b: 1})] *= -1


def _apply(psi: np.ndarray, n: int, gate: Gate, angles: np.ndarray | None) -> None:
    if gate.kind == "RY":
        _apply_ry(psi, n, gate.qubits[0], angles)
    elif gate.kind == "CNOT":
        _apply_cnot(psi, n, *gate.qubits)
    elif gate.kind == "CZ":
        _apply_cz(psi, n, *gate.qubits)
    else:
        _apply_x(psi, n, gate.qubits[0])


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return a new state with ``gate`` applied (fixed-angle RY only)."""
    n = state.n_qubits
    if max(gate.qubits) >= n:
        raise StructureError(f"{gate.label()} out of range for {n} qubits")
    if gate.kind == "RY" and gate.angle is None:
        raise StructureError("parametrized RY needs run(); no angle bound")
    psi = state.amplitudes.copy().reshape((1,) + (2,) * n)
    angles = None if gate.angle is None else np.array([gate.angle])
    _apply(psi, n, gate, angles)
    return StateVector(n, psi.reshape(-1))


def run_batch(circuit: Circuit, parameters: np.ndarray) -> np.ndarray:
    """Simulate ``circuit`` from |0...0> for every row of ``parameters``.

    Returns an array of shape ``(batch, 2^n)``.
    """
    params = np.atleast_2d(np.asarray(parameters, dtype=float))
    if params.shape[1] != circuit.n_parameters:
        raise StructureError(
            f"circuit takes {circuit.n_parameters} parameters, got {params.shape[1]}")
    n, batch = circuit.n_qubits, params.shape[0]
    psi = np.zeros((batch, 1 << n), dtype=complex)
    psi[:, 0] = 1.0
    psi = psi.reshape((batch,) + (2,) * n)
    for gate in circuit.gates:
        angles = None
        if gate.kind == "RY":
            if gate.param is not None:
                angles = params[:, gate.param]
            else:
                angles = np.full(batch, gate.angle)
        _apply(psi, n, gate, angles)
    return psi.reshape(batch, -1)


def run(circuit: Circuit, parameters: Sequence[float] = ()) -> StateVector:
    params = np.asarray(parameters, dtype=float).reshape(-1)
    if params.size != circuit.n_parameters:
        raise StructureError(
            f"circuit takes {circuit.n_parameters} parameters, got {params.size}")
    amps = run_batch(circuit, params.reshape(1, -1))[0]
    return StateVector(circuit.n_qubits, amps)


def layers(circuit: Circuit) -> list[list[Gate]]:
    """Greedy as-soon-as-possible layering respecting gate order per qubit."""
    busy = [0] * circuit.n_qubits
    out: list[list[Gate]] = []
    for g in circuit.gates:
        layer = max(busy[q] for q in g.qubits)
        if layer == len(out):
            out.append([])
        out[layer].append(g)
        for q in g.qubits:
            busy[q] = layer + 1
    return out


def depth(circuit: Circuit) -> int:
    return len(layers(circuit))


def dump(circuit: Circuit) -> str:
    """Text listing, one ``layer k: ...`` line per greedy layer (1-based)."""
    return "\n".join(
        f"layer {k}: " + " ".join(g.label() for g in layer)
        for k, layer in enumerate(layers(circuit), 1)
    )


def sample(state: StateVector, n_shots: int, seed: int) -> dict[str, int]:
    """Multinomial measurement histogram keyed by bitstring (qubit 0 first)."""
    if n_shots < 1:
        raise StructureError("n_shots must be >= 1")
    probs = state.probabilities()
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(n_shots, probs)
    n = state.n_qubits
    return {format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c}


def unitary(circuit: Circuit, parameters: Sequence[float] = ()) -> np.ndarray:
    """Dense unitary, column ``j`` = circuit applied to basis state ``j``.

    Intended for tests and small circuits only.
    """
    n = circuit.n_qubits
    params = np.asarray(parameters, dtype=float).reshape(-1)
    dim = 1 << n
    psi = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n)
    for gate in circuit.gates:
        angles = None
        if gate.kind == "RY":
            angle = params[gate.param] if gate.param is not None else gate.angle
            angles = np.full(dim, angle)
        _apply(psi, n, gate, angles)
    return psi.reshape(dim, dim).T


def is_normalized(state: StateVector, tol: float = NORM_TOLERANCE) -> bool:
    return math.isclose(state.norm(), 1.0, abs_tol=tol)
