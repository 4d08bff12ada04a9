"""Variational loop: energy objective, gradients, local and multi-start optimization."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ansatz import AnsatzSpec, build
from .optimizer import OptimizeResult, bfgs
from .pauli import Observable, StructureError, expectation
from .simulator import Circuit, StateVector, run, run_batch, sample

STRATEGIES = ("default", "adiabatic")
GRADIENT_MODES = ("parameter_shift", "finite_difference")
FD_STEP = 1e-5


@dataclass
class VqeProblem:
    hamiltonian: Observable
    spec: AnsatzSpec
    max_iterations: int = 200
    restarts: int = 10
    seed: int = 0
    strategy: str = "default"
    gradient_mode: str = "parameter_shift"
    warm_start: np.ndarray | None = None
    shots: int | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise StructureError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise StructureError("restarts must be >= 1")
        if self.hamiltonian.n_qubits != self.spec.n_qubits:
            raise StructureError(
                f"Hamiltonian acts on {self.hamiltonian.n_qubits} qubits, "
                f"ansatz on {self.spec.n_qubits}")
        if self.strategy not in STRATEGIES:
            raise StructureError(f"strategy must be one of {STRATEGIES}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise StructureError(f"gradient_mode must be one of {GRADIENT_MODES}")

    @property
    def n_parameters(self) -> int:
        return self.spec.n_parameters


@dataclass
class VqeResult:
    energy: float
    parameters: np.ndarray
    iterations_used: int
    restart_index: int
    converged: bool
    delta_Ec: float | None = None
    evaluations: int = 0
    restart_energies: list[float] = field(default_factory=list)


@functools.lru_cache(maxsize=64)
def _circuit(spec: AnsatzSpec) -> Circuit:
    return build(spec)


def _check_length(problem: VqeProblem, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != problem.n_parameters:
        raise StructureError(
            f"ansatz takes {problem.n_parameters} parameters, got {params.shape[-1]}")
    return params


def _energies(problem: VqeProblem, batch: np.ndarray) -> np.ndarray:
    states = run_batch(_circuit(problem.spec), batch)
    if problem.shots is None:
        return np.atleast_1d(expectation(states, problem.hamiltonian))
    out = [sampled_expectation(StateVector(problem.spec.n_qubits, psi), problem.hamiltonian,
                               problem.shots, seed=problem.seed + k)
           for k, psi in enumerate(states)]
    return np.array(out)


def objective(problem: VqeProblem, parameters) -> float:
    params = _check_length(problem, parameters)
    return float(_energies(problem, params.reshape(1, -1))[0])


def _shift_batch(params: np.ndarray, step: float) -> np.ndarray:
    p = params.size
    shifts = np.vstack([np.eye(p), -np.eye(p)]) * step
    return params[np.newaxis, :] + shifts


def energy_and_gradient(problem: VqeProblem, parameters) -> tuple[float, np.ndarray]:
    """Energy and gradient from one batched simulation of all shifted circuits."""
    params = _check_length(problem, parameters)
    p = params.size
    if problem.gradient_mode == "parameter_shift":
        step, scale = math.pi / 2, 0.5
    else:
        step, scale = FD_STEP, 0.5 / FD_STEP
    batch = np.vstack([params[np.newaxis, :], _shift_batch(params, step)])
    e = _energies(problem, batch)
    return float(e[0]), scale * (e[1:p + 1] - e[p + 1:])


def gradient(problem: VqeProblem, parameters) -> np.ndarray:
    """Per-slot ``(E(t + pi/2) - E(t - pi/2)) / 2`` (or central differences)."""
    circuit = _circuit(problem.spec)
    if any(g.param is not None and g.kind != "RY" for g in circuit.gates):
        raise StructureError("parameter shift needs every parametrized gate to be RY")
    return energy_and_gradient(problem, parameters)[1]


def minimize(problem: VqeProblem, initial) -> VqeResult:
    x0 = _check_length(problem, initial).reshape(-1)
    opt: OptimizeResult = bfgs(lambda x: energy_and_gradient(problem, x), x0,
                               max_iterations=problem.max_iterations)
    return VqeResult(opt.fun, opt.x, opt.iterations, 0, opt.converged,
                     evaluations=opt.evaluations)


def restart_start(problem: VqeProblem, restart: int) -> np.ndarray:
    """Uniform start in [0, 2pi) per angle from the stream ``(seed, restart)``."""
    rng = np.random.default_rng([problem.seed, restart])
    return rng.uniform(0.0, 2.0 * math.pi, problem.n_parameters)


def solve(problem: VqeProblem) -> VqeResult:
    """Best of ``restarts`` random starts, or one warm-started run (adiabatic)."""
    if problem.strategy == "adiabatic" and problem.warm_start is not None:
        result = minimize(problem, problem.warm_start)
        result.restart_energies = [result.energy]
        return result
    best: VqeResult | None = None
    energies = []
    evaluations = 0
    for r in range(problem.restarts):
        result = minimize(problem, restart_start(problem, r))
        result.restart_index = r
        energies.append(result.energy)
        evaluations += result.evaluations
        if best is None or result.energy < best.energy:
            best = result
    best.restart_energies = energies
    best.evaluations = evaluations
    return best


def with_warm_start(problem: VqeProblem, parameters) -> VqeProblem:
    return replace(problem, warm_start=np.asarray(parameters, dtype=float).copy())


# --- shot sampling (demonstration only) ------------------------------------------

def _rotate_to_z_basis(psi: np.ndarray, n: int, letters: str) -> np.ndarray:
    t = psi.reshape((2,) * n).copy()
    hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    y_to_z = hadamard @ np.diag([1, -1j])  # H S^dagger
    for q, p in enumerate(letters):
        if p in "XY":
            u = hadamard if p == "X" else y_to_z
            t = np.moveaxis(np.tensordot(u, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def sampled_expectation(state: StateVector, obs: Observable, shots: int, seed: int) -> float:
    """Estimate ``<H>`` by sampling each Pauli word in its own eigenbasis."""
    n = state.n_qubits
    total = 0.0
    for k, (c, p) in enumerate(obs.terms):
        if p.is_identity():
            total += c
            continue
        rotated = StateVector(n, _rotate_to_z_basis(state.amplitudes, n, p.letters))
        counts = sample(rotated, shots, seed=seed * 100003 + k)
        support = [q for q, ch in enumerate(p.letters) if ch != "I"]
        acc = 0
        for bits, m in counts.items():
            parity = sum(bits[q] == "1" for q in support) & 1
            acc += -m if parity else m
        total += c * acc / shots
    return total


def final_state(problem: VqeProblem, parameters) -> StateVector:
    return run(_circuit(problem.spec), _check_length(problem, parameters))
