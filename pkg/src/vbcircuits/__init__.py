"""Valence-bond cluster circuits for variational ground-state search.

Modules: ``pauli`` (Pauli sums), ``simulator`` (statevector), ``ansatz``
(cluster templates), ``models`` (Ising), ``fermion`` (FCIDUMP and qubit
mappings), ``solver`` (exact eigensolver), ``vqe`` (variational loop) and
``experiments``/``cli`` (sweeps and ledgers).
"""

from .ansatz import AnsatzSpec, ClusterTemplate, PairingLayer, build, builtin_template
from .models import IsingSpec, build_ising, ising_observable
from .pauli import Observable, PauliString, ResourceError, StructureError, expectation
from .simulator import Circuit, Gate, StateVector, run
from .solver import full_spectrum, ground_energy
from .vqe import VqeProblem, VqeResult, solve

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec", "Circuit", "ClusterTemplate", "Gate", "IsingSpec", "Observable",
    "PairingLayer", "PauliString", "ResourceError", "StateVector", "StructureError",
    "VqeProblem", "VqeResult", "build", "build_ising", "builtin_template", "expectation",
    "full_spectrum", "ground_energy", "ising_observable", "run", "solve",
]
