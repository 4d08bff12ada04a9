"""Transverse-field Ising Hamiltonians and closed-form 2-site results.

``H = -sum_<ij> J_ij Z_i Z_j - h sum_i X_i``. Sweeps use one parameter
``a`` in [0, 1] with ``h = a`` and ``J = a - 1`` (antiferromagnetic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .pauli import Observable, PauliString, StructureError, normalize

TOPOLOGIES = ("chain", "ring")


@dataclass(frozen=True)
class IsingSpec:
    n_sites: int
    J: float
    h: float
    topology: str = "ring"

    def __post_init__(self):
        if self.n_sites < 2:
            raise StructureError(f"Ising model needs >= 2 sites, got {self.n_sites}")
        if self.topology not in TOPOLOGIES:
            raise StructureError(f"topology must be one of {TOPOLOGIES}")

    def bonds(self) -> list[tuple[int, int]]:
        n = self.n_sites
        bonds = [(i, i + 1) for i in range(n - 1)]
        # A 2-site ring would double the single bond.
        if self.topology == "ring" and n >= 3:
            bonds.append((0, n - 1))
        return bonds


def sweep_couplings(a: float) -> tuple[float, float]:
    """Map the sweep parameter to ``(J, h) = (a - 1, a)``."""
    if not 0.0 <= a <= 1.0:
        raise StructureError(f"sweep parameter a must lie in [0, 1], got {a}")
    return a - 1.0, a


def ising_from_bonds(n_sites: int, bonds: Iterable[tuple[int, int, float]],
                     h: float) -> Observable:
    """General form with an explicit ``(i, j, J_ij)`` bond list."""
    terms = []
    for i, j, J in bonds:
        if i == j or not (0 <= i < n_sites and 0 <= j < n_sites):
            raise StructureError(f"invalid bond ({i}, {j})")
        terms.append((-J, PauliString.from_sparse(n_sites, {i: "Z", j: "Z"})))
    for i in range(n_sites):
        terms.append((-h, PauliString.from_sparse(n_sites, {i: "X"})))
    return normalize(Observable(n_sites, tuple(terms)))


def build_ising(spec: IsingSpec) -> Observable:
    return ising_from_bonds(spec.n_sites, [(i, j, spec.J) for i, j in spec.bonds()], spec.h)


def ising_observable(n_sites: int, a: float, topology: str = "ring") -> Observable:
    J, h = sweep_couplings(a)
    return build_ising(IsingSpec(n_sites, J, h, topology))


def transformed_2site(J: float, h: float) -> Observable:
    """``CNOT^-1 H CNOT`` for the 2-site model: ``-J Z1 - h X1 (1 + X0)``."""
    return normalize(Observable.from_terms([(-J, "IZ"), (-h, "IX"), (-h, "XX")]))


def exact_2site_energy(J: float, h: float) -> float:
    return -math.sqrt(J * J + 4 * h * h)


def exact_2site_angle(J: float, h: float) -> float:
    """Mixing angle of the ground state ``cos t |F> + sin t |A>``.

    ``|F> = (|00>+|11>)/sqrt2`` and ``|A> = (|01>+|10>)/sqrt2``. The cluster
    unit with angles ``(pi/2, 2t)`` prepares exactly this state. At ``h = 0``
    the value is ``pi/2`` for ``J < 0`` and ``0`` for ``J > 0``.
    """
    return math.atan2(math.sqrt(J * J + 4 * h * h) - J, 2 * h)


def meanfield_2site_energy(J: float, h: float) -> float:
    if J != 0 and -h / J < 1:
        return h * h / J + J
    return -2 * h


def meanfield_2site_angles(J: float, h: float) -> tuple[float, float]:
    """Optimal product-state angles; the broken-symmetry branch returns
    ``theta0 = arcsin(-h/J)`` and ``theta1 = pi - theta0``."""
    if J != 0 and -h / J < 1:
        t0 = math.asin(-h / J)
        return t0, math.pi - t0
    return math.pi / 2, math.pi / 2


def meanfield_2site_functional(J: float, h: float, t0: float, t1: float) -> float:
    return -J * math.cos(t0) * math.cos(t1) - h * (math.sin(t0) + math.sin(t1))


def correlation_energy(e_exact: float, e_approx: float) -> float:
    return abs(e_exact - e_approx)
