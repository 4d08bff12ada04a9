"""Cluster-circuit ansatz built from valence-bond pairing layers.

A pairing layer is a set of disjoint qubit pairs. Each pair becomes a
cluster unit, a CNOT (control = first index) preceded by the RY layer of
its block. A template is an ordered list of pairing layers (the resonance
structures); ``reps`` blocks cycle through the layers from the first one,
and a final RY layer closes the circuit. ``reps = 0`` is the mean-field
circuit: a single RY layer with no entanglers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .pauli import StructureError
from .simulator import Circuit, Gate, cnot, ry

Pair = tuple[int, int]


@dataclass(frozen=True)
class PairingLayer:
    pairs: tuple[Pair, ...]

    def __post_init__(self):
        pairs = tuple((int(c), int(t)) for c, t in self.pairs)
        if not pairs:
            raise StructureError("a pairing layer needs at least one pair")
        seen: set[int] = set()
        for c, t in pairs:
            if c == t:
                raise StructureError(f"pair ({c},{t}) pairs a qubit with itself")
            if c < 0 or t < 0:
                raise StructureError(f"negative qubit index in pair ({c},{t})")
            if c in seen or t in seen:
                raise StructureError(f"qubit reused within layer {pairs}")
            seen.update((c, t))
        object.__setattr__(self, "pairs", pairs)

    @property
    def qubits(self) -> frozenset[int]:
        return frozenset(q for pair in self.pairs for q in pair)

    def __str__(self) -> str:
        return " ".join(f"{c}-{t}" for c, t in self.pairs)


@dataclass(frozen=True)
class ClusterTemplate:
    n_qubits: int
    layers: tuple[PairingLayer, ...]
    name: str = "custom"

    def __post_init__(self):
        layers = tuple(l if isinstance(l, PairingLayer) else PairingLayer(tuple(l))
                       for l in self.layers)
        if not layers:
            raise StructureError("a template needs at least one pairing layer")
        covered: set[int] = set()
        for layer in layers:
            if max(layer.qubits) >= self.n_qubits:
                raise StructureError(
                    f"layer '{layer}' exceeds {self.n_qubits} qubits")
            covered |= layer.qubits
        missing = set(range(self.n_qubits)) - covered
        if missing:
            raise StructureError(f"qubits {sorted(missing)} are never entangled")
        object.__setattr__(self, "layers", layers)


@dataclass(frozen=True)
class AnsatzSpec:
    template: ClusterTemplate
    reps: int

    def __post_init__(self):
        if self.reps < 0:
            raise StructureError(f"reps must be >= 0, got {self.reps}")

    @property
    def n_qubits(self) -> int:
        return self.template.n_qubits

    @property
    def n_parameters(self) -> int:
        return self.template.n_qubits * (self.reps + 1)

    @property
    def depth(self) -> int:
        return 2 * self.reps + 1


_BUILTIN: dict[str, tuple[int, tuple[tuple[Pair, ...], ...]]] = {
    "unit2": (2, (((0, 1),),)),
    "4q": (4, (((0, 1), (2, 3)), ((1, 2), (0, 3)))),
    # Kekule: the two nearest-neighbour perfect matchings of the 6-ring.
    "A": (6, (((0, 1), (2, 3), (4, 5)), ((1, 2), (3, 4), (5, 0)))),
    # Dewar: two short bonds plus one para bond, in all three rotations.
    "B": (6, (((0, 5), (1, 4), (2, 3)), ((0, 3), (1, 2), (4, 5)),
              ((0, 1), (2, 5), (3, 4)))),
    # Reduced Dewar: the first two Dewar structures.
    "C": (6, (((0, 5), (1, 4), (2, 3)), ((0, 3), (1, 2), (4, 5)))),
}

TEMPLATE_QUBITS = {name: n for name, (n, _) in _BUILTIN.items()}


def builtin_template(name: str, n_qubits: int | None = None) -> ClusterTemplate:
    """Return one of ``unit2``, ``4q``, ``A`` (Kekule), ``B`` (Dewar), ``C`` (reduced Dewar)."""
    if name not in _BUILTIN:
        raise StructureError(f"unknown template {name!r}; choose from {sorted(_BUILTIN)}")
    n, layers = _BUILTIN[name]
    if n_qubits is not None and n_qubits != n:
        raise StructureError(f"template {name!r} is defined on {n} qubits, not {n_qubits}")
    return ClusterTemplate(n, tuple(PairingLayer(l) for l in layers), name)


def custom_template(layers: Iterable[Iterable[Pair]], n_qubits: int | None = None,
                    name: str = "custom") -> ClusterTemplate:
    layers = [PairingLayer(tuple(l)) for l in layers]
    if n_qubits is None:
        n_qubits = 1 + max(max(l.qubits) for l in layers)
    return ClusterTemplate(n_qubits, tuple(layers), name)


def parse_template(text: str, n_qubits: int | None = None, name: str = "custom",
                   source: str = "<string>") -> ClusterTemplate:
    """Parse one layer per line with pairs written ``c-t`` (e.g. ``0-5 1-4 2-3``)."""
    layers = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pairs = []
        for tok in line.split():
            try:
                c, t = tok.split("-")
                pairs.append((int(c), int(t)))
            except ValueError:
                raise StructureError(f"{source}:{lineno}: bad pair {tok!r}") from None
        layers.append(pairs)
    if not layers:
        raise StructureError(f"{source}: template has no layers")
    return custom_template(layers, n_qubits, name)


def read_template(path: str | Path, n_qubits: int | None = None) -> ClusterTemplate:
    path = Path(path)
    return parse_template(path.read_text(), n_qubits, name=path.stem, source=str(path))


def format_template(template: ClusterTemplate) -> str:
    return "\n".join(str(layer) for layer in template.layers) + "\n"


def resolve_template(name_or_path: str, n_qubits: int | None = None) -> ClusterTemplate:
    if name_or_path in _BUILTIN:
        return builtin_template(name_or_path, n_qubits)
    return read_template(name_or_path, n_qubits)


def layer_schedule(template: ClusterTemplate, reps: int) -> list[PairingLayer]:
    """Pairing layer used by each of the ``reps`` blocks, cycling from the first."""
    L = len(template.layers)
    return [template.layers[k % L] for k in range(reps)]


def build(spec: AnsatzSpec) -> Circuit:
    """Expand an ansatz spec into a circuit with ``n * (reps + 1)`` RY slots."""
    n = spec.template.n_qubits
    gates: list[Gate] = []
    slot = 0

    def rotation_layer():
        nonlocal slot
        for q in range(n):
            gates.append(ry(q, param=slot))
            slot += 1

    for layer in layer_schedule(spec.template, spec.reps):
        rotation_layer()
        gates.extend(cnot(c, t) for c, t in layer.pairs)
    rotation_layer()
    return Circuit(n, tuple(gates), slot)


def build_ansatz(template: ClusterTemplate | str, reps: int) -> Circuit:
    if isinstance(template, str):
        template = resolve_template(template)
    return build(AnsatzSpec(template, reps))


def pairing_count(n_qubits: int) -> int:
    """Number of perfect pairings of ``2w`` qubits: (2w)! / (2^w w!)."""
    if n_qubits < 2 or n_qubits % 2:
        raise StructureError(f"pairings need an even qubit count >= 2, got {n_qubits}")
    w = n_qubits // 2
    return math.factorial(2 * w) // (2 ** w * math.factorial(w))


def enumerate_pairings(qubits: Sequence[int]) -> list[tuple[Pair, ...]]:
    """All perfect pairings of ``qubits`` (lowest remaining qubit is the control)."""
    if not qubits:
        return [()]
    first, rest = qubits[0], list(qubits[1:])
    out = []
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        out.extend(((first, partner),) + tail for tail in enumerate_pairings(remaining))
    return out
