"""Pauli strings and real-weighted Pauli sums (Hermitian observables).

Qubit convention, shared by every module in the package: qubit 0 is the
leftmost letter of a Pauli string and the most significant bit of a
computational-basis index. ``"XI"`` on two qubits therefore flips the
high bit of the basis index.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

LETTERS = "IXYZ"
DROP_TOLERANCE = 1e-12
MATRIX_QUBIT_CAP = 14

_PAULI_RE = re.compile(r"^[IXYZ]+$")


class StructureError(ValueError):
    """Raised when operands have inconsistent shapes or invalid content."""


class ResourceError(RuntimeError):
    """Raised when a dense representation would exceed the configured cap."""


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Pauli letters; letter i acts on qubit i."""

    letters: str

    def __post_init__(self):
        if not self.letters or not _PAULI_RE.match(self.letters):
            raise StructureError(f"invalid Pauli string {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls("I" * n_qubits)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: dict[int, str]) -> PauliString:
        """Build e.g. ``{0: "Z", 3: "X"}`` on ``n_qubits`` qubits."""
        letters = ["I"] * n_qubits
        for q, p in ops.items():
            if not 0 <= q < n_qubits:
                raise StructureError(f"qubit {q} out of range for {n_qubits} qubits")
            letters[q] = p
        return cls("".join(letters))

    def masks(self) -> tuple[int, int]:
        """Return ``(x_mask, z_mask)``; a Y letter sets both bits."""
        n = self.n_qubits
        x = z = 0
        for q, p in enumerate(self.letters):
            bit = 1 << (n - 1 - q)
            if p in "XY":
                x |= bit
            if p in "ZY":
                z |= bit
        return x, z

    @property
    def n_y(self) -> int:
        return self.letters.count("Y")

    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def __str__(self) -> str:
        return self.letters


Term = tuple[float, PauliString]


@dataclass(frozen=True)
class Observable:
    """Real-weighted sum of Pauli strings on a fixed number of qubits.

    Instances are immutable. Construction does not merge duplicates; call
    :func:`normalize` (or :meth:`normalized`) for the canonical form.
    """

    n_qubits: int
    terms: tuple[Term, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise StructureError("n_qubits must be positive")
        terms = tuple((float(c), p if isinstance(p, PauliString) else PauliString(p))
                      for c, p in self.terms)
        for c, p in terms:
            if p.n_qubits != self.n_qubits:
                raise StructureError(
                    f"term {p} has {p.n_qubits} qubits, observable has {self.n_qubits}")
            if not math.isfinite(c):
                raise StructureError(f"non-finite coefficient on {p}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, str | PauliString]],
                   n_qubits: int | None = None) -> Observable:
        terms = [(c, p if isinstance(p, PauliString) else PauliString(p)) for c, p in terms]
        if n_qubits is None:
            widths = {p.n_qubits for _, p in terms}
            if len(widths) != 1:
                raise StructureError(f"cannot infer n_qubits from widths {sorted(widths)}")
            n_qubits = widths.pop()
        return cls(n_qubits, tuple(terms))

    @classmethod
    def constant(cls, n_qubits: int, value: float) -> Observable:
        return cls(n_qubits, ((value, PauliString.identity(n_qubits)),))

    def normalized(self, tol: float = DROP_TOLERANCE) -> Observable:
        return normalize(self, tol)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: Observable) -> Observable:
        if not isinstance(other, Observable):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise StructureError("qubit-count mismatch in observable sum")
        return Observable(self.n_qubits, self.terms + other.terms)

    def __sub__(self, other: Observable) -> Observable:
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> Observable:
        return Observable(self.n_qubits, tuple((scalar * c, p) for c, p in self.terms))

    __rmul__ = __mul__

    def coefficient(self, letters: str) -> float:
        """Summed coefficient of one Pauli string (0.0 if absent)."""
        return sum(c for c, p in self.terms if p.letters == letters)

    def one_norm(self) -> float:
        return sum(abs(c) for c, _ in self.terms)

    @functools.cached_property
    def _groups(self) -> tuple[tuple[int, np.ndarray], ...]:
        # Terms sharing an X mask act as (shared bit flip) x (summed diagonal phase).
        n = self.n_qubits
        index = np.arange(1 << n)
        by_x: dict[int, np.ndarray] = {}
        for c, p in self.terms:
            x, z = p.masks()
            sign = 1.0 - 2.0 * (np.bitwise_count(index & z) & 1)
            diag = (c * (1j) ** p.n_y) * sign
            if x in by_x:
                by_x[x] = by_x[x] + diag
            else:
                by_x[x] = diag.astype(complex)
        return tuple(sorted(by_x.items()))


def _sort_key(term: Term) -> str:
    return term[1].letters.translate(str.maketrans(LETTERS, "0123"))


def normalize(obs: Observable, tol: float = DROP_TOLERANCE) -> Observable:
    """Merge duplicate strings, drop ``|c| < tol`` and sort lexicographically (I<X<Y<Z)."""
    merged: dict[str, float] = {}
    for c, p in obs.terms:
        if p.n_qubits != obs.n_qubits:
            raise StructureError("mixed qubit counts in observable")
        merged[p.letters] = merged.get(p.letters, 0.0) + c
    terms = [(c, PauliString(s)) for s, c in merged.items() if abs(c) >= tol]
    terms.sort(key=_sort_key)
    return Observable(obs.n_qubits, tuple(terms))


def term_count(obs: Observable) -> int:
    """Number of non-identity Pauli words in a normalized observable."""
    return sum(1 for _, p in obs.terms if not p.is_identity())


def to_matrix(obs: Observable, max_qubits: int = MATRIX_QUBIT_CAP) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of the observable (qubit 0 = most significant bit)."""
    if obs.n_qubits > max_qubits:
        raise ResourceError(f"{obs.n_qubits} qubits exceeds dense cap of {max_qubits}")
    dim = 1 << obs.n_qubits
    index = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for x, diag in obs._groups:
        mat[index ^ x, index] += diag
    return mat


def _amplitudes(state) -> np.ndarray:
    return np.asarray(getattr(state, "amplitudes", state))


def expectation(state, obs: Observable, imag_tol: float = 1e-12) -> float | np.ndarray:
    """Exact ``<psi|H|psi>`` evaluated term group by term group.

    ``state`` is a :class:`~vbcircuits.simulator.StateVector` or an amplitude
    array; a 2-D array of shape ``(batch, 2^n)`` returns one energy per row.
    """
    psi = _amplitudes(state)
    dim = psi.shape[-1]
    if dim != 1 << obs.n_qubits:
        raise StructureError(
            f"state has dimension {dim}, observable acts on {obs.n_qubits} qubits")
    index = np.arange(dim)
    total = np.zeros(psi.shape[:-1], dtype=complex)
    for x, diag in obs._groups:
        total += np.sum(psi[..., index ^ x].conj() * diag * psi, axis=-1)
    scale = max(1.0, obs.one_norm())
    if np.any(np.abs(total.imag) > imag_tol * scale):
        raise StructureError(
            f"imaginary expectation residue {np.max(np.abs(total.imag)):.3e}")
    real = total.real
    return float(real) if real.ndim == 0 else real


# --- text format -----------------------------------------------------------

def parse_pauli_sum(text: str, source: str = "<string>") -> Observable:
    """Parse ``<coefficient> <letters>`` lines; ``#`` comments, blanks ignored."""
    terms: list[Term] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise StructureError(f"{source}:{lineno}: expected '<coefficient> <letters>'")
        try:
            coeff = float(parts[0])
            string = PauliString(parts[1])
        except (ValueError, StructureError) as exc:
            raise StructureError(f"{source}:{lineno}: {exc}") from None
        terms.append((coeff, string))
    if not terms:
        raise StructureError(f"{source}: no terms found")
    try:
        return Observable.from_terms(terms)
    except StructureError as exc:
        raise StructureError(f"{source}: {exc}") from None


def format_pauli_sum(obs: Observable, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"{c:.17g} {p.letters}" for c, p in obs.terms]
    return "\n".join(lines) + "\n"


def read_pauli_sum(path: str | Path) -> Observable:
    path = Path(path)
    return parse_pauli_sum(path.read_text(), source=str(path))


def write_pauli_sum(obs: Observable, path: str | Path, header: Sequence[str] = ()) -> None:
    Path(path).write_text(format_pauli_sum(obs, header))
