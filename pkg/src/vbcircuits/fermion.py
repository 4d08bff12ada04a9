"""Electronic-structure Hamiltonians: FCIDUMP ingestion and qubit mappings.

Spin orbitals are in block order: spatial orbital ``p`` with spin up is
mode ``p`` and with spin down is mode ``p + n_orbitals``. Mode ``j`` maps
to qubit ``j`` (qubit 0 is the leftmost Pauli letter).

Jordan-Wigner: ``a+_j = 1/2 (X_j - i Y_j) Z_0 ... Z_{j-1}``; qubit ``j``
holds the occupation of mode ``j``.
Parity: qubit ``j`` holds the occupation parity of modes ``0..j`` and
``a+_j = 1/2 (X_j Z_{j-1} - i Y_j) X_{j+1} ... X_{N-1}``.

Internally qubit operators are dicts ``{(x_mask, z_mask): coefficient}``
meaning ``coefficient * X^x Z^z`` (the Z factor acts first), with qubit
``q`` on bit ``N - 1 - q`` as everywhere else in the package.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pauli import Observable, PauliString, StructureError, normalize

IMAG_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-10


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; the message carries source and line."""


class MappingError(ValueError):
    """Raised when a fermion-to-qubit mapping cannot be carried out."""


# --- FCIDUMP -----------------------------------------------------------------

@dataclass
class FcidumpData:
    n_orbitals: int
    n_electrons: int
    ms2: int
    one_body: np.ndarray
    two_body: np.ndarray
    core_energy: float = 0.0

    def __post_init__(self):
        n = self.n_orbitals
        self.one_body = np.asarray(self.one_body, dtype=float)
        self.two_body = np.asarray(self.two_body, dtype=float)
        if self.one_body.shape != (n, n) or self.two_body.shape != (n,) * 4:
            raise FcidumpError("integral arrays do not match n_orbitals")
        if not 0 <= self.n_electrons <= 2 * n:
            raise FcidumpError(f"{self.n_electrons} electrons do not fit in {n} orbitals")

    @property
    def n_modes(self) -> int:
        return 2 * self.n_orbitals

    def check_symmetry(self, tol: float = SYMMETRY_TOLERANCE) -> None:
        h, g = self.one_body, self.two_body
        if np.max(np.abs(h - h.T), initial=0.0) > tol:
            raise FcidumpError("one-body integrals are not symmetric")
        for perm in _EIGHTFOLD[1:]:
            if np.max(np.abs(g - g.transpose(perm)), initial=0.0) > tol:
                raise FcidumpError(f"two-body integrals break symmetry {perm}")


# Index permutations of (pq|rs) that leave a real chemists' integral unchanged.
_EIGHTFOLD = [(0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
              (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)]

_HEADER_RE = re.compile(r"&FCI(.*?)(&END|/)", re.IGNORECASE | re.DOTALL)
_KEY_SPLIT = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=")


def _header_values(header: str) -> dict[str, str]:
    parts = _KEY_SPLIT.split(header)
    return {key.upper(): value.strip().strip(",").strip()
            for key, value in zip(parts[1::2], parts[2::2])}


def parse_fcidump(text: str, source: str = "<string>") -> FcidumpData:
    """Parse Molpro-style FCIDUMP text (1-based indices, chemists' notation)."""
    match = _HEADER_RE.search(text)
    if not match:
        raise FcidumpError(f"{source}: missing '&FCI ... &END' header")
    keys = _header_values(match.group(1))
    try:
        norb = int(keys["NORB"])
        nelec = int(keys["NELEC"])
        ms2 = int(keys["MS2"])
    except KeyError as exc:
        raise FcidumpError(f"{source}: header lacks {exc.args[0]}") from None
    except ValueError as exc:
        raise FcidumpError(f"{source}: bad header value ({exc})") from None

    h = np.zeros((norb, norb))
    g = np.zeros((norb,) * 4)
    core = 0.0
    first_body_line = text[:match.end()].count("\n") + 1
    body = text[match.end():].splitlines()
    for offset, raw in enumerate(body):
        lineno = first_body_line + offset
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError(f"{source}:{lineno}: expected 'value i j k l'")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(f"{source}:{lineno}: non-numeric field in {line!r}") from None
        if any(not 0 <= idx <= norb for idx in (i, j, k, l)):
            raise FcidumpError(f"{source}:{lineno}: index out of range 0..{norb}")
        if i == j == k == l == 0:
            core = value
        elif j == k == l == 0:
            # orbital energies ("e i 0 0 0") carry no Hamiltonian information
            continue
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"{source}:{lineno}: malformed one-body indices")
            h[i - 1, j - 1] = h[j - 1, i - 1] = value
        elif 0 in (i, j, k, l):
            raise FcidumpError(f"{source}:{lineno}: malformed two-body indices")
        else:
            idx = (i - 1, j - 1, k - 1, l - 1)
            for perm in _EIGHTFOLD:
                g[tuple(idx[p] for p in perm)] = value
    try:
        return FcidumpData(norb, nelec, ms2, h, g, core)
    except FcidumpError as exc:
        raise FcidumpError(f"{source}: {exc}") from None


def read_fcidump(path: str | Path) -> FcidumpData:
    path = Path(path)
    return parse_fcidump(path.read_text(), source=str(path))


def format_fcidump(data: FcidumpData, tol: float = 1e-14) -> str:
    n = data.n_orbitals
    lines = [f" &FCI NORB={n},NELEC={data.n_electrons},MS2={data.ms2},",
             "  ORBSYM=" + ",".join(["1"] * n) + ",", "  ISYM=1,", " &END"]
    g = data.two_body
    for i, j, k, l in itertools.product(range(n), repeat=4):
        # canonical representative: i>=j, k>=l, (ij)>=(kl)
        if i >= j and k >= l and i * (i + 1) // 2 + j >= k * (k + 1) // 2 + l:
            if abs(g[i, j, k, l]) > tol:
                lines.append(f"{g[i, j, k, l]: .16e} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            if abs(data.one_body[i, j]) > tol:
                lines.append(f"{data.one_body[i, j]: .16e} {i + 1:4d} {j + 1:4d}    0    0")
    lines.append(f"{data.core_energy: .16e}    0    0    0    0")
    return "\n".join(lines) + "\n"


# --- second quantization -----------------------------------------------------

Ladder = tuple[int, bool]  # (mode, is_creation)


@dataclass
class FermionOperator:
    """Sum of coefficient * product of ladder operators (applied right to left).

    An empty ``ops`` tuple is the identity (used for the core energy).
    """

    terms: list[tuple[float, tuple[Ladder, ...]]] = field(default_factory=list)
    n_modes: int | None = None

    def __post_init__(self):
        for _, ops in self.terms:
            if len(ops) % 2:
                raise StructureError("only particle-conserving (even-length) terms allowed")
            if self.n_modes is not None and any(m >= self.n_modes for m, _ in ops):
                raise StructureError(f"mode index beyond {self.n_modes} modes")

    def __add__(self, other: FermionOperator) -> FermionOperator:
        n = max(self.n_modes or 0, other.n_modes or 0) or None
        return FermionOperator(self.terms + other.terms, n)

    def max_mode(self) -> int:
        return max((m for _, ops in self.terms for m, _ in ops), default=-1)


def number_operator(n_modes: int, modes=None) -> FermionOperator:
    modes = range(n_modes) if modes is None else modes
    return FermionOperator([(1.0, ((j, True), (j, False))) for j in modes], n_modes)


def hopping(p: int, q: int, n_modes: int | None = None) -> FermionOperator:
    """``a+_p a_q + a+_q a_p``."""
    return FermionOperator([(1.0, ((p, True), (q, False))), (1.0, ((q, True), (p, False)))],
                           n_modes)


def to_fermion_hamiltonian(data: FcidumpData, tol: float = 1e-14) -> FermionOperator:
    """``H = E_core + sum h_pq a+_p a_q + 1/2 sum <PQ|RS> a+_P a+_Q a_S a_R``.

    ``<PQ|RS> = (pr|qs)`` for spin orbitals whose spins match pairwise.
    """
    n = data.n_orbitals
    h, g = data.one_body, data.two_body
    terms: list[tuple[float, tuple[Ladder, ...]]] = []
    if data.core_energy:
        terms.append((float(data.core_energy), ()))
    for spin in (0, n):
        for p, q in itertools.product(range(n), repeat=2):
            if abs(h[p, q]) > tol:
                terms.append((float(h[p, q]), ((p + spin, True), (q + spin, False))))
    for s1, s2 in itertools.product((0, n), repeat=2):
        for p, q, r, s in itertools.product(range(n), repeat=4):
            P, Q, R, S = p + s1, q + s2, r + s1, s + s2
            if P == Q or R == S:
                continue
            value = g[p, r, q, s]
            if abs(value) > tol:
                terms.append((0.5 * float(value), ((P, True), (Q, True), (S, False), (R, False))))
    return FermionOperator(terms, 2 * n)


# --- qubit algebra -------------------------------------------------------------

QubitDict = dict[tuple[int, int], complex]


def _multiply(a: QubitDict, b: QubitDict) -> QubitDict:
    out: QubitDict = {}
    for (x1, z1), c1 in a.items():
        for (x2, z2), c2 in b.items():
            # Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
            sign = -1 if (z1 & x2).bit_count() & 1 else 1
            key = (x1 ^ x2, z1 ^ z2)
            out[key] = out.get(key, 0.0) + sign * c1 * c2
    return out


def _dagger(a: QubitDict) -> QubitDict:
    # (X^x Z^z)^+ = Z^z X^x = (-1)^{|x & z|} X^x Z^z
    return {(x, z): (-1 if (x & z).bit_count() & 1 else 1) * np.conj(c)
            for (x, z), c in a.items()}


def _bit(n: int, q: int) -> int:
    return 1 << (n - 1 - q)


def _jw_creation(j: int, n: int) -> QubitDict:
    lower = sum(_bit(n, k) for k in range(j))
    xj = _bit(n, j)
    # X_j - iY_j = X_j + X_j Z_j
    return {(xj, lower): 0.5, (xj, lower | xj): 0.5}


def _parity_creation(j: int, n: int) -> QubitDict:
    upper = sum(_bit(n, k) for k in range(j, n))
    prev = _bit(n, j - 1) if j > 0 else 0
    # X_j Z_{j-1} - i Y_j = X_j Z_{j-1} + X_j Z_j, times X on every qubit above j
    out: QubitDict = {(upper, prev): 0.5}
    key = (upper, _bit(n, j))
    out[key] = out.get(key, 0.0) + 0.5
    return out


def _map(op: FermionOperator, n_modes: int, creation) -> QubitDict:
    if op.max_mode() >= n_modes:
        raise StructureError(f"operator touches mode {op.max_mode()} but n_modes={n_modes}")
    cache: dict[Ladder, QubitDict] = {}
    for j in range(n_modes):
        up = creation(j, n_modes)
        cache[(j, True)] = up
        cache[(j, False)] = _dagger(up)
    total: QubitDict = {}
    for coeff, ops in op.terms:
        prod: QubitDict = {(0, 0): complex(coeff)}
        for ladder in ops:
            prod = _multiply(prod, cache[ladder])
        for key, c in prod.items():
            total[key] = total.get(key, 0.0) + c
    return total


def _to_observable(qd: QubitDict, n: int, tol: float = IMAG_TOLERANCE) -> Observable:
    terms = []
    for (x, z), c in qd.items():
        letters = []
        n_y = 0
        for q in range(n):
            b = _bit(n, q)
            xb, zb = bool(x & b), bool(z & b)
            if xb and zb:
                letters.append("Y")
                n_y += 1
            else:
                letters.append("X" if xb else "Z" if zb else "I")
        # X Z = -i Y on each qubit holding a Y
        coeff = c * (-1j) ** n_y
        if abs(coeff.imag) > tol:
            raise MappingError(
                f"imaginary coefficient {coeff.imag:.3e} on {''.join(letters)}; "
                "operator is not Hermitian")
        terms.append((coeff.real, PauliString("".join(letters))))
    if not terms:
        return Observable(n, ())
    return normalize(Observable(n, tuple(terms)))


def jordan_wigner(op: FermionOperator, n_modes: int | None = None) -> Observable:
    n_modes = n_modes or op.n_modes or op.max_mode() + 1
    return _to_observable(_map(op, n_modes, _jw_creation), n_modes)


def parity_map(op: FermionOperator, n_modes: int | None = None, *,
               reduce_two_qubits: bool = False, n_electrons: int | None = None,
               ms2: int = 0) -> Observable:
    """Parity encoding, optionally dropping the two symmetry-pinned qubits.

    With block spin ordering, qubit ``N/2 - 1`` stores the spin-up count
    parity and qubit ``N - 1`` the total parity. Both only carry I or Z in
    a number- and spin-conserving operator, so they are replaced by their
    eigenvalues fixed by ``n_electrons`` and ``ms2``.
    """
    n_modes = n_modes or op.n_modes or op.max_mode() + 1
    qd = _map(op, n_modes, _parity_creation)
    if not reduce_two_qubits:
        return _to_observable(qd, n_modes)
    if n_modes % 2 or n_modes < 4:
        raise MappingError("two-qubit reduction needs an even number of >= 4 modes")
    if n_electrons is None or (n_electrons + ms2) % 2 or abs(ms2) > n_electrons:
        raise MappingError(
            f"cannot pin qubits with n_electrons={n_electrons}, ms2={ms2}")
    n_up = (n_electrons + ms2) // 2
    pinned = {n_modes // 2 - 1: (-1) ** n_up, n_modes - 1: (-1) ** n_electrons}
    keep = [q for q in range(n_modes) if q not in pinned]
    m = len(keep)
    reduced: QubitDict = {}
    for (x, z), c in qd.items():
        for q, sign in pinned.items():
            b = _bit(n_modes, q)
            if x & b:
                raise MappingError(
                    f"qubit {q} carries X/Y; operator does not conserve the pinned symmetry")
            if z & b:
                c = c * sign
        nx = nz = 0
        for new_q, old_q in enumerate(keep):
            b = _bit(n_modes, old_q)
            if x & b:
                nx |= _bit(m, new_q)
            if z & b:
                nz |= _bit(m, new_q)
        reduced[(nx, nz)] = reduced.get((nx, nz), 0.0) + c
    return _to_observable(reduced, m)


MAPPINGS = ("jw", "parity", "parity_reduced")


def map_fcidump(data: FcidumpData, mapping: str) -> Observable:
    op = to_fermion_hamiltonian(data)
    if mapping == "jw":
        return jordan_wigner(op, data.n_modes)
    if mapping == "parity":
        return parity_map(op, data.n_modes)
    if mapping == "parity_reduced":
        return parity_map(op, data.n_modes, reduce_two_qubits=True,
                          n_electrons=data.n_electrons, ms2=data.ms2)
    raise StructureError(f"unknown mapping {mapping!r}; choose from {MAPPINGS}")
