"""Exact diagonalization of observables.

Dense Hermitian eigensolver: Householder reduction to tridiagonal form,
a diagonal phase similarity that makes the tridiagonal real, then the
implicit-shift QL iteration. Fine for the <= 8-qubit matrices used in
practice; larger matrices up to the dense cap work but are slow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import MATRIX_QUBIT_CAP, Observable, ResourceError, to_matrix
from .simulator import StateVector


class ConvergenceError(RuntimeError):
    pass


def tridiagonalize(a: np.ndarray, want_vectors: bool = True):
    """Reduce Hermitian ``a`` to real symmetric tridiagonal form.

    Returns ``(d, e, q)`` with ``a = q @ T @ q.conj().T`` where ``T`` has
    diagonal ``d`` and sub/super-diagonal ``e`` (``e >= 0``). ``q`` is None
    when ``want_vectors`` is false.
    """
    a = np.asarray(a)
    real = not np.iscomplexobj(a) or not np.any(a.imag)
    a = np.array(a.real if real else a, dtype=float if real else complex)
    n = a.shape[0]
    q = np.eye(n, dtype=a.dtype) if want_vectors else None
    for k in range(n - 2):
        x = a[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        # Two-sided reflection P a P, P = I - 2 v v^H, as one rank-2 update
        # of the trailing block plus the reflected column/row k.
        col = x - 2.0 * v * (v.conj() @ x)
        a[k + 1:, k] = col
        a[k, k + 1:] = col.conj()
        blk = a[k + 1:, k + 1:]
        p = 2.0 * (blk @ v)
        w = p - v * (v.conj() @ p)
        blk -= np.stack([v, w], axis=1) @ np.stack([w.conj(), v.conj()])
        if q is not None:
            qb = q[:, k + 1:]
            qb -= (2.0 * (qb @ v))[:, np.newaxis] @ v.conj()[np.newaxis, :]
    d = a.diagonal().real.copy()
    sub = a.diagonal(-1).copy()
    e = np.abs(sub)
    if q is not None:
        # Diagonal phases that turn the complex off-diagonal into |e|.
        phases = np.ones(n, dtype=complex)
        for k in range(n - 1):
            if e[k] > 0:
                phases[k + 1] = phases[k] * sub[k] / e[k]
            else:
                phases[k + 1] = phases[k]
        q = q * phases[np.newaxis, :]
    return d, e, q


def tridiagonal_eigh(d: np.ndarray, e: np.ndarray, z: np.ndarray | None = None,
                     max_sweeps: int = 60):
    """Implicit-shift QL on a real symmetric tridiagonal matrix.

    ``d`` (length n) is the diagonal and ``e`` (length n-1) the off-diagonal.
    If ``z`` is given its columns are rotated along, so passing the
    tridiagonalizing transform yields eigenvectors of the original matrix.
    """
    d = np.array(d, dtype=float)
    n = d.size
    e = np.append(np.asarray(e, dtype=float), 0.0)
    if z is not None:
        z = np.array(z)
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi1 = z[:, i + 1].copy()
                    z[:, i + 1] = s * z[:, i] + c * zi1
                    z[:, i] = c * z[:, i] - s * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d, kind="stable")
    d = d[order]
    if z is not None:
        z = z[:, order]
    return d, z


def components(matrix: np.ndarray, tol: float = 0.0) -> list[np.ndarray]:
    """Index sets of the connected components of the nonzero pattern.

    A symmetric permutation brings the matrix to block-diagonal form with
    one block per component; blocks can be diagonalized separately.
    """
    n = matrix.shape[0]
    linked = np.abs(matrix) > tol
    labels = np.arange(n)
    while True:
        # every index takes the smallest label among its neighbours
        spread = np.where(linked, labels[np.newaxis, :], n).min(axis=1)
        new = np.minimum(labels, spread)
        new = new[new]
        if np.array_equal(new, labels):
            break
        labels = new
    return [np.flatnonzero(labels == lab) for lab in np.unique(labels)]


def _eigh_dense(matrix: np.ndarray, want_vectors: bool):
    if matrix.shape[0] == 1:
        vals = matrix.diagonal().real.copy()
        return vals, (np.ones((1, 1), dtype=complex) if want_vectors else None)
    d, e, q = tridiagonalize(matrix, want_vectors)
    return tridiagonal_eigh(d, e, q)


def eigh(matrix: np.ndarray, want_vectors: bool = True):
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.

    Decoupled blocks (e.g. particle-number sectors) are solved separately.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("eigh needs a square matrix")
    n = matrix.shape[0]
    blocks = components(matrix)
    if len(blocks) == 1:
        return _eigh_dense(matrix, want_vectors)
    vals = np.empty(n)
    vecs = np.zeros((n, n), dtype=complex) if want_vectors else None
    start = 0
    for idx in blocks:
        w, v = _eigh_dense(matrix[np.ix_(idx, idx)], want_vectors)
        vals[start:start + idx.size] = w
        if vecs is not None:
            vecs[idx, start:start + idx.size] = v
        start += idx.size
    order = np.argsort(vals, kind="stable")
    return vals[order], (vecs[:, order] if vecs is not None else None)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    ground_energy: float
    ground_state: StateVector | None = None
    eigenvectors: np.ndarray | None = None


def _check_cap(obs: Observable, max_qubits: int) -> None:
    if obs.n_qubits > max_qubits:
        raise ResourceError(f"{obs.n_qubits} qubits exceeds dense cap of {max_qubits}")


def full_spectrum(obs: Observable, with_vectors: bool = False,
                  max_qubits: int = MATRIX_QUBIT_CAP) -> SpectrumResult:
    _check_cap(obs, max_qubits)
    vals, vecs = eigh(to_matrix(obs, max_qubits), want_vectors=with_vectors)
    ground = None
    if vecs is not None:
        v0 = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
        ground = StateVector(obs.n_qubits, v0)
    return SpectrumResult(vals, float(vals[0]), ground, vecs)


def ground_energy(obs: Observable, max_qubits: int = MATRIX_QUBIT_CAP) -> float:
    return full_spectrum(obs, with_vectors=False, max_qubits=max_qubits).ground_energy


def ground_state(obs: Observable, max_qubits: int = MATRIX_QUBIT_CAP) -> StateVector:
    return full_spectrum(obs, with_vectors=True, max_qubits=max_qubits).ground_state
