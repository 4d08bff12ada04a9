"""Regenerate the bundled molecular Hamiltonian files.

Not part of the installed package. Needs ``pyscf`` and ``qiskit-nature``
(see README). Integrals, RHF and FCI reference energies come from PySCF;
FCIDUMP files are written by PySCF; the pre-mapped Pauli files are made by
qiskit-nature from those same FCIDUMP files (parity mapping with two-qubit
reduction, plus Z2 tapering for LiH), so they serve as an independent
check of the package's own mapping code.

    python tools/make_hamiltonians.py [--out src/vbcircuits/data]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np
import pyscf
import qiskit_nature
from pyscf import fci, gto, mcscf, scf
from pyscf.tools import fcidump
from qiskit_nature.second_q.formats import fcidump_to_problem
from qiskit_nature.second_q.formats.fcidump import FCIDump
from qiskit_nature.second_q.mappers import ParityMapper

H2_GRID = [round(0.3 + 0.1 * k, 2) for k in range(23)] + [0.735]
H2_631G_GRID = [0.5, 0.7, 0.9, 1.2, 1.5, 2.0, 2.5]
H4_GRID = [0.74, 1.0, 1.2, 1.5, 2.0]
H2X2_GRID = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.3, 2.6]
LIH_GRID = [1.0, 1.25, 1.55, 1.75, 2.0, 2.4, 2.8, 3.2]


def h2(r):
    return f"H 0 0 0; H 0 0 {r}"


def h4(a):
    # two H2 units (bond 0.74 A) side by side at distance a
    return f"H 0 0 0; H 0.74 0 0; H 0 {a} 0; H 0.74 {a} 0"


def h2x2(a):
    # left atoms of both H2 fixed at 0 and 3.00 A, right atom of the second
    # at 4.50 A; the first molecule's right atom sits at a, so b = 3.00 - a
    # and c = 4.50 - a
    return f"H 0 0 0; H 0 0 {a}; H 0 0 3.00; H 0 0 4.50"


def lih(r):
    return f"Li 0 0 0; H 0 0 {r}"


def run_scf(atom, basis):
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {atom}")
    return mol, mf


def write_full(path, mol, mf):
    fcidump.from_scf(mf, str(path), tol=1e-15)
    e_fci = fci.FCI(mf).kernel()[0]
    return float(mf.e_tot), float(e_fci)


def write_frozen_core(path, mol, mf, n_core=1):
    ncas = mol.nao - n_core
    nelecas = mol.nelectron - 2 * n_core
    cas = mcscf.CASCI(mf, ncas, nelecas)
    cas.fcisolver.conv_tol = 1e-12
    e_fc = cas.kernel()[0]
    h1, ecore = cas.get_h1eff()
    eri = cas.get_h2eff()
    fcidump.from_integrals(str(path), h1, eri, ncas, nelecas, ecore, ms=0, tol=1e-15)
    return float(mf.e_tot), float(e_fc)


def qiskit_parity(fcidump_path, taper=False):
    problem = fcidump_to_problem(FCIDump.from_file(fcidump_path))
    mapper = ParityMapper(num_particles=problem.num_particles)
    if taper:
        mapper = problem.get_tapered_mapper(mapper)
    hamiltonian = problem.hamiltonian
    op = mapper.map(hamiltonian.second_q_op())
    shift = sum(hamiltonian.constants.values())
    terms = {}
    for label, coeff in op.to_list():
        if abs(coeff.imag) > 1e-10:
            raise RuntimeError(f"complex coefficient on {label}")
        # qiskit labels put qubit 0 rightmost; ours put it leftmost
        key = label[::-1]
        terms[key] = terms.get(key, 0.0) + coeff.real
    n = op.num_qubits
    terms["I" * n] = terms.get("I" * n, 0.0) + shift
    return n, {k: v for k, v in terms.items() if abs(v) > 1e-12}


def write_pauli(path, n, terms, header):
    lines = [f"# {h}" for h in header]
    for label in sorted(terms, key=lambda s: s.translate(str.maketrans("IXYZ", "0123"))):
        lines.append(f"{terms[label]:.17g} {label}")
    path.write_text("\n".join(lines) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                             / "src" / "vbcircuits" / "data"))
    args = parser.parse_args()
    out = Path(args.out)
    manifest = {"generator": {"pyscf": pyscf.__version__,
                              "qiskit-nature": qiskit_nature.__version__},
                "systems": {}}

    systems = [
        ("h2", "sto-3g", H2_GRID, h2, "full", False),
        ("h2", "6-31g", H2_631G_GRID, h2, "full", True),
        ("h4", "sto-3g", H4_GRID, h4, "full", True),
        ("h2x2", "sto-3g", H2X2_GRID, h2x2, "full", True),
        ("lih", "sto-3g", LIH_GRID, lih, "frozen_core", "taper"),
    ]
    for name, basis, grid, geometry, kind, pauli in systems:
        folder = f"{name}_{basis.replace('-', '')}"
        (out / folder).mkdir(parents=True, exist_ok=True)
        entries = []
        for param in grid:
            atom = geometry(param)
            mol, mf = run_scf(atom, basis)
            stem = f"{name}_{param:.3f}" if param == 0.735 else f"{name}_{param:.2f}"
            fpath = out / folder / f"{stem}.fcidump"
            if kind == "full":
                e_hf, e_ref = write_full(fpath, mol, mf)
            else:
                e_hf, e_ref = write_frozen_core(fpath, mol, mf)
            entry = {"param": param, "atoms": atom, "fcidump": fpath.name,
                     "e_rhf": e_hf, "e_fci": e_ref}
            if pauli:
                n, terms = qiskit_parity(str(fpath), taper=(pauli == "taper"))
                ppath = out / folder / f"{stem}.pauli"
                what = "parity + two-qubit reduction" + (" + Z2 tapering" if pauli == "taper" else "")
                write_pauli(ppath, n, terms, [
                    f"{name} {basis} {'frozen core, ' if kind != 'full' else ''}{what}",
                    f"geometry (Angstrom): {atom}",
                    f"generated by qiskit-nature {qiskit_nature.__version__} from {fpath.name}",
                    "qubit 0 is the leftmost letter; energies in Hartree incl. core/nuclear"])
                entry.update({"pauli": ppath.name, "pauli_qubits": n, "pauli_terms": len(terms),
                              "pauli_ground": float(np.linalg.eigvalsh(_dense(n, terms))[0])})
            entries.append(entry)
            print(f"{folder:14s} {param:6.3f} rhf={e_hf:.8f} ref={e_ref:.8f}",
                  f"pauli_ground={entry.get('pauli_ground', float('nan')):.8f}")
        manifest["systems"][folder] = {
            "molecule": name, "basis": basis,
            "reference": "FCI" if kind == "full" else "frozen-core CASCI (= FCI in active space)",
            "points": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


def _dense(n, terms):
    mats = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]),
            "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1.0, -1.0])}
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for label, c in terms.items():
        m = np.array([[1.0]])
        for ch in label:
            m = np.kron(m, mats[ch])
        total += c * m
    return total


if __name__ == "__main__":
    main()
