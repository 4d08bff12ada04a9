"""Experiment drivers: Ising sweeps, molecular points and curves, result ledgers."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ansatz import AnsatzSpec, ClusterTemplate, resolve_template
from .fermion import MAPPINGS, map_fcidump, read_fcidump
from .models import ising_observable
from .pauli import Observable, StructureError, read_pauli_sum
from .solver import ground_energy
from .vqe import VqeProblem, VqeResult, solve, with_warm_start

log = logging.getLogger(__name__)

CSV_COLUMNS = ("system", "model_param", "cluster", "reps", "depth", "n_params",
               "E_vqe", "E_exact", "delta_Ec", "restarts", "seed", "strategy")

_GEOMETRY_RE = re.compile(r"^(?P<system>.+)_(?P<param>[-+]?\d+(?:\.\d*)?)$")


@dataclass
class VqeOptions:
    restarts: int = 10
    seed: int = 0
    max_iterations: int = 200
    strategy: str = "default"
    gradient_mode: str = "parameter_shift"
    shots: int | None = None


@dataclass
class SweepRecord:
    system: str
    model_param: float
    cluster: str
    reps: int
    depth: int
    n_params: int
    E_vqe: float
    E_exact: float
    delta_Ec: float
    restarts: int
    seed: int
    strategy: str
    error: str | None = field(default=None, compare=False)
    parameters: list[float] | None = field(default=None, compare=False, repr=False)

    @property
    def failed(self) -> bool:
        return self.error is not None or math.isnan(self.E_vqe)


def data_path(*parts: str) -> Path:
    """Location of the bundled Hamiltonian files (``data_path("h2_sto3g")``)."""
    return Path(str(resources.files("vbcircuits") / "data")).joinpath(*parts)


def bundled_manifest() -> dict:
    return json.loads(data_path("manifest.json").read_text())


def parse_geometry_key(path: str | Path) -> tuple[str, float]:
    """Split ``<system>_<param>.<ext>`` into ``(system, param)``."""
    stem = Path(path).stem
    match = _GEOMETRY_RE.match(stem)
    if not match:
        raise StructureError(f"cannot read '<system>_<param>' from file name {Path(path).name}")
    return match["system"], float(match["param"])


def load_hamiltonian(path: str | Path, mapping: str) -> Observable:
    path = Path(path)
    if mapping == "pauli_file":
        return read_pauli_sum(path)
    if mapping not in MAPPINGS:
        raise StructureError(f"unknown mapping {mapping!r}")
    return map_fcidump(read_fcidump(path), mapping)


def _record(system, param, template: ClusterTemplate, reps, result: VqeResult | None,
            e_exact, options: VqeOptions, error=None) -> SweepRecord:
    spec = AnsatzSpec(template, reps)
    e_vqe = result.energy if result is not None else float("nan")
    return SweepRecord(
        system=system, model_param=float(param), cluster=template.name, reps=reps,
        depth=spec.depth, n_params=spec.n_parameters, E_vqe=e_vqe, E_exact=e_exact,
        delta_Ec=abs(e_exact - e_vqe), restarts=options.restarts, seed=options.seed,
        strategy=options.strategy, error=error,
        parameters=None if result is None else [float(v) for v in result.parameters])


def _problem(h: Observable, template, reps, options: VqeOptions) -> VqeProblem:
    return VqeProblem(h, AnsatzSpec(template, reps), max_iterations=options.max_iterations,
                      restarts=options.restarts, seed=options.seed, strategy=options.strategy,
                      gradient_mode=options.gradient_mode, shots=options.shots)


def _solve_point(system, param, hamiltonian: Observable, template, reps,
                 options: VqeOptions, warm=None) -> SweepRecord:
    try:
        e_exact = ground_energy(hamiltonian)
        problem = _problem(hamiltonian, template, reps, options)
        if warm is not None:
            problem = with_warm_start(problem, warm)
        result = solve(problem)
        return _record(system, param, template, reps, result, e_exact, options)
    except Exception as exc:  # a failed point must not stop the sweep
        log.warning("point %s=%s failed: %s", system, param, exc)
        return _record(system, param, template, reps, None, float("nan"), options, str(exc))


def _run_path(points: Sequence[tuple[str, float, Observable]], template, reps,
              options: VqeOptions, anchor: float | None, workers: int) -> list[SweepRecord]:
    if not points:
        return []
    if options.strategy != "adiabatic":
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                futures = [pool.submit(_solve_point, s, p, h, template, reps, options)
                           for s, p, h in points]
                records = [f.result() for f in futures]
        else:
            records = [_solve_point(s, p, h, template, reps, options) for s, p, h in points]
        return sorted(records, key=lambda r: r.model_param)

    points = sorted(points, key=lambda t: t[1])
    params = [p for _, p, _ in points]
    if anchor is None:
        start = int(np.argmin([ground_energy(h) for _, _, h in points]))
    else:
        start = int(np.argmin([abs(p - anchor) for p in params]))
    records: dict[int, SweepRecord] = {}
    s, p, h = points[start]
    records[start] = _solve_point(s, p, h, template, reps, options)
    for direction in (-1, 1):
        prev = records[start]
        k = start + direction
        while 0 <= k < len(points):
            s, p, h = points[k]
            warm = prev.parameters if not prev.failed else None
            records[k] = _solve_point(s, p, h, template, reps, options, warm)
            prev = records[k] if not records[k].failed else prev
            k += direction
    return [records[k] for k in range(len(points))]


def ising_sweep(n_sites: int, cluster: str | ClusterTemplate, reps: int,
                a_grid: Iterable[float], options: VqeOptions | None = None,
                topology: str = "ring", anchor: float | None = None,
                workers: int = 1) -> list[SweepRecord]:
    options = options or VqeOptions()
    template = cluster if isinstance(cluster, ClusterTemplate) else resolve_template(cluster, n_sites)
    if template.n_qubits != n_sites:
        raise StructureError(f"template {template.name} has {template.n_qubits} qubits, "
                             f"model has {n_sites} sites")
    system = f"{n_sites}-site IM ({topology})"
    points = [(system, float(a), ising_observable(n_sites, float(a), topology)) for a in a_grid]
    return _run_path(points, template, reps, options, anchor, workers)


def molecule_run(path: str | Path, mapping: str, cluster: str | ClusterTemplate, reps: int,
                 options: VqeOptions | None = None) -> SweepRecord:
    options = options or VqeOptions()
    system, param = parse_geometry_key(path)
    h = load_hamiltonian(path, mapping)
    template = cluster if isinstance(cluster, ClusterTemplate) else resolve_template(cluster, h.n_qubits)
    return _solve_point(system, param, h, template, reps, options)


def curve_files(directory: str | Path, mapping: str) -> list[Path]:
    ext = ".pauli" if mapping == "pauli_file" else ".fcidump"
    files = sorted(Path(directory).glob(f"*{ext}"), key=lambda f: parse_geometry_key(f)[1])
    if not files:
        raise StructureError(f"no *{ext} files in {directory}")
    return files


def curve_run(directory: str | Path, mapping: str, cluster: str | ClusterTemplate, reps: int,
              options: VqeOptions | None = None, anchor: float | None = None,
              params: Iterable[float] | None = None, workers: int = 1) -> list[SweepRecord]:
    """Sweep every geometry file of a directory in ascending parameter order.

    With the adiabatic strategy the anchor point (default: lowest exact
    energy, i.e. the equilibrium geometry) is solved from random starts and
    each further point is started from its converged neighbour, outward in
    both directions.
    """
    options = options or VqeOptions()
    files = curve_files(directory, mapping)
    if params is not None:
        wanted = [float(p) for p in params]
        files = [f for f in files if any(abs(parse_geometry_key(f)[1] - w) < 1e-9 for w in wanted)]
    points = []
    for f in files:
        system, param = parse_geometry_key(f)
        points.append((system, param, load_hamiltonian(f, mapping)))
    widths = {h.n_qubits for _, _, h in points}
    if len(widths) != 1:
        raise StructureError(f"curve files have mixed qubit counts {sorted(widths)}")
    n = widths.pop()
    template = cluster if isinstance(cluster, ClusterTemplate) else resolve_template(cluster, n)
    return _run_path(points, template, reps, options, anchor, workers)


# --- rendering -----------------------------------------------------------------

def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        row = []
        for name in CSV_COLUMNS:
            v = getattr(r, name)
            row.append(repr(float(v)) if isinstance(v, float) else v)
        writer.writerow(row)
    return buf.getvalue()


def records_from_csv(text: str) -> list[SweepRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise StructureError(f"unexpected CSV columns {reader.fieldnames}")
    types = {f.name: f.type for f in fields(SweepRecord)}
    out = []
    for row in reader:
        kwargs = {}
        for name in CSV_COLUMNS:
            t = types[name]
            kwargs[name] = float(row[name]) if t == "float" else int(row[name]) if t == "int" else row[name]
        out.append(SweepRecord(**kwargs))
    return out


def records_to_json(records: Iterable[SweepRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=1, allow_nan=True) + "\n"


def records_from_json(text: str) -> list[SweepRecord]:
    return [SweepRecord(**d) for d in json.loads(text)]


def read_records(path: str | Path) -> list[SweepRecord]:
    text = Path(path).read_text()
    return records_from_json(text) if text.lstrip().startswith("[") else records_from_csv(text)


def report_table(records: Sequence[SweepRecord], fmt: str = "text") -> str:
    """Group by (system, cluster) and list ``param reps depth delta_Ec`` rows."""
    if not records:
        return "" if fmt == "text" else "system,model_param,cluster,reps,depth,delta_Ec\n"
    blocks: dict[tuple[str, str], list[SweepRecord]] = {}
    for r in records:
        blocks.setdefault((r.system, r.cluster), []).append(r)
    if fmt == "csv":
        lines = ["system,model_param,cluster,reps,depth,delta_Ec"]
        for (system, cluster), rows in blocks.items():
            for r in sorted(rows, key=lambda r: (r.model_param, r.reps)):
                lines.append(f"{system},{r.model_param:g},{cluster},{r.reps},{r.depth},{r.delta_Ec:.5f}")
        return "\n".join(lines) + "\n"
    out = []
    header = f"{'system':<24} {'param':>7} {'cluster':>7} {'reps':>4} {'depth':>5} {'dE_c':>9}"
    out.append(header)
    out.append("-" * len(header))
    for (system, cluster), rows in blocks.items():
        first = True
        for r in sorted(rows, key=lambda r: (r.model_param, r.reps)):
            dec = "failed" if r.failed else f"{r.delta_Ec:.5f}"
            label = system if first else ""
            out.append(f"{label:<24} {r.model_param:>7g} {cluster if first else '':>7} "
                       f"{r.reps:>4d} {r.depth:>5d} {dec:>9}")
            first = False
        out.append("-" * len(header))
    return "\n".join(out) + "\n"
