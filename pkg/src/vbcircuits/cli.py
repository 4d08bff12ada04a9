"""Command-line driver: ``vbcircuits {ising,molecule,curve,report}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .experiments import (SweepRecord, VqeOptions, curve_run, data_path, ising_sweep,
                          molecule_run, read_records, records_to_csv, records_to_json,
                          report_table)
from .fermion import MAPPINGS


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma list of values."""
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(v) for v in parts)
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_reps(text: str) -> list[int]:
    values = [int(v) for v in text.split(",") if v.strip()]
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"reps must be non-negative integers, got {text!r}")
    return values


def _resolve(path: str) -> Path:
    # Bare names of bundled data (e.g. "h2_sto3g") are looked up in the package.
    p = Path(path)
    if not p.exists() and data_path(path).exists():
        return data_path(path)
    return p


def _options(args) -> VqeOptions:
    return VqeOptions(restarts=args.restarts, seed=args.seed, max_iterations=args.max_iter,
                      strategy=args.strategy, shots=args.shots)


def _add_vqe_flags(p: argparse.ArgumentParser):
    p.add_argument("--cluster", required=True, help="unit2, 4q, A, B, C or a template file")
    p.add_argument("--reps", type=parse_reps, default=[1], help="one value or a comma list")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=["default", "adiabatic"], default="default")
    p.add_argument("--anchor", type=float, default=None,
                   help="adiabatic start point (default: lowest exact energy)")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--shots", type=int, default=None, help="sampled objective (demo only)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", default=None, help="write records here (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vbcircuits", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ising", help="transverse-field Ising sweep over a = h = J + 1")
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--topology", choices=["ring", "chain"], default="ring")
    p.add_argument("--grid", type=parse_grid, required=True)
    _add_vqe_flags(p)

    p = sub.add_parser("molecule", help="single FCIDUMP or Pauli-sum file")
    p.add_argument("source")
    p.add_argument("--mapping", choices=[*MAPPINGS, "pauli_file"], default=None)
    _add_vqe_flags(p)

    p = sub.add_parser("curve", help="directory of <system>_<param> files")
    p.add_argument("directory")
    p.add_argument("--mapping", choices=[*MAPPINGS, "pauli_file"], default="jw")
    p.add_argument("--grid", type=parse_grid, default=None, help="restrict to these parameters")
    _add_vqe_flags(p)

    p = sub.add_parser("report", help="render saved records as a ledger")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("-o", "--output", default=None)
    return parser


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def run(args) -> list[SweepRecord]:
    records: list[SweepRecord] = []
    opts = _options(args)
    for reps in args.reps:
        if args.command == "ising":
            records += ising_sweep(args.sites, args.cluster, reps, args.grid, opts,
                                   topology=args.topology, anchor=args.anchor,
                                   workers=args.workers)
        elif args.command == "molecule":
            source = _resolve(args.source)
            mapping = args.mapping or ("pauli_file" if source.suffix == ".pauli" else "jw")
            records.append(molecule_run(source, mapping, args.cluster, reps, opts))
        else:
            records += curve_run(_resolve(args.directory), args.mapping, args.cluster, reps,
                                 opts, anchor=args.anchor, params=args.grid,
                                 workers=args.workers)
    return records


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "report":
            records = [r for path in args.inputs for r in read_records(path)]
            _emit(report_table(records, args.format), args.output)
            return 0
        records = run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = records_to_json(records) if args.format == "json" else records_to_csv(records)
    _emit(text, args.output)
    failed = [r for r in records if r.failed]
    for r in failed:
        print(f"failed: {r.system} {r.model_param:g} reps={r.reps}: {r.error}", file=sys.stderr)
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
