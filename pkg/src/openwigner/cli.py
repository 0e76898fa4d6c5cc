"""Command-line front end.

    openwigner simulate RUN.spec [--output-dir DIR]
    openwigner verify SCENARIO|all
    openwigner transform RHO.csv [--hbar H] [--p-extent P] [--n-p N] [--out W.csv] [--pgm W.pgm]

Exit status: 0 on success, 1 on invalid input or a failed verification,
2 on numerical blowup.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import List, Optional

from .config import RunSpec, parse_spec
from .errors import IoError, NumericalBlowup, WignerError
from .integrate import evolve
from .oracle import kramers_stationary
from .output import read_density_matrix, write_field, write_pgm, write_trajectory
from .phasespace import PhaseSpaceGrid, WignerState, gaussian_wigner, wigner_from_density_matrix
from .scenarios import run_all, run_scenario, scenario_names

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BLOWUP = 2

log = logging.getLogger("openwigner")


def initial_state(spec: RunSpec, base_dir: str = ".") -> WignerState:
    ini, grid, hbar = spec.initial, spec.grid, spec.params.hbar
    if ini.kind == "gaussian":
        return gaussian_wigner(ini.moments, grid, hbar)
    if ini.kind == "thermal":
        return kramers_stationary(spec.potential, spec.params.mass, ini.kT, grid)
    path = ini.file if os.path.isabs(ini.file) else os.path.join(base_dir, ini.file)
    return wigner_from_density_matrix(read_density_matrix(path), grid, hbar)


def simulate(spec: RunSpec, output_dir: Optional[str] = None, base_dir: str = ".") -> WignerState:
    """Run ``spec`` and write the requested products into ``output_dir``."""
    out = output_dir or spec.output.directory
    formats = spec.output.formats
    W0 = initial_state(spec, base_dir)
    cfg = spec.run_config
    counter = [0]

    def write_snapshot(W: WignerState):
        stem = os.path.join(out, f"field_{counter[0]:03d}")
        counter[0] += 1
        if "field" in formats:
            write_field(stem + ".csv", W)
        if "pgm" in formats:
            write_pgm(stem + ".pgm", W)

    wants_fields = "field" in formats or "pgm" in formats
    final, record = evolve(W0, spec.potential, spec.params, cfg,
                           enforce_constraints=spec.enforce_constraints,
                           on_snapshot=write_snapshot if wants_fields else None)
    if wants_fields and not cfg.snapshot_times:
        write_snapshot(final)
    if "csv" in formats:
        write_trajectory(os.path.join(out, "trajectory.csv"), record)
    last = record.rows[-1]
    log.info("t=%.6g mass=%.17g samples=%d -> %s", last[0], last[1], len(record), out)
    return final


def _cmd_simulate(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {args.spec}: {exc.strerror or exc}") from exc
    base_dir = os.path.dirname(os.path.abspath(args.spec))
    spec = parse_spec(text, base_dir=base_dir)
    simulate(spec, args.output_dir, base_dir)
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_all() if args.scenario == "all" else [run_scenario(args.scenario)]
    for res in results:
        print(res.report(), flush=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


def _cmd_transform(args) -> int:
    rho = read_density_matrix(args.density_matrix)
    q = rho.q
    dq = rho.dq
    p_extent = args.p_extent or math.pi * args.hbar / (2.0 * dq)
    grid = PhaseSpaceGrid(float(q[0]), float(q[0]) + q.size * dq, -p_extent, p_extent,
                          q.size, args.n_p or q.size)
    W = wigner_from_density_matrix(rho, grid, args.hbar)
    write_field(args.out, W)
    if args.pgm:
        write_pgm(args.pgm, W)
    log.info("wrote %s", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openwigner", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a simulation from a spec file")
    p.add_argument("spec")
    p.add_argument("--output-dir", help="overrides output.directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run a named verification scenario")
    p.add_argument("scenario", choices=scenario_names())
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("transform", help="Wigner transform of a position-space density matrix")
    p.add_argument("density_matrix", help="CSV with columns q, q_prime, re, im")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--p-extent", type=float, help="momentum half-width (default pi hbar / 2 dq)")
    p.add_argument("--n-p", type=int, help="momentum points (default: as many as q points)")
    p.add_argument("--out", default="wigner.csv")
    p.add_argument("--pgm", help="also write a heatmap")
    p.set_defaults(func=_cmd_transform)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalBlowup as exc:
        print(f"error: numerical blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (WignerError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
