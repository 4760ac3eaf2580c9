"""Command-line entry point.

    lmesim <scenario> --config run.ini [--out table.csv] [--threads N] [--step H]

The subcommand picks the scenario kind (overriding any ``kind`` in the
config file); ``--step`` overrides the integrator step.  Exit codes:
0 success, 1 configuration/validation problem, 2 numerical failure of a
single-trajectory run (sweep-point failures are recorded in the CSV status
column instead).
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import replace

from .errors import (
    ConfigError,
    ConvergenceError,
    IntegrationError,
    PositivityError,
    QuadratureError,
    StabilityError,
)
from .scenarios import KINDS, emit_csv, load_config, run_scenario

_NUMERICAL_ERRORS = (
    IntegrationError, ConvergenceError, StabilityError,
    PositivityError, QuadratureError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmesim",
        description="two-qubit open-system simulator: trajectories, steady "
                    "states and parameter sweeps, written as CSV",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="scenario")
    descriptions = {
        "evolve": "undriven trajectory with thermodynamic observables",
        "steady": "undriven steady state (covariance + density matrix)",
        "sweep-boundary": "steady entropy production over a (T1/T2, eps1/eps2) grid",
        "sweep-detuning": "steady J1 versus the splitting difference",
        "sweep-scaling": "|J1| versus zeta^2 or lambda^2",
        "relaxation": "tau0, tau_r and their ratio versus zeta^2",
        "driven": "driven trajectory with effective-temperature diagnostics",
    }
    for kind in KINDS:
        name = kind.replace("_", "-")
        cmd = sub.add_parser(name, help=descriptions[name])
        cmd.add_argument("--config", required=True, help="scenario config file")
        cmd.add_argument("--out", default=None, help="output CSV path "
                         "(default: from config, else <scenario>.csv)")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker processes for sweeps (default: all cores)")
        cmd.add_argument("--step", type=float, default=None,
                         help="integrator step override")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 1
    except (OSError, configparser.Error, UnicodeDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    overrides = {"kind": args.command.replace("-", "_")}
    if args.out is not None:
        overrides["out"] = args.out
    if args.threads is not None:
        if args.threads < 1:
            print("config error: --threads must be >= 1", file=sys.stderr)
            return 1
        overrides["threads"] = args.threads
    if args.step is not None:
        if not args.step > 0:
            print("config error: --step must be positive", file=sys.stderr)
            return 1
        overrides["integrator"] = replace(cfg.integrator, step=args.step)
    cfg = replace(cfg, **overrides)

    try:
        table = run_scenario(cfg)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    out = cfg.out or f"{cfg.kind}.csv"
    emit_csv(table, out)
    print(f"wrote {out} ({len(table.rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
