"""Command-line entry point: ``bilayer-gn {coeffs,check,run,orders}``.

Exit codes: 0 success, 1 parse/config, 2 condition violation, 3 I/O,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .diagnostics import ORDER_TARGETS, check_conditions, growth_bound_fit, order_study
from .dynamics import simulate
from .errors import (
    ConditionViolation,
    DegenerateLadder,
    NonPositiveNu,
    NumericalFailure,
    ParseError,
)
from .regime import validate_regime
from .scenario import Scenario, load_scenario

EXIT_OK, EXIT_CONFIG, EXIT_CONDITION, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4

SNAPSHOT_COLUMNS = ("x", "zeta", "v", "b")
DIAGNOSTIC_COLUMNS = ("t", "mass", "E0", "Es", "min_h1", "min_h2", "min_q1", "min_q2", "min_H3", "dt")
STATUSES = ("completed", "halted_H1", "halted_H2", "halted_H3", "failed")

_number_or_null = {"type": ["number", "null"]}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "status", "exit_code", "final_time", "t_final", "steps", "violated_condition",
        "violation_location", "violation_time", "lambda_fit", "C_fit", "growth_ok",
        "mass_initial", "mass_final", "mass_drift", "slopes", "seed", "snapshots",
        "diagnostics", "message", "bottom_norms",
    ],
    "properties": {
        "status": {"enum": list(STATUSES)},
        "exit_code": {"type": "integer", "minimum": 0, "maximum": 4},
        "final_time": {"type": "number"},
        "t_final": {"type": "number"},
        "steps": {"type": "integer", "minimum": 0},
        "violated_condition": {"enum": ["H1", "H2", "H3", None]},
        "violation_location": {"type": ["integer", "null"]},
        "violation_time": _number_or_null,
        "lambda_fit": _number_or_null,
        "C_fit": _number_or_null,
        "growth_ok": {"type": ["boolean", "null"]},
        "mass_initial": {"type": "number"},
        "mass_final": {"type": "number"},
        "mass_drift": {"type": "number"},
        "slopes": {"type": "object", "additionalProperties": {"type": "number"}},
        "seed": {"type": "integer"},
        "snapshots": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "t"],
                "properties": {"path": {"type": "string"}, "t": {"type": "number"}},
            },
        },
        "diagnostics": {"type": "string"},
        "message": {"type": "string"},
        "bottom_norms": {
            "type": "object",
            "required": ["w2inf", "hs3"],
            "properties": {"w2inf": {"type": "number"}, "hs3": {"type": "number"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

log = logging.getLogger("bilayer_gn")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load(args) -> Scenario:
    scenario = load_scenario(args.config)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


# -- subcommands --------------------------------------------------------------

def cmd_coeffs(args, out=None) -> int:
    out = sys.stdout if out is None else out
    scenario = _load(args)
    report = validate_regime(scenario.params)
    print(f"in_SW = {str(report.in_sw).lower()}", file=out)
    print(f"in_CH = {str(report.in_ch).lower()}", file=out)
    for clause in report.violations:
        print(f"violated: {clause}", file=out)
    coeffs = scenario.coefficients()
    width = max(len(k) for k in coeffs.as_dict())
    for name, value in coeffs.as_dict().items():
        print(f"{name:<{width}} = {_fmt(value)}", file=out)
    return EXIT_OK


def cmd_check(args, out=None) -> int:
    out = sys.stdout if out is None else out
    scenario = _load(args)
    params, coeffs = scenario.params, scenario.coefficients()
    report = check_conditions(
        scenario.grid, scenario.initial_state(), scenario.bathymetry(), params, coeffs,
        scenario.control.thresholds,
    )
    for name in ("min_h1", "min_h2", "min_q1", "min_q2", "min_H3"):
        print(f"{name} = {_fmt(getattr(report, name))}", file=out)
    for name in ("ok_H1", "ok_H2", "ok_H3"):
        print(f"{name} = {str(getattr(report, name)).lower()}", file=out)
    if report.ok:
        print("status = ok", file=out)
        return EXIT_OK
    print(f"status = halted_{report.first_failed}", file=out)
    print(f"first_violation_location = {report.first_violation_location}", file=out)
    return EXIT_CONDITION


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_run(result, scenario: Scenario, out_dir: Path, exit_code: int) -> dict:
    """Write snapshot CSVs, the diagnostics CSV and ``summary.json``; return the summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    b = scenario.bathymetry().b
    x = scenario.grid.x
    snaps = []
    for i, st in enumerate(result.snapshots):
        path = snap_dir / f"snapshot_{i:05d}.csv"
        _write_csv(path, SNAPSHOT_COLUMNS, zip(x, st.zeta, st.v, b))
        snaps.append({"path": str(path.relative_to(out_dir)), "t": float(st.t)})
    diag_path = out_dir / "diagnostics.csv"
    _write_csv(diag_path, DIAGNOSTIC_COLUMNS, ([row[c] for c in DIAGNOSTIC_COLUMNS] for row in result.diagnostics))

    fit = None
    if result.energies:
        fit = growth_bound_fit(result.energies, scenario.params, scenario.control.lambda_cap)
    dx = scenario.grid.dx
    m0 = dx * float(np.sum(result.snapshots[0].zeta)) if result.snapshots else 0.0
    m1 = dx * float(np.sum(result.final_state.zeta))
    summary = {
        "status": result.status,
        "exit_code": exit_code,
        "final_time": float(result.final_state.t),
        "t_final": float(result.t_final),
        "steps": int(result.steps),
        "violated_condition": result.violation,
        "violation_location": result.violation_location,
        "violation_time": result.violation_time,
        "lambda_fit": None if fit is None else fit.lambda_fit,
        "C_fit": None if fit is None else fit.C_fit,
        "growth_ok": None if fit is None else bool(fit.ok),
        "mass_initial": m0,
        "mass_final": m1,
        "mass_drift": abs(m1 - m0),
        "slopes": {},
        "seed": int(scenario.seed),
        "snapshots": snaps,
        "diagnostics": str(diag_path.relative_to(out_dir)),
        "message": result.message,
        "bottom_norms": result.bottom_norms,
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def cmd_run(args, out=None) -> int:
    out = sys.stdout if out is None else out
    scenario = _load(args)
    out_dir = Path(args.out)
    if out_dir.exists() and not out_dir.is_dir():
        raise OSError(f"output path {out_dir} exists and is not a directory")
    out_dir.mkdir(parents=True, exist_ok=True)
    result = simulate(scenario)
    code = {
        "completed": EXIT_OK,
        "failed": EXIT_NUMERIC,
    }.get(result.status, EXIT_CONDITION)
    summary = write_run(result, scenario, out_dir, code)
    print(f"status = {summary['status']}", file=out)
    print(f"final_time = {_fmt(summary['final_time'])}", file=out)
    print(f"mass_drift = {_fmt(summary['mass_drift'])}", file=out)
    if summary["lambda_fit"] is not None:
        print(f"lambda_fit = {_fmt(summary['lambda_fit'])} (ok = {str(summary['growth_ok']).lower()})", file=out)
    if result.message:
        print(f"message = {result.message}", file=out)
    return code


def cmd_orders(args, out=None) -> int:
    out = sys.stdout if out is None else out
    scenario = _load(args)
    config = scenario.order_config()
    results = [order_study(target, config) for target in ORDER_TARGETS]
    print(f"{'target':<18} {'slope':>8}  ladder", file=out)
    for r in results:
        ladder = ", ".join(format(x, ".6g") for x in r.ladder)
        print(f"{r.target:<18} {r.slope:8.4f}  [{ladder}]", file=out)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "orders.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("target", "slope", "ladder", "residual"))
            for r in results:
                for lad, res in zip(r.ladder, r.residuals):
                    w.writerow((r.target, _fmt(r.slope), _fmt(lad), _fmt(res)))
    return EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "check": cmd_check, "run": cmd_run, "orders": cmd_orders}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilayer-gn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario file (key = value text or JSON)")
        p.add_argument("--seed", type=int, default=None, help="overrides control.seed")
        p.add_argument("--out", required=(name == "run"), default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ParseError, NonPositiveNu, DegenerateLadder) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConditionViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
