"""Command-line interface: simulate, check, filippov2, sweep.

Exit codes: 0 success, 1 usage/parse errors, 2 failed framework check,
3 runtime errors (gap violations, collisions, origin-hit ill-posedness).
Output is fully deterministic: identical invocations give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import scenario_io
from .core import (BondsimError, CollisionSingularity, GapViolation,
                   ParseError, RootFindFailure, Scenario, SinkError,
                   UnknownScenario)
from .filippov2 import F2Params, relative_energy, solve_filippov
from .framework import cs_check, km_check
from .integrator import DEFAULT_GAP_FLOOR, simulate

_USAGE_ERRORS = (ParseError, UnknownScenario)
_RUNTIME_ERRORS = (GapViolation, CollisionSingularity, RootFindFailure,
                   SinkError)


def _load_scenario(ref: str) -> Scenario:
    if ref.startswith("builtin:"):
        return scenario_io.builtin(ref[len("builtin:"):])
    return scenario_io.parse_scenario(Path(ref).read_text())


def _override(s: Scenario, dt=None, t_end=None) -> Scenario:
    if dt is None and t_end is None:
        return s
    return Scenario(s.model, s.params, s.target, s.initial,
                    dt if dt is not None else s.dt,
                    t_end if t_end is not None else s.t_end,
                    nu=s.nu, weight=s.weight, notes=s.notes)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_simulate(args) -> int:
    s = _override(_load_scenario(args.scenario), args.dt, args.t_end)
    traj = simulate(s, gap_floor=args.gap_floor, stride=args.stride)
    _emit(scenario_io.series_to_string(traj, args.format), args.out)
    return 0


def _cmd_check(args) -> int:
    s = _load_scenario(args.scenario)
    if s.model == "kuramoto-bond":
        verdict = km_check(s.initial, s.params, s.target)
    elif s.model == "cs-bond":
        w = s.weight if s.weight is not None else scenario_io.ALGEBRAIC
        verdict = cs_check(s.initial, s.params, s.target, w)
    else:
        sys.stderr.write("UnknownModel: no framework check for "
                         f"{s.model}\n")
        return 1
    sys.stdout.write(json.dumps(verdict.to_dict(), indent=1) + "\n")
    return 0 if verdict.overall else 2


def _cmd_filippov2(args) -> int:
    p = F2Params.from_couplings(args.k0, args.k1, args.k2, args.dinf)
    result = solve_filippov(p, args.x0, args.v0, args.t_max)
    doc = {
        "params": {"gamma2": p.gamma2, "kappa2": p.kappa2, "dinf": p.dinf},
        "regime": {"tag": result.regime.tag,
                   "discriminant": result.regime.discriminant},
        "segments": [
            {"t_start": seg.t_start, "t_end": seg.t_end, "branch": seg.branch,
             "x_entry": seg.x_entry, "v_entry": seg.v_entry}
            for seg in result.segments],
        "collision_times": [float(t) for t in result.collision_times],
        "verdict": {"kind": result.verdict.kind,
                    "limit": result.verdict.limit,
                    "t_hit": result.verdict.t_hit},
    }
    sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    if args.out is not None:
        ts = np.linspace(0.0, min(args.t_max, result.segments[-1].t_end)
                         if result.segments else 0.0, args.samples)
        if result.segments:
            x, v = result.eval_at(ts)
            e = relative_energy(p, x, v)
        else:
            x = v = e = np.zeros_like(ts)
        lines = ["t,x,v,E"]
        for row in zip(ts, x, v, e):
            lines.append(",".join(repr(float(val)) for val in row))
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 3 if result.verdict.kind == "origin-hit" else 0


def _cmd_sweep(args) -> int:
    s = _load_scenario(args.scenario)
    try:
        values = [float(tok) for tok in args.values.split(",") if tok.strip()]
    except ValueError:
        sys.stderr.write(f"ParseError: bad --values list {args.values!r}\n")
        return 1
    if not values:
        sys.stderr.write("ParseError: empty --values list\n")
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = False
    for value in values:
        params = s.params.replace(**{args.param: value})
        run = Scenario(s.model, params, s.target, s.initial, s.dt, s.t_end,
                       nu=s.nu, weight=s.weight, notes=s.notes)
        name = f"{args.param}_{value:g}.{args.format}"
        try:
            traj = simulate(run, gap_floor=args.gap_floor)
            (out_dir / name).write_text(
                scenario_io.series_to_string(traj, args.format))
            sys.stdout.write(f"{name}\n")
        except _RUNTIME_ERRORS as exc:
            sys.stderr.write(f"{type(exc).__name__}: {args.param}={value:g}: "
                             f"{exc}\n")
            failed = True
    return 3 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bondsim",
        description="Simulate bonded Kuramoto / Cucker-Smale ensembles, "
                    "check order frameworks, and solve the two-particle "
                    "piecewise system exactly.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario, emit the series")
    sim.add_argument("--scenario", required=True,
                     help="scenario file path or builtin:NAME "
                          f"(names: {', '.join(scenario_io.BUILTIN_NAMES)})")
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--t-end", type=float, default=None)
    sim.add_argument("--stride", type=int, default=1)
    sim.add_argument("--gap-floor", type=float, default=DEFAULT_GAP_FLOOR)
    sim.add_argument("--out", default=None, help="output file (default stdout)")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.set_defaults(func=_cmd_simulate)

    chk = sub.add_parser("check", help="evaluate the sufficient-condition framework")
    chk.add_argument("--scenario", required=True)
    chk.set_defaults(func=_cmd_check)

    fil = sub.add_parser("filippov2",
                         help="exact two-particle 1D solver (relative coordinates)")
    fil.add_argument("--x0", type=float, required=True)
    fil.add_argument("--v0", type=float, required=True)
    fil.add_argument("--k0", type=float, default=0.0)
    fil.add_argument("--k1", type=float, default=1.0)
    fil.add_argument("--k2", type=float, default=1.0)
    fil.add_argument("--dinf", type=float, default=1.0)
    fil.add_argument("--t-max", type=float, default=50.0)
    fil.add_argument("--samples", type=int, default=1001)
    fil.add_argument("--out", default=None, help="sampled (t,x,v,E) CSV file")
    fil.set_defaults(func=_cmd_filippov2)

    swp = sub.add_parser("sweep", help="independent runs over one coupling")
    swp.add_argument("--scenario", required=True)
    swp.add_argument("--param", choices=("kappa0", "kappa1", "kappa2"),
                     required=True)
    swp.add_argument("--values", required=True, help="comma-separated list")
    swp.add_argument("--out-dir", required=True)
    swp.add_argument("--format", choices=("csv", "json"), default="csv")
    swp.add_argument("--gap-floor", type=float, default=DEFAULT_GAP_FLOOR)
    swp.set_defaults(func=_cmd_sweep)
    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    except _RUNTIME_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 3
    except FileNotFoundError as exc:
        sys.stderr.write(f"FileNotFoundError: {exc}\n")
        return 1
    except BondsimError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
