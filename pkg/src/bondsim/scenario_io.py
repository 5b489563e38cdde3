"""Scenario files, built-in scenarios, and trajectory serialization.

Scenario documents are plain-text key/value sections::

    [model]
    kind = kuramoto-bond            # or kuramoto-first-order | cs-bond
    weight = algebraic              # cs only: constant | algebraic

    [params]
    kappa0 = 1.0
    kappa1 = 5.0
    kappa2 = 10.0
    nu = 0 0 0                      # optional, first-order only

    [target]                        # exactly one of:
    phases_rad = 0 0.25 0.5         #   reference phases (rad or deg suffix)
    points = 1 0 ; 0 1 ; -1 0       #   reference points, ';' separates rows
    matrix = 0 1 ; 1 0              #   explicit spacing matrix

    [initial]
    theta_rad = 0.1 0.2 0.3         # kuramoto (deg suffix also accepted)
    omega = 0 0 0                   # or: omega = constrained
    x = 0 0 ; 1 0 ; 0 1             # cs rows
    v = 0 0 ; 0 0 ; 0 0

    [run]
    dt = 0.01
    t_end = 5.0

Angles always carry an explicit unit suffix; everything is stored in radians
internally.  Numbers serialize with shortest round-trip precision, so
``parse_scenario(emit_scenario(s))`` reproduces ``s`` bit-exactly.
"""

from __future__ import annotations

import io
import json

import numpy as np

from .core import (CSState, KuramotoState, ModelParams, ParseError, Scenario,
                   SinkError, TargetMatrix, UnknownScenario,
                   target_from_phases, target_from_points, validate_scenario)
from .cucker_smale import ALGEBRAIC, CONSTANT_ONE
from .kuramoto import Km1Params, constrained_initial_frequencies

# ---------------------------------------------------------------------------
# parsing

_SECTIONS = ("model", "params", "target", "initial", "run")


def _tokenize(text: str):
    """Yield (line_no, section, key, value) for every assignment."""
    section = None
    seen = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ParseError(ln, f"unknown section [{section}]")
            continue
        if "=" not in line:
            raise ParseError(ln, f"expected 'key = value', got {line!r}")
        if section is None:
            raise ParseError(ln, "assignment before any [section] header")
        key, value = (part.strip() for part in line.split("=", 1))
        if (section, key) in seen:
            raise ParseError(ln, f"duplicate key {key!r} in [{section}]")
        seen.add((section, key))
        yield ln, section, key, value


def _floats(value: str, ln: int) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in value.split()])
    except ValueError:
        raise ParseError(ln, f"could not parse numbers from {value!r}") from None


def _rows(value: str, ln: int) -> np.ndarray:
    rows = [_floats(part, ln) for part in value.split(";") if part.strip()]
    if not rows:
        raise ParseError(ln, "empty row list")
    width = {r.shape[0] for r in rows}
    if len(width) != 1:
        raise ParseError(ln, "rows have inconsistent lengths")
    return np.vstack(rows)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate one scenario document."""
    fields = {}
    for ln, section, key, value in _tokenize(text):
        fields[(section, key)] = (ln, value)

    def take(section, key, required=False):
        if (section, key) in fields:
            return fields.pop((section, key))
        if required:
            raise ParseError(0, f"missing field {key!r} in section [{section}]")
        return None, None

    _, kind = take("model", "kind", required=True)
    ln_w, weight_name = take("model", "weight")
    weight = None
    if weight_name is not None:
        weights = {"constant": CONSTANT_ONE, "algebraic": ALGEBRAIC}
        if weight_name not in weights:
            raise ParseError(ln_w, f"unknown weight {weight_name!r}")
        weight = weights[weight_name]

    kappas = []
    for name in ("kappa0", "kappa1", "kappa2"):
        ln, value = take("params", name, required=True)
        kappas.append(float(_floats(value, ln)[0]))
    params = ModelParams(*kappas)
    ln_nu, nu_text = take("params", "nu")
    nu = _floats(nu_text, ln_nu) if nu_text is not None else None

    target = _parse_target(take)
    initial = _parse_initial(take, kind, params, nu)

    ln, dt = take("run", "dt", required=True)
    dt = float(_floats(dt, ln)[0])
    ln, t_end = take("run", "t_end", required=True)
    t_end = float(_floats(t_end, ln)[0])

    if fields:
        (section, key), (ln, _) = next(iter(fields.items()))
        raise ParseError(ln, f"unrecognized field {key!r} in [{section}]")

    scenario = Scenario(kind, params, target, initial, dt, t_end,
                        nu=nu, weight=weight)
    validate_scenario(scenario)
    return scenario


def _parse_target(take) -> TargetMatrix:
    ln, v = take("target", "phases_rad")
    if v is not None:
        return target_from_phases(_floats(v, ln))
    ln, v = take("target", "phases_deg")
    if v is not None:
        return target_from_phases(np.deg2rad(_floats(v, ln)))
    ln, v = take("target", "points")
    if v is not None:
        return target_from_points(_rows(v, ln))
    ln, v = take("target", "matrix")
    if v is not None:
        return TargetMatrix(_rows(v, ln))
    raise ParseError(0, "missing field: [target] needs phases_rad, "
                        "phases_deg, points, or matrix")


def _parse_initial(take, kind, params, nu):
    if kind in ("kuramoto-bond", "kuramoto-first-order"):
        ln, v = take("initial", "theta_rad")
        if v is not None:
            theta = _floats(v, ln)
        else:
            ln, v = take("initial", "theta_deg")
            if v is None:
                raise ParseError(0, "missing field 'theta_rad' (or 'theta_deg') "
                                    "in section [initial]")
            theta = np.deg2rad(_floats(v, ln))
        ln, v = take("initial", "omega", required=True)
        if v.strip() == "constrained":
            p1 = Km1Params(params.kappa0,
                           nu if nu is not None else np.zeros(theta.shape[0]))
            omega = constrained_initial_frequencies(theta, p1)
        else:
            omega = _floats(v, ln)
        return KuramotoState(0.0, theta, omega)
    ln, v = take("initial", "x", required=True)
    x = _rows(v, ln)
    ln, v = take("initial", "v", required=True)
    vel = _rows(v, ln)
    return CSState(0.0, x, vel)


# ---------------------------------------------------------------------------
# emission

def _fmt(x: float) -> str:
    return repr(float(x))


def _vec(a) -> str:
    return " ".join(_fmt(x) for x in np.asarray(a).ravel())


def _mat(a) -> str:
    return " ; ".join(" ".join(_fmt(x) for x in row) for row in np.asarray(a))


def emit_scenario(s: Scenario) -> str:
    """Serialize a scenario so that parse_scenario() round-trips it bit-exactly."""
    out = []
    for line in s.notes.splitlines():
        out.append(f"# {line}")
    out += ["[model]", f"kind = {s.model}"]
    if s.weight is not None:
        out.append(f"weight = {s.weight.kind}")
    out += ["", "[params]",
            f"kappa0 = {_fmt(s.params.kappa0)}",
            f"kappa1 = {_fmt(s.params.kappa1)}",
            f"kappa2 = {_fmt(s.params.kappa2)}"]
    if s.nu is not None:
        out.append(f"nu = {_vec(s.nu)}")
    out += ["", "[target]", f"matrix = {_mat(s.target.entries)}"]
    out += ["", "[initial]"]
    if isinstance(s.initial, KuramotoState):
        out.append(f"theta_rad = {_vec(s.initial.theta)}")
        out.append(f"omega = {_vec(s.initial.omega)}")
    else:
        out.append(f"x = {_mat(s.initial.x)}")
        out.append(f"v = {_mat(s.initial.v)}")
    out += ["", "[run]", f"dt = {_fmt(s.dt)}", f"t_end = {_fmt(s.t_end)}", ""]
    return "\n".join(out)


# ---------------------------------------------------------------------------
# built-in scenarios

KM_51_THETA0 = np.array([0.1979, 0.2580, 0.2601, 0.4231, 0.4635,
                         0.5011, 0.5947, 0.8710, 0.9262, 0.9722])
KM_51_TARGET_DEG = np.array([0.0, 3.5, 7.0, 12.5, 16.5, 20.5, 24.5,
                             40.0, 45.0, 50.0])

CS2D_52_X0 = np.array([
    [2.9415, 1.0133], [-0.1868, 3.0893], [-2.8378, 0.6900],
    [-1.8895, -2.4844], [1.9088, -2.3172], [0.4133, 0.9212],
    [-0.4425, 0.7271], [-0.8685, -0.5283], [-0.0589, -0.9098],
    [1.0304, -0.2013]])
CS2D_52_V0 = np.array([
    [0.0100, -0.1275], [0.0874, 0.2318], [0.0192, 0.1613],
    [0.0450, 0.0151], [0.0099, -0.0733], [0.0301, -0.1290],
    [-0.1415, -0.1233], [-0.2134, 0.1876], [0.0256, -0.0149],
    [0.1278, -0.1280]])

CS1D_52_X0 = np.array([-29.5926, -16.5471, -8.9365, -3.5433, -0.6838,
                       1.0488, 4.1392, 9.2734, 17.4788, 30.4824])
CS1D_52_XSTAR = np.array([-30.0, -17.0, -9.0, -4.0, -1.0,
                          1.0, 4.0, 9.0, 17.0, 30.0])


def pentagon_targets() -> np.ndarray:
    """Two concentric pentagons (radii 3/2 and 1/2, offset 36 degrees)."""
    outer = np.deg2rad(18.0 + 72.0 * np.arange(5))
    inner = np.deg2rad(54.0 + 72.0 * np.arange(5, 10))
    return np.vstack([
        1.5 * np.column_stack([np.cos(outer), np.sin(outer)]),
        0.5 * np.column_stack([np.cos(inner), np.sin(inner)])])


BUILTIN_NAMES = ("km-5.1", "cs2d-5.2", "cs1d-5.2")


def builtin(name: str) -> Scenario:
    """One of the built-in desk-scale scenarios (BUILTIN_NAMES)."""
    if name == "km-5.1":
        params = ModelParams(1.0, 5.0, 10.0)
        nu = np.zeros(10)
        # zero-momentum initial frequencies via the constrained first-order
        # construction; the raw data pins phases only
        omega0 = constrained_initial_frequencies(
            KM_51_THETA0, Km1Params(params.kappa0, nu))
        return Scenario(
            "kuramoto-bond", params,
            target_from_phases(np.deg2rad(KM_51_TARGET_DEG)),
            KuramotoState(0.0, KM_51_THETA0, omega0),
            dt=1e-2, t_end=5.0, nu=nu,
            notes="10 bonded oscillators; initial frequencies from the "
                  "constrained zero-momentum construction with kappa0=1")
    if name == "cs2d-5.2":
        return Scenario(
            "cs-bond", ModelParams(1.0, 5.0, 10.0),
            target_from_points(pentagon_targets()),
            CSState(0.0, CS2D_52_X0, CS2D_52_V0),
            dt=1e-2, t_end=10.0, weight=ALGEBRAIC,
            notes="10 planar particles relaxing onto two concentric pentagons")
    if name == "cs1d-5.2":
        return Scenario(
            "cs-bond", ModelParams(1.0, 1.0, 40.0),
            target_from_points(CS1D_52_XSTAR[:, None]),
            CSState(0.0, CS1D_52_X0[:, None], np.zeros((10, 1))),
            dt=1e-2, t_end=10.0, weight=ALGEBRAIC,
            notes="10 particles on the line; initial velocities zero "
                  "(zero momentum)")
    raise UnknownScenario(f"no built-in scenario named {name!r}; "
                          f"available: {', '.join(BUILTIN_NAMES)}")


# ---------------------------------------------------------------------------
# trajectory serialization

def _state_columns(state):
    if isinstance(state, KuramotoState):
        n = state.n
        return ([f"theta_{i+1}" for i in range(n)]
                + [f"omega_{i+1}" for i in range(n)])
    n, d = state.n, state.dim
    return ([f"x_{i+1}_{k+1}" for i in range(n) for k in range(d)]
            + [f"v_{i+1}_{k+1}" for i in range(n) for k in range(d)])


DIAG_COLUMNS = ("E_kinetic", "E_potential", "E_total", "production",
                "min_gap", "pos_diam", "vel_diam")


def write_series(traj, fmt: str = "csv", sink=None) -> None:
    """Write the trajectory with diagnostics as CSV or JSON.

    ``sink`` is a file-like object (text mode).  Numbers are printed with
    shortest round-trip precision, so re-parsing reproduces the samples
    bit-exactly.
    """
    if len(traj) == 0:
        raise SinkError("refusing to serialize an empty trajectory")
    if fmt == "csv":
        payload = _series_csv(traj)
    elif fmt == "json":
        payload = _series_json(traj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        sink.write(payload)
    except OSError as exc:
        raise SinkError(str(exc)) from exc


def _state_row(state):
    if isinstance(state, KuramotoState):
        return list(state.theta) + list(state.omega)
    return list(state.x.ravel()) + list(state.v.ravel())


def _series_csv(traj) -> str:
    header = ["t"] + _state_columns(traj.states[0]) + list(DIAG_COLUMNS)
    lines = [",".join(header)]
    for k in range(len(traj)):
        e = traj.energies[k]
        row = ([traj.times[k]] + _state_row(traj.states[k])
               + [e.kinetic, e.potential, e.total, e.production,
                  traj.min_gap[k], traj.pos_diam[k], traj.vel_diam[k]])
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _series_json(traj) -> str:
    doc = {
        "columns": _state_columns(traj.states[0]),
        "times": [float(t) for t in traj.times],
        "states": [[float(x) for x in _state_row(s)] for s in traj.states],
        "diagnostics": {
            "E_kinetic": [e.kinetic for e in traj.energies],
            "E_potential": [e.potential for e in traj.energies],
            "E_total": [e.total for e in traj.energies],
            "production": [e.production for e in traj.energies],
            "min_gap": [float(x) for x in traj.min_gap],
            "pos_diam": [float(x) for x in traj.pos_diam],
            "vel_diam": [float(x) for x in traj.vel_diam],
        },
    }
    return json.dumps(doc, indent=1) + "\n"


def read_series(text: str):
    """Parse a CSV produced by write_series back into (header, value matrix)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(tok) for tok in ln.split(",")]
                     for ln in lines[1:]])
    return header, data


def series_to_string(traj, fmt: str = "csv") -> str:
    buf = io.StringIO()
    write_series(traj, fmt, buf)
    return buf.getvalue()
