"""Shared domain types, target-matrix construction, and scenario validation.

Value types here are deliberately dumb containers: constructors normalize
their payload to float arrays but do not enforce invariants, so that
``validate_scenario`` can report every violation under its own named error.
The factory functions (``target_from_phases``, ``target_from_points``) do
guarantee the TargetMatrix invariants by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

if TYPE_CHECKING:
    from .cucker_smale import CommWeight


# ---------------------------------------------------------------------------
# error hierarchy

class BondsimError(Exception):
    """Base class for every error raised by this library."""


class DuplicateTarget(BondsimError):
    pass


class DimensionMismatch(BondsimError):
    pass


class InvalidStep(BondsimError):
    pass


class InvalidHorizon(BondsimError):
    pass


class InvalidCoupling(BondsimError):
    pass


class AsymmetricTarget(BondsimError):
    pass


class InvalidTarget(BondsimError):
    pass


class NonFiniteValue(BondsimError):
    pass


class UnknownModel(BondsimError):
    pass


class OutsideInjectivityRadius(BondsimError):
    pass


class NegativeRadius(BondsimError):
    pass


class CollisionSingularity(BondsimError):
    """Two agents coincide, so a unit vector / sgn term is undefined."""

    def __init__(self, i: int, j: int, message: str = ""):
        self.pair = (i, j)
        super().__init__(message or f"agents {i} and {j} coincide")


class ZeroKappa2(BondsimError):
    pass


class GapViolation(BondsimError):
    """Minimum pairwise gap fell below the integrator's gap floor.

    Carries the offending pair, the time, and the partial trajectory
    accumulated before the abort (``partial``; may be None).
    """

    def __init__(self, i: int, j: int, t: float, partial=None):
        self.pair = (i, j)
        self.t = t
        self.partial = partial
        super().__init__(f"gap between agents {i} and {j} below floor at t={t}")


class SingleAgent(BondsimError):
    pass


class TooFewSamples(BondsimError):
    pass


class NonpositiveSamples(BondsimError):
    pass


class RootFindFailure(BondsimError):
    pass


class ParseError(BondsimError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class UnknownScenario(BondsimError):
    pass


class SinkError(BondsimError):
    pass


# ---------------------------------------------------------------------------
# value types

MODEL_TAGS = ("kuramoto-bond", "kuramoto-first-order", "cs-bond")


@dataclass(frozen=True)
class ModelParams:
    """Coupling strengths: alignment, bonding-velocity, bonding-position."""

    kappa0: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        object.__setattr__(self, "kappa0", float(self.kappa0))
        object.__setattr__(self, "kappa1", float(self.kappa1))
        object.__setattr__(self, "kappa2", float(self.kappa2))

    def replace(self, **kw) -> "ModelParams":
        d = {"kappa0": self.kappa0, "kappa1": self.kappa1, "kappa2": self.kappa2}
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True, eq=False)
class TargetMatrix:
    """Symmetric zero-diagonal matrix of desired pairwise spacings."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def offdiag(self) -> np.ndarray:
        mask = ~np.eye(self.n, dtype=bool)
        return self.entries[mask]


@dataclass(frozen=True, eq=False)
class KuramotoState:
    """Phases (unwrapped, radians) and frequencies of N oscillators at time t."""

    t: float
    theta: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def components(self):
        return self.theta, self.omega


@dataclass(frozen=True, eq=False)
class CSState:
    """Positions and velocities of N particles in R^d at time t."""

    t: float
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", np.atleast_2d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "v", np.atleast_2d(np.asarray(self.v, dtype=float)))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def components(self):
        return self.x, self.v


State = Union[KuramotoState, CSState]


@dataclass(frozen=True, eq=False)
class Scenario:
    """A complete simulation setup: model, parameters, targets, initial data, grid."""

    model: str
    params: ModelParams
    target: TargetMatrix
    initial: State
    dt: float
    t_end: float
    nu: Optional[np.ndarray] = None
    weight: Optional["CommWeight"] = None
    notes: str = ""

    def __post_init__(self):
        if self.nu is not None:
            object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t_end", float(self.t_end))


# ---------------------------------------------------------------------------
# target construction

def target_from_phases(theta_star) -> TargetMatrix:
    """Pairwise spacings |theta_i* - theta_j*| of a reference phase layout."""
    ts = np.asarray(theta_star, dtype=float)
    if ts.ndim != 1 or ts.shape[0] < 2:
        raise DimensionMismatch("need a 1-d array of at least two target phases")
    entries = np.abs(ts[None, :] - ts[:, None])
    off = ~np.eye(ts.shape[0], dtype=bool)
    if np.any(entries[off] == 0.0):
        i, j = np.argwhere((entries == 0.0) & off)[0]
        raise DuplicateTarget(f"target phases {i} and {j} coincide")
    return TargetMatrix(entries)


def target_from_points(points) -> TargetMatrix:
    """Pairwise Euclidean distances of a reference point configuration."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        raise DimensionMismatch("need at least two target points")
    diff = pts[None, :, :] - pts[:, None, :]
    entries = np.sqrt((diff ** 2).sum(axis=2))
    off = ~np.eye(pts.shape[0], dtype=bool)
    if np.any(entries[off] == 0.0):
        i, j = np.argwhere((entries == 0.0) & off)[0]
        raise DuplicateTarget(f"target points {i} and {j} coincide")
    return TargetMatrix(entries)


# ---------------------------------------------------------------------------
# validation

def _check_target(target: TargetMatrix, n: int):
    e = target.entries
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise InvalidTarget("target matrix must be square")
    if e.shape[0] != n:
        raise DimensionMismatch(
            f"target is {e.shape[0]}x{e.shape[0]} but the state has {n} agents")
    if not np.all(np.isfinite(e)):
        raise NonFiniteValue("target matrix has non-finite entries")
    bad = np.argwhere(e != e.T)
    if bad.size:
        i, j = bad[0]
        raise AsymmetricTarget(f"target entries ({i},{j}) and ({j},{i}) differ")
    if np.any(np.diag(e) != 0.0):
        raise InvalidTarget("target diagonal must be zero")
    off = ~np.eye(e.shape[0], dtype=bool)
    if np.any(e[off] <= 0.0):
        raise InvalidTarget("off-diagonal target spacings must be positive")


def validate_scenario(s: Scenario) -> None:
    """Check every type invariant and cross-field consistency; raise on the first violation."""
    if s.model not in MODEL_TAGS:
        raise UnknownModel(f"unknown model tag {s.model!r}")
    for name in ("kappa0", "kappa1", "kappa2"):
        k = getattr(s.params, name)
        if not np.isfinite(k) or k < 0:
            raise InvalidCoupling(f"{name} must be finite and nonnegative, got {k}")
    if not np.isfinite(s.dt) or s.dt <= 0:
        raise InvalidStep(f"dt must be positive, got {s.dt}")
    if not np.isfinite(s.t_end) or s.t_end <= 0:
        raise InvalidHorizon(f"t_end must be positive, got {s.t_end}")

    if s.model in ("kuramoto-bond", "kuramoto-first-order"):
        if not isinstance(s.initial, KuramotoState):
            raise DimensionMismatch(f"{s.model} needs a KuramotoState initial state")
        st = s.initial
        if st.theta.ndim != 1 or st.omega.ndim != 1:
            raise DimensionMismatch("theta and omega must be 1-d")
        if st.theta.shape != st.omega.shape:
            raise DimensionMismatch("theta and omega lengths differ")
        if st.n < 1:
            raise DimensionMismatch("need at least one oscillator")
        if not (np.all(np.isfinite(st.theta)) and np.all(np.isfinite(st.omega))):
            raise NonFiniteValue("initial state has non-finite entries")
    else:
        if not isinstance(s.initial, CSState):
            raise DimensionMismatch("cs-bond needs a CSState initial state")
        st = s.initial
        if st.x.shape != st.v.shape:
            raise DimensionMismatch("x and v shapes differ")
        if st.n < 1:
            raise DimensionMismatch("need at least one particle")
        if not (np.all(np.isfinite(st.x)) and np.all(np.isfinite(st.v))):
            raise NonFiniteValue("initial state has non-finite entries")

    _check_target(s.target, st.n)

    if s.nu is not None:
        if s.nu.shape != (st.n,):
            raise DimensionMismatch("nu length does not match the agent count")
        if not np.all(np.isfinite(s.nu)):
            raise NonFiniteValue("nu has non-finite entries")
