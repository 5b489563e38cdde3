"""A-priori gap bounds and the sufficient conditions for collision-free order.

The bounds come straight from the initial energy: every pairwise gap along a
solution stays within sqrt(2 N E(0) / kappa2) of its target spacing as long
as the energy is non-increasing.  The checks evaluate each inequality of the
collision-avoidance / synchronization framework and report a signed margin
(positive = satisfied, with room) so sweeps can map distance to the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (CSState, KuramotoState, ModelParams, TargetMatrix,
                   ZeroKappa2)
from .cucker_smale import CommWeight, psi_eval
from .energy import cs_energy, km_energy

PSI_SCAN_POINTS = 10001     # dense sampling of psi on [0, U], endpoints included


@dataclass(frozen=True)
class BoundsReport:
    upper: float      # max target spacing + sqrt(2 N E0 / kappa2)
    lower: float      # min target spacing - sqrt(2 N E0 / kappa2)
    e0: float


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    margin: float


@dataclass(frozen=True)
class FrameworkVerdict:
    conditions: tuple
    overall: bool
    bounds: BoundsReport
    explicit: Optional[Condition] = None

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = {
            "overall": self.overall,
            "bounds": {"upper": self.bounds.upper, "lower": self.bounds.lower,
                       "e0": self.bounds.e0},
            "conditions": [
                {"name": c.name, "passed": c.passed, "margin": c.margin}
                for c in self.conditions],
        }
        if self.explicit is not None:
            d["explicit"] = {"name": self.explicit.name,
                             "passed": self.explicit.passed,
                             "margin": self.explicit.margin}
        return d


def _bounds(e0: float, target: TargetMatrix, kappa2: float) -> BoundsReport:
    if kappa2 <= 0:
        raise ZeroKappa2("the gap bounds require kappa2 > 0")
    off = target.offdiag()
    spread = float(np.sqrt(2.0 * target.n * e0 / kappa2))
    return BoundsReport(float(off.max()) + spread, float(off.min()) - spread, e0)


def km_bounds(state0: KuramotoState, params: ModelParams,
              target: TargetMatrix) -> BoundsReport:
    return _bounds(km_energy(state0, params, target).total, target, params.kappa2)


def cs_bounds(state0: CSState, params: ModelParams, target: TargetMatrix,
              w: CommWeight) -> BoundsReport:
    return _bounds(cs_energy(state0, params, target, w).total, target,
                   params.kappa2)


def km_check(state0: KuramotoState, params: ModelParams,
             target: TargetMatrix) -> FrameworkVerdict:
    """Evaluate the Kuramoto collision-avoidance/synchronization conditions.

    Alongside the implicit condition set, the explicit initial-data
    inequality  sum_{i<j} (|gap| - tgt)^2 <= min{(min tgt)^2, (pi - max tgt)^2}
    is reported separately; the two can disagree on edge cases.
    """
    n = state0.n
    e0 = km_energy(state0, params, target).total
    off = target.offdiag()
    min_t, max_t = float(off.min()), float(off.max())
    if params.kappa2 > 0:
        bounds = _bounds(e0, target, params.kappa2)
    else:
        bounds = BoundsReport(np.inf, -np.inf, e0)
    upper = bounds.upper

    gaps = np.abs(state0.theta[None, :] - state0.theta[:, None])
    max_gap0 = float(gaps[~np.eye(n, dtype=bool)].max()) if n > 1 else 0.0

    margin_a = min(upper - max_gap0, np.pi - upper)
    cond_a = Condition("initial-spread-in-invariant-set",
                       bool(max_gap0 <= upper and upper < np.pi),
                       float(margin_a))

    bound_b = params.kappa2 * min_t ** 2 / (2 * n)
    cond_b = Condition("energy-below-collision-bound", bool(e0 < bound_b),
                       float(bound_b - e0))

    cos_u = np.cos(upper) if np.isfinite(upper) else -1.0
    damping = float(params.kappa0 * cos_u + params.kappa1)
    cond_c = Condition("positive-damping-at-upper-bound", damping > 0, damping)

    cond_d = Condition("positive-kappa2", params.kappa2 > 0, params.kappa2)

    iu = np.triu_indices(n, 1)
    lhs = float(np.sum((gaps[iu] - target.entries[iu]) ** 2))
    rhs = min(min_t ** 2, (np.pi - max_t) ** 2)
    explicit = Condition("explicit-initial-data-inequality", bool(lhs <= rhs),
                         float(rhs - lhs))

    conds = (cond_a, cond_b, cond_c, cond_d)
    return FrameworkVerdict(conds, all(c.passed for c in conds), bounds, explicit)


def cs_check(state0: CSState, params: ModelParams, target: TargetMatrix,
             w: CommWeight) -> FrameworkVerdict:
    """Evaluate the CS collision-avoidance/flocking conditions."""
    n = state0.n
    e0 = cs_energy(state0, params, target, w).total
    off = target.offdiag()
    min_t, max_t = float(off.min()), float(off.max())
    if params.kappa2 > 0:
        bounds = _bounds(e0, target, params.kappa2)
        spread = np.sqrt(2.0 * n * e0 / params.kappa2)
    else:
        bounds = BoundsReport(np.inf, -np.inf, e0)
        spread = np.inf
    upper = bounds.upper

    diff = state0.x[None, :, :] - state0.x[:, None, :]
    r = np.sqrt((diff ** 2).sum(axis=2))
    mask = ~np.eye(n, dtype=bool)
    min_r0 = float(r[mask].min()) if n > 1 else np.inf
    max_r0 = float(r[mask].max()) if n > 1 else 0.0

    cond_a = Condition("initially-separated", bool(min_r0 > 0), min_r0)
    cond_b = Condition("energy-below-collision-bound", bool(min_t > spread),
                       float(min_t - spread))
    cond_c = Condition("initial-spread-in-invariant-set",
                       bool(max_r0 <= upper), float(upper - max_r0))
    kmin = min(params.kappa0, params.kappa1, params.kappa2)
    cond_d = Condition("positive-couplings", kmin > 0, kmin)

    span = upper if np.isfinite(upper) else 2.0 * max(max_r0, max_t, 1.0)
    psi_m = float(np.min(psi_eval(w, np.linspace(0.0, span, PSI_SCAN_POINTS))))
    cond_e = Condition("positive-psi-min", psi_m > 0, psi_m)

    conds = (cond_a, cond_b, cond_c, cond_d, cond_e)
    return FrameworkVerdict(conds, all(c.passed for c in conds), bounds)
