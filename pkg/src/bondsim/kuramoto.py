"""Right-hand sides for the Kuramoto models and circle-geometry helpers.

The bonded second-order model drives each pairwise phase gap toward a
prescribed spacing while damping relative frequencies; sgn(0) is taken as 0
so coincident oscillators exert no position force and the RHS stays defined
pointwise.  Phases live unwrapped on the real line throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (KuramotoState, ModelParams, OutsideInjectivityRadius,
                   TargetMatrix)


@dataclass(frozen=True)
class Km1Params:
    """First-order model parameters: coupling strength and natural frequencies."""

    kappa0: float
    nu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kappa0", float(self.kappa0))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))


def kmbf_rhs(state: KuramotoState, params: ModelParams, target: TargetMatrix):
    """Bonded second-order RHS: (dtheta, domega).

    domega_i = (1/N) sum_j [k0 cos(th_j-th_i) + k1] (om_j-om_i)
             + (k2/N) sum_j (|th_j-th_i| - tgt_ij) sgn(th_j-th_i)

    The summand matrix is antisymmetric under i<->j, so sum_i domega_i
    vanishes up to rounding.
    """
    th, om = state.theta, state.omega
    n = state.n
    dth = th[None, :] - th[:, None]          # dth[i, j] = th_j - th_i
    dom = om[None, :] - om[:, None]
    force = (params.kappa0 * np.cos(dth) + params.kappa1) * dom
    force += params.kappa2 * (np.abs(dth) - target.entries) * np.sign(dth)
    return om.copy(), force.sum(axis=1) / n


def km1_rhs(theta, p: Km1Params) -> np.ndarray:
    """First-order RHS: dtheta_i = nu_i + (k0/N) sum_j sin(th_j - th_i)."""
    th = np.asarray(theta, dtype=float)
    n = th.shape[0]
    dth = th[None, :] - th[:, None]
    return p.nu + (p.kappa0 / n) * np.sin(dth).sum(axis=1)


def constrained_initial_frequencies(theta0, p: Km1Params) -> np.ndarray:
    """Initial frequencies that make the second-order flow track the first-order one.

    With nu = 0 the result has exactly zero sum (skew symmetry of sin), which
    is the only zero-momentum construction the model itself supplies.
    """
    return km1_rhs(theta0, p)


def circle_log(theta_i: float, theta_j: float):
    """Geodesic log on the unit circle: (distance, orientation sign).

    Requires |theta_j - theta_i| < pi (the injectivity radius); the boundary
    itself is excluded.
    """
    d = float(theta_j) - float(theta_i)
    if abs(d) >= np.pi:
        raise OutsideInjectivityRadius(
            f"|theta_j - theta_i| = {abs(d)} is not below pi")
    return abs(d), int(np.sign(d))
