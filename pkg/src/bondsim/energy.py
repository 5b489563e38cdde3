"""Energy functionals, production rates, and the energy-balance residual.

Both models satisfy E(t) + integral of the production rate = E(0) along
exact solutions; the residual of that identity on a simulated trajectory
(with composite-Simpson quadrature, matching RK4's order) measures genuine
integration error.  Energies use the full ordered double sums; the halved
i<j form is identical and asserted once in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (CSState, KuramotoState, ModelParams, TargetMatrix,
                   TooFewSamples)
from .cucker_smale import CommWeight, _check_separated, _pairwise, psi_eval


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    potential: float
    total: float
    production: float


def km_energy(state: KuramotoState, params: ModelParams,
              target: TargetMatrix) -> EnergyReport:
    """Kinetic/potential/total energy and production rate of the bonded Kuramoto model."""
    th, om = state.theta, state.omega
    n = state.n
    dth = th[None, :] - th[:, None]
    dom = om[None, :] - om[:, None]
    kinetic = 0.5 * float(np.sum(om ** 2))
    potential = (params.kappa2 / (4 * n)) * float(
        np.sum((np.abs(dth) - target.entries) ** 2))
    production = (1.0 / (2 * n)) * float(
        np.sum((params.kappa0 * np.cos(dth) + params.kappa1) * dom ** 2))
    return EnergyReport(kinetic, potential, kinetic + potential, production)


def cs_energy(state: CSState, params: ModelParams, target: TargetMatrix,
              w: CommWeight) -> EnergyReport:
    """Kinetic/potential/total energy and production rate of the bonded CS model."""
    x, v = state.x, state.v
    n = state.n
    diff, r = _pairwise(x)
    _check_separated(r)
    dvel = v[None, :, :] - v[:, None, :]
    kinetic = 0.5 * float(np.sum(v ** 2))
    potential = (params.kappa2 / (4 * n)) * float(
        np.sum((r - target.entries) ** 2))
    sq = (dvel ** 2).sum(axis=2)
    production = (params.kappa0 / (2 * n)) * float(np.sum(psi_eval(w, r) * sq))
    r_safe = r + np.eye(n)
    radial = (dvel * diff).sum(axis=2) / r_safe     # diagonal contributes zero
    production += (params.kappa1 / (2 * n)) * float(np.sum(radial ** 2))
    return EnergyReport(kinetic, potential, kinetic + potential, production)


def cumulative_simpson(y, dx: float) -> np.ndarray:
    """Cumulative integral of uniformly sampled y by composite Simpson.

    Even prefixes use plain composite Simpson; odd prefixes correct the first
    interval with the quadratic through the first three samples.  Needs at
    least 3 samples.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 3:
        raise TooFewSamples("Simpson quadrature needs at least 3 samples")
    out = np.zeros_like(y)
    out[1] = dx * (5.0 * y[0] + 8.0 * y[1] - y[2]) / 12.0
    for k in range(2, y.shape[0]):
        out[k] = out[k - 2] + dx * (y[k - 2] + 4.0 * y[k - 1] + y[k]) / 3.0
    return out


def energy_balance_residual(traj) -> float:
    """max_k | E(t_k) + Quadrature(P, [0, t_k]) - E(0) | over the trajectory grid."""
    total = traj.e_total
    if total.shape[0] < 3:
        raise TooFewSamples("need at least 3 samples for the balance residual")
    dx = float(traj.times[1] - traj.times[0])
    integral = cumulative_simpson(traj.production, dx)
    return float(np.max(np.abs(total + integral - total[0])))
