"""Order metrics over states and exponential decay-rate fitting over series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import (KuramotoState, NonpositiveSamples, SingleAgent,
                   TargetMatrix, TooFewSamples)

NOISE_FLOOR = 1e-15     # samples at/below this are excluded from log fits


@dataclass(frozen=True)
class DecayFit:
    rate: float                      # fitted exponent, y ~ exp(-rate * t)
    intercept: float                 # ln y at t = 0
    window: Tuple[float, float]
    rms_residual: float              # in log space
    n_samples: int


def _gaps(state):
    if isinstance(state, KuramotoState):
        return np.abs(state.theta[None, :] - state.theta[:, None])
    diff = state.x[None, :, :] - state.x[:, None, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def diameters(state):
    """(position diameter, velocity diameter): the largest pairwise gaps."""
    if state.n < 2:
        raise SingleAgent("diameters need at least two agents")
    pos = float(_gaps(state).max())
    if isinstance(state, KuramotoState):
        vel = float(np.abs(state.omega[None, :] - state.omega[:, None]).max())
    else:
        dv = state.v[None, :, :] - state.v[:, None, :]
        vel = float(np.sqrt((dv ** 2).sum(axis=2)).max())
    return pos, vel


def target_error(state, target: TargetMatrix) -> float:
    """Root-sum-square deviation of the pairwise gaps from their targets.

    Pairwise, hence invariant under rigid translations (and rotations in
    d >= 2) of the whole configuration.
    """
    if state.n < 2:
        raise SingleAgent("target error needs at least two agents")
    iu = np.triu_indices(state.n, 1)
    dev = _gaps(state)[iu] - target.entries[iu]
    return float(np.sqrt(np.sum(dev ** 2)))


def fit_decay(t, y, window: Optional[Tuple[float, float]] = None) -> DecayFit:
    """Least-squares line through (t, ln y); rate is minus the slope.

    The window defaults to the trailing half of the series (skipping the
    initial transient).  Samples at or below the floating noise floor are
    dropped, provided at least 5 usable samples remain.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    lo, hi = float(window[0]), float(window[1])
    in_win = (t >= lo) & (t <= hi)
    if int(in_win.sum()) < 5:
        raise TooFewSamples(f"only {int(in_win.sum())} samples in window")
    usable = in_win & (y > NOISE_FLOOR)
    if int(usable.sum()) < 5:
        raise NonpositiveSamples(
            "fewer than 5 strictly positive samples in window")
    tt, yy = t[usable], np.log(y[usable])
    design = np.column_stack([tt, np.ones_like(tt)])
    (slope, icept), *_ = np.linalg.lstsq(design, yy, rcond=None)
    rms = float(np.sqrt(np.mean((design @ (slope, icept) - yy) ** 2)))
    return DecayFit(-float(slope), float(icept), (lo, hi), rms,
                    int(usable.sum()))
