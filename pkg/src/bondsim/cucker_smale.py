"""Right-hand side for the Cucker-Smale model with bonding forces, any dimension.

Communication weights are bounded nonnegative kernels of the inter-particle
distance; the algebraic kernel 1/(1+r) is the default used by the built-in
scenarios.  Coincident particles make the unit vectors undefined, which is a
hard error here rather than a regularized force.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (CollisionSingularity, CSState, ModelParams, NegativeRadius,
                   TargetMatrix)


@dataclass(frozen=True, eq=False)
class CommWeight:
    """Distance kernel: 'constant' (== 1), 'algebraic' (1/(1+r)), or a 'table'.

    Table kernels interpolate linearly and extrapolate with the end values.
    """

    kind: str = "algebraic"
    radii: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "table":
            object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float))
            object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


CONSTANT_ONE = CommWeight("constant")
ALGEBRAIC = CommWeight("algebraic")


def psi_eval(w: CommWeight, r):
    """Evaluate the kernel at radius r (scalar or array, all entries >= 0)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise NegativeRadius("communication weight evaluated at negative radius")
    if w.kind == "constant":
        out = np.ones_like(arr)
    elif w.kind == "algebraic":
        out = 1.0 / (1.0 + arr)
    elif w.kind == "table":
        out = np.interp(arr, w.radii, w.values)
    else:
        raise ValueError(f"unknown weight kind {w.kind!r}")
    return float(out) if np.ndim(r) == 0 else out


def _pairwise(x):
    diff = x[None, :, :] - x[:, None, :]     # diff[i, j] = x_j - x_i
    r = np.sqrt((diff ** 2).sum(axis=2))
    return diff, r


def _check_separated(r):
    n = r.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(r[off] == 0.0):
        i, j = np.argwhere((r == 0.0) & off)[0]
        raise CollisionSingularity(int(i), int(j))


def csbf_rhs(state: CSState, params: ModelParams, target: TargetMatrix,
             w: CommWeight):
    """Bonded CS RHS: (dx, dv).

    dv_i = (k0/N) sum_j psi(r_ij)(v_j-v_i)
         + (k1/N) sum_{j!=i} <v_j-v_i, u_ij> u_ij
         + (k2/N) sum_{j!=i} (r_ij - tgt_ij) u_ij,     u_ij = (x_j-x_i)/r_ij.

    All contributions are antisymmetric in (i, j), so total momentum is
    conserved at the RHS level.
    """
    x, v = state.x, state.v
    n = state.n
    diff, r = _pairwise(x)
    _check_separated(r)

    dvel = v[None, :, :] - v[:, None, :]
    r_safe = r + np.eye(n)                   # diagonal guard; diff there is zero
    unit = diff / r_safe[:, :, None]

    force = params.kappa0 * psi_eval(w, r)[:, :, None] * dvel
    radial = (dvel * unit).sum(axis=2)
    force += params.kappa1 * radial[:, :, None] * unit
    force += params.kappa2 * (r - target.entries)[:, :, None] * unit
    return v.copy(), force.sum(axis=1) / n


def pair_deviation(state: CSState, target: TargetMatrix, i: int, j: int):
    """Spacing deviation e = r_ij - tgt_ij and its time derivative.

    edot = <v_i - v_j, (x_i - x_j)/r_ij> = d/dt r_ij.
    """
    rvec = state.x[i] - state.x[j]
    r = float(np.linalg.norm(rvec))
    if r == 0.0:
        raise CollisionSingularity(i, j)
    e = r - target.entries[i, j]
    edot = float(np.dot(state.v[i] - state.v[j], rvec / r))
    return float(e), edot
