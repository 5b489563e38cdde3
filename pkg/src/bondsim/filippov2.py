"""Exact piecewise-analytic solver for the two-particle 1D bonded system.

The relative coordinate x = x_1 - x_2 obeys

    xddot = -gamma2 * xdot - kappa2 * x + branch * kappa2 * dinf,

with branch = sgn(x), i.e. a damped oscillator around +dinf on the right
half-line and around -dinf on the left.  Zero crossings of x with nonzero
velocity flip the branch; the solver concatenates closed-form segments across
crossings.  If x and xdot vanish simultaneously the continuation is not
unique and the run terminates with an ill-posed verdict.

Event location is exact-first: on each branch the extrema of x are available
analytically (the velocity is a two-term exponential or a single damped
sinusoid), so x is scanned over its monotone pieces and the first sign change
is bracketed there before polishing with a root finder.  A decaying-envelope
bound rules out all further zeros, which is what terminates the cascade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import RootFindFailure

XV_TOL = 1e-12          # |x| and |v| both below this means the origin was hit
_ROOT_RTOL = 1e-14
_MAX_SEGMENTS = 200000


@dataclass(frozen=True)
class F2Params:
    """gamma2 = kappa0 + kappa1 (total damping), spring kappa2, target gap dinf."""

    gamma2: float
    kappa2: float
    dinf: float

    def __post_init__(self):
        object.__setattr__(self, "gamma2", float(self.gamma2))
        object.__setattr__(self, "kappa2", float(self.kappa2))
        object.__setattr__(self, "dinf", float(self.dinf))
        if self.gamma2 < 0 or self.kappa2 <= 0 or self.dinf <= 0:
            raise ValueError("need gamma2 >= 0, kappa2 > 0, dinf > 0")

    @classmethod
    def from_couplings(cls, kappa0, kappa1, kappa2, dinf) -> "F2Params":
        return cls(kappa0 + kappa1, kappa2, dinf)


@dataclass(frozen=True)
class RegimeClass:
    tag: str                       # overdamped | critical | underdamped
    discriminant: float            # gamma2^2 - 4 kappa2
    K: Optional[float] = None      # sqrt(disc) when disc >= 0
    omega: Optional[float] = None  # sqrt(kappa2 - gamma2^2/4) when disc < 0


def classify(p: F2Params) -> RegimeClass:
    disc = p.gamma2 ** 2 - 4.0 * p.kappa2
    if disc > 0:
        return RegimeClass("overdamped", disc, K=math.sqrt(disc))
    if disc == 0:
        return RegimeClass("critical", disc, K=0.0)
    return RegimeClass("underdamped", disc, omega=math.sqrt(-disc) / 2.0)


def decay_envelope(p: F2Params, segment=None) -> float:
    """Exponential rate at which |x - branch*dinf| decays on a collision-free tail."""
    reg = classify(p)
    if reg.discriminant >= 0:
        return 0.5 * (p.gamma2 - reg.K)
    return 0.5 * p.gamma2


@dataclass(frozen=True)
class SegmentSolution:
    """Closed form on one branch: x(tau), v(tau) with tau measured from entry.

    u = x - branch*dinf solves the homogeneous damped oscillator; c1, c2 are
    its coefficients in the regime's basis.
    """

    params: F2Params
    regime: RegimeClass
    branch: int
    x0: float
    v0: float
    c1: float
    c2: float

    def _u(self, tau):
        g = self.params.gamma2
        if self.regime.tag == "overdamped":
            lam1, lam2 = _roots(g, self.regime.K)
            return self.c1 * np.exp(lam1 * tau) + self.c2 * np.exp(lam2 * tau)
        if self.regime.tag == "critical":
            return (self.c1 + self.c2 * tau) * np.exp(-0.5 * g * tau)
        w = self.regime.omega
        return np.exp(-0.5 * g * tau) * (self.c1 * np.cos(w * tau)
                                         + self.c2 * np.sin(w * tau))

    def _udot(self, tau):
        g = self.params.gamma2
        if self.regime.tag == "overdamped":
            lam1, lam2 = _roots(g, self.regime.K)
            return (self.c1 * lam1 * np.exp(lam1 * tau)
                    + self.c2 * lam2 * np.exp(lam2 * tau))
        if self.regime.tag == "critical":
            return (self.c2 - 0.5 * g * (self.c1 + self.c2 * tau)) \
                * np.exp(-0.5 * g * tau)
        w = self.regime.omega
        a = -0.5 * g * self.c1 + w * self.c2
        b = -0.5 * g * self.c2 - w * self.c1
        return np.exp(-0.5 * g * tau) * (a * np.cos(w * tau) + b * np.sin(w * tau))

    def x(self, tau):
        return self.branch * self.params.dinf + self._u(tau)

    def v(self, tau):
        return self._udot(tau)


def _roots(gamma2, K):
    return -0.5 * (gamma2 + K), -0.5 * (gamma2 - K)


def segment_solution(p: F2Params, branch: int, x0: float,
                     v0: float) -> SegmentSolution:
    """Exact solution of the branch dynamics from (x0, v0)."""
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 or -1")
    if branch * x0 < 0:
        raise ValueError("entry state is on the wrong side for this branch")
    reg = classify(p)
    u0 = x0 - branch * p.dinf
    g = p.gamma2
    if reg.tag == "overdamped":
        lam1, lam2 = _roots(g, reg.K)
        c2 = (v0 - lam1 * u0) / reg.K
        c1 = u0 - c2
    elif reg.tag == "critical":
        c1 = u0
        c2 = v0 + 0.5 * g * u0
    else:
        c1 = u0
        c2 = (v0 + 0.5 * g * u0) / reg.omega
    return SegmentSolution(p, reg, branch, float(x0), float(v0),
                           float(c1), float(c2))


@dataclass(frozen=True)
class Segment:
    """One smooth branch piece of the Filippov trajectory, [t_start, t_end]."""

    t_start: float
    t_end: float
    branch: int
    x_entry: float
    v_entry: float
    sol: SegmentSolution

    def x_at(self, t):
        return self.sol.x(np.asarray(t) - self.t_start)

    def v_at(self, t):
        return self.sol.v(np.asarray(t) - self.t_start)


@dataclass(frozen=True)
class ZeroCrossing:
    t: float
    v: float


@dataclass(frozen=True)
class OriginHit:
    t: float


# ---------------------------------------------------------------------------
# event location

def _extrema_times(sol: SegmentSolution, tau_max: float):
    """Interior zeros of v in (0, tau_max], in increasing order."""
    g = sol.params.gamma2
    reg = sol.regime
    out = []
    if reg.tag == "overdamped":
        lam1, lam2 = _roots(g, reg.K)
        a, b = sol.c1 * lam1, sol.c2 * lam2
        # v = a e^{lam1 t} + b e^{lam2 t} = 0  <=>  e^{(lam1-lam2)t} = -b/a
        if a != 0.0 and b != 0.0 and -b / a > 0.0:
            tau = math.log(-b / a) / (lam1 - lam2)
            if 0.0 < tau <= tau_max:
                out.append(tau)
    elif reg.tag == "critical":
        if sol.c2 != 0.0:
            tau = (sol.c2 - 0.5 * g * sol.c1) / (0.5 * g * sol.c2)
            if 0.0 < tau <= tau_max:
                out.append(tau)
    else:
        w = reg.omega
        a = -0.5 * g * sol.c1 + w * sol.c2
        b = -0.5 * g * sol.c2 - w * sol.c1
        if a == 0.0 and b == 0.0:
            return out
        # zeros of a cos(wt) + b sin(wt) = C cos(wt - psi): wt = psi + pi/2 + k pi
        psi = math.atan2(b, a)
        k = math.floor(-(psi + 0.5 * math.pi) / math.pi) + 1
        while True:
            tau = (psi + 0.5 * math.pi + k * math.pi) / w
            if tau > tau_max:
                break
            if tau > 0.0:
                out.append(tau)
            k += 1
    return out


def _no_zero_beyond(sol: SegmentSolution) -> float:
    """A time tau* such that |u(tau)| < dinf for all tau >= tau* (so x != 0 there).

    Returns 0.0 when no zero is possible at all, inf when the envelope never
    decays below dinf (undamped oscillation with large amplitude).
    """
    d = sol.params.dinf
    g = sol.params.gamma2
    reg = sol.regime
    if reg.tag == "overdamped":
        m = abs(sol.c1) + abs(sol.c2)
        if m <= d:
            return 0.0
        _, lam2 = _roots(g, reg.K)          # slow rate
        return math.log(m / d) / (-lam2)
    if reg.tag == "critical":
        # bound (|c1| + |c2| tau) e^{-g tau / 2}: unimodal, search past its peak
        m0, m1 = abs(sol.c1), abs(sol.c2)

        def bound(tau):
            return (m0 + m1 * tau) * math.exp(-0.5 * g * tau)

        peak = max(0.0, 2.0 / g - (m0 / m1 if m1 > 0 else 0.0))
        if bound(peak) < d:
            return 0.0
        tau = max(peak, 1.0 / g)
        while bound(tau) >= d:
            tau *= 2.0
            if tau > 1e300:
                return math.inf
        return tau
    amp = math.hypot(sol.c1, sol.c2)
    if amp < d:
        return 0.0
    if g == 0.0:
        return math.inf
    return (2.0 / g) * math.log(amp / d)


def _sign_anchor(sol: SegmentSolution, lo: float, hi: float, want: int) -> float:
    """A point in (lo, hi) where sign(x) == want, staying close to lo.

    Used when x(lo) == 0 (segment entry at a crossing): the trajectory leaves
    the crossing transversally, so points just after lo carry the branch sign.
    """
    if sol.x(lo) != 0.0 and np.sign(sol.x(lo)) == want:
        return lo
    step = hi - lo
    for k in range(60, 0, -1):      # probe outward from lo so no zero is skipped
        a = lo + step * 0.5 ** k
        if a <= lo:
            continue
        xa = sol.x(a)
        if xa != 0.0 and np.sign(xa) == want:
            return a
    raise RootFindFailure("could not anchor the branch sign after a crossing")


def _first_zero(sol: SegmentSolution, lo: float, hi: float):
    a = _sign_anchor(sol, lo, hi, sol.branch)
    fa, fb = sol.x(a), sol.x(hi)
    if fa == 0.0:
        return a
    if np.sign(fa) == np.sign(fb):
        raise RootFindFailure("sign change expected but the bracket is one-signed")
    return float(brentq(sol.x, a, hi, xtol=1e-15, rtol=_ROOT_RTOL))


def _next_event_sol(p: F2Params, sol: SegmentSolution, t_start: float):
    """First zero of x after t_start on this branch, or None if no zero can occur."""
    if sol.c1 == 0.0 and sol.c2 == 0.0:
        return None                          # resting at the branch equilibrium
    tau_stop = _no_zero_beyond(sol)
    if tau_stop == 0.0:
        return None

    if math.isinf(tau_stop):
        # undamped with envelope >= dinf: a crossing occurs within two periods
        tau_cap = 4.0 * math.pi / sol.regime.omega
    else:
        tau_cap = tau_stop
    breaks = _extrema_times(sol, tau_cap)

    prev = 0.0
    prev_sign = sol.branch
    for tau_e in breaks:
        if abs(sol.x(tau_e)) < XV_TOL:       # tangential touch: v = 0 there too
            return OriginHit(t_start + tau_e)
        s = int(np.sign(sol.x(tau_e)))
        if s != prev_sign:
            tau_z = _first_zero(sol, prev, tau_e)
            return _classify_crossing(sol, t_start, tau_z)
        prev, prev_sign = tau_e, s

    if math.isinf(tau_stop):
        if prev_sign == sol.branch:
            return None
        # undamped: the next extremum past the cap closes the bracket
        hi = prev + math.pi / sol.regime.omega
        return _classify_crossing(sol, t_start, _first_zero(sol, prev, hi))

    if prev_sign != sol.branch:
        # x sits on the wrong side at the last extremum; it must cross back
        # before tau_stop, beyond which |u| < dinf forces the branch sign.
        # The slight stretch guards the exact-boundary rounding case.
        tau_z = _first_zero(sol, prev, tau_stop * (1.0 + 1e-9) + 1e-12)
        return _classify_crossing(sol, t_start, tau_z)
    return None


def _classify_crossing(sol, t_start, tau_z):
    v_z = float(sol.v(tau_z))
    if abs(v_z) < XV_TOL:
        return OriginHit(t_start + tau_z)
    return ZeroCrossing(t_start + tau_z, v_z)


def next_event(p: F2Params, seg: Segment):
    """Event terminating the segment: ZeroCrossing, OriginHit, or None."""
    return _next_event_sol(p, seg.sol, seg.t_start)


# ---------------------------------------------------------------------------
# global solution

@dataclass(frozen=True)
class FilippovVerdict:
    kind: str                       # converged | origin-hit | truncated
    limit: Optional[float] = None   # +-dinf when converged
    t_hit: Optional[float] = None   # origin hit time


@dataclass(frozen=True, eq=False)
class FilippovResult:
    params: F2Params
    regime: RegimeClass
    segments: tuple
    collision_times: np.ndarray
    verdict: FilippovVerdict
    t_max: float

    def eval_at(self, t):
        """Piecewise-exact (x, v) at times t (scalar or array)."""
        if not self.segments:
            raise ValueError("no segments to evaluate (immediate origin hit)")
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        starts = np.array([s.t_start for s in self.segments])
        idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, None)
        x = np.empty_like(ts)
        v = np.empty_like(ts)
        for k, seg in enumerate(self.segments):
            m = idx == k
            if np.any(m):
                x[m] = seg.x_at(ts[m])
                v[m] = seg.v_at(ts[m])
        if np.ndim(t) == 0:
            return float(x[0]), float(v[0])
        return x, v

    def energy_at(self, t):
        x, v = self.eval_at(t)
        return relative_energy(self.params, x, v)


def relative_energy(p: F2Params, x, v):
    """Dissipated energy of the relative system: E = v^2/2 + (k2/2)(|x|-dinf)^2.

    Continuous across crossings and non-increasing along the dynamics
    (dE/dt = -gamma2 v^2 on each branch).
    """
    return 0.5 * np.asarray(v) ** 2 \
        + 0.5 * p.kappa2 * (np.abs(np.asarray(x)) - p.dinf) ** 2


def solve_filippov(p: F2Params, x0: float, v0: float,
                   t_max: float) -> FilippovResult:
    """Concatenate branch segments across zero crossings up to t_max.

    Terminates early with a 'converged' verdict when no further crossing can
    occur (the trajectory then relaxes to branch*dinf), with 'origin-hit'
    when (x, v) reaches (0, 0) -- after which continuation is non-unique --
    and with 'truncated' when t_max arrives first (or the system is undamped
    and never settles).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    regime = classify(p)
    x0, v0 = float(x0), float(v0)

    if abs(x0) < XV_TOL and abs(v0) < XV_TOL:
        return FilippovResult(p, regime, (), np.array([]),
                              FilippovVerdict("origin-hit", t_hit=0.0), t_max)

    segments = []
    collisions = []
    t, x, v = 0.0, x0, v0
    branch = int(np.sign(x)) if x != 0.0 else int(np.sign(v))
    while True:
        if len(segments) > _MAX_SEGMENTS:
            raise RootFindFailure("segment cascade did not terminate")
        sol = segment_solution(p, branch, x, v)
        ev = _next_event_sol(p, sol, t)
        if ev is None:
            segments.append(Segment(t, t_max, branch, x, v, sol))
            if p.gamma2 > 0:
                verdict = FilippovVerdict("converged", limit=branch * p.dinf)
            else:
                verdict = FilippovVerdict("truncated")
            break
        if isinstance(ev, OriginHit):
            segments.append(Segment(t, ev.t, branch, x, v, sol))
            verdict = FilippovVerdict("origin-hit", t_hit=ev.t)
            break
        if ev.t >= t_max:
            segments.append(Segment(t, t_max, branch, x, v, sol))
            verdict = FilippovVerdict("truncated")
            break
        segments.append(Segment(t, ev.t, branch, x, v, sol))
        collisions.append(ev.t)
        t, x, v = ev.t, 0.0, ev.v
        branch = int(np.sign(ev.v))
    return FilippovResult(p, regime, tuple(segments), np.array(collisions),
                          verdict, t_max)
