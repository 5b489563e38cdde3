import numpy as np
import pytest

from bondsim.core import (CSState, GapViolation, KuramotoState, ModelParams,
                          Scenario, SingleAgent, TargetMatrix)
from bondsim.cucker_smale import CONSTANT_ONE
from bondsim.integrator import min_gap, rk4_step, simulate
from bondsim.scenario_io import builtin

PAIR_TGT = TargetMatrix([[0.0, 1.0], [1.0, 0.0]])


def test_rk4_equilibrium_fixed_point():
    from bondsim.kuramoto import kmbf_rhs
    st = KuramotoState(0.0, [0.0, 1.0], [0.0, 0.0])
    params = ModelParams(1.0, 1.0, 2.0)
    nxt = rk4_step(st, 0.1, lambda s: kmbf_rhs(s, params, PAIR_TGT))
    assert np.array_equal(nxt.theta, st.theta)
    assert np.array_equal(nxt.omega, st.omega)
    assert nxt.t == pytest.approx(0.1)


def test_rk4_scalar_decay():
    # y' = -y through the state interface; one step of the classical tableau
    st = KuramotoState(0.0, [1.0], [0.0])
    nxt = rk4_step(st, 0.1, lambda s: (-s.theta, np.zeros(1)))
    assert nxt.theta[0] == pytest.approx(0.9048375, abs=1e-12)


def test_rk4_one_step_error_sixteenth():
    # halving dt shrinks the one-step error ~16x on a damped oscillator
    gamma, kappa = 1.0, 4.0

    def rhs(s):
        return s.omega, -gamma * s.omega - kappa * s.theta

    # exact solution for comparison (underdamped)
    w = np.sqrt(kappa - gamma ** 2 / 4)
    x0, v0 = 1.0, 0.0
    b = (v0 + gamma / 2 * x0) / w

    def exact(t):
        return np.exp(-gamma * t / 2) * (x0 * np.cos(w * t) + b * np.sin(w * t))

    st = KuramotoState(0.0, [x0], [v0])
    err = {}
    for dt in (0.1, 0.05):
        nxt = rk4_step(st, dt, rhs)
        err[dt] = abs(nxt.theta[0] - exact(dt))
    assert err[0.1] / err[0.05] > 12.0


def test_simulate_km51_completes():
    traj = simulate(builtin("km-5.1"))
    assert len(traj) == 501
    assert traj.times[-1] == pytest.approx(5.0)
    assert traj.vel_diam[-1] < 1e-2


def test_simulate_equilibrium_constant():
    st = KuramotoState(0.0, [0.0, 1.0], [0.0, 0.0])
    s = Scenario("kuramoto-bond", ModelParams(1.0, 1.0, 2.0), PAIR_TGT, st,
                 dt=0.05, t_end=2.0)
    traj = simulate(s)
    for state in traj.states:
        assert np.array_equal(state.theta, st.theta)
        assert np.array_equal(state.omega, st.omega)


def test_simulate_coincident_cs_particles():
    st = CSState(0.0, [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
    tgt = TargetMatrix([[0.0, 1.0], [1.0, 0.0]])
    s = Scenario("cs-bond", ModelParams(1.0, 1.0, 1.0), tgt, st,
                 dt=0.01, t_end=1.0, weight=CONSTANT_ONE)
    with pytest.raises(GapViolation) as err:
        simulate(s)
    assert err.value.t == 0.0
    assert len(err.value.partial) == 0


def test_min_gap_triplet():
    st = KuramotoState(0.0, [0.0, 1.0, 3.0], [0.0, 0.0, 0.0])
    value, pair = min_gap(st)
    assert value == 1.0
    assert pair == (0, 1)


def test_min_gap_builtin_51():
    st = builtin("km-5.1").initial
    value, pair = min_gap(st)
    assert value == pytest.approx(0.0021, abs=1e-12)
    assert pair == (1, 2)


def test_min_gap_single_agent():
    with pytest.raises(SingleAgent):
        min_gap(KuramotoState(0.0, [0.3], [0.0]))


def test_linear_invariants_preserved():
    traj = simulate(builtin("km-5.1"))
    s0 = np.sum(traj.states[0].omega)
    drift = max(abs(np.sum(st.omega) - s0) for st in traj.states)
    assert drift <= 1e-12 * 10

    ctraj = simulate(builtin("cs2d-5.2"))
    v0 = ctraj.states[0].v.sum(axis=0)
    cdrift = max(np.max(np.abs(st.v.sum(axis=0) - v0)) for st in ctraj.states)
    assert cdrift <= 1e-12 * 10


def test_grid_doubling_convergence():
    base = builtin("km-5.1")

    def run(dt):
        s = Scenario(base.model, base.params, base.target, base.initial,
                     dt, 1.0, nu=base.nu)
        return simulate(s)

    t1, t2, t4 = run(0.02), run(0.01), run(0.005)
    # compare on the shared coarse grid
    def dist(a, b, stride):
        return max(np.max(np.abs(sa.theta - b.states[i * stride].theta))
                   for i, sa in enumerate(a.states))

    e12 = dist(t1, t2, 2)
    e24 = dist(t2, t4, 2)
    assert e12 / e24 >= 8.0


def test_galilean_shift_commutes_with_simulate():
    base = builtin("km-5.1")
    alpha, c = 0.3, 1.2
    shifted0 = KuramotoState(0.0, base.initial.theta + c,
                             base.initial.omega + alpha)
    s_shift = Scenario(base.model, base.params, base.target, shifted0,
                       base.dt, 1.0, nu=base.nu)
    s_plain = Scenario(base.model, base.params, base.target, base.initial,
                       base.dt, 1.0, nu=base.nu)
    ta = simulate(s_shift)
    tb = simulate(s_plain)
    worst = 0.0
    for sa, sb in zip(ta.states, tb.states):
        worst = max(worst, np.max(np.abs(sa.theta - (sb.theta + c + alpha * sb.t))))
        worst = max(worst, np.max(np.abs(sa.omega - (sb.omega + alpha))))
    assert worst < 1e-10


def test_stride_thins_output_only():
    traj = simulate(builtin("km-5.1"), stride=10)
    assert len(traj) == 51
    steps = np.diff(traj.times)
    assert np.allclose(steps, 0.1, atol=1e-12)
    full = simulate(builtin("km-5.1"))
    # strided samples coincide with the dense run's every 10th state
    assert np.array_equal(traj.states[3].theta, full.states[30].theta)


def test_gap_floor_configurable():
    # two particles closing head-on trip a generous gap floor mid-run
    st = CSState(0.0, [[0.0], [2.0]], [[1.0], [-1.0]])
    tgt = TargetMatrix([[0.0, 1.0], [1.0, 0.0]])
    s = Scenario("cs-bond", ModelParams(0.0, 0.0, 0.0), tgt, st,
                 dt=0.01, t_end=2.0, weight=CONSTANT_ONE)
    with pytest.raises(GapViolation) as err:
        simulate(s, gap_floor=0.5)
    assert err.value.t > 0
    assert len(err.value.partial) > 0
    assert err.value.pair == (0, 1)


def test_first_order_model_runs():
    base = builtin("km-5.1")
    s = Scenario("kuramoto-first-order", base.params, base.target,
                 base.initial, base.dt, 1.0, nu=np.zeros(10))
    traj = simulate(s)
    # omega along a first-order trajectory is the first-order RHS
    from bondsim.kuramoto import Km1Params, km1_rhs
    p1 = Km1Params(base.params.kappa0, np.zeros(10))
    for st in traj.states[::20]:
        assert np.allclose(st.omega, km1_rhs(st.theta, p1), atol=1e-14)
