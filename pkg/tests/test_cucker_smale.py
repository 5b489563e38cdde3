import numpy as np
import pytest

from bondsim.core import (CollisionSingularity, CSState, ModelParams,
                          NegativeRadius, TargetMatrix, target_from_points)
from bondsim.cucker_smale import (ALGEBRAIC, CONSTANT_ONE, CommWeight,
                                  csbf_rhs, pair_deviation, psi_eval)


def csbf_rhs_oracle(x, v, params, tgt, psi):
    n, d = x.shape
    dv = np.zeros((n, d))
    for i in range(n):
        acc = np.zeros(d)
        for j in range(n):
            if j == i:
                continue
            rij = np.linalg.norm(x[j] - x[i])
            u = (x[j] - x[i]) / rij
            acc += params.kappa0 * psi(rij) * (v[j] - v[i])
            acc += params.kappa1 * np.dot(v[j] - v[i], u) * u
            acc += params.kappa2 * (rij - tgt[i, j]) * u
        dv[i] = acc / n
    return dv


def test_psi_algebraic():
    assert psi_eval(ALGEBRAIC, 0.0) == 1.0
    assert psi_eval(ALGEBRAIC, 1.0) == 0.5


def test_psi_constant():
    assert psi_eval(CONSTANT_ONE, 123.4) == 1.0


def test_psi_table_interpolation():
    w = CommWeight("table", radii=[0.0, 1.0, 2.0], values=[1.0, 0.5, 0.25])
    assert psi_eval(w, 0.5) == pytest.approx(0.75)
    assert psi_eval(w, 5.0) == 0.25      # constant extrapolation
    assert np.allclose(psi_eval(w, np.array([0.0, 1.5])), [1.0, 0.375])


def test_psi_negative_radius():
    with pytest.raises(NegativeRadius):
        psi_eval(ALGEBRAIC, -0.1)


def _pair_state(x1, x2, v1=0.0, v2=0.0):
    return CSState(0.0, [[x1], [x2]], [[v1], [v2]])


def test_csbf_rest_at_target():
    tgt = TargetMatrix([[0.0, 2.0], [2.0, 0.0]])
    _, dv = csbf_rhs(_pair_state(0.0, 2.0), ModelParams(1.0, 1.0, 1.0), tgt,
                     CONSTANT_ONE)
    assert np.array_equal(dv, np.zeros((2, 1)))


def test_csbf_repulsion_toward_spacing():
    tgt = TargetMatrix([[0.0, 2.0], [2.0, 0.0]])
    _, dv = csbf_rhs(_pair_state(0.0, 1.0), ModelParams(0.0, 0.0, 2.0), tgt,
                     CONSTANT_ONE)
    assert dv[:, 0] == pytest.approx([-1.0, 1.0], abs=1e-15)


def test_csbf_coincident_positions():
    st = CSState(0.0, [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 1.0]])
    tgt = TargetMatrix([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(CollisionSingularity):
        csbf_rhs(st, ModelParams(1.0, 1.0, 1.0), tgt, CONSTANT_ONE)


def test_csbf_matches_double_loop_oracle():
    rng = np.random.default_rng(21)
    n, d = 6, 3
    x = rng.normal(size=(n, d)) * 2
    v = rng.normal(size=(n, d))
    tgt = target_from_points(rng.normal(size=(n, d)) + 3 * np.arange(n)[:, None])
    params = ModelParams(1.2, 4.5, 7.0)
    st = CSState(0.0, x, v)
    dx, dv = csbf_rhs(st, params, tgt, ALGEBRAIC)
    dv_o = csbf_rhs_oracle(x, v, params, tgt.entries, lambda r: 1 / (1 + r))
    assert np.max(np.abs(dv - dv_o)) < 1e-12
    assert np.array_equal(dx, v)


def test_pair_deviation_at_rest():
    tgt = TargetMatrix([[0.0, 2.0], [2.0, 0.0]])
    assert pair_deviation(_pair_state(0.0, 2.0), tgt, 0, 1) == (0.0, 0.0)


def test_pair_deviation_closing():
    tgt = TargetMatrix([[0.0, 2.0], [2.0, 0.0]])
    e, edot = pair_deviation(_pair_state(0.0, 1.0, 0.0, 1.0), tgt, 0, 1)
    assert e == -1.0
    assert edot == 1.0


def test_pair_deviation_symmetric():
    rng = np.random.default_rng(2)
    st = CSState(0.0, rng.normal(size=(3, 2)), rng.normal(size=(3, 2)))
    tgt = target_from_points(rng.normal(size=(3, 2)) + np.arange(3)[:, None])
    assert pair_deviation(st, tgt, 0, 2) == pair_deviation(st, tgt, 2, 0)


def test_momentum_conservation_rhs():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n, d = int(rng.integers(2, 7)), int(rng.integers(1, 4))
        st = CSState(0.0, rng.normal(size=(n, d)) * 3, rng.normal(size=(n, d)))
        tgt = target_from_points(rng.normal(size=(n, d))
                                 + 4 * np.arange(n)[:, None])
        _, dv = csbf_rhs(st, ModelParams(*rng.uniform(0, 4, 3)), tgt, ALGEBRAIC)
        assert np.max(np.abs(dv.sum(axis=0))) < 1e-12 * n


def test_galilean_invariance_rhs():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(5, 2)) * 2
    v = rng.normal(size=(5, 2))
    tgt = target_from_points(rng.normal(size=(5, 2)) + 3 * np.arange(5)[:, None])
    params = ModelParams(1.0, 2.0, 3.0)
    c = np.array([0.4, -1.1])
    _, dv = csbf_rhs(CSState(0, x, v), params, tgt, ALGEBRAIC)
    _, dv_s = csbf_rhs(CSState(0, x + 2.0 * c, v + c), params, tgt, ALGEBRAIC)
    assert np.max(np.abs(dv_s - dv)) < 1e-13


def test_rotation_equivariance_2d():
    rng = np.random.default_rng(17)
    x = rng.normal(size=(4, 2)) * 2
    v = rng.normal(size=(4, 2))
    tgt = target_from_points(rng.normal(size=(4, 2)) + 3 * np.arange(4)[:, None])
    params = ModelParams(1.0, 2.0, 3.0)
    phi = 0.73
    R = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    _, dv = csbf_rhs(CSState(0, x, v), params, tgt, ALGEBRAIC)
    _, dv_r = csbf_rhs(CSState(0, x @ R.T, v @ R.T), params, tgt, ALGEBRAIC)
    assert np.max(np.abs(dv_r - dv @ R.T)) < 1e-12


def test_isolated_pair_oscillator_law():
    # two particles on a line, kappa0 = 0, psi == 1: the gap deviation
    # e = gap - dinf obeys e'' + kappa1 e' + kappa2 e = 0 exactly
    kappa1, kappa2, dinf = 3.0, 2.0, 1.5
    e0, edot0 = 0.8, -0.3
    tgt = TargetMatrix([[0.0, dinf], [dinf, 0.0]])
    params = ModelParams(0.0, kappa1, kappa2)

    # independent closed form (overdamped: kappa1^2 > 4 kappa2)
    K = np.sqrt(kappa1 ** 2 - 4 * kappa2)
    lam1, lam2 = -(kappa1 + K) / 2, -(kappa1 - K) / 2
    c2 = (edot0 - lam1 * e0) / K
    c1 = e0 - c2

    def e_exact(t):
        return c1 * np.exp(lam1 * t) + c2 * np.exp(lam2 * t)

    x = np.array([[0.0], [dinf + e0]])
    v = np.array([[0.0], [edot0]])
    dt, n = 1e-3, 5000
    st = CSState(0.0, x, v)
    from bondsim.integrator import rk4_step
    rhs = lambda s: csbf_rhs(s, params, tgt, CONSTANT_ONE)
    worst = 0.0
    for k in range(n):
        st = rk4_step(st, dt, rhs)
        gap = float(st.x[1, 0] - st.x[0, 0])
        worst = max(worst, abs((gap - dinf) - e_exact((k + 1) * dt)))
    assert worst < 1e-8


def test_energy_homogeneity_in_velocity():
    from bondsim.energy import cs_energy
    rng = np.random.default_rng(4)
    x = rng.normal(size=(4, 2)) * 2
    v = rng.normal(size=(4, 2))
    tgt = target_from_points(rng.normal(size=(4, 2)) + 3 * np.arange(4)[:, None])
    params = ModelParams(1.0, 2.0, 3.0)
    lam = 2.5
    e1 = cs_energy(CSState(0, x, v), params, tgt, ALGEBRAIC)
    e2 = cs_energy(CSState(0, x, lam * v), params, tgt, ALGEBRAIC)
    assert e2.kinetic == pytest.approx(lam ** 2 * e1.kinetic, rel=1e-13)
    assert e2.production == pytest.approx(lam ** 2 * e1.production, rel=1e-13)
    assert e2.potential == e1.potential
