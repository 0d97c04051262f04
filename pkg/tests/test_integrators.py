import numpy as np
import pytest

from symkern.integrators import (
    implicit_midpoint_step,
    midpoint_many,
    propagate,
    symplectic_euler_step,
)
from symkern.metrics import relative_error
from symkern.systems import Chain, Pendulum, Quadratic, jmat

HARMONIC = Quadratic(np.eye(2))


def fd_jacobian(step, x, h=1e-6):
    d = x.size
    D = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        D[:, j] = (step(x + e) - step(x - e)) / (2 * h)
    return D


def test_midpoint_fixed_point():
    x, rep = implicit_midpoint_step(Pendulum(), np.zeros(2), 1e-2)
    assert np.allclose(x, 0.0) and rep.converged


def test_midpoint_conserves_quadratic_invariants():
    x = np.array([1.0, 0.0])
    for dt in (0.1, 0.5, 1.0):
        y, _ = implicit_midpoint_step(HARMONIC, x, dt)
        assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-12)


def test_midpoint_symmetric():
    rng = np.random.default_rng(1)
    for sys_ in (Pendulum(), Chain()):
        x = rng.uniform(-0.5, 0.5, sys_.dim)
        y, _ = implicit_midpoint_step(sys_, x, 0.05)
        back, _ = implicit_midpoint_step(sys_, y, -0.05)
        assert np.max(np.abs(back - x)) <= 1e-10


def test_midpoint_energy_drift_short():
    # final-time energy mismatch after 1000 micro steps from (1, 0)
    sys_ = Pendulum()
    x = np.array([1.0, 0.0])
    H0 = sys_.energy(x)
    for _ in range(1000):
        x, _ = implicit_midpoint_step(sys_, x, 1e-3)
    assert abs(sys_.energy(x) - H0) <= 1e-8


def test_midpoint_energy_drift_long():
    # over T = 6 the oscillatory energy error of the micro reference stays
    # bounded; halving the step shrinks it fourfold (second order), which
    # pins the measured ceiling used here
    sys_ = Pendulum()
    for dt, cap in ((1e-3, 1e-6), (5e-4, 2.5e-7)):
        x = np.array([1.0, 0.0])
        H0 = sys_.energy(x)
        worst = 0.0
        for _ in range(int(round(6.0 / dt))):
            x, _ = implicit_midpoint_step(sys_, x, dt)
            worst = max(worst, abs(sys_.energy(x) - H0))
        assert worst <= cap


def test_sympeuler_equilibrium():
    assert np.allclose(symplectic_euler_step(Pendulum(), np.zeros(2), 0.1), 0.0)


def test_sympeuler_harmonic_hand_update():
    x = symplectic_euler_step(HARMONIC, np.array([1.0, 0.0]), 0.1)
    assert np.allclose(x, [0.99, -0.1], atol=1e-15)


@pytest.mark.parametrize("sys_", [Pendulum(), Chain(), HARMONIC],
                         ids=lambda s: s.name)
def test_stepper_symplecticity(sys_):
    rng = np.random.default_rng(5)
    J = jmat(sys_.n)
    for _ in range(10):
        x = rng.uniform(-0.5, 0.5, sys_.dim)
        for step in (
            lambda z: implicit_midpoint_step(sys_, z, 0.05)[0],
            lambda z: symplectic_euler_step(sys_, z, 0.05),
        ):
            D = fd_jacobian(step, x)
            assert np.max(np.abs(D.T @ J @ D - J)) <= 1e-5


def test_propagate_zero_steps():
    traj = propagate(Pendulum(), np.array([0.3, 0.1]), 1e-3, 0)
    assert traj.states.shape == (1, 2)
    assert np.allclose(traj.states[0], [0.3, 0.1])


def test_propagate_matches_composition():
    sys_ = Pendulum()
    x = np.array([0.7, -0.2])
    traj = propagate(sys_, x, 1e-3, 100)
    y = x.copy()
    for _ in range(100):
        y, _ = implicit_midpoint_step(sys_, y, 1e-3)
    assert np.max(np.abs(traj.final() - y)) <= 1e-14
    assert np.max(np.abs(traj.times - np.arange(101) * 1e-3)) <= 1e-12


def test_macro_step_is_micro_composition():
    sys_ = Pendulum()
    x = np.array([1.2, 0.4])
    macro = propagate(sys_, x, 1e-3, 100).final()
    # one 0.1 macro reference = 100 micro steps of 1e-3 by definition
    batch = midpoint_many(sys_, x[None, :], 1e-3, 100)[0]
    assert np.max(np.abs(macro - batch)) <= 1e-12


def test_midpoint_many_matches_scalar_path():
    rng = np.random.default_rng(9)
    for sys_ in (Pendulum(), Chain(), HARMONIC):
        X = rng.uniform(-0.5, 0.5, (7, sys_.dim))
        got = midpoint_many(sys_, X, 1e-2, 25)
        for i in range(7):
            want = propagate(sys_, X[i], 1e-2, 25).final()
            assert np.max(np.abs(got[i] - want)) <= 1e-11


def test_midpoint_many_keep_path():
    X = np.array([[0.5, 0.0], [0.2, 0.1]])
    path = midpoint_many(Pendulum(), X, 1e-2, 10, keep_path=True)
    assert path.shape == (11, 2, 2)
    assert np.allclose(path[0], X)


def test_baseline_error_decreases_with_macro_step():
    # macro implicit midpoint gets uniformly better as the step shrinks
    sys_ = Pendulum()
    x = np.array([1.0, 0.0])
    ref = propagate(sys_, x, 1e-3, 6000)
    finals = []
    for dt in (0.1, 0.05, 0.025):
        base = propagate(sys_, x, dt, int(round(6.0 / dt)))
        finals.append(relative_error(base, ref, "mid").y[-1])
    assert finals[0] > finals[1] > finals[2]
