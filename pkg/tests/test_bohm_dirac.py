import numpy as np
import pytest

from conetrace.bohm_dirac import (TIME_AXIS, _velocities_batch, bd_run,
                                  bd_transport, bd_velocity, compare)
from conetrace.dynamics import IntegratorConfig, guided_velocity
from conetrace.errors import DomainMismatchError
from conetrace.spinors import current_vector
from conetrace.wavefunction import WaveFunction, evaluate_multi
from conftest import random_packet, random_wavefunction


def test_bd_velocity_is_current_ratio(rng):
    """Equal-time law velocity is j_vec / j^0 of the current contracted
    with the other particles' lab-frame time axes."""
    wf = random_wavefunction(rng, 2, n_terms=2)
    t = 0.3
    pos = rng.uniform(-1, 1, size=(2, 3))
    events = np.column_stack([np.full(2, t), pos])
    psi = evaluate_multi(wf, events)
    for i in range(2):
        j = current_vector(psi, i, [TIME_AXIS])
        np.testing.assert_allclose(bd_velocity(i, t, pos, wf), j[1:] / j[0],
                                   atol=1e-10)


def test_bd_velocity_matches_guided(rng):
    wf = random_wavefunction(rng, 2, n_terms=2)
    t = -0.2
    pos = rng.uniform(-1, 1, size=(2, 3))
    events = np.column_stack([np.full(2, t), pos])
    us = np.tile(TIME_AXIS, (2, 1))
    for i in range(2):
        v, speed, psi_rel = guided_velocity(wf, events, us, i)
        np.testing.assert_array_equal(bd_velocity(i, t, pos, wf), v)
        assert speed == pytest.approx(np.linalg.norm(v))
        assert 0 < psi_rel <= 1.0 + 1e-12


def test_velocities_batch_matches_loop(rng):
    wf = random_wavefunction(rng, 2, n_terms=2)
    t = 0.15
    X = rng.uniform(-1, 1, size=(6, 2, 3))
    V = _velocities_batch(wf, t, X)
    for b in range(6):
        for i in range(2):
            np.testing.assert_allclose(V[b, i],
                                       bd_velocity(i, t, X[b], wf),
                                       atol=1e-10)


def test_transport_round_trip(rng):
    """Marching forward then backward along the equal-time flow returns
    the batch to its starting configurations to integrator accuracy."""
    wf = random_wavefunction(rng, 1, n_terms=1)
    X0 = rng.uniform(-0.5, 0.5, size=(8, 1, 3))
    X1 = bd_transport(wf, X0, 0.0, 1.0, 1e-2)
    back = bd_transport(wf, X1, 1.0, 0.0, 1e-2)
    assert np.abs(back - X0).max() < 1e-9


def test_transport_trivial_and_2d_input(rng):
    wf = random_wavefunction(rng, 2, n_terms=1)
    X = rng.uniform(-0.5, 0.5, size=(2, 3))
    same = bd_transport(wf, X, 0.5, 0.5, 1e-2)
    assert same.shape == (1, 2, 3)
    np.testing.assert_array_equal(same[0], X)


def test_bd_run_directions(rng):
    """Backward and forward runs cover [t_end, t_start]; both store
    samples newest-first and land exactly on the far edge."""
    wf = random_wavefunction(rng, 1, n_terms=1)
    x0 = rng.uniform(-0.3, 0.3, size=(1, 3))
    v0 = bd_velocity(0, 0.0, x0, wf)[None, :]
    cfg = IntegratorConfig(dt=0.02, t_start=0.0, t_end=-1.0)
    back = bd_run(wf, x0, v0, cfg, direction="backward")
    fwd = bd_run(wf, x0, v0, cfg, direction="forward")
    assert back.ok and fwd.ok
    bt = back.trajectories[0]
    ft = fwd.trajectories[0]
    assert bt.t_latest == 0.0 and bt.t_earliest == -1.0
    assert ft.t_latest == 1.0 and ft.t_earliest == 0.0
    assert np.all(np.diff(bt.times) < 0) and np.all(np.diff(ft.times) < 0)
    assert back.initial_violation == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        bd_run(wf, x0, v0, cfg, direction="sideways")


def test_compare_metrics():
    from conetrace.worldline import Trajectory

    def line(x0, v, ts):
        return Trajectory.from_samples(
            ts, x0[None, :] + ts[:, None] * v[None, :], np.tile(v, (len(ts), 1)))

    ts = np.linspace(1.0, -1.0, 21)
    a1 = line(np.zeros(3), np.array([0.1, 0, 0]), ts)
    b1 = line(np.array([0, 0, 0.5]), np.array([0.1, 0, 0]), ts)
    a2 = line(np.zeros(3), np.zeros(3), ts)
    b2 = line(np.zeros(3), np.zeros(3), ts)
    grid = np.linspace(0.8, -0.8, 5)
    res = compare([a1, a2], [b1, b2], grid)
    assert res["per_particle"].shape == (2, 5)
    np.testing.assert_allclose(res["per_particle"][0], 0.5, atol=1e-12)
    np.testing.assert_allclose(res["per_particle"][1], 0.0, atol=1e-15)
    assert res["max_dist"] == pytest.approx(0.5)
    assert res["mean_dist"] == pytest.approx(0.25)
    with pytest.raises(DomainMismatchError):
        compare([a1], [b1, b2], grid)
    with pytest.raises(DomainMismatchError):
        compare([a1], [b1], np.array([-1.5]))  # below both domains


def test_compare_edge_clamp():
    """Grid points a rounding error outside the stored window are
    clamped, not rejected."""
    from conetrace.worldline import Trajectory

    ts = np.linspace(0.0, -1.0, 11)
    still = Trajectory.from_samples(ts, np.zeros((11, 3)), np.zeros((11, 3)))
    res = compare([still], [still], np.array([-1.0 - 1e-10]))
    assert res["max_dist"] == 0.0
    with pytest.raises(DomainMismatchError):
        compare([still], [still], np.array([-1.0 - 1e-6]))
