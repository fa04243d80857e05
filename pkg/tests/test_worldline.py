import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conetrace.errors import (CoincidentError, NoCrossingError,
                              NonMonotonicTimeError, OutOfRangeError,
                              SuperluminalSampleError)
from conetrace.worldline import (RetardedPoint, Seed, Trajectory,
                                 retarded_point)


def line_quadratic_crossing(x0, v, p):
    """Closed-form crossing time of the line x0 + v*t with the future
    light cone of p, written independently of the library's algebra."""
    a = 1.0 - v @ v
    q0 = x0 + v * p[0] - p[1:4]
    b = -2.0 * (q0 @ v)
    c = -(q0 @ q0)
    roots = np.roots([a, b, c])
    tau = max(r.real for r in roots if abs(r.imag) < 1e-12)
    return p[0] + tau


def spiral_trajectory(t_top=2.0, t_bot=-6.0, n=400, speed=0.5):
    """Curved timelike world line sampled on a decreasing grid."""
    ts = np.linspace(t_top, t_bot, n)
    omega = 1.3
    r = speed / omega
    xs = np.column_stack([r * np.cos(omega * ts), r * np.sin(omega * ts),
                          0.1 * ts])
    vs = np.column_stack([-speed * np.sin(omega * ts),
                          speed * np.cos(omega * ts),
                          np.full(n, 0.1)])
    return Trajectory.from_samples(ts, xs, vs,
                                   seed=Seed(t_top, xs[0].copy(), vs[0].copy()))


def test_seed_extrapolation():
    seed = Seed(1.0, np.array([0.0, 0.0, 2.0]), np.array([0.1, 0.0, -0.2]))
    np.testing.assert_allclose(seed.at(3.0), [0.2, 0.0, 1.6], atol=1e-15)
    np.testing.assert_allclose(seed.at(1.0), [0.0, 0.0, 2.0], atol=1e-15)


def test_retarded_point_accessors():
    rp = RetardedPoint(2.0, np.array([1.0, 0.0, 0.0]),
                       np.array([0.0, 0.5, 0.0]))
    np.testing.assert_array_equal(rp.four_velocity, [1.0, 0.0, 0.5, 0.0])
    np.testing.assert_array_equal(rp.event, [2.0, 1.0, 0.0, 0.0])


def test_append_sample_ordering():
    traj = Trajectory.from_boundary(0.0, [0, 0, 0], [0, 0, 0])
    traj.append_sample(-0.5, [0, 0, 0], [0, 0, 0])
    with pytest.raises(NonMonotonicTimeError):
        traj.append_sample(-0.5, [0, 0, 0], [0, 0, 0])
    with pytest.raises(NonMonotonicTimeError):
        traj.append_sample(-0.4, [0, 0, 0], [0, 0, 0])


def test_first_sample_above_seed_rejected():
    traj = Trajectory(seed=Seed(0.0, np.zeros(3), np.zeros(3)))
    with pytest.raises(NonMonotonicTimeError):
        traj.append_sample(0.5, [0, 0, 0], [0, 0, 0])


def test_superluminal_sample_rejected():
    traj = Trajectory()
    with pytest.raises(SuperluminalSampleError):
        traj.append_sample(0.0, [0, 0, 0], [0.8, 0.8, 0.0])
    traj.append_sample(0.0, [0, 0, 0], [0.7, 0.7, 0.0])  # |v| < 1 is fine


def test_capacity_growth():
    traj = Trajectory(capacity=4)
    for k in range(40):
        traj.append_sample(-0.1 * k, [0.01 * k, 0, 0], [0, 0, 0])
    assert traj.n_samples == 40
    assert traj.times[0] == 0.0
    assert traj.t_earliest == pytest.approx(-3.9)


def test_truncated_keeps_recent_and_seed():
    traj = spiral_trajectory()
    cut = traj.truncated(-2.0)
    assert cut.t_earliest >= -2.0
    assert cut.t_latest == traj.t_latest
    assert cut.seed is traj.seed
    t = -1.0
    np.testing.assert_array_equal(cut.interpolate(t)[0],
                                  traj.interpolate(t)[0])


def test_interpolate_exact_on_cubics():
    """Cubic Hermite reproduces cubic positions (and their quadratic
    velocities) exactly when the stored velocity is the derivative."""
    coef = np.array([[0.3, -0.2, 0.05, 0.01],
                     [0.0, 0.1, -0.03, 0.004],
                     [1.0, 0.05, 0.0, -0.002]])

    def x_of(t):
        return coef @ np.array([1.0, t, t * t, t ** 3])

    def v_of(t):
        return coef @ np.array([0.0, 1.0, 2 * t, 3 * t * t])

    ts = np.linspace(2.0, -2.0, 17)
    traj = Trajectory.from_samples(ts, [x_of(t) for t in ts],
                                   [v_of(t) for t in ts])
    for t in np.linspace(1.9, -1.9, 23):
        pos, vel = traj.interpolate(t)
        np.testing.assert_allclose(pos, x_of(t), atol=1e-12)
        np.testing.assert_allclose(vel, v_of(t), atol=1e-11)


def test_interpolate_seed_region():
    traj = spiral_trajectory(t_top=1.0)
    pos, vel = traj.interpolate(4.0)
    np.testing.assert_allclose(pos, traj.seed.at(4.0), atol=1e-15)
    np.testing.assert_array_equal(vel, traj.seed.velocity)


def test_interpolate_out_of_range_and_slack():
    traj = Trajectory.from_samples([0.0, -1.0], [[0, 0, 0], [0, 0, -0.5]],
                                   [[0, 0, 0.5], [0, 0, 0.5]])
    with pytest.raises(OutOfRangeError):
        traj.interpolate(-1.2)
    pos, _ = traj.interpolate(-1.2, slack=0.5)  # bounded extrapolation
    assert np.isfinite(pos).all()
    with pytest.raises(OutOfRangeError):
        traj.interpolate(-2.0, slack=0.5)
    with pytest.raises(OutOfRangeError):
        Trajectory().interpolate(0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_retarded_matches_quadratic_on_lines(seed):
    """Constant-velocity lines have a closed-form crossing; the sampled
    bisection path must agree with it."""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    v = rng.uniform(0.0, 0.8) * direction
    x0 = rng.uniform(-2, 2, size=3)
    p = np.array([rng.uniform(-1, 0), *rng.uniform(-2, 2, size=3)])
    expect = line_quadratic_crossing(x0, v, p)

    ts = np.linspace(60.0, -3.0, 900)
    traj = Trajectory.from_samples(ts, x0[None, :] + ts[:, None] * v[None, :],
                                   np.tile(v, (900, 1)))
    try:
        rp = retarded_point(traj, p)
    except CoincidentError:
        assert expect - p[0] < 1e-6
        return
    assert rp.t == pytest.approx(expect, abs=1e-10)
    np.testing.assert_allclose(rp.position, x0 + rp.t * v, atol=1e-9)
    np.testing.assert_allclose(rp.velocity, v, atol=1e-12)


def test_retarded_seed_branch_matches_quadratic(rng):
    """Queries whose cone crossing lies above all samples resolve on the
    analytic seed line."""
    v = np.array([0.2, 0.0, 0.1])
    x_top = np.array([0.5, -0.5, 0.0])
    traj = Trajectory.from_boundary(0.0, x_top, v)
    traj.append_sample(-0.1, x_top - 0.1 * v, v)
    p = np.array([-0.05, 3.0, 2.0, -1.0])
    rp = retarded_point(traj, p)
    # the seed line is x_top + v (t - 0), i.e. offset x_top at t = 0
    expect = line_quadratic_crossing(x_top, v, p)
    assert rp.t == pytest.approx(expect, abs=1e-10)
    assert rp.t > 0.0  # above the sampled region


def test_retarded_query_above_all_data():
    """A query event later than every sample needs the seed; without one
    the crossing is undefined."""
    v = np.zeros(3)
    with_seed = Trajectory.from_boundary(0.0, [0, 0, 2.0], v)
    rp = retarded_point(with_seed, np.array([1.0, 0, 0, 0]))
    assert rp.t == pytest.approx(3.0)  # |x| = 2 above p0 = 1
    bare = Trajectory.from_samples([0.0, -1.0], [[0, 0, 2.0], [0, 0, 2.0]],
                                   [v, v])
    with pytest.raises(NoCrossingError):
        retarded_point(bare, np.array([1.0, 0, 0, 0]))


def test_coincident_raises():
    traj = Trajectory.from_boundary(1.0, [0, 0, 0], [0, 0, 0])
    for _ in range(30):
        traj.append_sample(traj.t_earliest - 0.1, [0, 0, 0], [0, 0, 0])
    with pytest.raises(CoincidentError):
        retarded_point(traj, np.array([-0.5, 0, 0, 0]))


def test_receding_hyperbola_has_no_crossing():
    """A world line asymptotic to the light cone of the query point can
    outrun it forever; a seedless finite history must report that."""
    b = 1.0
    ts = np.linspace(40.0, 0.0, 4000)
    xs = np.column_stack([np.sqrt(b * b + ts * ts), np.zeros(4000),
                          np.zeros(4000)])
    vs = np.column_stack([ts / np.sqrt(b * b + ts * ts), np.zeros(4000),
                          np.zeros(4000)])
    traj = Trajectory.from_samples(ts, xs, vs)
    # query at the hyperbola's focal event: g(t) = t - sqrt(b^2 + t^2) < 0
    with pytest.raises(NoCrossingError):
        retarded_point(traj, np.array([0.0, 0.0, 0.0, 0.0]))


def test_retarded_self_consistent_on_curves(rng):
    """On curved histories the crossing satisfies the defining equation
    t_c - p0 = |x(t_c) - p_vec| to bisection accuracy."""
    traj = spiral_trajectory()
    for _ in range(20):
        p = np.array([rng.uniform(-5.0, 0.0), *rng.uniform(-3, 3, size=3)])
        try:
            rp = retarded_point(traj, p)
        except CoincidentError:
            continue
        delay = rp.t - p[0]
        dist = np.linalg.norm(rp.position - p[1:4])
        assert delay == pytest.approx(dist, abs=1e-9)
        assert rp.t > p[0]
