"""World-line storage, dense interpolation, and retarded-point finding.

A Trajectory is built backwards in lab time: samples are appended with
strictly decreasing t.  Above the boundary time an optional Seed
prescribes constant-velocity motion analytically, so queries at
arbitrarily late lab times are always well-posed.

The retarded point of an event p on a trajectory is the unique
intersection of the world line with the future lab-time light cone of p
(the cone on which the law of motion is retarded): the root of
g(t) = (t - p0) - |x(t) - p_vec| with t > p0.  For timelike world lines
g is strictly increasing (g' = 1 - v.n >= 1 - |v| > 0), so the root is
unique when it exists; bisection finds it in the sampled region and a
closed-form quadratic solves it in the seed region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (CoincidentError, NoCrossingError, NonMonotonicTimeError,
                     OutOfRangeError, SuperluminalSampleError)


@dataclass(frozen=True)
class Seed:
    """Constant-velocity extrapolation for t >= t: x(s) = position +
    velocity*(s - t)."""

    t: float
    position: np.ndarray
    velocity: np.ndarray

    def at(self, s):
        return self.position + self.velocity * (s - self.t)


@dataclass(frozen=True)
class RetardedPoint:
    """Crossing of a world line with the future lab-time light cone of a
    query event; four_velocity is the lab-time-normalized (1, v)."""

    t: float
    position: np.ndarray
    velocity: np.ndarray

    @property
    def four_velocity(self):
        return np.concatenate(([1.0], self.velocity))

    @property
    def event(self):
        return np.concatenate(([self.t], self.position))


class Trajectory:
    """Backwards-built world line: strictly decreasing sample times,
    |v| < 1 everywhere, optional analytic seed above the first sample."""

    def __init__(self, seed=None, capacity=1024):
        self.seed = seed
        self._ts = np.empty(capacity, dtype=float)
        self._xs = np.empty((capacity, 3), dtype=float)
        self._vs = np.empty((capacity, 3), dtype=float)
        self._n = 0

    @classmethod
    def from_boundary(cls, t, position, velocity):
        """Trajectory with a constant-velocity seed and its junction sample."""
        pos = np.asarray(position, dtype=float)
        vel = np.asarray(velocity, dtype=float)
        traj = cls(seed=Seed(float(t), pos.copy(), vel.copy()))
        traj.append_sample(t, pos, vel)
        return traj

    @classmethod
    def from_samples(cls, ts, xs, vs, seed=None):
        traj = cls(seed=seed, capacity=max(len(ts), 4))
        for t, x, v in zip(ts, xs, vs):
            traj.append_sample(t, x, v)
        return traj

    @property
    def n_samples(self):
        return self._n

    @property
    def times(self):
        return self._ts[:self._n]

    @property
    def positions(self):
        return self._xs[:self._n]

    @property
    def velocities(self):
        return self._vs[:self._n]

    @property
    def t_latest(self):
        """Newest (largest) sample time, or None if empty."""
        return self._ts[0] if self._n else None

    @property
    def t_earliest(self):
        """Oldest (smallest) sample time, or None if empty."""
        return self._ts[self._n - 1] if self._n else None

    def append_sample(self, t, position, velocity):
        """Extend the history downwards in t.  Rejects non-decreasing times
        and |v| >= 1."""
        t = float(t)
        v = np.asarray(velocity, dtype=float)
        if self._n and t >= self._ts[self._n - 1]:
            raise NonMonotonicTimeError(
                f"sample t={t!r} not below current front t={self._ts[self._n - 1]!r}")
        if self._n == 0 and self.seed is not None and t > self.seed.t:
            raise NonMonotonicTimeError(
                f"first sample t={t!r} above seed time t={self.seed.t!r}")
        speed = float(np.sqrt(v @ v))
        if speed >= 1.0:
            raise SuperluminalSampleError(f"|v| = {speed!r} >= 1 at t={t!r}")
        if self._n == len(self._ts):
            self._grow()
        self._ts[self._n] = t
        self._xs[self._n] = np.asarray(position, dtype=float)
        self._vs[self._n] = v
        self._n += 1

    def _grow(self):
        cap = 2 * len(self._ts)
        for name in ("_ts", "_xs", "_vs"):
            old = getattr(self, name)
            new = np.empty((cap,) + old.shape[1:], dtype=float)
            new[:len(old)] = old
            setattr(self, name, new)

    def truncated(self, t_min):
        """Copy containing only samples with t >= t_min (restart support)."""
        keep = self.times >= t_min
        return Trajectory.from_samples(self.times[keep], self.positions[keep],
                                       self.velocities[keep], seed=self.seed)

    def interpolate(self, t, slack=0.0):
        """Dense output (position, velocity) at time t.

        Seed region (t >= seed.t) is analytic; the sampled region uses
        cubic Hermite on the bracketing pair, which reproduces straight
        lines exactly and matches the integrator's local order.  slack
        extends the domain below the earliest sample by bounded
        extrapolation (used by integrator stages); beyond it the query
        is an OutOfRange error.
        """
        t = float(t)
        if self.seed is not None and t >= self.seed.t:
            return self.seed.at(t), self.seed.velocity.copy()
        if self._n == 0:
            raise OutOfRangeError("trajectory has no samples")
        if t < self._ts[self._n - 1] - slack:
            raise OutOfRangeError(
                f"t={t!r} below earliest sample {self._ts[self._n - 1]!r}")
        return _backend.traj_interp(self.times, self.positions, self.velocities, t)

    def _g_sampled(self, p, t):
        return _backend.lightcone_g(self.times, self.positions, self.velocities,
                                    p[0], p[1], p[2], p[3], t)


def _seed_crossing(seed, p):
    """Closed-form root of the light-cone equation on the seed line.

    With q the line's offset from p_vec at parameter tau = t - p0 and
    a = 1 - |v|^2 > 0, the root solves a tau^2 + b tau + c = 0 with
    b = -2 q.v, c = -|q|^2; the discriminant is a sum of squares so a
    future root always exists on an infinite timelike line.
    """
    v = seed.velocity
    q = seed.at(p[0]) - p[1:4]
    a = 1.0 - float(v @ v)
    b = -2.0 * float(q @ v)
    c = -float(q @ q)
    disc = b * b - 4.0 * a * c
    root = np.sqrt(max(disc, 0.0))
    if b <= 0.0:
        tau = (-b + root) / (2.0 * a)
    else:
        tau = -2.0 * c / (b + root)
    return p[0] + tau


def retarded_point(traj, p, delay_min=1e-9, slack=0.0):
    """Intersection of the trajectory with the future lab-time light cone
    of event p = (t, x, y, z).

    Strategy: bracket the root of the strictly increasing g in the
    sampled region by window doubling, then bisect; if the root lies at
    or above the seed junction, solve the constant-velocity line in
    closed form.  Raises CoincidentError when the crossing distance (the
    delay) falls below delay_min, and NoCrossingError when a seedless
    trajectory is exhausted with g still negative.
    """
    p = np.asarray(p, dtype=float)
    seed = traj.seed

    if traj.n_samples == 0:
        if seed is None:
            raise OutOfRangeError("empty trajectory")
        return _finish_seed(traj, p, delay_min)

    top = seed.t if seed is not None else traj.t_latest
    if p[0] >= top:
        if seed is None:
            raise NoCrossingError(
                f"trajectory has no data above query time t={p[0]!r}")
        return _finish_seed(traj, p, delay_min)

    x0, _ = traj.interpolate(p[0], slack=slack)
    d0 = float(np.linalg.norm(x0 - p[1:4]))
    if d0 < delay_min:
        raise CoincidentError(
            f"inter-particle distance {d0!r} below delay_min at t={p[0]!r}")

    lo = p[0]
    step = d0
    hi = lo + step
    while hi < top:
        if traj._g_sampled(p, hi) > 0.0:
            return _finish_bisect(traj, p, lo, hi, delay_min, slack)
        lo = hi
        step *= 2.0
        hi = lo + step

    if traj._g_sampled(p, top) > 0.0:
        return _finish_bisect(traj, p, lo, top, delay_min, slack)
    if seed is None:
        raise NoCrossingError(
            "world line exhausted with the light cone unreached "
            f"(query t={p[0]!r}, last data t={top!r})")
    return _finish_seed(traj, p, delay_min)


def _finish_bisect(traj, p, lo, hi, delay_min, slack):
    t_c = _backend.lightcone_bisect(traj.times, traj.positions, traj.velocities,
                                    p[0], p[1], p[2], p[3], lo, hi)
    pos, vel = traj.interpolate(t_c, slack=slack)
    return _finish(p, t_c, pos, vel, delay_min)


def _finish_seed(traj, p, delay_min):
    t_c = _seed_crossing(traj.seed, p)
    pos = traj.seed.at(t_c)
    return _finish(p, t_c, pos, traj.seed.velocity.copy(), delay_min)


def _finish(p, t_c, pos, vel, delay_min):
    delay = t_c - p[0]
    if delay < delay_min:
        raise CoincidentError(
            f"retarded delay {delay!r} below delay_min at t={p[0]!r}")
    return RetardedPoint(float(t_c), pos, vel)
