"""The retarded guidance law and its backwards-in-lab-time integrator.

Velocity of particle i at event p_i: intersect every other particle's
world line with the future lab-time light cone of p_i, evaluate the
wave function at those crossings (slot i at p_i itself), contract the
rank-N current tensor with the crossings' four-velocities on every slot
but i, and read the direction of the resulting four-vector.  The
direction is timelike or lightlike by construction, so |v| <= 1.

Because all crossings lie strictly later in lab time than p_i, marching
backwards from boundary data at t_start is an explicit method of steps:
every velocity evaluation only consumes already-known history (stored
samples plus the analytic constant-velocity seed above t_start).  A
classical fixed-step RK4 does the marching.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DynamicsError, LightlikeError, PsiZeroError
from .wavefunction import evaluate_factors
from .worldline import Trajectory, retarded_point

TIME_AXIS = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass
class IntegratorConfig:
    """Fixed-step integration window and numerical guards.

    dt > 0 is the lab-time step; integration runs from t_start down to
    t_end.  lightlike_tol flags speeds within that margin of 1;
    delay_min aborts on effectively coincident particles; psi_zero_tol
    is the relative wave-function magnitude below which the velocity is
    declared undefined.
    """

    dt: float
    t_start: float
    t_end: float
    lightlike_tol: float = 1e-6
    delay_min: float = 1e-9
    psi_zero_tol: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end < self.t_start:
            raise ValueError("t_end must lie below t_start (backwards run)")


@dataclass
class SystemState:
    """Instantaneous configuration plus the histories it was built from."""

    t: float
    positions: np.ndarray   # (N, 3)
    velocities: np.ndarray  # (N, 3)
    trajectories: list
    wavefunction: object


def guided_velocity(wf, events, us, i, *, lightlike_tol=1e-6,
                    psi_zero_tol=1e-12, particle=None, t=None):
    """Current direction for slot i given per-slot evaluation events
    (N, 4) and contraction four-velocities us (N, 4); us[i] is ignored.

    Shared contraction path for the retarded law (us from light-cone
    crossings) and the equal-time law (us all on the lab time axis).
    Returns (velocity, speed, relative wave-function magnitude).
    """
    factors = evaluate_factors(wf, events)
    us_arr = np.ascontiguousarray(us, dtype=float)
    j4, norm2, scale2 = _backend.pair_current(wf.coefficients, factors, i, us_arr)
    if scale2 == 0.0 or norm2 <= psi_zero_tol * psi_zero_tol * scale2:
        raise PsiZeroError(
            f"wave function vanished at the evaluation points "
            f"(|psi|_rel = {np.sqrt(norm2 / scale2) if scale2 else 0.0:.3e})",
            particle=particle, t=t)
    if j4[0] < 0.0:
        j4 = -j4
    if j4[0] <= 0.0:
        raise PsiZeroError("guiding current degenerate (zero time component)",
                           particle=particle, t=t)
    v = j4[1:] / j4[0]
    speed = float(np.sqrt(v @ v))
    if 1.0 - speed < lightlike_tol:
        raise LightlikeError(
            f"guiding current lightlike within tolerance (1 - |v| = {1.0 - speed:.3e})",
            particle=particle, t=t)
    return v, speed, float(np.sqrt(norm2 / scale2))


def velocity(i, p_i, trajectories, wf, *, lightlike_tol=1e-6, delay_min=1e-9,
             psi_zero_tol=1e-12, slack=0.0):
    """Retarded-law velocity of particle i at event p_i = (t, x, y, z)."""
    v, _, _ = _velocity_full(i, np.asarray(p_i, dtype=float), trajectories, wf,
                             lightlike_tol=lightlike_tol, delay_min=delay_min,
                             psi_zero_tol=psi_zero_tol, slack=slack)
    return v


def _velocity_full(i, p_i, trajectories, wf, *, lightlike_tol, delay_min,
                   psi_zero_tol, slack):
    n = wf.n_particles
    events = np.empty((n, 4), dtype=float)
    us = np.empty((n, 4), dtype=float)
    events[i] = p_i
    us[i] = TIME_AXIS
    try:
        for j in range(n):
            if j == i:
                continue
            rp = retarded_point(trajectories[j], p_i, delay_min=delay_min,
                                slack=slack)
            events[j] = rp.event
            us[j] = rp.four_velocity
        return guided_velocity(wf, events, us, i, lightlike_tol=lightlike_tol,
                               psi_zero_tol=psi_zero_tol, particle=i,
                               t=float(p_i[0]))
    except DynamicsError as err:
        if err.particle is None:
            err.particle = i
        if err.t is None:
            err.t = float(p_i[0])
        raise


@dataclass
class RunResult:
    """Trajectories plus the per-step invariant log and outcome."""

    trajectories: list
    config: IntegratorConfig
    steps_completed: int
    termination: dict
    invariants: dict
    initial_violation: float
    wall_time_s: float
    error: DynamicsError | None = None

    @property
    def ok(self):
        return self.error is None


class _InvariantLog:
    def __init__(self):
        self.max_speed = 0.0
        self.min_margin = np.inf    # min over evaluations of 1 - |v|
        self.min_psi_rel = np.inf   # min relative wave-function magnitude

    def record(self, speed, psi_rel):
        self.max_speed = max(self.max_speed, speed)
        self.min_margin = min(self.min_margin, 1.0 - speed)
        self.min_psi_rel = min(self.min_psi_rel, psi_rel)

    def as_dict(self):
        return {
            "max_speed": self.max_speed,
            "min_lightlike_margin": self.min_margin if np.isfinite(self.min_margin) else None,
            "min_psi_rel": self.min_psi_rel if np.isfinite(self.min_psi_rel) else None,
        }


def _stage_velocities(t, X, trajectories, wf, config, log):
    """Velocities of all particles at stage time t and positions X (N, 3).

    Retarded queries may touch times slightly below the stored front
    when another particle is closer than one step; interpolation is
    extended by a 2*dt slack there (bounded extrapolation, same order
    as the local truncation error).
    """
    V = np.empty_like(X)
    for i in range(len(X)):
        p_i = np.concatenate(([t], X[i]))
        v, speed, psi_rel = _velocity_full(
            i, p_i, trajectories, wf,
            lightlike_tol=config.lightlike_tol, delay_min=config.delay_min,
            psi_zero_tol=config.psi_zero_tol, slack=2.0 * config.dt)
        V[i] = v
        log.record(speed, psi_rel)
    return V


def step(state, config, log=None, k1=None, t_new=None):
    """One RK4 step from state.t down to t_new (state.t - dt by default;
    callers marching a fixed grid pass the exact grid time to avoid
    accumulated drift); appends the new samples to the trajectories and
    returns the new SystemState."""
    if log is None:
        log = _InvariantLog()
    t, X = state.t, state.positions
    if t_new is None:
        t_new = t - config.dt
    dt = t - t_new
    trajs, wf = state.trajectories, state.wavefunction
    if k1 is None:
        k1 = _stage_velocities(t, X, trajs, wf, config, log)
    k2 = _stage_velocities(t - 0.5 * dt, X - 0.5 * dt * k1, trajs, wf, config, log)
    k3 = _stage_velocities(t - 0.5 * dt, X - 0.5 * dt * k2, trajs, wf, config, log)
    k4 = _stage_velocities(t_new, X - dt * k3, trajs, wf, config, log)
    X_new = X - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    V_new = _stage_velocities(t_new, X_new, trajs, wf, config, log)
    for i, traj in enumerate(trajs):
        traj.append_sample(t_new, X_new[i], V_new[i])
    return SystemState(t_new, X_new, V_new, trajs, wf)


def run(wf, boundary_positions, boundary_velocities, config):
    """Integrate the retarded law backwards from boundary data.

    Boundary data at t_start (positions, velocities with |v| < 1) define
    the constant-velocity seed history above t_start.  The law's own
    velocity at the boundary generally differs from the prescribed seed
    velocity; the mismatch is reported as initial_violation, the law's
    value is used for the march, and the boundary sample keeps the
    seed velocity so history stays continuous at the junction.

    Returns a RunResult; on a dynamics error the partial trajectories
    and the error context are included instead of raising.
    """
    t0 = time.perf_counter()
    X = np.asarray(boundary_positions, dtype=float).reshape(-1, 3).copy()
    V = np.asarray(boundary_velocities, dtype=float).reshape(-1, 3).copy()
    n = wf.n_particles
    if X.shape[0] != n or V.shape[0] != n:
        raise ValueError("boundary data must cover every particle")
    trajs = [Trajectory.from_boundary(config.t_start, X[i], V[i])
             for i in range(n)]
    log = _InvariantLog()
    n_steps = int(round((config.t_start - config.t_end) / config.dt))
    state = SystemState(config.t_start, X, V, trajs, wf)
    steps_done = 0
    error = None
    initial_violation = np.nan
    k1 = None
    try:
        k1 = _stage_velocities(config.t_start, X, trajs, wf, config, log)
        initial_violation = float(np.max(np.linalg.norm(k1 - V, axis=1)))
        for k in range(n_steps):
            t_new = config.t_start - (k + 1) * config.dt
            state = step(state, config, log=log, k1=k1, t_new=t_new)
            k1 = state.velocities
            steps_done += 1
    except DynamicsError as err:
        error = err
    termination = {"status": "completed" if error is None else "error"}
    if error is not None:
        termination["cause"] = {
            "type": error.cause,
            "particle": error.particle,
            "t": error.t,
            "message": str(error),
        }
    return RunResult(
        trajectories=trajs,
        config=config,
        steps_completed=steps_done,
        termination=termination,
        invariants=log.as_dict(),
        initial_violation=initial_violation,
        wall_time_s=time.perf_counter() - t0,
        error=error,
    )


def resume_run(wf, trajectories, config):
    """Continue a backward run from stored history.

    trajectories hold the samples of an earlier (interrupted) run with
    this same config: seeds at config.t_start, fronts on the step grid
    and aligned across particles.  The march picks up with the stored
    front velocities as its first stage, exactly as the uninterrupted
    run would have, so the continued samples are bit-for-bit identical
    to never having stopped.  The invariant log and initial violation
    cover only the resumed segment (the latter is NaN past the start).
    """
    t0 = time.perf_counter()
    n = wf.n_particles
    if len(trajectories) != n:
        raise ValueError("trajectory count must match the particle count")
    trajs = list(trajectories)
    fronts = [traj.t_earliest for traj in trajs]
    if any(f is None for f in fronts):
        raise ValueError("cannot resume from empty trajectories")
    t_front = fronts[0]
    if any(f != t_front for f in fronts):
        raise ValueError("trajectory fronts are not aligned")
    if not config.t_end < t_front <= config.t_start:
        raise ValueError("stored front lies outside the integration window")
    steps_prior = int(round((config.t_start - t_front) / config.dt))
    n_steps = int(round((config.t_start - config.t_end) / config.dt))

    X = np.array([traj.positions[-1] for traj in trajs])
    V = np.array([traj.velocities[-1] for traj in trajs])
    state = SystemState(t_front, X, V, trajs, wf)
    log = _InvariantLog()
    steps_done = 0
    error = None
    initial_violation = np.nan
    try:
        if steps_prior == 0:
            # Only the boundary sample exists; its stored velocity is the
            # seed value, so the law's first stage must be recomputed.
            k1 = _stage_velocities(t_front, X, trajs, wf, config, log)
            initial_violation = float(np.max(np.linalg.norm(k1 - V, axis=1)))
        else:
            k1 = V
        for k in range(steps_prior, n_steps):
            t_new = config.t_start - (k + 1) * config.dt
            state = step(state, config, log=log, k1=k1, t_new=t_new)
            k1 = state.velocities
            steps_done += 1
    except DynamicsError as err:
        error = err
    termination = {"status": "completed" if error is None else "error",
                   "resumed_from": float(t_front)}
    if error is not None:
        termination["cause"] = {
            "type": error.cause,
            "particle": error.particle,
            "t": error.t,
            "message": str(error),
        }
    return RunResult(
        trajectories=trajs,
        config=config,
        steps_completed=steps_done,
        termination=termination,
        invariants=log.as_dict(),
        initial_violation=initial_violation,
        wall_time_s=time.perf_counter() - t0,
        error=error,
    )
