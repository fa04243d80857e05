"""Equal-time Bohm-Dirac guidance: the oracle dynamics.

The velocity of particle i contracts the same rank-N current tensor as
the retarded law, but every other slot is evaluated at the same lab
time and contracted with the lab frame's time axis instead of a
light-cone crossing.  For N = 1 the two laws coincide exactly.

Also provides a batched transport integrator (vectorized over whole
sample sets) used by the ensemble statistics, and trajectory
comparison metrics.
"""

from __future__ import annotations

import time

import numpy as np

from .dynamics import RunResult, TIME_AXIS, _InvariantLog, guided_velocity
from .errors import (DomainMismatchError, DynamicsError, LightlikeError,
                     PsiZeroError)
from .wavefunction import evaluate_packet_batch
from .worldline import Trajectory


def bd_velocity(i, t, positions, wf, *, lightlike_tol=1e-6, psi_zero_tol=1e-12):
    """Equal-time law velocity of particle i at lab time t."""
    pos = np.asarray(positions, dtype=float).reshape(wf.n_particles, 3)
    events = np.column_stack([np.full(wf.n_particles, float(t)), pos])
    us = np.tile(TIME_AXIS, (wf.n_particles, 1))
    v, _, _ = guided_velocity(wf, events, us, i, lightlike_tol=lightlike_tol,
                              psi_zero_tol=psi_zero_tol, particle=i, t=float(t))
    return v


def _velocities_batch(wf, t, X, *, lightlike_tol=1e-6, psi_zero_tol=1e-12):
    """Equal-time law velocities for a batch of configurations.

    X: (B, N, 3) -> (B, N, 3).  Fully vectorized over the batch; any
    sample hitting a zero or lightlike point aborts the whole batch.
    """
    B, n, _ = X.shape
    vals = [[evaluate_packet_batch(p, t, X[:, j]) for j, p in enumerate(row)]
            for row in wf.packets]
    coeff = wf.coefficients
    T = wf.n_terms
    mags = np.empty((T, n, B))
    for ti in range(T):
        for j in range(n):
            mags[ti, j] = np.sqrt(np.einsum("ba,ba->b", vals[ti][j].conj(),
                                            vals[ti][j]).real)
    scale = np.einsum("t,tb->b", np.abs(coeff), mags.prod(axis=1))

    V = np.empty((B, n, 3))
    for i in range(n):
        j4 = np.zeros((B, 4))
        norm2 = np.zeros(B)
        for s in range(T):
            for ti in range(T):
                w = np.conj(coeff[s]) * coeff[ti]
                prod = np.full(B, w, dtype=complex)
                for j in range(n):
                    if j == i:
                        continue
                    prod = prod * np.einsum("ba,ba->b", vals[s][j].conj(),
                                            vals[ti][j])
                a = vals[s][i].conj()
                b = vals[ti][i]
                b0 = np.einsum("ba,ba->b", a, b)
                b1 = a[:, 0] * b[:, 3] + a[:, 1] * b[:, 2] + a[:, 2] * b[:, 1] + a[:, 3] * b[:, 0]
                b2 = 1j * (-a[:, 0] * b[:, 3] + a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1] + a[:, 3] * b[:, 0])
                b3 = a[:, 0] * b[:, 2] - a[:, 1] * b[:, 3] + a[:, 2] * b[:, 0] - a[:, 3] * b[:, 1]
                j4[:, 0] += (prod * b0).real
                j4[:, 1] += (prod * b1).real
                j4[:, 2] += (prod * b2).real
                j4[:, 3] += (prod * b3).real
                norm2 += (prod * b0).real
        bad = norm2 <= psi_zero_tol * psi_zero_tol * scale * scale
        if np.any(bad):
            raise PsiZeroError(
                f"wave function vanished for {int(bad.sum())} of {B} samples",
                particle=i, t=float(t))
        sign = np.where(j4[:, 0] < 0.0, -1.0, 1.0)
        j4 = j4 * sign[:, None]
        v = j4[:, 1:] / j4[:, 0:1]
        speeds = np.sqrt(np.einsum("ba,ba->b", v, v))
        if np.any(1.0 - speeds < lightlike_tol):
            raise LightlikeError(
                f"lightlike current for {int((1.0 - speeds < lightlike_tol).sum())} "
                f"of {B} samples", particle=i, t=float(t))
        V[:, i, :] = v
    return V


def bd_transport(wf, configurations, t0, t1, dt, *, lightlike_tol=1e-6,
                 psi_zero_tol=1e-12):
    """March a batch of configurations from t0 to t1 (either direction)
    under the equal-time law with fixed-step RK4.  Returns (B, N, 3)."""
    X = np.asarray(configurations, dtype=float).copy()
    if X.ndim == 2:
        X = X[None]
    if t1 == t0:
        return X
    n_steps = max(int(round(abs(t1 - t0) / dt)), 1)
    h = (t1 - t0) / n_steps

    def vel(t, Y):
        return _velocities_batch(wf, t, Y, lightlike_tol=lightlike_tol,
                                 psi_zero_tol=psi_zero_tol)

    for k in range(n_steps):
        t = t0 + k * h
        k1 = vel(t, X)
        k2 = vel(t + 0.5 * h, X + 0.5 * h * k1)
        k3 = vel(t + 0.5 * h, X + 0.5 * h * k2)
        k4 = vel(t + h, X + h * k3)
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return X


def _bd_stage(wf, t, X, config, log):
    n = X.shape[0]
    V = np.empty_like(X)
    for i in range(n):
        v, speed, psi_rel = guided_velocity(
            wf,
            np.column_stack([np.full(n, t), X]),
            np.tile(TIME_AXIS, (n, 1)), i,
            lightlike_tol=config.lightlike_tol,
            psi_zero_tol=config.psi_zero_tol, particle=i, t=float(t))
        V[i] = v
        log.record(speed, psi_rel)
    return V


def bd_run(wf, boundary_positions, boundary_velocities, config,
           direction="backward"):
    """Integrate the equal-time law over the scenario window.

    backward mirrors the retarded integrator: march from boundary data
    at t_start down to t_end, boundary sample keeping the prescribed
    velocity and the law's own velocity reported via initial_violation.
    forward marches the same span upwards from t_start; the resulting
    samples are stored newest-first like every Trajectory.
    """
    t0 = time.perf_counter()
    X = np.asarray(boundary_positions, dtype=float).reshape(-1, 3).copy()
    V = np.asarray(boundary_velocities, dtype=float).reshape(-1, 3).copy()
    n = wf.n_particles
    if X.shape[0] != n or V.shape[0] != n:
        raise ValueError("boundary data must cover every particle")
    log = _InvariantLog()
    n_steps = int(round((config.t_start - config.t_end) / config.dt))
    if direction not in ("backward", "forward"):
        raise ValueError("direction must be 'backward' or 'forward'")
    sgn = -1.0 if direction == "backward" else 1.0

    samples = [(config.t_start, X.copy(), V.copy())]
    steps_done = 0
    error = None
    initial_violation = None
    try:
        k1 = _bd_stage(wf, config.t_start, X, config, log)
        initial_violation = float(np.max(np.linalg.norm(k1 - V, axis=1)))
        t = config.t_start
        for m in range(n_steps):
            # Target times come off the fixed grid, not accumulation, so
            # the final sample lands on t_start - n_steps*dt exactly.
            t_new = config.t_start + sgn * ((m + 1) * config.dt)
            h = t_new - t
            k2 = _bd_stage(wf, t + 0.5 * h, X + 0.5 * h * k1, config, log)
            k3 = _bd_stage(wf, t + 0.5 * h, X + 0.5 * h * k2, config, log)
            k4 = _bd_stage(wf, t_new, X + h * k3, config, log)
            X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t_new
            k1 = _bd_stage(wf, t, X, config, log)
            samples.append((t, X.copy(), k1.copy()))
            steps_done += 1
    except DynamicsError as err:
        error = err

    # Backward samples are already newest-first; forward ones get reversed.
    ordered = samples if direction == "backward" else samples[::-1]
    trajs = []
    for i in range(n):
        if direction == "backward":
            traj = Trajectory.from_boundary(config.t_start, ordered[0][1][i],
                                            ordered[0][2][i])
            rest = ordered[1:]
        else:
            traj = Trajectory(seed=None, capacity=max(len(ordered), 4))
            rest = ordered
        for (ts, xs, vs) in rest:
            traj.append_sample(ts, xs[i], vs[i])
        trajs.append(traj)

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
        initial_violation=initial_violation if initial_violation is not None else np.nan,
        wall_time_s=time.perf_counter() - t0,
        error=error,
    )


def compare(trajsA, trajsB, t_grid):
    """Per-particle distances between two trajectory sets on a time grid.

    Returns {"t_grid", "per_particle" (N, K), "max_dist", "mean_dist"}.
    Grid points must lie inside both domains (samples plus seed).
    """
    grid = np.asarray(t_grid, dtype=float)
    if len(trajsA) != len(trajsB):
        raise DomainMismatchError("particle counts differ")
    n = len(trajsA)
    dists = np.empty((n, len(grid)))
    for i, (a, b) in enumerate(zip(trajsA, trajsB)):
        for k, t in enumerate(grid):
            pa = _checked_interp(a, t)
            pb = _checked_interp(b, t)
            dists[i, k] = float(np.linalg.norm(pa - pb))
    return {
        "t_grid": grid,
        "per_particle": dists,
        "max_dist": float(dists.max()),
        "mean_dist": float(dists.mean()),
    }


def _checked_interp(traj, t):
    lo = traj.t_earliest
    hi = np.inf if traj.seed is not None else traj.t_latest
    if lo is None:
        raise DomainMismatchError("empty trajectory")
    tol = 1e-9 * (1.0 + abs(t))
    if t < lo - tol or t > hi + tol:
        raise DomainMismatchError(
            f"t={t!r} outside trajectory domain [{lo!r}, {hi!r}]")
    return traj.interpolate(min(max(t, lo), hi))[0]
