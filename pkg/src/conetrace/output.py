"""Deterministic batch outputs: trajectory CSV and run-report JSON.

Floats are written with repr (shortest round-trip form), so identical
runs produce byte-identical files.  The report's wall_time_s field is
the one deliberately non-reproducible value.
"""

from __future__ import annotations

import json

import numpy as np

CSV_HEADER = "particle,t,x,y,z,vx,vy,vz"


def _fmt(x):
    return repr(float(x))


def write_trajectories_csv(path, trajectories):
    """Rows ordered t descending, particle ascending within each t.

    All trajectories from one run share the same time grid; a run that
    aborted mid-step has equal-length histories too, because samples
    are appended only after a full step succeeds.
    """
    counts = {traj.n_samples for traj in trajectories}
    if len(counts) != 1:
        raise ValueError("trajectories do not share a common time grid")
    n_samples = counts.pop()
    lines = [CSV_HEADER]
    for k in range(n_samples):
        for i, traj in enumerate(trajectories):
            t = traj.times[k]
            x = traj.positions[k]
            v = traj.velocities[k]
            lines.append(",".join(
                [str(i), _fmt(t), _fmt(x[0]), _fmt(x[1]), _fmt(x[2]),
                 _fmt(v[0]), _fmt(v[1]), _fmt(v[2])]))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _sanitize(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def report_json(report):
    return json.dumps(_sanitize(report), indent=2, sort_keys=True) + "\n"


def write_report_json(path, report):
    with open(path, "w") as fh:
        fh.write(report_json(report))


def run_report(scenario, result, backend, version):
    """Assemble the report dict for a completed or aborted run."""
    return {
        "tool_version": version,
        "backend": backend,
        "scenario": scenario.raw,
        "model": scenario.model,
        "steps_completed": result.steps_completed,
        "termination": result.termination,
        "invariants": result.invariants,
        "initial_constraint_violation": result.initial_violation,
        "wall_time_s": result.wall_time_s,
    }
