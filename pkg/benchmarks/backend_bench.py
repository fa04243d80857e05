"""Benchmark the compiled kernels against the numpy fallback.

Times the four hot kernels on representative workloads, then a short
end-to-end two-particle integration under each backend (subprocesses,
because the backend is chosen at import time).

Usage: python3 benchmarks/backend_bench.py [--repeat N] [--skip-e2e]
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from conetrace import _kernels_py  # noqa: E402

try:
    from conetrace import _kernels
except ImportError:
    _kernels = None

ROOT = Path(__file__).resolve().parent.parent


def timeit(fn, repeat):
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def kernel_cases(rng):
    n_modes, n_terms, n_particles = 125, 2, 2
    E = rng.uniform(1.0, 2.0, size=n_modes)
    P = rng.uniform(-1, 1, size=(n_modes, 3))
    W = rng.standard_normal((n_modes, 4)) + 1j * rng.standard_normal((n_modes, 4))
    coeffs = rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)
    phis = rng.standard_normal((n_terms, n_particles, 4)) \
        + 1j * rng.standard_normal((n_terms, n_particles, 4))
    us = np.tile([1.0, 0.0, 0.0, 0.0], (n_particles, 1))

    n_samp = 500
    ts = np.linspace(2.0, -8.0, n_samp)
    v = np.array([0.3, -0.1, 0.2])
    xs = ts[:, None] * v[None, :]
    vs = np.tile(v, (n_samp, 1))
    p = np.array([-6.0, 0.5, 0.5, -0.5])

    return {
        "packet_eval (125 modes)":
            lambda k: k.packet_eval(E, P, W, 0.3, 0.1, -0.2, 0.7),
        "pair_current (2x2)":
            lambda k: k.pair_current(coeffs, phis, 1, us),
        "traj_interp (500 samples)":
            lambda k: k.traj_interp(ts, xs, vs, -3.21),
        "lightcone_bisect (500 samples)":
            lambda k: k.lightcone_bisect(ts, xs, vs, *p, p[0], 2.0),
    }


def bench_kernels(repeat):
    rng = np.random.default_rng(1)
    print(f"{'kernel':<34} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, case in kernel_cases(rng).items():
        t_py = timeit(lambda: case(_kernels_py), repeat)
        if _kernels is None:
            print(f"{name:<34} {t_py * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_c = timeit(lambda: case(_kernels), repeat)
        print(f"{name:<34} {t_py * 1e6:>10.1f}us {t_c * 1e6:>10.1f}us "
              f"{t_py / t_c:>8.1f}x")


def bench_end_to_end():
    code = (
        "import time, conetrace\n"
        "from conetrace import _backend\n"
        "scn = conetrace.load_scenario(%r)\n"
        "wf = scn.wavefunction()\n"
        "cfg = conetrace.IntegratorConfig(dt=scn.integrator.dt,\n"
        "    t_start=scn.t_start, t_end=-2.0)\n"
        "t0 = time.perf_counter()\n"
        "res = conetrace.run(wf, scn.boundary_positions,\n"
        "    scn.boundary_velocities, cfg)\n"
        "assert res.ok\n"
        "print(_backend.backend_name, time.perf_counter() - t0)\n"
        % str(ROOT / "scenarios" / "canonical_entangled.json"))
    print(f"\n{'end-to-end (2 particles, 100 steps)':<34}")
    for env_extra in ({"CONETRACE_PURE_PYTHON": "1"}, {}):
        env = dict(os.environ, **env_extra)
        env["PYTHONPATH"] = str(ROOT / "src")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"  {backend:<32} {float(seconds):>10.2f}s")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000,
                        help="inner iterations per kernel timing")
    parser.add_argument("--skip-e2e", action="store_true",
                        help="kernel micro-benchmarks only")
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; timing fallback only\n")
    bench_kernels(args.repeat)
    if not args.skip_e2e:
        bench_end_to_end()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
