"""Batch command-line front end.

Subcommands: run (integrate a scenario to CSV + report), checks (the
invariant suite), ensemble (transport statistics), sweep (velocity-scale
family comparison).  Exit codes: 0 success, 1 failed checks, 2 invalid
input, 3 dynamics error during integration.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__, _backend, dynamics, ensemble
from .bohm_dirac import bd_run
from .checks import run_checks
from .errors import ConetraceError, DynamicsError, ScenarioError
from .output import report_json, run_report, write_report_json, write_trajectories_csv
from .scenario import load_scenario


def cmd_run(args):
    scenario = load_scenario(args.scenario)
    wf = scenario.wavefunction()
    runner = dynamics.run if scenario.model == "retarded" else (
        lambda *a: bd_run(*a, direction="backward"))
    result = runner(wf, scenario.boundary_positions,
                    scenario.boundary_velocities, scenario.integrator)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_name = scenario.outputs.get("trajectories", "trajectories.csv")
    report_name = scenario.outputs.get("report", "report.json")
    write_trajectories_csv(os.path.join(args.out_dir, csv_name),
                           result.trajectories)
    write_report_json(os.path.join(args.out_dir, report_name),
                      run_report(scenario, result, _backend.backend_name,
                                 __version__))
    if result.error is not None:
        err = result.error
        print(f"dynamics error [{err.cause}] particle={err.particle} "
              f"t={err.t}: {err}", file=sys.stderr)
        return 3
    return 0


def cmd_checks(args):
    results = run_checks(seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {status}  {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def _ensemble_settings(args, scenario):
    ens = scenario.ensemble
    if ens is None:
        raise ScenarioError(f"{scenario.source}: no ensemble section")
    count = args.count if args.count is not None else ens.get("count")
    if count is None:
        raise ScenarioError("sample count required (--count or scenario)")
    if count < 1:
        raise ScenarioError("sample count must be at least 1")
    t1 = args.t1 if args.t1 is not None else ens.get("t1",
                                                     scenario.integrator.t_end)
    seed = args.seed if args.seed is not None else scenario.rng_seed
    return ens["box"], int(count), float(t1), int(seed)


def cmd_ensemble(args):
    scenario = load_scenario(args.scenario)
    wf = scenario.wavefunction()
    box, count, t1, seed = _ensemble_settings(args, scenario)
    if wf.n_particles == 1:
        report = ensemble.equivariance_test(
            wf, scenario.t_start, t1, count, box,
            scenario.integrator.dt, seed)
    else:
        report = ensemble.nonconservation_probe(
            wf, t1, count, box, scenario.integrator, seed, jobs=args.jobs)
    text = report_json(report.to_dict())
    sys.stdout.write(text)
    if args.out_dir is not None:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "ensemble_report.json"), "w") as fh:
            fh.write(text)
    return 0


def cmd_sweep(args):
    scenario = load_scenario(args.scenario)
    if any(e <= 0 for e in args.eps):
        raise ScenarioError("eps values must be positive")
    report = ensemble.limit_sweep(scenario, args.eps)
    text = report_json(report.to_dict())
    sys.stdout.write(text)
    if args.out_dir is not None:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "sweep_report.json"), "w") as fh:
            fh.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="conetrace",
        description="Trajectory simulator for wave-function-guided Dirac "
                    "particles with light-cone-retarded interactions, plus "
                    "the equal-time guidance law as reference.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({_backend.backend_name} backend)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario; write CSV and report")
    p_run.add_argument("--scenario", required=True, help="scenario JSON path")
    p_run.add_argument("--out-dir", default=".", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_checks = sub.add_parser("checks", help="run the invariant check suite")
    p_checks.add_argument("--seed", type=int, default=0,
                          help="seed for the property draws")
    p_checks.set_defaults(func=cmd_checks)

    p_ens = sub.add_parser("ensemble",
                           help="sample, transport, and report distribution metrics")
    p_ens.add_argument("--scenario", required=True)
    p_ens.add_argument("--count", type=int, default=None, help="sample count")
    p_ens.add_argument("--t1", type=float, default=None,
                       help="comparison time (default: scenario t_end)")
    p_ens.add_argument("--seed", type=int, default=None)
    p_ens.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for ensemble members")
    p_ens.add_argument("--out-dir", default=None)
    p_ens.set_defaults(func=cmd_ensemble)

    p_sweep = sub.add_parser("sweep",
                             help="velocity-scale sweep comparing both laws")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--eps", type=float, nargs="+", required=True,
                         help="velocity scales, e.g. --eps 0.2 0.1 0.05")
    p_sweep.add_argument("--out-dir", default=None)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as err:
        print(f"scenario error: {err}", file=sys.stderr)
        return 2
    except DynamicsError as err:
        print(f"dynamics error [{err.cause}]: {err}", file=sys.stderr)
        return 3
    except ConetraceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
