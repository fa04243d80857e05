"""Regenerate the scenario files in scenarios/.

Every number a scenario needs is computed here from first principles
(spinor normalizations, equal-time boundary velocities) and written at
full double precision, so the files are reproducible byte for byte:

    python3 tools/gen_scenarios.py [out_dir]
"""
import itertools
import json
import math
import os
import sys

import numpy as np

from conetrace.bohm_dirac import bd_velocity
from conetrace.wavefunction import (Packet, PlaneWaveMode, WaveFunction,
                                    gaussian_comb, plane_wave_energy)


def mode_dict(mode):
    a = complex(mode.amplitude)
    return {
        "momentum": [float(c) for c in mode.momentum],
        "spin": mode.spin,
        "amplitude": [a.real, a.imag],
    }


def term_dict(coeff, packets):
    c = complex(coeff)
    return {
        "coefficient": [c.real, c.imag],
        "factors": [{"modes": [mode_dict(m) for m in p.modes]}
                    for p in packets],
    }


def binomial_comb(mass, center, spacing, half_width, spin="up"):
    """Comb with binomial weights: the position profile per axis is
    cos^(4*half_width)(spacing*x/2), exactly zero at the cell edge, so a
    box inside one cell holds essentially all the mass (no truncation
    ringing, unlike a hard-edged Gaussian comb)."""
    K = half_width
    w1 = [math.comb(2 * K, k + K) for k in range(-K, K + 1)]
    peak = math.comb(2 * K, K) ** 3
    modes = []
    for kx, ky, kz in itertools.product(range(-K, K + 1), repeat=3):
        w = w1[kx + K] * w1[ky + K] * w1[kz + K] / peak
        p = (center[0] + spacing * kx, center[1] + spacing * ky,
             center[2] + spacing * kz)
        modes.append(PlaneWaveMode(p, spin, w))
    return Packet(mass, modes)


def boundary_section(t_start, positions, wf=None, velocities=None):
    """Boundary block; velocities default to the equal-time law at the
    given configuration (the convention every scenario here follows)."""
    X = np.asarray(positions, dtype=float)
    if velocities is None:
        velocities = [bd_velocity(i, t_start, X, wf) for i in range(len(X))]
    return {
        "t_start": t_start,
        "particles": [
            {"position": [float(c) for c in x],
             "velocity": [float(c) for c in v]}
            for x, v in zip(X, velocities)
        ],
    }


def canonical_entangled():
    """Two particles in a two-term entangled state of counter-moving
    one-axis combs.  Made for the velocity-scale sweep: the deviation
    between the retarded and equal-time laws falls close to the cubic
    asymptotic rate over eps = 0.2, 0.1, 0.05."""
    def comb(sign):
        return gaussian_comb(1.0, (0.0, 0.0, sign * 0.5), (0.0, 0.0, 0.0),
                             0.25, modes_per_axis=5, spacing=0.25,
                             spin="up", axes=(2,))
    wf = WaveFunction([
        (0.8, [comb(+1), comb(-1)]),
        (0.48 + 0.36j, [comb(-1), comb(+1)]),
    ])
    positions = [[0.3, 0.0, 0.5], [-0.3, 0.0, -0.5]]
    return {
        "version": 1,
        "mass": 1.0,
        "particles": 2,
        "model": "retarded",
        "rng_seed": 2,
        "wavefunction": {"terms": [
            term_dict(0.8, wf.packets[0]),
            term_dict(0.48 + 0.36j, wf.packets[1]),
        ]},
        "boundary": boundary_section(0.0, positions, wf),
        "integrator": {"dt": 0.02, "t_end": -10.0},
        "outputs": {"trajectories": "canonical_entangled_trajectories.csv",
                    "report": "canonical_entangled_report.json"},
    }


def equivariance():
    """One particle, binomial comb with a z drift.  The ensemble section
    feeds the distributional transport test: an equal-time sample pushed
    forward by the law must match the density at the later time."""
    pkt = binomial_comb(1.0, (0.0, 0.0, 0.3), 0.3, half_width=2)
    wf = WaveFunction([(1.0, [pkt])])
    return {
        "version": 1,
        "mass": 1.0,
        "particles": 1,
        "model": "retarded",
        "rng_seed": 11,
        "wavefunction": {"terms": [term_dict(1.0, [pkt])]},
        "boundary": boundary_section(0.0, [[0.0, 0.0, 0.0]], wf),
        "integrator": {"dt": 0.05, "t_end": -1.0},
        "ensemble": {"box": [[-8.0, 8.0], [-8.0, 8.0], [-8.0, 8.0]],
                     "t1": 1.0, "count": 10000},
        "outputs": {"trajectories": "equivariance_trajectories.csv",
                    "report": "equivariance_report.json"},
    }


def nonconservation():
    """Two entangled particles at appreciable momenta.  The ensemble
    section feeds the probe that quantifies how far the retarded law's
    transport drifts from the equal-time density."""
    def comb(sign):
        return binomial_comb(1.0, (0.0, 0.0, sign * 0.6), 0.3, half_width=2)
    wf = WaveFunction([
        (0.8, [comb(+1), comb(-1)]),
        (0.48 + 0.36j, [comb(-1), comb(+1)]),
    ])
    positions = [[0.3, 0.0, 0.5], [-0.3, 0.0, -0.5]]
    return {
        "version": 1,
        "mass": 1.0,
        "particles": 2,
        "model": "retarded",
        "rng_seed": 5,
        "wavefunction": {"terms": [
            term_dict(0.8, wf.packets[0]),
            term_dict(0.48 + 0.36j, wf.packets[1]),
        ]},
        "boundary": boundary_section(0.0, positions, wf),
        "integrator": {"dt": 0.02, "t_end": -1.0},
        "ensemble": {"box": [[-8.0, 8.0], [-8.0, 8.0], [-8.0, 8.0]],
                     "t1": -0.8, "count": 200},
        "outputs": {"trajectories": "nonconservation_trajectories.csv",
                    "report": "nonconservation_report.json"},
    }


def psi_zero_node():
    """One particle resting on a constructed node of the wave function.

    Two standing-wave terms cancel exactly at the origin at t = 0: the
    z spinor components cancel pairwise within each term for all t, and
    the term coefficients are tuned so the remaining components cancel
    at t = 0.  The particle sits static at the origin (the current's
    space part vanishes there), the grid hits t = 0 exactly (dt is a
    power of two), and the run must stop with a wave-function-zero
    error instead of stepping over the node."""
    mass = 1.0
    p, pp = 0.5, 1.0
    N = math.sqrt(plane_wave_energy(np.array([0.0, 0.0, p]), mass) + mass)
    Np = math.sqrt(plane_wave_energy(np.array([0.0, 0.0, pp]), mass) + mass)
    pkt_a = Packet(mass, [PlaneWaveMode((0.0, 0.0, +p), "up", 1.0),
                          PlaneWaveMode((0.0, 0.0, -p), "up", 1.0)])
    pkt_b = Packet(mass, [PlaneWaveMode((0.0, 0.0, +pp), "up", 1.0),
                          PlaneWaveMode((0.0, 0.0, -pp), "up", 1.0)])
    return {
        "version": 1,
        "mass": mass,
        "particles": 1,
        "model": "retarded",
        "rng_seed": 3,
        "wavefunction": {"terms": [
            term_dict(1.0, [pkt_a]),
            term_dict(-N / Np, [pkt_b]),
        ]},
        "boundary": boundary_section(
            0.5, [[0.0, 0.0, 0.0]], velocities=[[0.0, 0.0, 0.0]]),
        "integrator": {"dt": 1.0 / 1024.0, "t_end": -0.5},
        "outputs": {"trajectories": "psi_zero_node_trajectories.csv",
                    "report": "psi_zero_node_report.json"},
    }


def lightlike_boundary():
    """One particle placed where the current is exactly lightlike.

    Amplitudes solve u(0, origin) = (1, 1, 1, -1)/2, whose current is
    proportional to (1, 0, 0, 1).  The very first velocity evaluation
    must refuse to divide through and stop with a lightlike error."""
    mass = 1.0
    p = 1.5
    E = plane_wave_energy(np.array([0.0, 0.0, p]), mass)
    N = math.sqrt(E + mass)
    c = p / (E + mass)
    a_plus = (1.0 + 1.0 / c) / (4.0 * N)
    a_minus = (1.0 - 1.0 / c) / (4.0 * N)
    modes = [PlaneWaveMode((0.0, 0.0, +p), "up", a_plus),
             PlaneWaveMode((0.0, 0.0, +p), "down", a_plus),
             PlaneWaveMode((0.0, 0.0, -p), "up", a_minus),
             PlaneWaveMode((0.0, 0.0, -p), "down", a_minus)]
    pkt = Packet(mass, modes)
    return {
        "version": 1,
        "mass": mass,
        "particles": 1,
        "model": "retarded",
        "rng_seed": 4,
        "wavefunction": {"terms": [term_dict(1.0, [pkt])]},
        "boundary": boundary_section(
            0.0, [[0.0, 0.0, 0.0]], velocities=[[0.0, 0.0, 0.0]]),
        "integrator": {"dt": 0.01, "t_end": -1.0},
        "outputs": {"trajectories": "lightlike_trajectories.csv",
                    "report": "lightlike_report.json"},
    }


def static_pair():
    """Two independent particles in rest-frame plane waves: velocities
    vanish identically, so the run finishes instantly with constant
    trajectories.  Handy smoke-test and determinism fixture."""
    pkt_up = Packet(1.0, [PlaneWaveMode((0.0, 0.0, 0.0), "up", 1.0)])
    pkt_dn = Packet(1.0, [PlaneWaveMode((0.0, 0.0, 0.0), "down", 1.0)])
    return {
        "version": 1,
        "mass": 1.0,
        "particles": 2,
        "model": "retarded",
        "rng_seed": 1,
        "wavefunction": {"terms": [term_dict(1.0, [pkt_up, pkt_dn])]},
        "boundary": boundary_section(
            0.0, [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
            velocities=[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        "integrator": {"dt": 0.05, "t_end": -1.0},
        "outputs": {"trajectories": "static_pair_trajectories.csv",
                    "report": "static_pair_report.json"},
    }


SCENARIOS = {
    "canonical_entangled": canonical_entangled,
    "equivariance": equivariance,
    "nonconservation": nonconservation,
    "psi_zero_node": psi_zero_node,
    "lightlike": lightlike_boundary,
    "static_pair": static_pair,
}


def main(out_dir=None):
    out_dir = out_dir or os.path.join(os.path.dirname(__file__), "..",
                                      "scenarios")
    os.makedirs(out_dir, exist_ok=True)
    for name, build in SCENARIOS.items():
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(build(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print("wrote", os.path.normpath(path))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
