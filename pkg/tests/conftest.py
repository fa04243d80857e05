from pathlib import Path

import numpy as np
import pytest

from conetrace.scenario import load_scenario
from conetrace.wavefunction import (Packet, PlaneWaveMode, WaveFunction,
                                    gaussian_comb)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_path(name):
    return SCENARIO_DIR / f"{name}.json"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def canonical():
    return load_scenario(scenario_path("canonical_entangled"))


@pytest.fixture(scope="session")
def static_pair():
    return load_scenario(scenario_path("static_pair"))


@pytest.fixture
def rest_wf():
    """Single particle in a rest-frame plane wave: velocity is exactly
    zero and the density is constant (handy analytic oracle)."""
    pkt = Packet(1.0, [PlaneWaveMode((0.0, 0.0, 0.0), "up", 1.0)])
    return WaveFunction([(1.0, [pkt])])


@pytest.fixture
def small_packet():
    return gaussian_comb(1.0, (0.1, 0.0, 0.3), (0.0, 0.0, 0.0), 0.3,
                         modes_per_axis=3, spacing=0.3, spin="up", axes=(2,))


def random_packet(rng, n_modes=3, p_scale=0.4, mass=1.0):
    modes = []
    for _ in range(n_modes):
        p = p_scale * rng.standard_normal(3)
        spin = "up" if rng.random() < 0.5 else "down"
        amp = complex(*rng.standard_normal(2))
        modes.append(PlaneWaveMode(tuple(p), spin, amp))
    return Packet(mass, modes)


def random_wavefunction(rng, n_particles, n_terms=2, n_modes=3):
    terms = []
    for _ in range(n_terms):
        coeff = complex(*rng.standard_normal(2))
        terms.append((coeff,
                      [random_packet(rng, n_modes=n_modes)
                       for _ in range(n_particles)]))
    return WaveFunction(terms)


def random_future_unit(rng, max_rapidity=2.0):
    """Random future-directed unit timelike four-vector."""
    chi = rng.uniform(0.0, max_rapidity)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return np.concatenate(([np.cosh(chi)], np.sinh(chi) * direction))
