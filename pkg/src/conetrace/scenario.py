"""Scenario files: strict JSON schema, validation, and construction of
the objects a run needs.

A scenario fixes the particle count, shared mass, wave function (terms
of per-particle mode lists), boundary data at t_start, integrator
window and tolerances, the model to integrate, and optional ensemble
settings.  Unknown keys are rejected so typos fail loudly before any
computation starts.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .dynamics import IntegratorConfig
from .errors import ScenarioError
from .wavefunction import Packet, PlaneWaveMode, WaveFunction

_COMPLEX = {
    "type": "array", "items": {"type": "number"},
    "minItems": 2, "maxItems": 2,
}
_VEC3 = {
    "type": "array", "items": {"type": "number"},
    "minItems": 3, "maxItems": 3,
}
_INTERVAL = {
    "type": "array", "items": {"type": "number"},
    "minItems": 2, "maxItems": 2,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "mass", "particles", "model", "wavefunction",
                 "boundary", "integrator"],
    "properties": {
        "version": {"const": 1},
        "mass": {"type": "number", "exclusiveMinimum": 0},
        "particles": {"type": "integer", "minimum": 1},
        "model": {"enum": ["retarded", "bohm-dirac"]},
        "rng_seed": {"type": "integer", "minimum": 0},
        "wavefunction": {
            "type": "object",
            "additionalProperties": False,
            "required": ["terms"],
            "properties": {
                "terms": {
                    "type": "array", "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["coefficient", "factors"],
                        "properties": {
                            "coefficient": _COMPLEX,
                            "factors": {
                                "type": "array", "minItems": 1,
                                "items": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "required": ["modes"],
                                    "properties": {
                                        "modes": {
                                            "type": "array", "minItems": 1,
                                            "items": {
                                                "type": "object",
                                                "additionalProperties": False,
                                                "required": ["momentum", "spin",
                                                             "amplitude"],
                                                "properties": {
                                                    "momentum": _VEC3,
                                                    "spin": {"enum": ["up", "down"]},
                                                    "amplitude": _COMPLEX,
                                                },
                                            },
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
        "boundary": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t_start", "particles"],
            "properties": {
                "t_start": {"type": "number"},
                "particles": {
                    "type": "array", "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["position", "velocity"],
                        "properties": {
                            "position": _VEC3,
                            "velocity": _VEC3,
                        },
                    },
                },
            },
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dt", "t_end"],
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number"},
                "lightlike_tol": {"type": "number", "exclusiveMinimum": 0},
                "delay_min": {"type": "number", "exclusiveMinimum": 0},
                "psi_zero_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "ensemble": {
            "type": "object",
            "additionalProperties": False,
            "required": ["box"],
            "properties": {
                "box": {
                    "type": "array", "minItems": 3, "maxItems": 3,
                    "items": _INTERVAL,
                },
                "t1": {"type": "number"},
                "count": {"type": "integer", "minimum": 1},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trajectories": {"type": "string"},
                "report": {"type": "string"},
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass
class Scenario:
    """Parsed and validated scenario."""

    version: int
    mass: float
    n_particles: int
    model: str
    rng_seed: int
    t_start: float
    boundary_positions: np.ndarray
    boundary_velocities: np.ndarray
    integrator: IntegratorConfig
    ensemble: dict | None
    outputs: dict
    raw: dict
    source: str

    def wavefunction(self):
        terms = []
        for term in self.raw["wavefunction"]["terms"]:
            coeff = complex(*term["coefficient"])
            factors = []
            for factor in term["factors"]:
                modes = [PlaneWaveMode(tuple(m["momentum"]), m["spin"],
                                       complex(*m["amplitude"]))
                         for m in factor["modes"]]
                factors.append(Packet(self.mass, modes))
            terms.append((coeff, factors))
        return WaveFunction(terms)


def _reject_nonfinite(token):
    raise ScenarioError(f"non-finite number {token!r} in scenario JSON")


def load_scenario(path):
    """Read, schema-check and semantically validate a scenario file."""
    try:
        with open(path) as fh:
            data = json.load(fh, parse_constant=_reject_nonfinite)
    except OSError as err:
        raise ScenarioError(f"cannot read scenario: {err}") from err
    except json.JSONDecodeError as err:
        raise ScenarioError(f"malformed JSON in {path}: {err}") from err
    return parse_scenario(data, source=str(path))


def parse_scenario(data, source="<dict>"):
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.path) or "<root>"
        raise ScenarioError(f"{source}: schema violation at {where}: {first.message}")

    n = data["particles"]
    terms = data["wavefunction"]["terms"]
    for k, term in enumerate(terms):
        if len(term["factors"]) != n:
            raise ScenarioError(
                f"{source}: term {k} has {len(term['factors'])} factors, "
                f"expected {n}")
    bparts = data["boundary"]["particles"]
    if len(bparts) != n:
        raise ScenarioError(
            f"{source}: boundary lists {len(bparts)} particles, expected {n}")

    positions = np.array([p["position"] for p in bparts], dtype=float)
    velocities = np.array([p["velocity"] for p in bparts], dtype=float)
    speeds = np.linalg.norm(velocities, axis=1)
    if np.any(speeds >= 1.0):
        raise ScenarioError(
            f"{source}: boundary speed {speeds.max()} is not below 1")

    integ = data["integrator"]
    t_start = data["boundary"]["t_start"]
    if not integ["t_end"] < t_start:
        raise ScenarioError(f"{source}: t_end must lie below t_start")
    config = IntegratorConfig(
        dt=integ["dt"], t_start=t_start, t_end=integ["t_end"],
        lightlike_tol=integ.get("lightlike_tol", 1e-6),
        delay_min=integ.get("delay_min", 1e-9),
        psi_zero_tol=integ.get("psi_zero_tol", 1e-12),
    )

    ens = data.get("ensemble")
    if ens is not None:
        box = np.asarray(ens["box"], dtype=float)
        if np.any(box[:, 1] <= box[:, 0]):
            raise ScenarioError(f"{source}: ensemble box has empty extent")

    return Scenario(
        version=data["version"],
        mass=float(data["mass"]),
        n_particles=n,
        model=data["model"],
        rng_seed=int(data.get("rng_seed", 0)),
        t_start=float(t_start),
        boundary_positions=positions,
        boundary_velocities=velocities,
        integrator=config,
        ensemble=copy.deepcopy(ens),
        outputs=dict(data.get("outputs", {})),
        raw=copy.deepcopy(data),
        source=source,
    )


def scale_scenario(scn, eps):
    """Family member at velocity scale eps: every mode momentum times eps
    (momentum spreads scale along), boundary velocities recomputed from
    the equal-time law at the boundary configuration.

    Packet centers are phase-encoded in the amplitudes, so scenarios
    meant for sweeping keep amplitudes real (packets centered at the
    phase origin); then scaling momenta leaves the centers in place.
    """
    from .bohm_dirac import bd_velocity

    if not eps > 0:
        raise ScenarioError("eps must be positive")
    raw = copy.deepcopy(scn.raw)
    for term in raw["wavefunction"]["terms"]:
        for factor in term["factors"]:
            for mode in factor["modes"]:
                mode["momentum"] = [eps * c for c in mode["momentum"]]
    interim = parse_scenario(raw, source=f"{scn.source}@eps={eps}")
    wf = interim.wavefunction()
    for i, pdata in enumerate(raw["boundary"]["particles"]):
        v = bd_velocity(i, interim.t_start, interim.boundary_positions, wf)
        pdata["velocity"] = [float(c) for c in v]
    return parse_scenario(raw, source=f"{scn.source}@eps={eps}")
