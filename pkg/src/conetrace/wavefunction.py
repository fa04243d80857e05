"""Free multi-particle Dirac wave functions.

A Packet is one particle's spinor field: a finite superposition of
positive-energy plane-wave modes, each an exact solution of the free
Dirac equation.  A WaveFunction is a finite sum of tensor-product terms
of per-particle packets, so evaluation anywhere in space-time is exact
in every particle slot.  No PDE grid, no interpolation error.

Conventions: metric (+,-,-,-), natural units, modes evolve as
exp(-i(E t - p.x)) with E = +sqrt(m^2 + |p|^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .spinors import GAMMA, PAULI, apply_slot

SPINS = {"up": 0, "down": 1, 0: 0, 1: 1}


def u_spinor(momentum, spin, m):
    """Positive-energy free spinor u(p, s), normalized to u^dag u = 2E."""
    p = np.asarray(momentum, dtype=float)
    if m <= 0:
        raise ValueError("mass must be positive")
    energy = np.sqrt(m * m + p @ p)
    chi = np.zeros(2, dtype=complex)
    chi[SPINS[spin]] = 1.0
    sigma_p = p[0] * PAULI[0] + p[1] * PAULI[1] + p[2] * PAULI[2]
    lower = (sigma_p @ chi) / (energy + m)
    return np.sqrt(energy + m) * np.concatenate([chi, lower])


def plane_wave_energy(momentum, m):
    p = np.asarray(momentum, dtype=float)
    return float(np.sqrt(m * m + p @ p))


@dataclass(frozen=True)
class PlaneWaveMode:
    """One plane wave: momentum 3-vector, spin label, complex amplitude."""

    momentum: tuple
    spin: str
    amplitude: complex


class Packet:
    """Single-particle spinor field: a finite sum of plane-wave modes.

    Caches per-mode energies, momenta and weighted spinors so pointwise
    evaluation is a single kernel call.
    """

    def __init__(self, mass, modes):
        if mass <= 0:
            raise ValueError("mass must be positive")
        if not modes:
            raise ValueError("packet needs at least one mode")
        self.mass = float(mass)
        self.modes = list(modes)
        n = len(self.modes)
        self.energies = np.empty(n, dtype=float)
        self.momenta = np.empty((n, 3), dtype=float)
        self.weights = np.empty((n, 4), dtype=complex)
        for k, mode in enumerate(self.modes):
            p = np.asarray(mode.momentum, dtype=float)
            self.energies[k] = plane_wave_energy(p, self.mass)
            self.momenta[k] = p
            self.weights[k] = complex(mode.amplitude) * u_spinor(p, mode.spin, self.mass)

    def __reduce__(self):
        return (Packet, (self.mass, self.modes))


def evaluate_packet(packet, event):
    """Spinor value of a packet at a space-time event (t, x, y, z)."""
    t, x, y, z = event
    return _backend.packet_eval(packet.energies, packet.momenta, packet.weights,
                                float(t), float(x), float(y), float(z))


def evaluate_packet_batch(packet, t, positions):
    """Packet values at one time and a batch of positions, shape (B, 4)."""
    pos = np.ascontiguousarray(positions, dtype=float)
    return _backend.packet_eval_batch(packet.energies, packet.momenta,
                                      packet.weights, float(t), pos)


class WaveFunction:
    """Finite sum of tensor-product terms of per-particle packets.

    terms: list of (coefficient, [packet_1, ..., packet_N]).  Every term
    must have the same particle count and per-slot masses must agree
    across terms (one Dirac equation per slot).
    """

    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise ValueError("wave function needs at least one term")
        self.coefficients = np.ascontiguousarray(
            [c for c, _ in terms], dtype=complex)
        self.packets = [list(factors) for _, factors in terms]
        n = len(self.packets[0])
        if n < 1:
            raise ValueError("terms need at least one factor")
        for row in self.packets:
            if len(row) != n:
                raise ValueError("all terms must have the same particle count")
        self.n_particles = n
        self.masses = [self.packets[0][j].mass for j in range(n)]
        for row in self.packets:
            for j, packet in enumerate(row):
                if packet.mass != self.masses[j]:
                    raise ValueError("per-slot masses must agree across terms")

    @property
    def n_terms(self):
        return len(self.packets)

    def __reduce__(self):
        terms = [(complex(c), row) for c, row in zip(self.coefficients, self.packets)]
        return (WaveFunction, (terms,))


def evaluate_factors(wf, events):
    """Per-term, per-slot packet values at the given events, shape (T, N, 4).

    events: array-like (N, 4); slot j is evaluated at events[j].
    """
    ev = np.asarray(events, dtype=float)
    out = np.empty((wf.n_terms, wf.n_particles, 4), dtype=complex)
    for ti, row in enumerate(wf.packets):
        for j, packet in enumerate(row):
            out[ti, j] = evaluate_packet(packet, ev[j])
    return out


def evaluate_multi(wf, events):
    """Full multi-spinor value at N events, canonical shape (4,)*N."""
    factors = evaluate_factors(wf, events)
    psi = np.zeros((4,) * wf.n_particles, dtype=complex)
    for c, row in zip(wf.coefficients, factors):
        term = row[0]
        for j in range(1, wf.n_particles):
            term = np.multiply.outer(term, row[j])
        psi = psi + c * term
    return psi


def density(wf, t, positions):
    """Equal-time probability density psi^dag psi at lab time t.

    positions: (N, 3).  Computed from pairwise factor overlaps, never
    materializing the 4^N tensor.
    """
    pos = np.asarray(positions, dtype=float).reshape(wf.n_particles, 3)
    events = np.column_stack([np.full(wf.n_particles, float(t)), pos])
    factors = evaluate_factors(wf, events)
    overlaps = np.einsum("sja,tja->stj", factors.conj(), factors)
    cc = np.multiply.outer(wf.coefficients.conj(), wf.coefficients)
    rho = float((cc * overlaps.prod(axis=2)).sum().real)
    return max(rho, 0.0)


def density_batch(wf, t, configurations):
    """Equal-time density for a batch of configurations, shape (B,).

    configurations: (B, N, 3).
    """
    X = np.asarray(configurations, dtype=float)
    B = X.shape[0]
    vals = [[evaluate_packet_batch(p, t, X[:, j, :]) for j, p in enumerate(row)]
            for row in wf.packets]
    rho = np.zeros(B, dtype=complex)
    T = wf.n_terms
    for s in range(T):
        for ti in range(T):
            w = np.conj(wf.coefficients[s]) * wf.coefficients[ti]
            prod = np.full(B, w, dtype=complex)
            for j in range(wf.n_particles):
                prod = prod * np.einsum("ba,ba->b", vals[s][j].conj(), vals[ti][j])
            rho += prod
    return np.maximum(rho.real, 0.0)


def psi_scale(wf, events):
    """Crude magnitude scale sum_t |c_t| prod_j |phi_tj| used for relative
    zero tests; matches the scale returned by the current kernel."""
    factors = evaluate_factors(wf, events)
    mags = np.sqrt(np.einsum("tja,tja->tj", factors.conj(), factors).real)
    return float(np.abs(wf.coefficients) @ mags.prod(axis=1))


def gaussian_comb(mass, momentum_center, x_center, sigma_p,
                  modes_per_axis=9, spacing=None, spin="up", axes=(0, 1, 2)):
    """Gaussian-weighted comb of plane-wave modes.

    Approximates a wave packet with momentum spread sigma_p centered at
    x_center (at t = 0) and mean momentum momentum_center.  The comb is
    exactly periodic in space with period 2*pi/spacing per active axis;
    choose boxes well inside one period.  axes selects which axes carry
    the mode lattice (inactive axes stay at the center momentum).
    """
    pc = np.asarray(momentum_center, dtype=float)
    x0 = np.asarray(x_center, dtype=float)
    if spacing is None:
        spacing = sigma_p
    half = (modes_per_axis - 1) / 2.0
    offsets = spacing * (np.arange(modes_per_axis) - half)
    grids = [offsets if ax in axes else np.array([0.0]) for ax in range(3)]
    modes = []
    for dx in grids[0]:
        for dy in grids[1]:
            for dz in grids[2]:
                d2 = dx * dx + dy * dy + dz * dz
                p = pc + np.array([dx, dy, dz])
                amp = np.exp(-d2 / (4.0 * sigma_p * sigma_p)) * np.exp(-1j * (p @ x0))
                modes.append(PlaneWaveMode(tuple(p), spin, complex(amp)))
    peak = max(abs(m.amplitude) for m in modes)
    modes = [PlaneWaveMode(m.momentum, m.spin, m.amplitude / peak) for m in modes]
    return Packet(mass, modes)


def dirac_residual(wf, events, slot, h):
    """Central finite-difference residual of the free Dirac operator
    acting on one particle slot; O(h^2) for exact solutions.

    Returns the residual multi-spinor (i gamma^mu d_mu - m) psi.
    """
    ev = np.asarray(events, dtype=float)
    res = -wf.masses[slot] * evaluate_multi(wf, ev)
    for mu in range(4):
        plus = ev.copy()
        plus[slot, mu] += h
        minus = ev.copy()
        minus[slot, mu] -= h
        dpsi = (evaluate_multi(wf, plus) - evaluate_multi(wf, minus)) / (2.0 * h)
        res = res + 1j * apply_slot(GAMMA[mu], dpsi, slot)
    return res
