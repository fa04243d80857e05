"""Executable invariant suite: the properties the whole construction
rests on, bundled as named checks for the command line.

Each check draws its randomness from the seed it is handed, returns
(ok, detail), and runs in well under a second so the full suite stays
interactive.  The same properties are exercised more aggressively in
the test suite; this registry is the quick field diagnostic.
"""

from __future__ import annotations

import numpy as np

from . import dynamics, spinors
from .bohm_dirac import bd_run, bd_velocity
from .errors import NoCrossingError
from .minkowski import boost_matrix, minkowski_dot, minkowski_norm2
from .wavefunction import (PlaneWaveMode, Packet, WaveFunction, density,
                           dirac_residual, evaluate_multi, gaussian_comb,
                           u_spinor)
from .worldline import Seed, Trajectory, _seed_crossing, retarded_point

CHECKS = []


def _register(name):
    def deco(fn):
        CHECKS.append((name, fn))
        return fn
    return deco


def _random_spinor(rng, n):
    re = rng.standard_normal((4,) * n)
    im = rng.standard_normal((4,) * n)
    return re + 1j * im


def _random_future_unit(rng, max_rapidity=2.0):
    """Future-timelike unit four-velocity with |rapidity| <= max."""
    chi = rng.uniform(0.0, max_rapidity)
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    return np.concatenate(([np.cosh(chi)], np.sinh(chi) * n))


def _random_packet(rng, n_modes=None, p_scale=0.4):
    n_modes = n_modes or rng.integers(1, 5)
    modes = []
    for _ in range(n_modes):
        p = p_scale * rng.standard_normal(3)
        spin = "up" if rng.random() < 0.5 else "down"
        amp = complex(*rng.standard_normal(2))
        modes.append(PlaneWaveMode(tuple(p), spin, amp))
    return Packet(1.0, modes)


def _random_wavefunction(rng, n_particles, n_terms=2):
    terms = []
    for _ in range(n_terms):
        coeff = complex(*rng.standard_normal(2))
        terms.append((coeff, [_random_packet(rng) for _ in range(n_particles)]))
    return WaveFunction(terms)


@_register("gamma-algebra")
def check_gamma_algebra(rng):
    """Anticommutators match the metric exactly; gamma0 conjugation flips
    the spatial matrices."""
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    for mu in range(4):
        for nu in range(4):
            g = spinors.gamma(mu) @ spinors.gamma(nu) + spinors.gamma(nu) @ spinors.gamma(mu)
            if not np.array_equal(g, 2.0 * eta[mu, nu] * np.eye(4)):
                return False, f"anticommutator ({mu},{nu}) wrong"
    for mu in range(4):
        lhs = spinors.gamma(0) @ spinors.gamma(mu).conj().T @ spinors.gamma(0)
        if not np.allclose(lhs, spinors.gamma(mu), atol=0.0):
            return False, f"adjoint relation fails for mu={mu}"
    return True, "exact"


@_register("causal-character")
def check_causal_character(rng, draws=2000):
    """Random spinors and future-timelike contraction vectors always give
    a future-pointing, timelike-or-lightlike current."""
    worst_norm = np.inf
    worst_lam = np.inf
    for _ in range(draws):
        n = int(rng.integers(1, 4))
        psi = _random_spinor(rng, n)
        i = int(rng.integers(n))
        us = [_random_future_unit(rng) for _ in range(n - 1)]
        j = spinors.current_vector(psi, i, us)
        lam = spinors.timelike_certificate(j, np.array([1.0, 0, 0, 0]))
        scale = float(j @ j) + 1e-300
        worst_norm = min(worst_norm, minkowski_norm2(j) / scale)
        worst_lam = min(worst_lam, lam / np.sqrt(scale))
    ok = worst_norm > -1e-9 and worst_lam > -1e-9
    return ok, f"min norm2/|j|^2 = {worst_norm:.2e}, min lambda = {worst_lam:.2e}"


@_register("lightlike-example")
def check_lightlike_example(rng, draws=100):
    """First factor (1,1,1,-1)/2 forces the first particle's current onto
    the lightlike direction (1,0,0,1) regardless of the rest."""
    fixed = 0.5 * np.array([1.0, 1.0, 1.0, -1.0], dtype=complex)
    target = np.array([1.0, 0.0, 0.0, 1.0])
    worst = 0.0
    for _ in range(draws):
        psi = np.multiply.outer(fixed, _random_spinor(rng, 1))
        u2 = _random_future_unit(rng)
        j = spinors.current_vector(psi, 0, [u2])
        if j[0] <= 0:
            return False, "time component not positive"
        worst = max(worst, float(np.max(np.abs(j / j[0] - target))))
    return worst < 1e-12, f"max deviation from lightlike direction {worst:.2e}"


@_register("boost-covariance")
def check_boost_covariance(rng, draws=60):
    """Boosting the spinor slot-wise and the contraction vectors as
    four-vectors boosts the output current."""
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(1, 4))
        psi = _random_spinor(rng, n)
        i = int(rng.integers(n))
        us = [_random_future_unit(rng) for _ in range(n - 1)]
        chi = rng.uniform(-2.0, 2.0)
        axis = int(rng.integers(1, 4))
        L = boost_matrix(chi, axis)
        S = spinors.spinor_boost(chi, axis)
        psi_b = psi
        for slot in range(n):
            psi_b = spinors.apply_slot(S, psi_b, slot)
        us_b = [L @ u for u in us]
        lhs = spinors.current_vector(psi_b, i, us_b)
        rhs = L @ spinors.current_vector(psi, i, us)
        scale = np.max(np.abs(rhs)) + 1e-300
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
    return worst < 1e-8, f"max relative covariance defect {worst:.2e}"


@_register("dirac-residual")
def check_dirac_residual(rng):
    """Finite-difference Dirac residual of packet superpositions decays at
    second order in the step."""
    wf = _random_wavefunction(rng, 2)
    events = rng.standard_normal((2, 4))
    slot = int(rng.integers(2))
    hs = [1e-2, 5e-3, 2.5e-3]
    norms = []
    for h in hs:
        res = dirac_residual(wf, events, slot, h)
        norms.append(float(np.linalg.norm(res)))
    slope = np.polyfit(np.log(hs), np.log(norms), 1)[0]
    return slope >= 1.9, f"observed order {slope:.3f}"


@_register("density-consistency")
def check_density_consistency(rng, draws=40):
    """Equal-time density equals the all-time-components current tensor
    entry computed from the dense spinor."""
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(1, 3))
        wf = _random_wavefunction(rng, n)
        t = rng.standard_normal()
        pos = rng.standard_normal((n, 3))
        events = np.column_stack([np.full(n, t), pos])
        rho = density(wf, t, pos)
        psi = evaluate_multi(wf, events)
        j_all = spinors.current_tensor(psi)[(0,) * n]
        scale = abs(j_all) + 1e-300
        worst = max(worst, abs(rho - j_all) / scale)
    return worst < 1e-12, f"max relative mismatch {worst:.2e}"


@_register("guided-vs-dense")
def check_guided_vs_dense(rng, draws=40):
    """The factorized current kernel agrees with the dense tensor route."""
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(1, 4))
        wf = _random_wavefunction(rng, n)
        events = rng.standard_normal((n, 4))
        i = int(rng.integers(n))
        us = np.array([_random_future_unit(rng) for _ in range(n)])
        v, _, _ = dynamics.guided_velocity(wf, events, us, i)
        psi = evaluate_multi(wf, events)
        others = [us[j] for j in range(n) if j != i]
        j4 = spinors.current_vector(psi, i, others)
        v_ref = j4[1:] / j4[0]
        worst = max(worst, float(np.max(np.abs(v - v_ref))))
    return worst < 1e-12, f"max velocity mismatch {worst:.2e}"


@_register("projective-contraction")
def check_projective(rng, draws=40):
    """Rescaling the contraction four-velocities by positive scalars
    leaves the velocity unchanged: the law is parametrization-free."""
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(2, 4))
        wf = _random_wavefunction(rng, n)
        events = rng.standard_normal((n, 4))
        i = int(rng.integers(n))
        us = np.array([_random_future_unit(rng) for _ in range(n)])
        v1, _, _ = dynamics.guided_velocity(wf, events, us, i)
        scales = rng.uniform(0.1, 10.0, size=n)[:, None]
        v2, _, _ = dynamics.guided_velocity(wf, events, us * scales, i)
        worst = max(worst, float(np.max(np.abs(v1 - v2))))
    return worst < 1e-12, f"max velocity shift {worst:.2e}"


@_register("phase-invariance")
def check_phase_invariance(rng, draws=20):
    """A global phase on the wave function changes nothing downstream."""
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(1, 3))
        wf = _random_wavefunction(rng, n)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        wf2 = WaveFunction([(phase * c, row) for c, row in
                            zip(wf.coefficients, wf.packets)])
        events = rng.standard_normal((n, 4))
        i = int(rng.integers(n))
        us = np.array([_random_future_unit(rng) for _ in range(n)])
        v1, _, _ = dynamics.guided_velocity(wf, events, us, i)
        v2, _, _ = dynamics.guided_velocity(wf2, events, us, i)
        worst = max(worst, float(np.max(np.abs(v1 - v2))))
    return worst < 1e-12, f"max velocity shift {worst:.2e}"


@_register("retarded-oracle")
def check_retarded_oracle(rng, draws=200):
    """Bisection on densely sampled straight world lines agrees with the
    closed-form light-cone crossing."""
    worst = 0.0
    for _ in range(draws):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        # Speed capped at 0.8 bounds the crossing time by
        # (p0 + |x0 - p|) / (1 - 0.8) < 54, inside the sampled span.
        v = rng.uniform(0.0, 0.8) * direction
        x0 = rng.uniform(-2, 2, size=3)
        ts = np.linspace(120.0, -5.0, 1200)
        traj = Trajectory.from_samples(ts, x0 + v * ts[:, None],
                                       np.tile(v, (len(ts), 1)))
        p = np.concatenate([rng.uniform(-2, 2, size=1), rng.uniform(-3, 3, size=3)])
        rp = retarded_point(traj, p)
        t_exact = _seed_crossing(Seed(0.0, x0.copy(), v.copy()), p)
        worst = max(worst, abs(rp.t - t_exact) / (1.0 + abs(t_exact)))
    return worst < 1e-10, f"max crossing-time error {worst:.2e}"


@_register("no-crossing-curve")
def check_no_crossing(rng):
    """The timelike hyperbola that stays above the light cone of the
    origin is reported as having no crossing."""
    ts = np.linspace(60.0, -60.0, 4001)
    xs = np.zeros((len(ts), 3))
    xs[:, 2] = np.sqrt(1.0 + ts * ts)
    vs = np.zeros((len(ts), 3))
    vs[:, 2] = ts / np.sqrt(1.0 + ts * ts)
    traj = Trajectory.from_samples(ts, xs, vs)
    try:
        rp = retarded_point(traj, np.zeros(4))
    except NoCrossingError:
        return True, "no crossing detected, as required"
    return False, f"spurious crossing at t={rp.t}"


@_register("rest-packet-static")
def check_rest_static(rng):
    """A particle guided by a rest-frame packet does not move."""
    packet = Packet(1.0, [PlaneWaveMode((0.0, 0.0, 0.0), "up", 1.0)])
    wf = WaveFunction([(1.0, [packet])])
    v = bd_velocity(0, 0.3, np.zeros((1, 3)), wf)
    if np.any(v != 0.0):
        return False, f"rest packet gives v={v}"
    rho = density(wf, 0.0, np.zeros((1, 3)))
    return abs(rho - 2.0) < 1e-12, f"rest density {rho}"


@_register("n1-reduction")
def check_n1_reduction(rng):
    """Retarded and equal-time integrations coincide for one particle."""
    wf = WaveFunction([(1.0, [gaussian_comb(1.0, (0.0, 0.0, 0.3), (0.0, 0.0, 0.0),
                                            0.2, modes_per_axis=3)])])
    config = dynamics.IntegratorConfig(dt=0.01, t_start=0.0, t_end=-1.0)
    x0 = np.array([[0.2, -0.1, 0.4]])
    v0 = np.array([bd_velocity(0, 0.0, x0, wf)])
    ret = dynamics.run(wf, x0, v0, config)
    bd = bd_run(wf, x0, v0, config)
    if ret.error is not None or bd.error is not None:
        return False, "integration aborted"
    dev = np.max(np.abs(ret.trajectories[0].positions - bd.trajectories[0].positions))
    return dev < 1e-10, f"max position deviation {dev:.2e}"


def run_checks(seed=0):
    """Run every registered check with independent derived seeds.
    Returns a list of (name, ok, detail)."""
    root = np.random.SeedSequence(int(seed))
    results = []
    for (name, fn), child in zip(CHECKS, root.spawn(len(CHECKS))):
        rng = np.random.default_rng(child)
        try:
            ok, detail = fn(rng)
        except Exception as err:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(err).__name__}: {err}"
        results.append((name, bool(ok), detail))
    return results
