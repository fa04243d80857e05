import os
import subprocess
import sys

import numpy as np
import pytest

from conetrace import _backend, _kernels_py
from conftest import random_packet, random_wavefunction

compiled = pytest.importorskip("conetrace._kernels",
                               reason="compiled extension not built")


def test_backend_selected_compiled():
    # the test environment builds the extension; imports must pick it up
    assert _backend.backend_name == "compiled"


def test_pure_python_override_via_env():
    code = ("import conetrace._backend as b; print(b.backend_name); "
            "print(b.packet_eval is __import__('conetrace._kernels_py', "
            "fromlist=['x']).packet_eval)")
    env = dict(os.environ, CONETRACE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "True"]


def test_packet_eval_parity(rng):
    packet = random_packet(rng, n_modes=7)
    for _ in range(10):
        t, x, y, z = rng.uniform(-3, 3, size=4)
        a = compiled.packet_eval(packet.energies, packet.momenta,
                                 packet.weights, t, x, y, z)
        b = _kernels_py.packet_eval(packet.energies, packet.momenta,
                                    packet.weights, t, x, y, z)
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_pair_current_parity(rng):
    wf = random_wavefunction(rng, 2, n_terms=3)
    phis = np.stack([
        [rng.standard_normal(4) + 1j * rng.standard_normal(4)
         for _ in range(2)] for _ in range(3)])
    us = np.array([[1.0, 0.1, 0.0, -0.2], [1.0, 0.0, 0.3, 0.0]])
    for i in range(2):
        ja, na, sa = compiled.pair_current(wf.coefficients, phis, i, us)
        jb, nb, sb = _kernels_py.pair_current(wf.coefficients, phis, i, us)
        np.testing.assert_allclose(ja, jb, atol=1e-11)
        assert na == pytest.approx(nb, rel=1e-12, abs=1e-14)
        assert sa == pytest.approx(sb, rel=1e-12)


def test_traj_interp_parity(rng):
    ts = np.linspace(1.0, -2.0, 40)
    xs = np.column_stack([np.sin(ts), np.cos(ts), 0.2 * ts]) * 0.3
    vs = np.column_stack([np.cos(ts), -np.sin(ts), np.full(40, 0.2)]) * 0.3
    for t in rng.uniform(-2.0, 1.0, size=12):
        pa, va = compiled.traj_interp(ts, xs, vs, t)
        pb, vb = _kernels_py.traj_interp(ts, xs, vs, t)
        np.testing.assert_allclose(pa, pb, atol=1e-12)
        np.testing.assert_allclose(va, vb, atol=1e-12)


def test_lightcone_kernels_parity(rng):
    ts = np.linspace(5.0, -1.0, 60)
    v = np.array([0.3, -0.1, 0.2])
    xs = ts[:, None] * v[None, :]
    vs = np.tile(v, (60, 1))
    p = np.array([-0.5, 1.0, 0.5, -1.0])
    for t in rng.uniform(-1.0, 5.0, size=8):
        ga = compiled.lightcone_g(ts, xs, vs, *p, t)
        gb = _kernels_py.lightcone_g(ts, xs, vs, *p, t)
        assert ga == pytest.approx(gb, abs=1e-12)
    ra = compiled.lightcone_bisect(ts, xs, vs, *p, p[0], 5.0)
    rb = _kernels_py.lightcone_bisect(ts, xs, vs, *p, p[0], 5.0)
    assert ra == pytest.approx(rb, abs=1e-10)


def test_within_backend_determinism(rng):
    """Each backend is bitwise reproducible against itself (cross-backend
    equality is only approximate: compilers may contract differently)."""
    packet = random_packet(rng, n_modes=5)
    args = (packet.energies, packet.momenta, packet.weights, 0.3, 0.1, -0.2, 0.7)
    np.testing.assert_array_equal(compiled.packet_eval(*args),
                                  compiled.packet_eval(*args))
    np.testing.assert_array_equal(_kernels_py.packet_eval(*args),
                                  _kernels_py.packet_eval(*args))


def test_backend_exports_complete():
    for name in ("packet_eval", "pair_current", "traj_interp", "lightcone_g",
                 "lightcone_bisect", "packet_eval_batch"):
        assert callable(getattr(_backend, name))
