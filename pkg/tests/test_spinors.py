import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conetrace.errors import ImaginaryResidueError
from conetrace.minkowski import ETA, boost_matrix, minkowski_norm2
from conetrace.spinors import (ALPHA, GAMMA, apply_slot, contract_current,
                               current_tensor, current_tensor_batch,
                               current_vector, dirac_adjoint, gamma, slash,
                               spinor_boost, timelike_certificate)
from conftest import random_future_unit


def random_multi_spinor(rng, n):
    shape = (4,) * n
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_gamma_anticommutation_exact():
    for mu in range(4):
        for nu in range(4):
            anti = GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
            assert np.array_equal(anti, 2.0 * ETA[mu, nu] * np.eye(4))


def test_gamma_hermiticity():
    # gamma0 hermitian, spatial gammas anti-hermitian
    assert np.array_equal(GAMMA[0].conj().T, GAMMA[0])
    for k in (1, 2, 3):
        assert np.array_equal(GAMMA[k].conj().T, -GAMMA[k])
        assert np.array_equal(ALPHA[k - 1].conj().T, ALPHA[k - 1])


def test_gamma_accessor_bounds():
    assert np.array_equal(gamma(2), GAMMA[2])
    with pytest.raises(ValueError):
        gamma(4)


def test_slash_definition(rng):
    u = rng.standard_normal(4)
    expect = sum(u[mu] * ETA[mu, mu] * GAMMA[mu] for mu in range(4))
    np.testing.assert_allclose(slash(u), expect, atol=1e-15)
    # slash(u)^2 = u.u identity
    np.testing.assert_allclose(slash(u) @ slash(u),
                               minkowski_norm2(u) * np.eye(4), atol=1e-12)


def test_apply_slot_matches_kron(rng):
    psi = random_multi_spinor(rng, 2)
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    out = apply_slot(M, psi, 1)
    expect = (np.kron(np.eye(4), M) @ psi.reshape(-1)).reshape(4, 4)
    np.testing.assert_allclose(out, expect, atol=1e-12)


def test_dirac_adjoint_single(rng):
    psi = random_multi_spinor(rng, 1)
    np.testing.assert_allclose(dirac_adjoint(psi), psi.conj() @ GAMMA[0],
                               atol=1e-15)


def test_current_tensor_vs_manual_bilinear(rng):
    # independent slow oracle: loop over index tuples with explicit kron
    psi = random_multi_spinor(rng, 2)
    J = current_tensor(psi)
    flat = psi.reshape(-1)
    bar = dirac_adjoint(psi).reshape(-1)
    for mu in range(4):
        for nu in range(4):
            op = np.kron(GAMMA[mu], GAMMA[nu])
            val = bar @ op @ flat
            assert abs(val.imag) < 1e-10 * max(abs(val), 1.0)
            assert J[mu, nu] == pytest.approx(val.real, abs=1e-10)


def test_current_tensor_large_n_consistent(rng):
    # the N = 4 loop path must agree with the einsum path restricted
    # to a product extension of an N = 3 state
    psi3 = random_multi_spinor(rng, 3)
    rest = np.zeros(4, dtype=complex)
    rest[0] = 1.0
    psi4 = np.tensordot(psi3, rest, axes=0)
    J3 = current_tensor(psi3)
    J4 = current_tensor(psi4)
    # slot 4 contracted with the time axis reproduces J3 times the rest current
    rest_current = current_tensor(rest)
    np.testing.assert_allclose(J4[..., 0], J3 * rest_current[0], atol=1e-9)


def test_current_tensor_batch_matches_loop(rng):
    psis = np.stack([random_multi_spinor(rng, 2) for _ in range(5)])
    batch = current_tensor_batch(psis)
    for k in range(5):
        np.testing.assert_allclose(batch[k], current_tensor(psis[k]),
                                   atol=1e-10)


def test_imaginary_residue_guard():
    with pytest.raises(ImaginaryResidueError):
        # bypass the public API with a poisoned complex array
        from conetrace.spinors import _check_reality
        _check_reality(np.array([1.0 + 1e-3j]))


def test_contract_current_axis_order(rng):
    psi = random_multi_spinor(rng, 3)
    J = current_tensor(psi)
    us = [random_future_unit(rng), random_future_unit(rng)]
    j = contract_current(J, 1, us)
    # manual contraction: us[0] soaks slot 0, us[1] soaks slot 2
    expect = np.einsum("abc,a,c->b", J, us[0] @ ETA, us[1] @ ETA)
    np.testing.assert_allclose(j, expect, atol=1e-10)
    with pytest.raises(ValueError):
        contract_current(J, 1, us[:1])


def test_current_vector_matches_tensor_route(rng):
    psi = random_multi_spinor(rng, 2)
    us = [random_future_unit(rng)]
    np.testing.assert_allclose(current_vector(psi, 0, us),
                               contract_current(current_tensor(psi), 0, us),
                               atol=1e-10)


def test_n1_contraction_is_identity(rng):
    psi = random_multi_spinor(rng, 1)
    J = current_tensor(psi)
    np.testing.assert_allclose(contract_current(J, 0, []), J, atol=1e-15)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_current_character_property(seed, n):
    """Contracted currents are real, future-pointing, and never spacelike."""
    rng = np.random.default_rng(seed)
    psi = random_multi_spinor(rng, n)
    i = int(rng.integers(n))
    us = [random_future_unit(rng) for _ in range(n - 1)]
    j = current_vector(psi, i, us)
    scale = float(np.abs(j).max())
    if scale == 0.0:
        return
    assert j[0] >= -1e-9 * scale
    assert minkowski_norm2(j) >= -1e-9 * scale * scale
    lam = timelike_certificate(j, random_future_unit(rng))
    assert lam >= -1e-9 * scale


def test_spinor_boost_covariance(rng):
    """S(L)^-1 gamma^mu S(L) = L^mu_nu gamma^nu, checked through the
    bilinear: currents of boosted spinors are boosted currents."""
    for axis in (1, 2, 3):
        chi = float(rng.uniform(-1.5, 1.5))
        L = boost_matrix(chi, axis)
        S = spinor_boost(chi, axis)
        psi = random_multi_spinor(rng, 1)
        j = current_tensor(psi)
        j_boosted = current_tensor(S @ psi)
        np.testing.assert_allclose(j_boosted, L @ j, atol=1e-10)


def test_spinor_boost_unit_determinant(rng):
    S = spinor_boost(0.9, 2)
    assert np.linalg.det(S) == pytest.approx(1.0, abs=1e-12)
