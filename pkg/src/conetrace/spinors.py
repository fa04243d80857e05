"""Dirac matrices and the rank-N current tensor machinery.

Conventions, fixed bit-exactly:

* standard representation: gamma0 = diag(1, 1, -1, -1) and
  gamma_k = [[0, sigma_k], [-sigma_k, 0]] with the usual Pauli matrices;
* an N-particle spinor is a complex ndarray of shape (4,)*N, slot 0
  (particle 1) slowest in the C-order flattening. Every per-slot
  operation in this package uses that layout, so a flat (4**N,) view is
  always safe to pass around.

The guidance 4-vector of a particle is obtained from the rank-N current
tensor by soaking up every other slot with that particle's crossing
4-velocity (metric-lowered); ``current_vector`` does this directly
without materializing the tensor, ``current_tensor`` plus
``contract_current`` is the explicit dense route. Both are kept because
their agreement is one of the package's self-checks.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ImaginaryResidueError
from .minkowski import lower_index

REALITY_TOL = 1e-10

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_ZERO2 = np.zeros((2, 2), dtype=complex)

GAMMA = (
    np.diag([1, 1, -1, -1]).astype(complex),
    np.block([[_ZERO2, PAULI[0]], [-PAULI[0], _ZERO2]]),
    np.block([[_ZERO2, PAULI[1]], [-PAULI[1], _ZERO2]]),
    np.block([[_ZERO2, PAULI[2]], [-PAULI[2], _ZERO2]]),
)

# alpha_k = gamma0 gamma_k; bilinears psi^dag alpha_k psi are the spatial
# current components in any frame's coordinates.
ALPHA = tuple(GAMMA[0] @ GAMMA[k] for k in (1, 2, 3))


def gamma(mu: int) -> np.ndarray:
    """Dirac matrix gamma^mu in the standard representation (copy)."""
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"gamma index must be 0..3, got {mu}")
    return GAMMA[mu].copy()


def slash(u: np.ndarray) -> np.ndarray:
    """gamma^mu u_mu with the index lowered: u0*g0 - u1*g1 - u2*g2 - u3*g3."""
    ul = lower_index(u)
    return ul[0] * GAMMA[0] + ul[1] * GAMMA[1] + ul[2] * GAMMA[2] + ul[3] * GAMMA[3]


def num_particles(psi: np.ndarray) -> int:
    if psi.ndim == 1:
        n = round(np.log(psi.size) / np.log(4))
        if 4**n != psi.size:
            raise ValueError(f"spinor length {psi.size} is not a power of 4")
        return n
    if psi.shape != (4,) * psi.ndim:
        raise ValueError(f"multi-spinor must have shape (4,)*N, got {psi.shape}")
    return psi.ndim


def as_multi(psi: np.ndarray) -> np.ndarray:
    """View with canonical shape (4,)*N."""
    n = num_particles(np.asarray(psi))
    return np.asarray(psi, dtype=complex).reshape((4,) * n)


def apply_slot(mat: np.ndarray, psi: np.ndarray, slot: int) -> np.ndarray:
    """Apply a 4x4 matrix to one tensor slot of a multi-spinor."""
    return np.moveaxis(np.tensordot(mat, psi, axes=(1, slot)), 0, slot)


@lru_cache(maxsize=8)
def _adjoint_signs(n: int) -> np.ndarray:
    s = np.array([1.0, 1.0, -1.0, -1.0])
    out = s
    for _ in range(n - 1):
        out = np.multiply.outer(out, s)
    return out


def dirac_adjoint(psi: np.ndarray) -> np.ndarray:
    """Conjugate composed with gamma0 on every slot (gamma0 is diagonal,
    so this is an elementwise sign pattern). Returned with the same shape;
    it plays the co-vector role in all bilinears."""
    psi = as_multi(psi)
    return np.conj(psi) * _adjoint_signs(psi.ndim)


@lru_cache(maxsize=4)
def _kron_stack(n: int) -> np.ndarray:
    """All 4**n Kronecker products gamma^{mu_1} x ... x gamma^{mu_n},
    stacked C-order over the index tuple. Only built for n <= 3."""
    stack = np.stack(GAMMA)
    for _ in range(n - 1):
        stack = np.stack([np.kron(a, g) for a in stack for g in GAMMA])
    return stack


def _check_reality(values: np.ndarray) -> np.ndarray:
    residue = np.abs(values.imag) / (1.0 + np.abs(values.real))
    worst = float(residue.max())
    if worst >= REALITY_TOL:
        raise ImaginaryResidueError(
            f"current component imaginary residue {worst:.3e} exceeds {REALITY_TOL:.1e}"
        )
    return values.real


def current_tensor(psi: np.ndarray) -> np.ndarray:
    """Rank-N tensor of bilinears adjoint(psi) (x)gamma^{mu_k} psi.

    Dense real ndarray of shape (4,)*N. Hermiticity makes every component
    real; a residue beyond REALITY_TOL raises ImaginaryResidueError.
    """
    psi = as_multi(psi)
    n = psi.ndim
    psibar = dirac_adjoint(psi).reshape(-1)
    flat = psi.reshape(-1)
    if n <= 3:
        vals = np.einsum("a,mab,b->m", psibar, _kron_stack(n), flat)
    else:
        vals = np.empty(4**n, dtype=complex)
        for m in range(4**n):
            op = psi
            for k, mu in enumerate(np.unravel_index(m, (4,) * n)):
                op = apply_slot(GAMMA[mu], op, k)
            vals[m] = psibar @ op.reshape(-1)
    return _check_reality(vals).reshape((4,) * n)


def current_tensor_batch(psis: np.ndarray) -> np.ndarray:
    """current_tensor over a leading batch axis (N <= 3)."""
    psis = np.asarray(psis, dtype=complex)
    n = num_particles(psis[0])
    flat = psis.reshape(len(psis), -1)
    bars = flat.conj() * _adjoint_signs(n).reshape(-1)
    vals = np.einsum("Ba,mab,Bb->Bm", bars, _kron_stack(n), flat)
    return _check_reality(vals).reshape((len(psis),) + (4,) * n)


def contract_current(J: np.ndarray, i: int, us) -> np.ndarray:
    """Soak up every slot j != i of a current tensor with eta-lowered u_j.

    ``us`` lists one four-vector per other particle, in increasing particle
    order. The remaining free index is particle i's current four-vector.
    For N=1 (no others) the tensor itself is returned.
    """
    J = np.asarray(J, dtype=float)
    others = [j for j in range(J.ndim) if j != i]
    if len(us) != len(others):
        raise ValueError(f"expected {len(others)} contraction vectors, got {len(us)}")
    out = J
    for j, u in sorted(zip(others, us), reverse=True):
        out = np.moveaxis(out, j, -1) @ lower_index(u)
    return out


def current_vector(psi: np.ndarray, i: int, us) -> np.ndarray:
    """Particle i's current four-vector, computed directly from the spinor.

    Same value as contract_current(current_tensor(psi), i, us) but via
    per-slot matrix applications, O(N * 4**N) instead of O(16**N).
    """
    psi = as_multi(psi)
    n = psi.ndim
    others = [j for j in range(n) if j != i]
    if len(us) != len(others):
        raise ValueError(f"expected {len(others)} contraction vectors, got {len(us)}")
    chi = psi
    for j, u in zip(others, us):
        chi = apply_slot(slash(u), chi, j)
    psibar = dirac_adjoint(psi).reshape(-1)
    vals = np.array([psibar @ apply_slot(GAMMA[mu], chi, i).reshape(-1) for mu in range(4)])
    return _check_reality(vals)


def timelike_certificate(j: np.ndarray, u: np.ndarray) -> float:
    """Scalar product of a current vector with a future-timelike probe.

    Nonzero for every current built from a nonvanishing spinor with
    future-pointing timelike contraction vectors; its sign certifies the
    current as future-pointing, its vanishing certifies psi = 0.
    """
    return float(j[0] * u[0] - j[1] * u[1] - j[2] * u[2] - j[3] * u[3])


def spinor_boost(rapidity: float, axis: int) -> np.ndarray:
    """Spin-1/2 representation S of the boost with the given rapidity.

    Satisfies S^-1 gamma^mu S = Lambda^mu_nu gamma^nu with Lambda the
    matching vector boost; fields transform as psi'(x') = S psi(x).
    """
    if axis not in (1, 2, 3):
        raise ValueError(f"boost axis must be 1, 2 or 3, got {axis}")
    return np.cosh(rapidity / 2) * np.eye(4, dtype=complex) + np.sinh(rapidity / 2) * ALPHA[axis - 1]
