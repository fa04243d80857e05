"""Pure numpy implementations of the hot kernels.

Same call signatures as the compiled extension (see _kernels.pyx); the
active implementation is chosen in _backend. Everything here works on
plain arrays so both backends stay drop-in interchangeable:

* packet_eval        mode sum of one plane-wave packet at one event
* pair_current       guidance four-vector from per-term factor spinors
* traj_interp        cubic Hermite dense output on a sampled world line
* lightcone_g        signed light-cone gap of a history point
* lightcone_bisect   root refinement for the retarded crossing

World-line sample arrays are ordered by strictly decreasing time (the
integration direction); interpolation outside the sampled range uses the
edge segment, range policy is enforced by the callers.
"""

from __future__ import annotations

import numpy as np

_ALPHA2_FACTOR = np.array([-1j, 1j, -1j, 1j])
_ALPHA3_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])


def packet_eval(E, P, W, t, x, y, z):
    phase = E * t - (P[:, 0] * x + P[:, 1] * y + P[:, 2] * z)
    return np.exp(-1j * phase) @ W


def packet_eval_batch(E, P, W, t, X):
    """packet_eval over a batch of spatial points X with shape (S, 3)."""
    phase = E[None, :] * t - X @ P.T
    return np.exp(-1j * phase) @ W


def _alpha_bilinears(phis):
    # b[mu][s, t, j] = phi_{s j}^dag alpha_mu phi_{t j}, alpha_0 = identity
    c = phis.conj()
    a1 = phis[..., [3, 2, 1, 0]]
    a2 = a1 * _ALPHA2_FACTOR
    a3 = phis[..., [2, 3, 0, 1]] * _ALPHA3_SIGNS
    return tuple(np.einsum("sja,tja->stj", c, a) for a in (phis, a1, a2, a3))


def pair_current(coeffs, phis, i, us):
    """Current four-vector of particle i for a sum of product terms.

    coeffs: (T,) complex term coefficients; phis: (T, N, 4) factor values;
    us: (N, 4) contraction four-velocities (row i ignored). Returns
    (j, norm2, scale2) where norm2 = |psi|^2 at the evaluation points and
    scale2 is the square of the triangle-inequality bound on |psi|, used
    for the relative zero test.
    """
    T, N, _ = phis.shape
    b0, b1, b2, b3 = _alpha_bilinears(phis)
    cc = np.multiply.outer(coeffs.conj(), coeffs)
    F = cc.copy()
    for j in range(N):
        if j == i:
            continue
        u = us[j]
        F = F * (u[0] * b0[:, :, j] - u[1] * b1[:, :, j] - u[2] * b2[:, :, j] - u[3] * b3[:, :, j])
    j4 = np.array([(F * b[:, :, i]).sum().real for b in (b0, b1, b2, b3)])
    norm2 = max(float((cc * b0.prod(axis=2)).sum().real), 0.0)
    mags = np.sqrt(np.einsum("tja,tja->tj", phis.conj(), phis).real)
    scale = float(np.abs(coeffs) @ mags.prod(axis=1))
    return j4, norm2, scale * scale


def _segment(ts, t):
    n = len(ts)
    k = int(np.searchsorted(-ts, -t))
    return min(max(k, 1), n - 1)


def traj_interp(ts, xs, vs, t):
    """Position and velocity at time t from Hermite dense output.

    Exact at sample times and for straight-line motion; outside the
    sampled range the edge segment's cubic is evaluated as is.
    """
    if len(ts) == 1:
        return xs[0] + vs[0] * (t - ts[0]), vs[0].copy()
    k = _segment(ts, t)
    t0, t1 = ts[k - 1], ts[k]
    h = t0 - t1
    s = (t - t1) / h
    s2, s3 = s * s, s * s * s
    pos = (
        (2 * s3 - 3 * s2 + 1) * xs[k]
        + (s3 - 2 * s2 + s) * h * vs[k]
        + (-2 * s3 + 3 * s2) * xs[k - 1]
        + (s3 - s2) * h * vs[k - 1]
    )
    vel = (
        (6 * s2 - 6 * s) / h * xs[k]
        + (3 * s2 - 4 * s + 1) * vs[k]
        + (-6 * s2 + 6 * s) / h * xs[k - 1]
        + (3 * s2 - 2 * s) * vs[k - 1]
    )
    return pos, vel


def lightcone_g(ts, xs, vs, pt, px, py, pz, t):
    """(t - p^0) - |x(t) - p|: negative inside the forward cone of p,
    zero exactly at the retarded crossing, increasing in t."""
    pos, _ = traj_interp(ts, xs, vs, t)
    dx = pos[0] - px
    dy = pos[1] - py
    dz = pos[2] - pz
    return (t - pt) - np.sqrt(dx * dx + dy * dy + dz * dz)


def lightcone_bisect(ts, xs, vs, pt, px, py, pz, lo, hi):
    """Bisect for the root of lightcone_g in [lo, hi]; requires
    g(lo) <= 0 < g(hi). Monotonicity of g makes this unconditionally
    convergent for timelike histories."""
    for _ in range(200):
        if hi - lo <= 1e-13 * (1.0 + abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if lightcone_g(ts, xs, vs, pt, px, py, pz, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
