# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; semantics identical to _kernels_py (the source
of truth for doc comments). Kept scalar and allocation-free inside the
loops: these run millions of times per trajectory integration."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin, sqrt

cnp.import_array()


def packet_eval(double[::1] E, double[:, ::1] P, double complex[:, ::1] W,
                double t, double x, double y, double z):
    cdef Py_ssize_t m, M = E.shape[0]
    cdef double ph
    cdef double complex e
    cdef double complex o0 = 0, o1 = 0, o2 = 0, o3 = 0
    for m in range(M):
        ph = E[m] * t - (P[m, 0] * x + P[m, 1] * y + P[m, 2] * z)
        e = cos(ph) - 1j * sin(ph)
        o0 = o0 + e * W[m, 0]
        o1 = o1 + e * W[m, 1]
        o2 = o2 + e * W[m, 2]
        o3 = o3 + e * W[m, 3]
    out = np.empty(4, dtype=complex)
    cdef double complex[::1] ov = out
    ov[0] = o0; ov[1] = o1; ov[2] = o2; ov[3] = o3
    return out


def pair_current(double complex[::1] coeffs, double complex[:, :, ::1] phis,
                 Py_ssize_t i, double[:, ::1] us):
    cdef Py_ssize_t T = phis.shape[0], N = phis.shape[1]
    cdef Py_ssize_t s, t, j
    cdef double complex w, f, ovl, b0, b1, b2, b3
    cdef double complex bi0 = 0, bi1 = 0, bi2 = 0, bi3 = 0
    cdef double complex p0, p1, p2, p3, q0, q1, q2, q3
    cdef double complex j0 = 0, j1 = 0, j2 = 0, j3 = 0, nacc = 0
    cdef double scale = 0, prodmag, m2

    for s in range(T):
        prodmag = 1.0
        for j in range(N):
            m2 = (phis[s, j, 0].real * phis[s, j, 0].real + phis[s, j, 0].imag * phis[s, j, 0].imag
                  + phis[s, j, 1].real * phis[s, j, 1].real + phis[s, j, 1].imag * phis[s, j, 1].imag
                  + phis[s, j, 2].real * phis[s, j, 2].real + phis[s, j, 2].imag * phis[s, j, 2].imag
                  + phis[s, j, 3].real * phis[s, j, 3].real + phis[s, j, 3].imag * phis[s, j, 3].imag)
            prodmag *= sqrt(m2)
        scale += sqrt(coeffs[s].real * coeffs[s].real + coeffs[s].imag * coeffs[s].imag) * prodmag

    for s in range(T):
        for t in range(T):
            w = coeffs[s].conjugate() * coeffs[t]
            f = w
            ovl = w
            for j in range(N):
                p0 = phis[s, j, 0].conjugate(); p1 = phis[s, j, 1].conjugate()
                p2 = phis[s, j, 2].conjugate(); p3 = phis[s, j, 3].conjugate()
                q0 = phis[t, j, 0]; q1 = phis[t, j, 1]
                q2 = phis[t, j, 2]; q3 = phis[t, j, 3]
                b0 = p0 * q0 + p1 * q1 + p2 * q2 + p3 * q3
                ovl = ovl * b0
                if j == i:
                    bi0 = b0
                    bi1 = p0 * q3 + p1 * q2 + p2 * q1 + p3 * q0
                    bi2 = -1j * p0 * q3 + 1j * p1 * q2 - 1j * p2 * q1 + 1j * p3 * q0
                    bi3 = p0 * q2 - p1 * q3 + p2 * q0 - p3 * q1
                else:
                    b1 = p0 * q3 + p1 * q2 + p2 * q1 + p3 * q0
                    b2 = -1j * p0 * q3 + 1j * p1 * q2 - 1j * p2 * q1 + 1j * p3 * q0
                    b3 = p0 * q2 - p1 * q3 + p2 * q0 - p3 * q1
                    f = f * (us[j, 0] * b0 - us[j, 1] * b1 - us[j, 2] * b2 - us[j, 3] * b3)
            j0 = j0 + f * bi0
            j1 = j1 + f * bi1
            j2 = j2 + f * bi2
            j3 = j3 + f * bi3
            nacc = nacc + ovl

    out = np.empty(4, dtype=float)
    cdef double[::1] ov = out
    ov[0] = j0.real; ov[1] = j1.real; ov[2] = j2.real; ov[3] = j3.real
    cdef double norm2 = nacc.real
    if norm2 < 0.0:
        norm2 = 0.0
    return out, norm2, scale * scale


cdef Py_ssize_t _segment(double[::1] ts, double t) noexcept nogil:
    # ts strictly descending; smallest k >= 1 with ts[k] <= t, clamped to n-1
    cdef Py_ssize_t lo = 0, hi = ts.shape[0] - 1, mid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] >= t:
            lo = mid
        else:
            hi = mid
    return hi


cdef void _interp(double[::1] ts, double[:, ::1] xs, double[:, ::1] vs,
                  double t, double* pos, double* vel) noexcept nogil:
    cdef Py_ssize_t k, a
    cdef double t0, t1, h, s, s2, s3
    cdef double c_x1, c_v1, c_x0, c_v0, d_x1, d_v1, d_x0, d_v0
    if ts.shape[0] == 1:
        h = t - ts[0]
        for a in range(3):
            pos[a] = xs[0, a] + vs[0, a] * h
            vel[a] = vs[0, a]
        return
    k = _segment(ts, t)
    t0 = ts[k - 1]; t1 = ts[k]
    h = t0 - t1
    s = (t - t1) / h
    s2 = s * s; s3 = s2 * s
    c_x1 = 2 * s3 - 3 * s2 + 1
    c_v1 = (s3 - 2 * s2 + s) * h
    c_x0 = -2 * s3 + 3 * s2
    c_v0 = (s3 - s2) * h
    d_x1 = (6 * s2 - 6 * s) / h
    d_v1 = 3 * s2 - 4 * s + 1
    d_x0 = (-6 * s2 + 6 * s) / h
    d_v0 = 3 * s2 - 2 * s
    for a in range(3):
        pos[a] = c_x1 * xs[k, a] + c_v1 * vs[k, a] + c_x0 * xs[k - 1, a] + c_v0 * vs[k - 1, a]
        vel[a] = d_x1 * xs[k, a] + d_v1 * vs[k, a] + d_x0 * xs[k - 1, a] + d_v0 * vs[k - 1, a]


def traj_interp(double[::1] ts, double[:, ::1] xs, double[:, ::1] vs, double t):
    cdef double pos[3]
    cdef double vel[3]
    _interp(ts, xs, vs, t, pos, vel)
    p = np.empty(3, dtype=float)
    v = np.empty(3, dtype=float)
    cdef double[::1] pv = p
    cdef double[::1] vv = v
    cdef Py_ssize_t a
    for a in range(3):
        pv[a] = pos[a]
        vv[a] = vel[a]
    return p, v


cdef double _gval(double[::1] ts, double[:, ::1] xs, double[:, ::1] vs,
                  double pt, double px, double py, double pz, double t) noexcept nogil:
    cdef double pos[3]
    cdef double vel[3]
    cdef double dx, dy, dz
    _interp(ts, xs, vs, t, pos, vel)
    dx = pos[0] - px
    dy = pos[1] - py
    dz = pos[2] - pz
    return (t - pt) - sqrt(dx * dx + dy * dy + dz * dz)


def lightcone_g(double[::1] ts, double[:, ::1] xs, double[:, ::1] vs,
                double pt, double px, double py, double pz, double t):
    return _gval(ts, xs, vs, pt, px, py, pz, t)


def lightcone_bisect(double[::1] ts, double[:, ::1] xs, double[:, ::1] vs,
                     double pt, double px, double py, double pz,
                     double lo, double hi):
    cdef Py_ssize_t it
    cdef double mid
    for it in range(200):
        if hi - lo <= 1e-13 * (1.0 + fabs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if _gval(ts, xs, vs, pt, px, py, pz, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
