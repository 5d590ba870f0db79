# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation backend.

Same contract as ``_kernel_py``: fixed-lattice RK4 for dS/dt = Delta F(t) S
with disposable side-steps at sample times.  The right-hand side exploits
the sparsity of Delta F (diagonal frequencies plus detector-q coupling rows)
instead of forming dense matrix products.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport asinh, cos, exp, sin, sqrt
from libc.stdint cimport int64_t

BACKEND_NAME = "compiled"


cdef void _rhs(double t,
               double[:, ::1] s,
               double[:, ::1] out,
               int m, int n,
               double[::1] det_omega,
               int64_t[::1] wl_kind, double[::1] wl_a, double[::1] wl_x0,
               double[::1] wl_dir,
               int64_t[::1] sw_kind, double[::1] sw_l0, double[::1] sw_tau0,
               double[::1] sw_width,
               double[::1] mode_k, double[::1] mode_wq, double[::1] mode_wp,
               double[::1] mode_norm, int reflecting,
               double[:, ::1] g, double[:, ::1] hh, double[::1] diag) noexcept nogil:
    cdef int dim = 2 * (m + n)
    cdef int j, i, col, qd, qn
    cdef double a, u, root, dtaudt, tau, x, lam, c, d, arg, w

    for j in range(m):
        if wl_kind[j] == 1:
            a = wl_a[j]
            u = a * t
            root = sqrt(1.0 + u * u)
            dtaudt = 1.0 / root
            tau = asinh(u) / a
            x = wl_x0[j] + wl_dir[j] * (root - 1.0) / a
        else:
            dtaudt = 1.0
            tau = t
            x = wl_x0[j]
        if sw_kind[j] == 1:
            d = tau - sw_tau0[j]
            lam = sw_l0[j] * exp(-d * d / (2.0 * sw_width[j]))
        else:
            lam = sw_l0[j]
        c = 2.0 * lam * dtaudt
        diag[j] = dtaudt * det_omega[j]
        for i in range(n):
            arg = mode_k[i] * x
            if reflecting:
                g[j, i] = c * sin(arg) * mode_norm[i]
                hh[j, i] = 0.0
            else:
                g[j, i] = c * cos(arg) * mode_norm[i]
                hh[j, i] = -c * sin(arg) * mode_norm[i]

    # Mode rows: partner quadrature plus detector-q contributions,
    # written as plain axpy passes so the compiler can vectorise.
    for i in range(n):
        qn = 2 * (m + i)
        for col in range(dim):
            out[qn, col] = mode_wp[i] * s[qn + 1, col]
        for col in range(dim):
            out[qn + 1, col] = -mode_wq[i] * s[qn, col]
        for j in range(m):
            qd = 2 * j
            c = hh[j, i]
            d = g[j, i]
            for col in range(dim):
                out[qn, col] += c * s[qd, col]
            for col in range(dim):
                out[qn + 1, col] -= d * s[qd, col]

    # Detector rows: q sees its own p; p gathers every mode row.
    for j in range(m):
        qd = 2 * j
        w = diag[j]
        for col in range(dim):
            out[qd, col] = w * s[qd + 1, col]
        for col in range(dim):
            out[qd + 1, col] = -w * s[qd, col]
        for i in range(n):
            qn = 2 * (m + i)
            c = g[j, i]
            d = hh[j, i]
            for col in range(dim):
                out[qd + 1, col] -= c * s[qn, col] + d * s[qn + 1, col]


cdef void _rk4_step(double t, double dt,
                    double[:, ::1] y, double[:, ::1] ynew,
                    double[:, ::1] k1, double[:, ::1] k2,
                    double[:, ::1] k3, double[:, ::1] k4,
                    double[:, ::1] ytmp,
                    int m, int n,
                    double[::1] det_omega,
                    int64_t[::1] wl_kind, double[::1] wl_a, double[::1] wl_x0,
                    double[::1] wl_dir,
                    int64_t[::1] sw_kind, double[::1] sw_l0, double[::1] sw_tau0,
                    double[::1] sw_width,
                    double[::1] mode_k, double[::1] mode_wq,
                    double[::1] mode_wp, double[::1] mode_norm, int reflecting,
                    double[:, ::1] g, double[:, ::1] hh,
                    double[::1] diag) noexcept nogil:
    cdef int dim = 2 * (m + n)
    cdef int r, col
    cdef double half = 0.5 * dt

    _rhs(t, y, k1, m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
         sw_kind, sw_l0, sw_tau0, sw_width, mode_k, mode_wq, mode_wp,
         mode_norm, reflecting, g, hh, diag)
    for r in range(dim):
        for col in range(dim):
            ytmp[r, col] = y[r, col] + half * k1[r, col]
    _rhs(t + half, ytmp, k2, m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
         sw_kind, sw_l0, sw_tau0, sw_width, mode_k, mode_wq, mode_wp,
         mode_norm, reflecting, g, hh, diag)
    for r in range(dim):
        for col in range(dim):
            ytmp[r, col] = y[r, col] + half * k2[r, col]
    _rhs(t + half, ytmp, k3, m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
         sw_kind, sw_l0, sw_tau0, sw_width, mode_k, mode_wq, mode_wp,
         mode_norm, reflecting, g, hh, diag)
    for r in range(dim):
        for col in range(dim):
            ytmp[r, col] = y[r, col] + dt * k3[r, col]
    _rhs(t + dt, ytmp, k4, m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
         sw_kind, sw_l0, sw_tau0, sw_width, mode_k, mode_wq, mode_wp,
         mode_norm, reflecting, g, hh, diag)
    for r in range(dim):
        for col in range(dim):
            ynew[r, col] = y[r, col] + (dt / 6.0) * (
                k1[r, col] + 2.0 * k2[r, col] + 2.0 * k3[r, col] + k4[r, col]
            )


def integrate_rk4(low, double h, sample_ks, sample_deltas):
    """Drop-in replacement for the Python backend's integrate_rk4."""
    cdef int m = low.n_detectors
    cdef int n = low.n_modes
    cdef int dim = 2 * (m + n)

    cdef double[::1] det_omega = np.ascontiguousarray(low.det_omega, dtype=np.float64)
    cdef int64_t[::1] wl_kind = np.ascontiguousarray(low.wl_kind, dtype=np.int64)
    cdef double[::1] wl_a = np.ascontiguousarray(low.wl_a, dtype=np.float64)
    cdef double[::1] wl_x0 = np.ascontiguousarray(low.wl_x0, dtype=np.float64)
    cdef double[::1] wl_dir = np.ascontiguousarray(low.wl_dir, dtype=np.float64)
    cdef int64_t[::1] sw_kind = np.ascontiguousarray(low.sw_kind, dtype=np.int64)
    cdef double[::1] sw_l0 = np.ascontiguousarray(low.sw_l0, dtype=np.float64)
    cdef double[::1] sw_tau0 = np.ascontiguousarray(low.sw_tau0, dtype=np.float64)
    cdef double[::1] sw_width = np.ascontiguousarray(low.sw_width, dtype=np.float64)
    cdef double[::1] mode_k = np.ascontiguousarray(low.mode_k, dtype=np.float64)
    cdef double[::1] mode_wq = np.ascontiguousarray(low.mode_wq, dtype=np.float64)
    cdef double[::1] mode_wp = np.ascontiguousarray(low.mode_wp, dtype=np.float64)
    cdef double[::1] mode_norm = np.ascontiguousarray(low.mode_norm, dtype=np.float64)
    cdef int reflecting = int(low.reflecting)

    cdef int64_t[::1] ks = np.ascontiguousarray(sample_ks, dtype=np.int64)
    cdef double[::1] deltas = np.ascontiguousarray(sample_deltas, dtype=np.float64)
    cdef Py_ssize_t n_samples = ks.shape[0]

    out_arr = np.empty((n_samples, dim, dim))
    cdef double[:, :, ::1] out = out_arr
    s_arr = np.eye(dim)
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] k1 = np.empty((dim, dim))
    cdef double[:, ::1] k2 = np.empty((dim, dim))
    cdef double[:, ::1] k3 = np.empty((dim, dim))
    cdef double[:, ::1] k4 = np.empty((dim, dim))
    cdef double[:, ::1] ytmp = np.empty((dim, dim))
    cdef double[:, ::1] ynew = np.empty((dim, dim))
    cdef double[:, ::1] g = np.empty((m, n))
    cdef double[:, ::1] hh = np.empty((m, n))
    cdef double[::1] diag = np.empty(m)

    cdef int64_t last_k = ks[n_samples - 1] if n_samples > 0 else 0
    cdef int64_t k
    cdef Py_ssize_t ptr = 0
    cdef double t, delta
    cdef int r, col

    with nogil:
        for k in range(last_k + 1):
            t = k * h
            while ptr < n_samples and ks[ptr] == k:
                delta = deltas[ptr]
                if delta == 0.0:
                    for r in range(dim):
                        for col in range(dim):
                            out[ptr, r, col] = s[r, col]
                else:
                    _rk4_step(t, delta, s, ynew, k1, k2, k3, k4, ytmp,
                              m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
                              sw_kind, sw_l0, sw_tau0, sw_width,
                              mode_k, mode_wq, mode_wp, mode_norm, reflecting,
                              g, hh, diag)
                    for r in range(dim):
                        for col in range(dim):
                            out[ptr, r, col] = ynew[r, col]
                ptr += 1
            if k < last_k:
                _rk4_step(t, h, s, ynew, k1, k2, k3, k4, ytmp,
                          m, n, det_omega, wl_kind, wl_a, wl_x0, wl_dir,
                          sw_kind, sw_l0, sw_tau0, sw_width,
                          mode_k, mode_wq, mode_wp, mode_norm, reflecting,
                          g, hh, diag)
                for r in range(dim):
                    for col in range(dim):
                        s[r, col] = ynew[r, col]
    return out_arr
