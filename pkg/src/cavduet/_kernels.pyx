# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels for the two hot integration loops.

Mirrors ``_kernels_py`` exactly (same stage structure, same evaluation
order); drive phases are always computed from t = t0 + step*h, never
accumulated.
"""

from libc.math cimport cos, sin

import numpy as np


cdef inline void _rhs_rotating(double t, double complex *y, double *z, double *w,
                               double eps, double complex *out) noexcept nogil:
    cdef int j, k
    cdef double ph
    cdef double complex e, dk, acc
    for j in range(6):
        out[j] = 0
    for k in range(3):
        dk = y[3 + k]
        acc = 0
        for j in range(3):
            ph = z[3 * k + j] * t
            e = cos(ph) + 1j * sin(ph)
            out[j] = out[j] - e * w[3 * j + k] * dk
            acc = acc + e.conjugate() * w[3 * j + k] * y[j]
        out[3 + k] = eps * acc
    for j in range(3):
        out[j] = eps * out[j]


def integrate_rotating(psi0, zeta, lam, double eps, double h, long n_sub, long n_out,
                       double t0=0.0):
    """See ``_kernels_py.integrate_rotating``; identical contract."""
    cdef double complex[::1] y0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    cdef double[:, ::1] zv = np.ascontiguousarray(zeta, dtype=np.float64)
    cdef double[:, ::1] wv = np.ascontiguousarray(lam, dtype=np.float64)
    out_arr = np.empty((n_out + 1, 6), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    cdef double z[9]
    cdef double w[9]
    cdef double complex y[6]
    cdef double complex k1[6]
    cdef double complex k2[6]
    cdef double complex k3[6]
    cdef double complex k4[6]
    cdef double complex ytmp[6]
    cdef int i, j, k
    cdef long i_out, i_sub, step = 0
    cdef double t

    for k in range(3):
        for j in range(3):
            z[3 * k + j] = zv[k, j]
            w[3 * j + k] = wv[j, k]
    for i in range(6):
        y[i] = y0[i]
        out[0, i] = y[i]

    with nogil:
        for i_out in range(1, n_out + 1):
            for i_sub in range(n_sub):
                t = t0 + step * h
                _rhs_rotating(t, y, z, w, eps, k1)
                for i in range(6):
                    ytmp[i] = y[i] + 0.5 * h * k1[i]
                _rhs_rotating(t + 0.5 * h, ytmp, z, w, eps, k2)
                for i in range(6):
                    ytmp[i] = y[i] + 0.5 * h * k2[i]
                _rhs_rotating(t + 0.5 * h, ytmp, z, w, eps, k3)
                for i in range(6):
                    ytmp[i] = y[i] + h * k3[i]
                _rhs_rotating(t + h, ytmp, z, w, eps, k4)
                for i in range(6):
                    y[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                step += 1
            for i in range(6):
                out[i_out, i] = y[i]
    return out_arr


cdef inline void _rhs_bare(double t, double complex *y, double *d0, double *d1,
                           double eta_L, double eta_R, double *w, double eps,
                           double omega, double complex *out) noexcept nogil:
    cdef double ph = omega * t
    cdef double complex e = cos(ph) + 1j * sin(ph)
    cdef double complex ec = e.conjugate()
    cdef double complex h00 = d0[0] * y[0] + eta_L * y[1]
    cdef double complex h01 = eta_L * y[0] + d0[1] * y[1] + eta_R * y[2]
    cdef double complex h02 = eta_R * y[1] + d0[2] * y[2]
    cdef double complex h10 = d1[0] * y[3] + eta_L * y[4]
    cdef double complex h11 = eta_L * y[3] + d1[1] * y[4] + eta_R * y[5]
    cdef double complex h12 = eta_R * y[4] + d1[2] * y[5]
    out[0] = -1j * h00 - eps * w[0] * e * y[3]
    out[1] = -1j * h01 - eps * w[1] * e * y[4]
    out[2] = -1j * h02 - eps * w[2] * e * y[5]
    out[3] = -1j * h10 + eps * w[0] * ec * y[0]
    out[4] = -1j * h11 + eps * w[1] * ec * y[1]
    out[5] = -1j * h12 + eps * w[2] * ec * y[2]


def integrate_bare(psi0, diag0, diag1, double eta_L, double eta_R, weights,
                   double eps, double omega, double h, long n_sub, long n_out,
                   double t0=0.0):
    """See ``_kernels_py.integrate_bare``; identical contract."""
    cdef double complex[::1] y0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    cdef double[::1] d0v = np.ascontiguousarray(diag0, dtype=np.float64)
    cdef double[::1] d1v = np.ascontiguousarray(diag1, dtype=np.float64)
    cdef double[::1] wvv = np.ascontiguousarray(weights, dtype=np.float64)
    out_arr = np.empty((n_out + 1, 6), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    cdef double d0[3]
    cdef double d1[3]
    cdef double w[3]
    cdef double complex y[6]
    cdef double complex k1[6]
    cdef double complex k2[6]
    cdef double complex k3[6]
    cdef double complex k4[6]
    cdef double complex ytmp[6]
    cdef int i
    cdef long i_out, i_sub, step = 0
    cdef double t

    for i in range(3):
        d0[i] = d0v[i]
        d1[i] = d1v[i]
        w[i] = wvv[i]
    for i in range(6):
        y[i] = y0[i]
        out[0, i] = y[i]

    with nogil:
        for i_out in range(1, n_out + 1):
            for i_sub in range(n_sub):
                t = t0 + step * h
                _rhs_bare(t, y, d0, d1, eta_L, eta_R, w, eps, omega, k1)
                for i in range(6):
                    ytmp[i] = y[i] + 0.5 * h * k1[i]
                _rhs_bare(t + 0.5 * h, ytmp, d0, d1, eta_L, eta_R, w, eps, omega, k2)
                for i in range(6):
                    ytmp[i] = y[i] + 0.5 * h * k2[i]
                _rhs_bare(t + 0.5 * h, ytmp, d0, d1, eta_L, eta_R, w, eps, omega, k3)
                for i in range(6):
                    ytmp[i] = y[i] + h * k3[i]
                _rhs_bare(t + h, ytmp, d0, d1, eta_L, eta_R, w, eps, omega, k4)
                for i in range(6):
                    y[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                step += 1
            for i in range(6):
                out[i_out, i] = y[i]
    return out_arr
