"""Pure-Python fallback integrators (same contract as the compiled kernels).

Fixed-step RK4 on the two 6-dimensional systems used by the package:

* ``integrate_rotating`` -- rotating-frame amplitudes (c'_1..3, d'_1..3)
  driven through the phase factors exp(+-i zeta[k,j] t),
* ``integrate_bare``     -- bare-basis amplitudes under the confined
  two-cluster Hamiltonian with an explicit drive phase exp(+-i omega t).

All phases are evaluated directly from t = t0 + step*h (no accumulation),
so long runs do not drift.  Keep the arithmetic in the same order as in
``_kernels.pyx``; the two backends are expected to agree to rounding.
"""

from __future__ import annotations

from math import cos, sin

import numpy as np


def _rhs_rotating(t, y, z, w, eps):
    c = y[0:3]
    d = y[3:6]
    dc = [0j, 0j, 0j]
    dd = [0j, 0j, 0j]
    for k in range(3):
        zk = z[k]
        wk_row = (w[0][k], w[1][k], w[2][k])
        dk = d[k]
        acc = 0j
        for j in range(3):
            ph = zk[j] * t
            e = complex(cos(ph), sin(ph))
            dc[j] -= e * wk_row[j] * dk
            acc += e.conjugate() * wk_row[j] * c[j]
        dd[k] = eps * acc
    return [eps * v for v in dc] + dd


def integrate_rotating(psi0, zeta, lam, eps, h, n_sub, n_out, t0=0.0):
    """RK4-propagate the rotating-frame amplitudes.

    Parameters: psi0 complex (6,), zeta (3,3) with [k, j] indexing
    (cluster-1 row, cluster-0 column), lam (3,3) with [j, k] indexing,
    drive strength eps, substep h, n_sub substeps per output sample,
    n_out output samples.  Returns (n_out+1, 6) complex including psi0.
    """
    z = [[float(zeta[k, j]) for j in range(3)] for k in range(3)]
    w = [[float(lam[j, k]) for k in range(3)] for j in range(3)]
    eps = float(eps)
    h = float(h)
    t0 = float(t0)
    y = [complex(v) for v in psi0]
    out = np.empty((n_out + 1, 6), dtype=np.complex128)
    out[0] = y
    step = 0
    for i_out in range(1, n_out + 1):
        for _ in range(n_sub):
            t = t0 + step * h
            k1 = _rhs_rotating(t, y, z, w, eps)
            y1 = [y[i] + 0.5 * h * k1[i] for i in range(6)]
            k2 = _rhs_rotating(t + 0.5 * h, y1, z, w, eps)
            y2 = [y[i] + 0.5 * h * k2[i] for i in range(6)]
            k3 = _rhs_rotating(t + 0.5 * h, y2, z, w, eps)
            y3 = [y[i] + h * k3[i] for i in range(6)]
            k4 = _rhs_rotating(t + h, y3, z, w, eps)
            y = [
                y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                for i in range(6)
            ]
            step += 1
        out[i_out] = y
    return out


def _rhs_bare(t, y, d0, d1, eta_L, eta_R, w, eps, omega):
    a0, a1, a2, b0, b1, b2 = y
    h0 = (
        d0[0] * a0 + eta_L * a1,
        eta_L * a0 + d0[1] * a1 + eta_R * a2,
        eta_R * a1 + d0[2] * a2,
    )
    h1 = (
        d1[0] * b0 + eta_L * b1,
        eta_L * b0 + d1[1] * b1 + eta_R * b2,
        eta_R * b1 + d1[2] * b2,
    )
    ph = omega * t
    e = complex(cos(ph), sin(ph))
    ec = e.conjugate()
    return [
        -1j * h0[0] - eps * w[0] * e * b0,
        -1j * h0[1] - eps * w[1] * e * b1,
        -1j * h0[2] - eps * w[2] * e * b2,
        -1j * h1[0] + eps * w[0] * ec * a0,
        -1j * h1[1] + eps * w[1] * ec * a1,
        -1j * h1[2] + eps * w[2] * ec * a2,
    ]


def integrate_bare(psi0, diag0, diag1, eta_L, eta_R, weights, eps, omega, h, n_sub, n_out, t0=0.0):
    """RK4-propagate the bare-basis amplitudes of the confined system.

    diag0/diag1 are the cluster diagonal energies (3,), weights the photon
    ladder weights (1, sqrt(2), 1), omega the drive phase rate.  Returns
    (n_out+1, 6) complex including psi0.
    """
    d0 = tuple(float(v) for v in diag0)
    d1 = tuple(float(v) for v in diag1)
    w = tuple(float(v) for v in weights)
    eta_L = float(eta_L)
    eta_R = float(eta_R)
    eps = float(eps)
    omega = float(omega)
    h = float(h)
    t0 = float(t0)
    y = [complex(v) for v in psi0]
    out = np.empty((n_out + 1, 6), dtype=np.complex128)
    out[0] = y
    step = 0
    for i_out in range(1, n_out + 1):
        for _ in range(n_sub):
            t = t0 + step * h
            k1 = _rhs_bare(t, y, d0, d1, eta_L, eta_R, w, eps, omega)
            y1 = [y[i] + 0.5 * h * k1[i] for i in range(6)]
            k2 = _rhs_bare(t + 0.5 * h, y1, d0, d1, eta_L, eta_R, w, eps, omega)
            y2 = [y[i] + 0.5 * h * k2[i] for i in range(6)]
            k3 = _rhs_bare(t + 0.5 * h, y2, d0, d1, eta_L, eta_R, w, eps, omega)
            y3 = [y[i] + h * k3[i] for i in range(6)]
            k4 = _rhs_bare(t + h, y3, d0, d1, eta_L, eta_R, w, eps, omega)
            y = [
                y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                for i in range(6)
            ]
            step += 1
        out[i_out] = y
    return out
