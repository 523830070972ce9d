"""Analytic diagonalization of the single-excitation 3x3 cluster blocks.

Each cluster ``n`` spans ``{|e,n,g>, |g,n+1,g>, |g,n,e>}`` and the closed
(undriven) Hamiltonian restricted to it is the real symmetric matrix

    [[ Delta,   eta_L,  0      ],
     [ eta_L,   delta_n, eta_R ],
     [ 0,       eta_R,  -Delta ]]

Its characteristic cubic is solved in closed form with the trigonometric
(Vieta) substitution, and the eigenvector columns follow the closed-form
coefficient ratios, with a null-space fallback where those ratios become
0/0 (which happens exactly at the symmetric resonant zero-energy root).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, InvalidRangeError
from .params import ETA_RATIO_MAX, ETA_RATIO_MIN, Detunings, SystemParams, detunings

# Tolerances, in units of the relevant scale.
ACOS_CLAMP_TOL = 1e-12      # allowed excursion of the arccos argument past +-1
DEGENERACY_RTOL = 1e-9      # relative root spacing treated as degenerate
NORM_SINGULAR_TOL = 1e-12   # |Z| below this * scale^2 triggers the fallback


@dataclass(frozen=True)
class CubicForm:
    """Depressed characteristic cubic ``x^3 + p x + q = 0`` of a cluster
    block, obtained with the shift ``E = x + delta_n/3``.

    ``D = q^2/4 + p^3/27`` is the discriminant; three distinct real roots
    correspond to ``D < 0``.
    """

    p: float
    q: float
    D: float
    shift: float


@dataclass(frozen=True)
class DressedCluster:
    """Eigensystem of one cluster block.

    energies[k] and coeffs[:, k] hold the k-th dressed energy and its unit
    eigenvector over (|e,n,g>, |g,n+1,g>, |g,n,e>); ``norms[k]`` is the
    closed-form normalization constant Z_k (zero where the closed form is
    singular and the null-space fallback was used).  The k ordering follows
    the cosine branch labels of the trigonometric root formula, not sorted
    energy.
    """

    n: int
    energies: np.ndarray
    coeffs: np.ndarray
    norms: np.ndarray


def block_matrix(det: Detunings, params: SystemParams) -> np.ndarray:
    """3x3 symmetric cluster block over (|e,n,g>, |g,n+1,g>, |g,n,e>)."""
    return np.array(
        [
            [det.Delta, params.eta_L, 0.0],
            [params.eta_L, det.delta_n, params.eta_R],
            [0.0, params.eta_R, -det.Delta],
        ]
    )


def cubic_form(det: Detunings, params: SystemParams) -> CubicForm:
    """Depressed-cubic coefficients of the cluster characteristic equation.

    p = -(delta_n^2/3 + Delta^2 + eta_L^2 + eta_R^2)
    q = -(2/27) delta_n^3 - (1/3) delta_n (eta_L^2 + eta_R^2)
        + (2/3) delta_n Delta^2 - Delta (eta_L^2 - eta_R^2)
    """
    Delta, dn = det.Delta, det.delta_n
    eL2 = params.eta_L**2
    eR2 = params.eta_R**2
    p = -(dn**2 / 3.0 + Delta**2 + eL2 + eR2)
    q = (
        -(2.0 / 27.0) * dn**3
        - dn * (eL2 + eR2) / 3.0
        + (2.0 / 3.0) * dn * Delta**2
        - Delta * (eL2 - eR2)
    )
    return CubicForm(p=p, q=q, D=q**2 / 4.0 + p**3 / 27.0, shift=dn / 3.0)


def trig_roots(form: CubicForm) -> np.ndarray:
    """Three real roots of the shifted cubic via the trigonometric form.

    E_k = 2 sqrt(-p/3) cos(theta + 2 pi k / 3) + delta_n/3,  k = 1, 2, 3
    theta = (1/3) arccos( (3q / 2p) sqrt(-3/p) )

    Returned in k = 1, 2, 3 order (array indices 0..2).  Raises
    DegenerateSpectrumError when the arccos argument leaves [-1, 1] by more
    than a rounding allowance (that boundary is exactly a vanishing
    discriminant) or when two roots coincide to relative 1e-9.
    """
    p, q = form.p, form.q
    if p >= 0.0:
        # p < 0 whenever any coupling or detuning is nonzero; p == 0 means a
        # triply degenerate root.
        raise DegenerateSpectrumError(f"cubic has no spread (p = {p!r})")
    amp = 2.0 * math.sqrt(-p / 3.0)
    arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
    if abs(arg) > 1.0 + ACOS_CLAMP_TOL:
        raise DegenerateSpectrumError(
            f"arccos argument {arg!r} beyond [-1, 1]; discriminant not negative"
        )
    theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
    roots = np.array(
        [amp * math.cos(theta + 2.0 * math.pi * k / 3.0) + form.shift for k in (1, 2, 3)]
    )
    scale = np.max(np.abs(roots))
    if scale > 0.0:
        spread = sorted(roots)
        gap = min(spread[1] - spread[0], spread[2] - spread[1])
        if gap < DEGENERACY_RTOL * scale:
            raise DegenerateSpectrumError(
                f"dressed energies nearly coincide (gap {gap:.3e}, scale {scale:.3e})"
            )
    return roots


def _null_vector(matrix: np.ndarray) -> np.ndarray:
    """Unit kernel vector of a (numerically) singular 3x3 matrix."""
    _, _, vh = np.linalg.svd(matrix)
    return vh[-1]


def _fix_sign(column: np.ndarray) -> np.ndarray:
    """Flip the column so its largest-magnitude entry is positive."""
    idx = int(np.argmax(np.abs(column)))
    return -column if column[idx] < 0.0 else column


def coefficient_columns(det: Detunings, params: SystemParams, energies: np.ndarray):
    """Unit eigenvector columns for the given cluster energies.

    The closed-form (unnormalized) column for energy E is

        ( -eta_L (Delta + E),  Delta^2 - E^2,  eta_R (Delta - E) )

    with normalization Z = sqrt(eta_L^2 (Delta+E)^2 + eta_R^2 (Delta-E)^2
    + (Delta^2 - E^2)^2).  When Z is negligible the closed form is 0/0 and
    the column is recovered as the null space of (block - E*I) instead.

    Returns (coeffs, norms): the 3x3 column matrix and the three Z values.
    """
    Delta = det.Delta
    block = block_matrix(det, params)
    scale = max(
        abs(Delta), abs(det.delta_n), params.eta_L, params.eta_R, float(np.max(np.abs(energies)))
    )
    coeffs = np.empty((3, 3))
    norms = np.empty(3)
    for k, E in enumerate(energies):
        raw = np.array(
            [
                -params.eta_L * (Delta + E),
                Delta**2 - E**2,
                params.eta_R * (Delta - E),
            ]
        )
        z = math.sqrt(float(np.dot(raw, raw)))
        norms[k] = z
        if z < NORM_SINGULAR_TOL * scale**2:
            column = _null_vector(block - E * np.eye(3))
        else:
            column = raw / z
        coeffs[:, k] = _fix_sign(column)
    return coeffs, norms


def solve_cluster(params: SystemParams, n: int) -> DressedCluster:
    """Dressed energies and coefficients of cluster ``n``.

    Raises InvalidRangeError when eta_L/eta_R leaves the window that keeps
    the spectrum real and distinct, and DegenerateSpectrumError if the
    roots still (numerically) coincide.
    """
    if params.eta_R <= 0.0 or params.eta_L <= 0.0:
        raise InvalidRangeError(
            f"couplings must be positive, got eta_L={params.eta_L!r}, eta_R={params.eta_R!r}"
        )
    ratio = params.eta_L / params.eta_R
    if not (ETA_RATIO_MIN < ratio < ETA_RATIO_MAX):
        raise InvalidRangeError(
            f"eta_L/eta_R = {ratio:.6g} outside ({ETA_RATIO_MIN:.6g}, {ETA_RATIO_MAX:.6g})"
        )
    det = detunings(params, n)
    energies = trig_roots(cubic_form(det, params))
    coeffs, norms = coefficient_columns(det, params, energies)
    return DressedCluster(n=n, energies=energies, coeffs=coeffs, norms=norms)
