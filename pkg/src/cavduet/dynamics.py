"""Drive couplings between the two lowest clusters, time evolution of the
state vector, and conversions between dressed and bare amplitudes.

The drive connects cluster 0 to cluster 1 through the photon ladder with
weights (1, sqrt(2), 1) on the (L, C, R) components.  In the rotating
frame of the dressed energies, the amplitudes obey

    dc'_j/dt = -eps_D sum_k exp(+i zeta[k,j] t) Lambda[j,k] d'_k
    dd'_k/dt = +eps_D sum_j exp(-i zeta[k,j] t) Lambda[j,k] c'_j

with Lambda[j,k] the weighted bilinear sum of dressed coefficients and
zeta[k,j] the drive detuning from the dressed transition.

The cluster blocks carry their diagonal energies with the common photon
offset removed; the physical frequency of a 0 -> 1 dressed transition is
therefore ``omega_offset + E1[k] - E0[j]`` with ``omega_offset = omega_c``.
``include_cavity_offset=False`` selects the literal reading
``zeta = omega_D - (E1[k] - E0[j])`` instead, for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .dressed import DressedCluster, solve_cluster
from .errors import (
    ClusterMismatchError,
    FrameError,
    InvalidRangeError,
    NormDriftError,
    StepTooLargeError,
)
from .params import SystemParams, validate

LAMBDA_WEIGHTS = (1.0, math.sqrt(2.0), 1.0)

#: bare basis ordering of the six amplitudes
BARE_LABELS = ("e0g", "g1g", "g0e", "e1g", "g2g", "g1e")

NORM_TOL = 1e-8
DEFAULT_STEP_FACTOR = 0.05
MAX_STEP_PHASE = 0.1


@dataclass(frozen=True)
class DriveCouplings:
    """Drive-induced coupling data between clusters 0 and 1.

    Lambda[j, k]   : cluster-0 index j, cluster-1 index k; |Lambda| <= sqrt(2)
    zeta[k, j]     : drive detuning omega_D - omega_offset - (E1[k] - E0[j])
    omega_offset   : the re-added common photon offset actually used
    """

    lambda_weights: tuple
    Lambda: np.ndarray
    zeta: np.ndarray
    omega_offset: float


@dataclass
class DressedAmplitudes:
    """Six complex amplitudes over the dressed basis of clusters 0 and 1."""

    c: np.ndarray
    d: np.ndarray
    frame: str  # "lab" or "rotating"
    t: float

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2) + np.sum(np.abs(self.d) ** 2))


@dataclass
class BareState:
    """Amplitudes over (|e,0,g>, |g,1,g>, |g,0,e>, |e,1,g>, |g,2,g>, |g,1,e>)."""

    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=np.complex128)
        if self.gamma.shape != (6,):
            raise ValueError(f"expected 6 amplitudes, got shape {self.gamma.shape}")

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.gamma) ** 2))

    @classmethod
    def cavity_driven(cls) -> "BareState":
        """Default initial state: sqrt(0.9)|g,1,g> + sqrt(0.1)|g,2,g>."""
        return cls(np.array([0, math.sqrt(0.9), 0, 0, math.sqrt(0.1), 0], dtype=complex))

    @classmethod
    def cavity_driven_alt(cls) -> "BareState":
        """Variant with the 0.1 weight on |e,1,g> instead of |g,2,g>."""
        return cls(np.array([0, math.sqrt(0.9), 0, math.sqrt(0.1), 0, 0], dtype=complex))


def drive_couplings(
    cluster0: DressedCluster,
    cluster1: DressedCluster,
    params: SystemParams,
    include_cavity_offset: bool = True,
) -> DriveCouplings:
    """Weighted coefficient overlaps and drive detunings for clusters (0, 1)."""
    if (cluster0.n, cluster1.n) != (0, 1):
        raise ClusterMismatchError(
            f"drive couples clusters (0, 1), got ({cluster0.n}, {cluster1.n})"
        )
    weights = np.array(LAMBDA_WEIGHTS)
    lam = cluster0.coeffs.T @ (weights[:, None] * cluster1.coeffs)
    omega_offset = params.omega_c if include_cavity_offset else 0.0
    zeta = (
        params.omega_D
        - omega_offset
        - (cluster1.energies[:, None] - cluster0.energies[None, :])
    )
    return DriveCouplings(
        lambda_weights=LAMBDA_WEIGHTS,
        Lambda=lam,
        zeta=zeta,
        omega_offset=omega_offset,
    )


def bare_to_dressed(
    state: BareState,
    cluster0: DressedCluster,
    cluster1: DressedCluster,
    t: float = 0.0,
) -> DressedAmplitudes:
    """Expand a bare state over the dressed basis (lab frame).

    The coefficient matrices are real orthogonal per cluster, so the
    transform is an isometry: c_j = sum_l alpha0[l, j] gamma0_l.
    """
    c = cluster0.coeffs.T @ state.gamma[:3]
    d = cluster1.coeffs.T @ state.gamma[3:]
    return DressedAmplitudes(c=c, d=d, frame="lab", t=t)


def to_bare(
    amps: DressedAmplitudes,
    cluster0: DressedCluster,
    cluster1: DressedCluster,
) -> BareState:
    """Contract lab-frame dressed amplitudes back onto the bare basis."""
    if amps.frame != "lab":
        raise FrameError("to_bare needs lab-frame amplitudes; derotate first")
    gamma = np.concatenate([cluster0.coeffs @ amps.c, cluster1.coeffs @ amps.d])
    return BareState(gamma)


def derotate(
    amps: DressedAmplitudes,
    cluster0: DressedCluster,
    cluster1: DressedCluster,
) -> DressedAmplitudes:
    """Rotating -> lab frame: multiply by exp(-i E t) per dressed level.

    The common photon offset of cluster 1 would add one further uniform
    phase exp(-i omega_offset t) on that cluster; it cancels in every
    reduced density matrix and is dropped here.
    """
    if amps.frame != "rotating":
        raise FrameError("amplitudes are already in the lab frame")
    c = amps.c * np.exp(-1j * cluster0.energies * amps.t)
    d = amps.d * np.exp(-1j * cluster1.energies * amps.t)
    return DressedAmplitudes(c=c, d=d, frame="lab", t=amps.t)


def substeps_for(
    dt: float,
    rate: float,
    substep: Optional[float] = None,
    step_factor: float = DEFAULT_STEP_FACTOR,
) -> int:
    """Number of integrator substeps per output sample.

    The substep resolves the fastest retained angular rate: h * rate <=
    step_factor.  An explicit ``substep`` overrides the choice but may not
    advance the fastest phase by more than 0.1 rad per step.
    """
    if substep is not None:
        if substep <= 0.0:
            raise ValueError("substep must be positive")
        if substep * rate > MAX_STEP_PHASE:
            raise StepTooLargeError(
                f"substep {substep:.3e} s advances the fastest phase by "
                f"{substep * rate:.3f} rad > {MAX_STEP_PHASE}"
            )
        return max(1, int(math.ceil(dt / substep)))
    if rate > 0.0:
        return max(1, int(math.ceil(dt * rate / step_factor)))
    return 1


@dataclass
class Trajectory:
    """Uniformly sampled evolution: rotating-frame dressed amplitudes and
    lab-frame bare amplitudes at each time."""

    times: np.ndarray
    rotating: np.ndarray  # (N, 6) complex, [c'_1..3, d'_1..3]
    bare: np.ndarray      # (N, 6) complex, gamma in BARE_LABELS order
    params: SystemParams
    cluster0: DressedCluster
    cluster1: DressedCluster
    couplings: DriveCouplings

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, i: int) -> BareState:
        return BareState(self.bare[i].copy())

    def dressed_at(self, i: int, frame: str = "rotating") -> DressedAmplitudes:
        amps = DressedAmplitudes(
            c=self.rotating[i, :3].copy(),
            d=self.rotating[i, 3:].copy(),
            frame="rotating",
            t=float(self.times[i]),
        )
        if frame == "rotating":
            return amps
        return derotate(amps, self.cluster0, self.cluster1)


def _derotate_trajectory(times, rotating, cluster0, cluster1):
    phase0 = np.exp(-1j * np.outer(times, cluster0.energies))
    phase1 = np.exp(-1j * np.outer(times, cluster1.energies))
    bare = np.empty_like(rotating)
    bare[:, :3] = (rotating[:, :3] * phase0) @ cluster0.coeffs.T
    bare[:, 3:] = (rotating[:, 3:] * phase1) @ cluster1.coeffs.T
    return bare


def evolve(
    params: SystemParams,
    initial: BareState,
    t_max: float,
    dt: float,
    include_cavity_offset: bool = True,
    substep: Optional[float] = None,
    step_factor: float = DEFAULT_STEP_FACTOR,
) -> Trajectory:
    """Integrate the driven two-cluster system and sample every ``dt``.

    The integrator is fixed-step RK4 on the rotating-frame amplitudes; the
    internal substep is chosen so that substep * max(|zeta|, eps_D) <=
    ``step_factor``, which keeps trajectories bit-reproducible between
    runs.  Pass ``substep`` to override; a substep with phase advance
    beyond 0.1 rad per step raises StepTooLargeError.  Norm drift beyond
    1e-8 at any sample raises NormDriftError.
    """
    report = validate(params)
    if not report.ok:
        if any("real-root" in v for v in report.violations):
            raise InvalidRangeError(str(report))
        raise ValueError(str(report))
    if abs(initial.norm_sq() - 1.0) > NORM_TOL:
        raise ValueError(f"initial state not normalized: |gamma|^2 = {initial.norm_sq()!r}")
    if dt <= 0.0 or t_max <= 0.0:
        raise ValueError("t_max and dt must be positive")

    cluster0 = solve_cluster(params, 0)
    cluster1 = solve_cluster(params, 1)
    couplings = drive_couplings(cluster0, cluster1, params, include_cavity_offset)

    n_out = max(1, int(round(t_max / dt)))
    rate = max(float(np.max(np.abs(couplings.zeta))), params.epsilon_D)
    n_sub = substeps_for(dt, rate, substep, step_factor)
    h = dt / n_sub

    amps0 = bare_to_dressed(initial, cluster0, cluster1)
    psi0 = np.concatenate([amps0.c, amps0.d])
    rotating = backend.integrate_rotating(
        psi0, couplings.zeta, couplings.Lambda, params.epsilon_D, h, n_sub, n_out
    )
    norms = np.sum(np.abs(rotating) ** 2, axis=1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_TOL:
        raise NormDriftError(f"norm drift {drift:.3e} exceeds {NORM_TOL}")

    times = np.arange(n_out + 1) * dt
    bare = _derotate_trajectory(times, rotating, cluster0, cluster1)
    return Trajectory(
        times=times,
        rotating=rotating,
        bare=bare,
        params=params,
        cluster0=cluster0,
        cluster1=cluster1,
        couplings=couplings,
    )
