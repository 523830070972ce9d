"""Reduced density matrices and the cooperativity/synchronization measures.

The full system lives on L (x) C (x) R with dimensions 2 x 3 x 2: each
qubit ordered (|e>, |g>) and the cavity truncated at Fock 2, the support
of the confined dynamics.  All measures act on pure global states through
their reductions:

* ``concurrence2``          sqrt(2 [1 - tr rho_L^2]) of a qubit reduction
* ``concurrence3_literal``  the purity combination
      1 - tr rho_R^2 - tr rho_L^2 - tr rho_C^2
        + tr rho_LR^2 + tr rho_CR^2 + tr rho_LC^2 - tr rho^2
  under a square root.  On globally pure states complementary reductions
  have equal purity, so this vanishes identically; it is kept for
  formula-fidelity checks.
* ``concurrence3_residual`` sqrt(max(0, C_{L|(CR)}^2 - C_W(rho_LR)^2)),
  the qubit-residual variant actually used for the time-series plots,
  with C_W the Wootters concurrence of the two-qubit reduction.
* ``asynchronicity``        |det(rho_L - rho_R)|

Negative values produced by rounding under any square root are clamped to
zero and counted (``clamp_count``), never raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dynamics import BareState, Trajectory
from .errors import BadSubsystemError

SUBSYSTEMS = ("L", "C", "R")
SUBSYS_DIMS = {"L": 2, "C": 3, "R": 2}

#: (L, C, R) tensor index of each bare amplitude, in BARE_LABELS order;
#: qubit index 0 = |e>, 1 = |g>, cavity index = Fock number.
BARE_TENSOR_INDEX = (
    (0, 0, 1),  # |e,0,g>
    (1, 1, 1),  # |g,1,g>
    (1, 0, 0),  # |g,0,e>
    (0, 1, 1),  # |e,1,g>
    (1, 2, 1),  # |g,2,g>
    (1, 1, 0),  # |g,1,e>
)

_clamp_count = 0


def clamp_count() -> int:
    """Number of negative-under-sqrt values clamped to zero so far."""
    return _clamp_count


def reset_clamp_count() -> None:
    global _clamp_count
    _clamp_count = 0


def _clamped(x):
    """max(x, 0) elementwise, counting how many entries were negative."""
    global _clamp_count
    arr = np.asarray(x)
    neg = int(np.count_nonzero(arr < 0.0))
    if neg:
        _clamp_count += neg
    return np.maximum(arr, 0.0)


@dataclass
class DensityMatrix:
    """Hermitian trace-one operator on an ordered subset of (L, C, R)."""

    labels: tuple
    data: np.ndarray

    @property
    def dims(self) -> tuple:
        return tuple(SUBSYS_DIMS[l] for l in self.labels)

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10) -> list:
        """Return the list of violated density-matrix invariants."""
        problems = []
        if not np.allclose(self.data, self.data.conj().T, atol=herm_tol, rtol=0.0):
            problems.append("not Hermitian")
        tr = complex(np.trace(self.data))
        if abs(tr - 1.0) > trace_tol:
            problems.append(f"trace {tr!r} != 1")
        if np.min(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))) < -psd_tol:
            problems.append("negative eigenvalue beyond tolerance")
        return problems


def state_tensor(state: BareState) -> np.ndarray:
    """Embed the six amplitudes into the (2, 3, 2) tensor of L x C x R."""
    psi = np.zeros((2, 3, 2), dtype=np.complex128)
    for amp, idx in zip(state.gamma, BARE_TENSOR_INDEX):
        psi[idx] = amp
    return psi


def full_density(state: BareState) -> DensityMatrix:
    """Rank-1 projector |psi><psi| on the 12-dimensional product space."""
    vec = state_tensor(state).reshape(-1)
    return DensityMatrix(labels=SUBSYSTEMS, data=np.outer(vec, vec.conj()))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out everything but the ``keep`` subsystems.

    ``keep`` is a subsystem name or an iterable of names; the result keeps
    the canonical (L, C, R) ordering of the survivors.
    """
    if isinstance(keep, str):
        keep_set = {keep}
    else:
        keep_set = set(keep)
    unknown = keep_set - set(rho.labels)
    if unknown or not keep_set:
        raise BadSubsystemError(
            f"cannot keep {sorted(keep_set)}; present subsystems are {list(rho.labels)}"
        )
    kept = tuple(l for l in rho.labels if l in keep_set)
    dims = rho.dims
    n = len(dims)
    tensor = rho.data.reshape(dims + dims)
    # contract each traced-out axis pair, starting from the rightmost so
    # earlier axis numbers stay valid
    for pos in reversed(range(n)):
        if rho.labels[pos] in keep_set:
            continue
        tensor = np.trace(tensor, axis1=pos, axis2=pos + (tensor.ndim // 2))
    d = int(np.prod([SUBSYS_DIMS[l] for l in kept]))
    return DensityMatrix(labels=kept, data=tensor.reshape(d, d))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.data @ rho.data)))


def concurrence2(rho_L: DensityMatrix) -> float:
    """Bipartite concurrence of a pure global state from one 2x2 reduction."""
    if rho_L.data.shape != (2, 2):
        raise ValueError(f"need a 2x2 density matrix, got {rho_L.data.shape}")
    return float(np.sqrt(2.0 * _clamped(1.0 - purity(rho_L))))


def tripartite_purity_combination(state: BareState) -> float:
    """The quantity under the literal tripartite square root, unclamped:

        1 - tr rho_R^2 - tr rho_L^2 - tr rho_C^2
          + tr rho_LR^2 + tr rho_CR^2 + tr rho_LC^2 - tr rho^2

    Identically zero on pure states; numerically it sits at the rounding
    floor (~1e-15), so tolerances belong on this quantity, not on its
    square root.
    """
    rho = full_density(state)
    p = {s: purity(partial_trace(rho, s)) for s in SUBSYSTEMS}
    p2 = {
        pair: purity(partial_trace(rho, pair))
        for pair in (("L", "R"), ("C", "R"), ("L", "C"))
    }
    return (
        1.0
        - p["R"]
        - p["L"]
        - p["C"]
        + p2[("L", "R")]
        + p2[("C", "R")]
        + p2[("L", "C")]
        - purity(rho)
    )


def concurrence3_literal(state: BareState) -> float:
    """Tripartite purity combination under a square root, exactly as
    written, clamped at zero before the root."""
    return float(np.sqrt(_clamped(tripartite_purity_combination(state))))


_SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def wootters(rho_LR: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Spin-flip construction: lambda_i are the square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy) in decreasing order and
    C = max(0, l1 - l2 - l3 - l4).
    """
    rho = rho_LR.data
    if rho.shape != (4, 4):
        raise ValueError(f"need a 4x4 two-qubit density matrix, got {rho.shape}")
    rho_tilde = _SIGMA_YY @ rho.conj() @ _SIGMA_YY
    ev = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sqrt(_clamped(np.real(ev)))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence3_residual(state: BareState) -> float:
    """Qubit-residual tripartite concurrence.

    tau = C_{L|(CR)}^2 - C_W(rho_LR)^2, returned as sqrt(max(0, tau)).
    This is the variant that stays nonzero on the driven trajectories.
    """
    rho = full_density(state)
    c_bipartite_sq = 2.0 * float(_clamped(1.0 - purity(partial_trace(rho, "L"))))
    c_pair = wootters(partial_trace(rho, ("L", "R")))
    return float(np.sqrt(_clamped(c_bipartite_sq - c_pair**2)))


def asynchronicity(rho_L: DensityMatrix, rho_R: DensityMatrix) -> float:
    """|det(rho_L - rho_R)| of the two qubit reductions."""
    if rho_L.data.shape != (2, 2) or rho_R.data.shape != (2, 2):
        raise ValueError("asynchronicity takes two 2x2 density matrices")
    m = rho_L.data - rho_R.data
    return float(abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]))


@dataclass
class MeasureSeries:
    """Per-sample values of all four measures along a trajectory."""

    times: np.ndarray
    C2: np.ndarray
    C3_literal: np.ndarray
    C3_residual: np.ndarray
    A: np.ndarray

    def get(self, name: str) -> np.ndarray:
        try:
            return getattr(self, name)
        except AttributeError:
            raise KeyError(f"unknown measure {name!r}") from None


def _states_tensor(bare: np.ndarray) -> np.ndarray:
    n = bare.shape[0]
    psi = np.zeros((n, 2, 3, 2), dtype=np.complex128)
    for col, idx in enumerate(BARE_TENSOR_INDEX):
        psi[(slice(None),) + idx] = bare[:, col]
    return psi


def _abs2_sum(x: np.ndarray) -> np.ndarray:
    flat = x.reshape(x.shape[0], -1)
    return np.sum(np.abs(flat) ** 2, axis=1)


def measure_series(traj: Trajectory) -> MeasureSeries:
    """Evaluate all four measures at every trajectory sample (vectorized)."""
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    g = _states_tensor(traj.bare)
    gc = g.conj()

    rho_L = np.einsum("nacr,nbcr->nab", g, gc)
    rho_R = np.einsum("nacr,nacs->nrs", g, gc)
    rho_C = np.einsum("nacr,nadr->ncd", g, gc)
    rho_LR = np.einsum("nacr,nbcs->narbs", g, gc).reshape(-1, 4, 4)

    p_L = _abs2_sum(rho_L)
    p_R = _abs2_sum(rho_R)
    p_C = _abs2_sum(rho_C)
    p_LR = _abs2_sum(rho_LR)
    p_CR = _abs2_sum(np.einsum("nacr,nads->ncrds", g, gc))
    p_LC = _abs2_sum(np.einsum("nacr,nbdr->nacbd", g, gc))
    norm_sq = _abs2_sum(g)
    p_full = norm_sq**2

    c2 = np.sqrt(2.0 * _clamped(1.0 - p_L))
    c3_lit = np.sqrt(_clamped(1.0 - p_R - p_L - p_C + p_LR + p_CR + p_LC - p_full))

    rho_tilde = _SIGMA_YY @ rho_LR.conj() @ _SIGMA_YY
    lam = np.sqrt(_clamped(np.real(np.linalg.eigvals(rho_LR @ rho_tilde))))
    lam = np.sort(lam, axis=1)[:, ::-1]
    c_w = np.maximum(0.0, lam[:, 0] - lam[:, 1] - lam[:, 2] - lam[:, 3])
    c3_res = np.sqrt(_clamped(c2**2 - c_w**2))

    diff = rho_L - rho_R
    a = np.abs(diff[:, 0, 0] * diff[:, 1, 1] - diff[:, 0, 1] * diff[:, 1, 0])

    return MeasureSeries(
        times=traj.times.copy(),
        C2=c2,
        C3_literal=c3_lit,
        C3_residual=c3_res,
        A=a,
    )
