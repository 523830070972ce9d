import math

import numpy as np
import pytest

from cavduet import (
    BareState,
    ClusterMismatchError,
    FrameError,
    InvalidRangeError,
    NormDriftError,
    StepTooLargeError,
    bare_to_dressed,
    derotate,
    drive_couplings,
    evolve,
    solve_cluster,
    to_bare,
)
from cavduet import backend
from cavduet.dressed import block_matrix
from cavduet.dynamics import LAMBDA_WEIGHTS, substeps_for
from cavduet.params import detunings

from conftest import random_bare_state, random_valid_params


def clusters_for(params):
    return solve_cluster(params, 0), solve_cluster(params, 1)


def brute_force_lambda(c0, c1):
    """Oracle: the weighted bilinear sum written out as explicit loops."""
    lam = np.zeros((3, 3))
    for j in range(3):
        for k in range(3):
            s = 0.0
            for l, w in enumerate(LAMBDA_WEIGHTS):
                s += w * c0.coeffs[l, j] * c1.coeffs[l, k]
            lam[j, k] = s
    return lam


def test_lambda_matches_brute_force(paper_symmetric, paper_asymmetric):
    for p in (paper_symmetric, paper_asymmetric):
        c0, c1 = clusters_for(p)
        dc = drive_couplings(c0, c1, p)
        assert np.allclose(dc.Lambda, brute_force_lambda(c0, c1), atol=1e-14)


def test_lambda_bounded_by_sqrt2():
    rng = np.random.default_rng(9)
    for _ in range(200):
        p = random_valid_params(rng)
        c0, c1 = clusters_for(p)
        dc = drive_couplings(c0, c1, p)
        assert np.max(np.abs(dc.Lambda)) <= math.sqrt(2.0) + 1e-12


def test_zeta_values_and_offset_flag(paper_symmetric):
    p = paper_symmetric
    c0, c1 = clusters_for(p)
    with_offset = drive_couplings(c0, c1, p, include_cavity_offset=True)
    literal = drive_couplings(c0, c1, p, include_cavity_offset=False)
    for k in range(3):
        for j in range(3):
            gap = c1.energies[k] - c0.energies[j]
            assert with_offset.zeta[k, j] == pytest.approx(p.omega_D - p.omega_c - gap, rel=1e-14)
            assert literal.zeta[k, j] == pytest.approx(p.omega_D - gap, rel=1e-14)
    assert with_offset.omega_offset == p.omega_c
    assert literal.omega_offset == 0.0


def test_cluster_mismatch_rejected(paper_symmetric):
    c0, c1 = clusters_for(paper_symmetric)
    with pytest.raises(ClusterMismatchError):
        drive_couplings(c1, c1, paper_symmetric)


def test_bare_dressed_round_trip(paper_asymmetric):
    c0, c1 = clusters_for(paper_asymmetric)
    rng = np.random.default_rng(21)
    for _ in range(25):
        state = random_bare_state(rng)
        amps = bare_to_dressed(state, c0, c1)
        assert amps.norm_sq() == pytest.approx(1.0, abs=1e-12)
        back = to_bare(amps, c0, c1)
        assert np.allclose(back.gamma, state.gamma, atol=1e-12)


def test_bare_to_dressed_reads_middle_row(resonant_symmetric):
    # gamma_C^(0) = 1: the dressed amplitudes are the middle coefficient row
    c0, c1 = clusters_for(resonant_symmetric)
    state = BareState(np.array([0, 1, 0, 0, 0, 0], dtype=complex))
    amps = bare_to_dressed(state, c0, c1)
    assert np.allclose(amps.c, c0.coeffs[1, :], atol=1e-14)
    assert np.allclose(amps.d, 0.0)


def test_to_bare_single_level(paper_symmetric):
    c0, c1 = clusters_for(paper_symmetric)
    from cavduet.dynamics import DressedAmplitudes

    amps = DressedAmplitudes(
        c=np.array([1.0, 0, 0], dtype=complex),
        d=np.zeros(3, dtype=complex),
        frame="lab",
        t=0.0,
    )
    state = to_bare(amps, c0, c1)
    assert np.allclose(state.gamma[:3], c0.coeffs[:, 0], atol=1e-14)
    assert state.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_default_initial_state_normalized(paper_symmetric):
    c0, c1 = clusters_for(paper_symmetric)
    amps = bare_to_dressed(BareState.cavity_driven(), c0, c1)
    assert amps.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_frame_errors(paper_symmetric):
    c0, c1 = clusters_for(paper_symmetric)
    amps = bare_to_dressed(BareState.cavity_driven(), c0, c1)
    with pytest.raises(FrameError):
        derotate(amps, c0, c1)  # already lab
    amps.frame = "rotating"
    lab = derotate(amps, c0, c1)
    with pytest.raises(FrameError):
        derotate(lab, c0, c1)
    amps2 = bare_to_dressed(BareState.cavity_driven(), c0, c1)
    amps2.frame = "rotating"
    with pytest.raises(FrameError):
        to_bare(amps2, c0, c1)


def test_derotate_phases(paper_symmetric):
    from cavduet.dynamics import DressedAmplitudes

    c0, c1 = clusters_for(paper_symmetric)
    rng = np.random.default_rng(4)
    raw = rng.normal(size=6) + 1j * rng.normal(size=6)
    raw /= np.linalg.norm(raw)

    at0 = DressedAmplitudes(raw[:3].copy(), raw[3:].copy(), "rotating", 0.0)
    lab0 = derotate(at0, c0, c1)
    assert np.allclose(lab0.c, raw[:3]) and np.allclose(lab0.d, raw[3:])

    t = 3.7e-9
    att = DressedAmplitudes(raw[:3].copy(), raw[3:].copy(), "rotating", t)
    labt = derotate(att, c0, c1)
    assert np.allclose(np.abs(labt.c), np.abs(raw[:3]), atol=1e-14)
    assert np.allclose(np.abs(labt.d), np.abs(raw[3:]), atol=1e-14)

    # a full 2 pi of the k=3 level leaves that amplitude unchanged
    t_full = 2.0 * math.pi / c0.energies[2]
    full = derotate(DressedAmplitudes(raw[:3].copy(), raw[3:].copy(), "rotating", t_full), c0, c1)
    assert full.c[2] == pytest.approx(raw[2], abs=1e-12)


def test_undriven_rotating_amplitudes_constant(paper_symmetric):
    p = paper_symmetric.replace(epsilon_D=0.0)
    traj = evolve(p, BareState.cavity_driven(), 50e-9, 1e-9)
    assert np.allclose(traj.rotating, traj.rotating[0], atol=1e-12)


def test_undriven_single_dressed_state_stationary(paper_symmetric):
    p = paper_symmetric.replace(epsilon_D=0.0)
    c0, c1 = clusters_for(p)
    state = BareState(np.concatenate([c0.coeffs[:, 0], np.zeros(3)]).astype(complex))
    traj = evolve(p, state, 50e-9, 1e-9)
    pops = np.abs(traj.bare) ** 2
    assert np.allclose(pops, pops[0], atol=1e-12)


def test_evolve_norm_conserved(paper_symmetric):
    traj = evolve(paper_symmetric, BareState.cavity_driven(), 0.2e-6, 1e-9)
    norms = np.sum(np.abs(traj.bare) ** 2, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-8


def test_evolve_rejects_bad_inputs(paper_symmetric):
    bad = BareState(np.array([1.0, 1.0, 0, 0, 0, 0], dtype=complex))
    with pytest.raises(ValueError):
        evolve(paper_symmetric, bad, 1e-9, 1e-10)
    with pytest.raises(InvalidRangeError):
        evolve(
            paper_symmetric.replace(eta_L=6.0 * paper_symmetric.eta_R),
            BareState.cavity_driven(),
            1e-9,
            1e-10,
        )


def test_step_too_large(paper_symmetric):
    with pytest.raises(StepTooLargeError):
        evolve(paper_symmetric, BareState.cavity_driven(), 1e-8, 1e-9, substep=1e-9)
    # and the helper itself
    with pytest.raises(StepTooLargeError):
        substeps_for(1e-9, 1e12, substep=1e-9)


def test_norm_drift_detected(paper_symmetric):
    # a drive far stronger than the resolved step budget destabilizes RK4
    p = paper_symmetric.replace(epsilon_D=2.0 * math.pi * 20e9)
    with pytest.raises(NormDriftError):
        evolve(p, BareState.cavity_driven(), 2e-9, 1e-10, step_factor=2.5)


def resonant_drive(params):
    """Tune omega_D onto the (j=3, k=1) dressed transition."""
    c0, c1 = clusters_for(params)
    return params.replace(omega_D=params.omega_c + (c1.energies[0] - c0.energies[2]))


def test_time_reversal(paper_symmetric):
    p = resonant_drive(paper_symmetric)
    t_max, dt = 1e-6, 2e-9
    traj = evolve(p, BareState.cavity_driven(), t_max, dt)
    dc = traj.couplings
    rate = max(float(np.max(np.abs(dc.zeta))), p.epsilon_D)
    n_sub = substeps_for(dt, rate)
    h = dt / n_sub
    back = backend.integrate_rotating(
        traj.rotating[-1], dc.zeta, dc.Lambda, p.epsilon_D, -h, n_sub, len(traj) - 1, t0=t_max
    )
    assert np.max(np.abs(back[-1] - traj.rotating[0])) < 1e-6


def reference_bare(params, initial, t_max, dt, include_cavity_offset=True, budget=2.5e-7):
    """Independent check: direct RK4 on the confined bare-basis system.

    The cluster-1 photon offset is carried in the drive phase instead of
    the diagonal (same gauge as the dressed path's dropped phase), so the
    amplitudes compare directly.  No dressed quantities are used.
    """
    det0, det1 = detunings(params, 0), detunings(params, 1)
    diag0 = np.array([det0.Delta, det0.delta_n, -det0.Delta])
    diag1 = np.array([det1.Delta, det1.delta_n, -det1.Delta])
    omega_eff = params.omega_D - (params.omega_c if include_cavity_offset else 0.0)
    w = max(
        np.max(np.abs(np.linalg.eigvalsh(block_matrix(det0, params)))),
        np.max(np.abs(np.linalg.eigvalsh(block_matrix(det1, params)))),
    ) + abs(omega_eff) + params.epsilon_D
    n_out = max(1, int(round(t_max / dt)))
    h = (120.0 * budget / (t_max * w**5)) ** 0.25
    n_sub = max(1, int(math.ceil(dt / h)))
    return backend.integrate_bare(
        initial.gamma,
        diag0,
        diag1,
        params.eta_L,
        params.eta_R,
        LAMBDA_WEIGHTS,
        params.epsilon_D,
        omega_eff,
        dt / n_sub,
        n_sub,
        n_out,
    )


@pytest.mark.parametrize("include_offset", [True, False])
def test_oracle_equivalence_driven(paper_symmetric, include_offset):
    # resonant drive so the coupling terms genuinely act
    p = resonant_drive(paper_symmetric)
    t_max, dt = 0.5e-6, 2e-9
    traj = evolve(p, BareState.cavity_driven(), t_max, dt, include_cavity_offset=include_offset)
    oracle = reference_bare(p, BareState.cavity_driven(), t_max, dt, include_offset)
    assert np.max(np.abs(traj.bare - oracle)) < 1e-6


def test_trajectory_accessors(paper_symmetric):
    traj = evolve(paper_symmetric, BareState.cavity_driven(), 10e-9, 1e-9)
    assert len(traj) == 11
    st = traj.state_at(3)
    assert np.allclose(st.gamma, traj.bare[3])
    rot = traj.dressed_at(3)
    assert rot.frame == "rotating"
    lab = traj.dressed_at(3, frame="lab")
    bare = to_bare(lab, traj.cluster0, traj.cluster1)
    assert np.allclose(bare.gamma, traj.bare[3], atol=1e-12)
    assert np.all(np.diff(traj.times) > 0)
    assert np.allclose(np.diff(traj.times), traj.times[1] - traj.times[0])
