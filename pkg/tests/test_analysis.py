import math

import numpy as np
import pytest

from cavduet import (
    BareState,
    MeasureSeries,
    NoPlateauError,
    detect_delay,
    detuning_window,
    drive_couplings,
    evolve,
    measure_series,
    solve_cluster,
    stationary_async,
    sweep,
    upper_envelope,
)
from cavduet.analysis import SweepResult, _sweep_point


def series_from(times, values, name="C2"):
    zeros = np.zeros_like(values)
    data = {"C2": zeros, "C3_literal": zeros, "C3_residual": zeros, "A": zeros}
    data[name] = np.asarray(values, dtype=float)
    return MeasureSeries(times=np.asarray(times, dtype=float), **data)


def test_envelope_tracks_block_maxima():
    t = np.linspace(0.0, 1.0, 101)
    y = np.sin(2 * np.pi * 10 * t) ** 2
    env = upper_envelope(t, y, 10)  # window = one oscillation period
    assert env.shape == t.shape
    assert env.max() <= 1.0 + 1e-12
    # away from the edges the envelope rides the crests, not the signal
    inner = slice(10, 90)
    assert np.mean(env[inner]) > 0.9
    assert np.mean(y[inner]) < 0.6


def test_envelope_window_one_is_identity():
    t = np.linspace(0.0, 1.0, 50)
    y = np.tanh(3 * t)
    assert np.array_equal(upper_envelope(t, y, 1), y)


def test_detect_delay_constant_series():
    t = np.linspace(0.0, 1e-5, 1000)
    res = detect_delay(series_from(t, np.full_like(t, 0.7)), "C2")
    assert res.tau_D == 0.0
    assert res.saturated_value == pytest.approx(0.7)


def test_detect_delay_zero_series():
    t = np.linspace(0.0, 1e-5, 1000)
    res = detect_delay(series_from(t, np.zeros_like(t), "A"), "A")
    assert res.tau_D == 0.0


def test_detect_delay_tanh_analytic():
    # tanh(t / 2us) sampled at 1 ns over 10 us; with window = dt the
    # envelope equals the series and the in-band entry time is analytic
    dt = 1e-9
    t = np.arange(0, 10e-6 + dt / 2, dt)
    tau_scale = 2e-6
    y = np.tanh(t / tau_scale)
    series = series_from(t, y)
    band_frac, tail_frac = 0.05, 0.25
    res = detect_delay(series, "C2", window=dt, band_frac=band_frac, tail_frac=tail_frac)
    tail = y[t >= t[-1] - tail_frac * (t[-1] - t[0])]
    plateau = float(np.mean(tail))
    t_analytic = tau_scale * math.atanh((1.0 - band_frac) * plateau)
    assert abs(res.tau_D - t_analytic) <= 2 * dt
    assert res.detection["measure"] == "C2"


def test_detect_delay_no_plateau_on_ramp():
    t = np.linspace(0.0, 1e-5, 2000)
    y = (t / t[-1]) ** 2  # still rising at the end
    with pytest.raises(NoPlateauError):
        detect_delay(series_from(t, y), "C2")


def test_detect_delay_rejects_short_series():
    with pytest.raises(ValueError):
        detect_delay(series_from([0, 1e-9], [0, 1]), "C2")


def test_stationary_async_step_series():
    t = np.linspace(0.0, 1e-5, 4000)
    y = np.where(t < 2e-6, 0.5 * t / 2e-6, 0.02)
    series = series_from(t, y, "A")
    res = detect_delay(series, "A", window=t[1] - t[0])
    a_bar = stationary_async(series, window=t[1] - t[0])
    assert res.tau_D == pytest.approx(2e-6, abs=5e-8)
    assert a_bar == pytest.approx(0.02, rel=1e-9)


def test_stationary_async_symmetric_is_negligible(paper_symmetric):
    traj = evolve(paper_symmetric, BareState.cavity_driven(), 0.3e-6, 2e-9)
    series = measure_series(traj)
    a_bar = stationary_async(series, window=detuning_window(traj.couplings))
    assert a_bar < 1e-12


def test_detuning_window(paper_symmetric):
    c0 = solve_cluster(paper_symmetric, 0)
    c1 = solve_cluster(paper_symmetric, 1)
    dc = drive_couplings(c0, c1, paper_symmetric)
    w = detuning_window(dc, periods=3)
    zmin = np.min(np.abs(dc.zeta)[np.abs(dc.zeta) > 0])
    assert w == pytest.approx(3 * 2 * math.pi / zmin, rel=1e-12)


def test_sweep_single_point_matches_direct_pipeline(paper_symmetric):
    eta = paper_symmetric.eta_L
    t_max, dt = 0.2e-6, 2e-9
    res = sweep(paper_symmetric, [eta], t_max=t_max, dt=dt, observable="C2")
    assert len(res.points) == 1
    pt = res.points[0]
    traj = evolve(paper_symmetric, BareState.cavity_driven(), t_max, dt)
    series = measure_series(traj)
    window = detuning_window(traj.couplings)
    direct_tau = detect_delay(series, "C2", window=window).tau_D
    direct_abar = stationary_async(series, window=window)
    assert pt.tau_D == pytest.approx(direct_tau, abs=1e-12)
    assert pt.A_bar == pytest.approx(direct_abar, rel=1e-12)
    assert pt.converged


def test_sweep_records_failures_without_aborting(paper_symmetric):
    res = sweep(paper_symmetric, [0.0, paper_symmetric.eta_L], t_max=0.1e-6, dt=2e-9)
    assert len(res.points) == 2
    bad, good = res.points
    assert not bad.converged and bad.error is not None
    assert math.isnan(bad.tau_D) and math.isnan(bad.A_bar)
    assert good.converged


def test_sweep_parallel_matches_serial(paper_symmetric):
    etas = [0.5 * paper_symmetric.eta_L, paper_symmetric.eta_L]
    kw = dict(t_max=0.1e-6, dt=2e-9, observable="C2")
    serial = sweep(paper_symmetric, etas, jobs=1, **kw)
    parallel = sweep(paper_symmetric, list(reversed(etas)), jobs=2, **kw)
    assert np.array_equal(serial.axis, parallel.axis)  # ordered by axis
    assert np.allclose(serial.tau_D, parallel.tau_D, equal_nan=True)
    assert np.allclose(serial.A_bar, parallel.A_bar, equal_nan=True)


def test_sweep_result_arrays(paper_symmetric):
    res = sweep(paper_symmetric, [paper_symmetric.eta_L], t_max=0.1e-6, dt=2e-9)
    assert isinstance(res, SweepResult)
    assert res.axis.shape == (1,)
    assert res.converged.dtype == bool
