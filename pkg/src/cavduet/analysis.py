"""Delay-time extraction, stationary asynchronicity, and coupling sweeps.

The delay detector builds the upper envelope of a measure series (block
maxima, linearly interpolated at their own positions) and returns the
earliest time after which the envelope stays within a +-band of its final
plateau mean for the remainder of the series.  Series that never settle
raise :class:`NoPlateauError`; sweeps record such points with a sentinel
instead of aborting.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import BareState, DriveCouplings, evolve
from .errors import CavduetError, NoPlateauError
from .measures import MeasureSeries, measure_series
from .params import SystemParams, validate

DEFAULT_BAND_FRAC = 0.05
DEFAULT_TAIL_FRAC = 0.25
DEFAULT_MAX_START_FRAC = 0.75
DEFAULT_WINDOW_PERIODS = 3.0
BAND_ATOL = 1e-12


@dataclass
class DelayResult:
    """Detected settling time of a measure series.

    tau_D is measured from the start of the series; saturated_value is the
    mean of the raw measure after tau_D; detection echoes the detector
    settings used.
    """

    tau_D: float
    saturated_value: float
    detection: dict = field(default_factory=dict)


def upper_envelope(times: np.ndarray, values: np.ndarray, window_samples: int) -> np.ndarray:
    """Upper envelope by block maxima, interpolated back onto the grid.

    Each consecutive block of ``window_samples`` samples contributes its
    maximum at the position where it occurs; outside the first/last node
    the envelope holds the nearest node value (anchoring the edges to raw
    samples would drag an upper envelope down mid-oscillation).
    """
    n = len(values)
    w = max(1, int(window_samples))
    nodes_t = []
    nodes_v = []
    for start in range(0, n, w):
        seg = values[start : start + w]
        i = start + int(np.argmax(seg))
        nodes_t.append(times[i])
        nodes_v.append(values[i])
    return np.interp(times, nodes_t, nodes_v)


def detuning_window(couplings: DriveCouplings, periods: float = DEFAULT_WINDOW_PERIODS) -> Optional[float]:
    """Envelope window: ``periods`` periods of the slowest drive detuning."""
    mags = np.abs(couplings.zeta)
    mags = mags[mags > 0.0]
    if mags.size == 0:
        return None
    return periods * 2.0 * math.pi / float(np.min(mags))


def detect_delay(
    series: MeasureSeries,
    which: str,
    window: Optional[float] = None,
    band_frac: float = DEFAULT_BAND_FRAC,
    tail_frac: float = DEFAULT_TAIL_FRAC,
    max_start_frac: float = DEFAULT_MAX_START_FRAC,
    atol: float = BAND_ATOL,
) -> DelayResult:
    """Earliest time after which the envelope of ``which`` stays within
    ``band_frac`` of its final plateau mean.

    Raises NoPlateauError when the in-band stretch starts later than
    ``max_start_frac`` of the series (or never).
    """
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.get(which), dtype=float)
    if len(t) < 4:
        raise ValueError("series too short for delay detection")
    span = float(t[-1] - t[0])
    dt = float(t[1] - t[0])
    if window is None:
        window = span / 50.0
    window = min(window, span / 4.0)
    w_samples = max(1, int(round(window / dt)))

    env = upper_envelope(t, y, w_samples)
    plateau = float(np.mean(env[t >= t[-1] - tail_frac * span]))
    band = band_frac * abs(plateau) + atol
    outside = np.abs(env - plateau) > band

    detection = {
        "measure": which,
        "window": float(window),
        "band_frac": float(band_frac),
        "tail_frac": float(tail_frac),
        "max_start_frac": float(max_start_frac),
        "plateau_mean": plateau,
    }

    if not outside.any():
        tau = float(t[0])
    else:
        last_violation = int(np.nonzero(outside)[0][-1])
        if last_violation + 1 >= len(t):
            raise NoPlateauError(
                f"{which} envelope still outside the {band_frac:.0%} band at the end of the series"
            )
        tau = float(t[last_violation + 1])

    tau_rel = tau - float(t[0])
    if tau_rel > max_start_frac * span:
        raise NoPlateauError(
            f"{which} plateau starts at {tau_rel:.3e} s, beyond {max_start_frac:.0%} of the series"
        )
    after = t > tau
    saturated = float(np.mean(y[after])) if after.any() else float(y[-1])
    return DelayResult(tau_D=tau_rel, saturated_value=saturated, detection=detection)


def stationary_async(series: MeasureSeries, **detector_kwargs) -> float:
    """Mean asynchronicity after its own settling time."""
    result = detect_delay(series, "A", **detector_kwargs)
    after = series.times - series.times[0] > result.tau_D
    if not after.any():
        return float(series.A[-1])
    return float(np.mean(series.A[after]))


@dataclass
class SweepPoint:
    eta: float
    eta_over_Omega: float
    tau_D: float
    A_bar: float
    converged: bool
    error: Optional[str] = None


@dataclass
class SweepResult:
    """Per-coupling delay times and stationary asynchronicity values,
    ordered by the coupling axis."""

    points: list

    @property
    def axis(self) -> np.ndarray:
        return np.array([p.eta_over_Omega for p in self.points])

    @property
    def tau_D(self) -> np.ndarray:
        return np.array([p.tau_D for p in self.points])

    @property
    def A_bar(self) -> np.ndarray:
        return np.array([p.A_bar for p in self.points])

    @property
    def converged(self) -> np.ndarray:
        return np.array([p.converged for p in self.points])


def _sweep_point(args) -> SweepPoint:
    (
        params,
        eta,
        gamma0,
        t_max,
        dt,
        observable,
        include_offset,
        window_periods,
        detector_kwargs,
    ) = args
    point_params = params.replace(eta_L=eta, eta_R=eta)
    axis_value = eta / params.Omega_L
    report = validate(point_params)
    if not report.ok:
        return SweepPoint(eta, axis_value, math.nan, math.nan, False, str(report))
    try:
        traj = evolve(
            point_params,
            BareState(gamma0),
            t_max,
            dt,
            include_cavity_offset=include_offset,
        )
        series = measure_series(traj)
        window = detuning_window(traj.couplings, periods=window_periods)
        tau = math.nan
        a_bar = math.nan
        failures = []
        try:
            tau = detect_delay(series, observable, window=window, **detector_kwargs).tau_D
        except NoPlateauError as exc:
            failures.append(f"{observable}: {exc}")
        try:
            a_bar = stationary_async(series, window=window, **detector_kwargs)
        except NoPlateauError as exc:
            failures.append(f"A: {exc}")
        if failures:
            return SweepPoint(eta, axis_value, tau, a_bar, False, "; ".join(failures))
        return SweepPoint(eta, axis_value, tau, a_bar, True)
    except CavduetError as exc:
        return SweepPoint(eta, axis_value, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}")


def sweep(
    params_base: SystemParams,
    etas,
    initial: Optional[BareState] = None,
    t_max: float = 10e-6,
    dt: float = 1e-9,
    observable: str = "C2",
    jobs: int = 1,
    include_cavity_offset: bool = True,
    window_periods: float = DEFAULT_WINDOW_PERIODS,
    **detector_kwargs,
) -> SweepResult:
    """Run the evolve/measure/detect pipeline for each symmetric coupling
    ``eta_L = eta_R = eta``; points are independent and may run in
    parallel, results are ordered by the axis regardless of completion
    order.  Per-point failures are recorded, never raised.
    """
    if initial is None:
        initial = BareState.cavity_driven()
    etas = sorted(float(e) for e in etas)
    tasks = [
        (
            params_base,
            eta,
            initial.gamma,
            t_max,
            dt,
            observable,
            include_cavity_offset,
            window_periods,
            detector_kwargs,
        )
        for eta in etas
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_sweep_point, tasks))
    else:
        points = [_sweep_point(t) for t in tasks]
    return SweepResult(points=points)
