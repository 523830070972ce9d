"""Run-configuration parsing.

Configs are flat INI-style key=value files with sections; the full
grammar lives in docs/config_format.md.  Frequencies are given as plain
(omega/2pi) values with a unit (GHz/MHz/kHz/Hz) and converted to angular
rad/s once, here.  Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import BareState
from .errors import ConfigError
from .params import SystemParams

FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12}

PARAM_KEYS = ("omega_c", "omega_l", "omega_r", "eta_l", "eta_r", "epsilon_d", "omega_d")

_SECTION_KEYS = {
    "params": set(PARAM_KEYS),
    "initial": {"preset", "gl0", "gc0", "gr0", "gl1", "gc1", "gr1"},
    "time": {"t_max", "dt", "stride", "substep_factor", "substep"},
    "measures": {"c3_variant", "band_frac", "window", "window_periods", "tail_frac"},
    "flags": {"include_cavity_offset"},
    "sweep": {"variable", "start", "stop", "points", "scale", "observable", "jobs"},
}

PRESETS = {
    "paper-default": BareState.cavity_driven,
    "paper-alt": BareState.cavity_driven_alt,
}

_AMP_KEYS = ("gl0", "gc0", "gr0", "gl1", "gc1", "gr1")


def _parse_with_unit(text: str, units: dict, what: str) -> float:
    parts = text.split()
    if len(parts) != 2:
        raise ConfigError(f"{what}: expected '<value> <unit>', got {text!r}")
    try:
        value = float(parts[0])
    except ValueError:
        raise ConfigError(f"{what}: bad number {parts[0]!r}") from None
    unit = parts[1].lower()
    if unit not in units:
        raise ConfigError(f"{what}: unknown unit {parts[1]!r} (use one of {sorted(units)})")
    return value * units[unit]


def parse_frequency(text: str, what: str = "frequency") -> float:
    """'5.32 GHz' -> angular frequency in rad/s."""
    return 2.0 * math.pi * _parse_with_unit(text, FREQ_UNITS, what)


def parse_time(text: str, what: str = "time") -> float:
    """'10 us' -> seconds."""
    return _parse_with_unit(text, TIME_UNITS, what)


@dataclass
class SweepConfig:
    start: float
    stop: float
    points: int
    scale: str = "log"
    observable: str = "C2"
    jobs: int = 1

    def axis(self) -> np.ndarray:
        """Dimensionless eta/Omega_L axis values."""
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class RunConfig:
    params: SystemParams
    initial: BareState
    initial_name: str
    t_max: float
    dt: float
    stride: int = 1
    substep_factor: float = 0.05
    substep: Optional[float] = None
    c3_variant: str = "residual"
    band_frac: float = 0.05
    window: Optional[float] = None  # seconds; None = auto from drive detunings
    window_periods: float = 3.0
    tail_frac: float = 0.25
    include_cavity_offset: bool = True
    sweep: Optional[SweepConfig] = None
    echo: dict = field(default_factory=dict)

    @property
    def c3_measure(self) -> str:
        return "C3_residual" if self.c3_variant == "residual" else "C3_literal"


def _get_bool(text: str, what: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{what}: expected a boolean, got {text!r}")


def _parse_initial(section) -> tuple:
    keys = set(section.keys())
    if "preset" in keys:
        if keys != {"preset"}:
            raise ConfigError("[initial] uses either 'preset' or explicit amplitudes, not both")
        name = section["preset"].strip()
        if name not in PRESETS:
            raise ConfigError(f"unknown initial-state preset {name!r} (have {sorted(PRESETS)})")
        return PRESETS[name](), name
    missing = [k for k in _AMP_KEYS if k not in keys]
    if missing:
        raise ConfigError(f"[initial] missing amplitude keys: {missing}")
    gamma = []
    for k in _AMP_KEYS:
        parts = section[k].split()
        if len(parts) != 2:
            raise ConfigError(f"[initial] {k}: expected '<re> <im>', got {section[k]!r}")
        try:
            gamma.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"[initial] {k}: bad number in {section[k]!r}") from None
    gamma = np.array(gamma)
    norm = float(np.sum(np.abs(gamma) ** 2))
    if abs(norm - 1.0) > 1e-6:
        raise ConfigError(f"[initial] amplitudes not normalized: |gamma|^2 = {norm!r}")
    return BareState(gamma / math.sqrt(norm)), "custom"


def load_config(path: str) -> RunConfig:
    """Parse and fully check a run configuration file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), strict=True)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path!r}: {exc}") from None

    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(cp[section].keys()) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")

    for required in ("params", "time"):
        if required not in cp:
            raise ConfigError(f"missing required section [{required}]")

    sec = cp["params"]
    missing = [k for k in PARAM_KEYS if k not in sec]
    if missing:
        raise ConfigError(f"[params] missing keys: {missing}")
    ang = {k: parse_frequency(sec[k], f"[params] {k}") for k in PARAM_KEYS}
    params = SystemParams(
        omega_c=ang["omega_c"],
        Omega_L=ang["omega_l"],
        Omega_R=ang["omega_r"],
        eta_L=ang["eta_l"],
        eta_R=ang["eta_r"],
        epsilon_D=ang["epsilon_d"],
        omega_D=ang["omega_d"],
    )

    tsec = cp["time"]
    for k in ("t_max", "dt"):
        if k not in tsec:
            raise ConfigError(f"[time] missing key {k}")
    t_max = parse_time(tsec["t_max"], "[time] t_max")
    dt = parse_time(tsec["dt"], "[time] dt")
    stride = int(tsec.get("stride", "1"))
    if stride < 1:
        raise ConfigError("[time] stride must be >= 1")
    substep_factor = float(tsec.get("substep_factor", "0.05"))
    substep = parse_time(tsec["substep"], "[time] substep") if "substep" in tsec else None

    if "initial" in cp:
        initial, initial_name = _parse_initial(cp["initial"])
    else:
        initial, initial_name = BareState.cavity_driven(), "paper-default"

    c3_variant = "residual"
    band_frac = 0.05
    window = None
    window_periods = 3.0
    tail_frac = 0.25
    if "measures" in cp:
        msec = cp["measures"]
        c3_variant = msec.get("c3_variant", "residual").strip().lower()
        if c3_variant not in ("residual", "literal"):
            raise ConfigError(f"[measures] c3_variant must be residual|literal, got {c3_variant!r}")
        band_frac = float(msec.get("band_frac", "0.05"))
        window_periods = float(msec.get("window_periods", "3"))
        tail_frac = float(msec.get("tail_frac", "0.25"))
        wtext = msec.get("window", "auto").strip()
        window = None if wtext.lower() == "auto" else parse_time(wtext, "[measures] window")

    include_offset = True
    if "flags" in cp and "include_cavity_offset" in cp["flags"]:
        include_offset = _get_bool(cp["flags"]["include_cavity_offset"], "[flags] include_cavity_offset")

    sweep_cfg = None
    if "sweep" in cp:
        ssec = cp["sweep"]
        variable = ssec.get("variable", "eta").strip().lower()
        if variable != "eta":
            raise ConfigError(f"[sweep] only 'eta' sweeps are supported, got {variable!r}")
        for k in ("start", "stop", "points"):
            if k not in ssec:
                raise ConfigError(f"[sweep] missing key {k}")
        scale = ssec.get("scale", "log").strip().lower()
        if scale not in ("log", "linear"):
            raise ConfigError(f"[sweep] scale must be log|linear, got {scale!r}")
        observable = ssec.get("observable", "C2").strip()
        if observable not in ("C2", "C3", "A"):
            raise ConfigError(f"[sweep] observable must be C2|C3|A, got {observable!r}")
        sweep_cfg = SweepConfig(
            start=float(ssec["start"]),
            stop=float(ssec["stop"]),
            points=int(ssec["points"]),
            scale=scale,
            observable=observable,
            jobs=int(ssec.get("jobs", "1")),
        )
        if sweep_cfg.points < 1 or sweep_cfg.start <= 0 or sweep_cfg.stop < sweep_cfg.start:
            raise ConfigError("[sweep] needs 0 < start <= stop and points >= 1")

    echo = {s: dict(cp[s]) for s in cp.sections()}
    return RunConfig(
        params=params,
        initial=initial,
        initial_name=initial_name,
        t_max=t_max,
        dt=dt,
        stride=stride,
        substep_factor=substep_factor,
        substep=substep,
        c3_variant=c3_variant,
        band_frac=band_frac,
        window=window,
        window_periods=window_periods,
        tail_frac=tail_frac,
        include_cavity_offset=include_offset,
        sweep=sweep_cfg,
        echo=echo,
    )
