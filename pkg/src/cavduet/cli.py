"""Command-line interface: single runs, derived-quantity reports, sweeps.

Exit codes: 0 success (possibly with plateau warnings), 1 config parse
failure, 2 parameter validation failure, 3 integration failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import detect_delay, detuning_window, stationary_async
from .backend import backend_name
from .config import RunConfig, load_config
from .dressed import solve_cluster
from .dynamics import drive_couplings, evolve, substeps_for
from .errors import (
    CavduetError,
    ConfigError,
    NoPlateauError,
    NormDriftError,
    StepTooLargeError,
)
from .measures import clamp_count, measure_series, reset_clamp_count
from .params import TWO_PI, validate

OUT_ENV_VAR = "CAVDUET_OUT"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2
EXIT_INTEGRATION = 3


def _fmt(x) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


def _ghz(x) -> float:
    return float(x) / (TWO_PI * 1e9)


def derive(cfg: RunConfig) -> dict:
    """Single construction path for everything derived from a config;
    ``describe`` prints it and ``run`` consumes the same values."""
    p = cfg.params
    cluster0 = solve_cluster(p, 0)
    cluster1 = solve_cluster(p, 1)
    couplings = drive_couplings(cluster0, cluster1, p, cfg.include_cavity_offset)
    n_out = max(1, int(round(cfg.t_max / cfg.dt)))
    rate = max(float(np.max(np.abs(couplings.zeta))), p.epsilon_D)
    n_sub = substeps_for(cfg.dt, rate, cfg.substep, cfg.substep_factor)
    return {
        "cluster0": cluster0,
        "cluster1": cluster1,
        "couplings": couplings,
        "n_out": n_out,
        "n_sub": n_sub,
    }


def _derived_summary(cfg: RunConfig, derived: dict) -> dict:
    from .params import detunings, resonant_discriminant

    det0 = detunings(cfg.params, 0)
    det1 = detunings(cfg.params, 1)
    return {
        "Delta_rad_s": float(det0.Delta),
        "delta_0_rad_s": float(det0.delta_n),
        "delta_1_rad_s": float(det1.delta_n),
        "energies_0_rad_s": [float(v) for v in derived["cluster0"].energies],
        "energies_1_rad_s": [float(v) for v in derived["cluster1"].energies],
        "zeta_rad_s": [[float(v) for v in row] for row in derived["couplings"].zeta],
        "Lambda": [[float(v) for v in row] for row in derived["couplings"].Lambda],
        "omega_offset_rad_s": float(derived["couplings"].omega_offset),
        "resonant_discriminant": float(resonant_discriminant(cfg.params)),
        "n_samples": derived["n_out"] + 1,
        "n_substeps_per_sample": derived["n_sub"],
        "total_steps": derived["n_out"] * derived["n_sub"],
    }


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\r\n")
        for row in rows:
            fh.write(",".join(row) + "\r\n")


def _trajectory_rows(traj, stride):
    for i in range(0, len(traj.times), stride):
        row = [_fmt(traj.times[i])]
        for g in traj.bare[i]:
            row.append(_fmt(g.real))
            row.append(_fmt(g.imag))
        yield row


def _measures_rows(ms, stride):
    for i in range(0, len(ms.times), stride):
        yield [
            _fmt(ms.times[i]),
            _fmt(ms.C2[i]),
            _fmt(ms.C3_literal[i]),
            _fmt(ms.C3_residual[i]),
            _fmt(ms.A[i]),
        ]


def run_single(cfg: RunConfig, outdir: str) -> tuple:
    """Evolve, measure, detect, and write the three output files.

    Returns (summary dict, warnings list).  Raises the integration errors;
    the caller maps them to exit codes.
    """
    reset_clamp_count()
    derived = derive(cfg)
    traj = evolve(
        cfg.params,
        cfg.initial,
        cfg.t_max,
        cfg.dt,
        include_cavity_offset=cfg.include_cavity_offset,
        substep=cfg.substep,
        step_factor=cfg.substep_factor,
    )
    ms = measure_series(traj)

    window = cfg.window
    if window is None:
        window = detuning_window(traj.couplings, periods=cfg.window_periods)
    det_kwargs = {"window": window, "band_frac": cfg.band_frac, "tail_frac": cfg.tail_frac}

    warnings = []
    results = {}
    for name in ("C2", cfg.c3_measure, "A"):
        try:
            res = detect_delay(ms, name, **det_kwargs)
            results[f"tau_D_{name}"] = float(res.tau_D)
            results[f"saturated_{name}"] = float(res.saturated_value)
        except NoPlateauError as exc:
            results[f"tau_D_{name}"] = None
            results[f"saturated_{name}"] = None
            warnings.append(f"no plateau for {name}: {exc}")
    try:
        results["A_bar"] = float(stationary_async(ms, **det_kwargs))
    except NoPlateauError as exc:
        results["A_bar"] = None
        if not any(w.startswith("no plateau for A") for w in warnings):
            warnings.append(f"no plateau for A: {exc}")
    results["clamp_count"] = clamp_count()
    results["warnings"] = warnings

    os.makedirs(outdir, exist_ok=True)
    _write_csv(
        os.path.join(outdir, "trajectory.csv"),
        "t,re_gL0,im_gL0,re_gC0,im_gC0,re_gR0,im_gR0,"
        "re_gL1,im_gL1,re_gC1,im_gC1,re_gR1,im_gR1",
        _trajectory_rows(traj, cfg.stride),
    )
    _write_csv(
        os.path.join(outdir, "measures.csv"),
        "t,C2,C3_literal,C3_residual,A",
        _measures_rows(ms, cfg.stride),
    )
    summary = {
        "version": __version__,
        "backend": backend_name(),
        "config": cfg.echo,
        "derived": _derived_summary(cfg, derived),
        "results": results,
    }
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return summary, warnings


def _resolve_outdir(arg_out, config_path: str) -> str:
    if arg_out:
        return arg_out
    env = os.environ.get(OUT_ENV_VAR, "").strip()
    if env:
        return env
    stem = os.path.splitext(os.path.basename(config_path))[0]
    return stem + ".out"


def _load_checked(path: str):
    """Parse the config and validate parameters; returns (cfg, exit_code)."""
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return None, EXIT_CONFIG
    report = validate(cfg.params)
    if not report.ok:
        print("parameter validation failed:", file=sys.stderr)
        print(str(report), file=sys.stderr)
        return None, EXIT_VALIDATION
    return cfg, EXIT_OK


def cmd_describe(args) -> int:
    cfg, code = _load_checked(args.config)
    if cfg is None:
        return code
    try:
        derived = derive(cfg)
    except CavduetError as exc:
        print(f"cannot derive dressed quantities: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    d = _derived_summary(cfg, derived)
    print(f"cavduet {__version__} (backend: {backend_name()})")
    print(f"Delta/2pi   = {_ghz(d['Delta_rad_s'])} GHz")
    print(f"delta_0/2pi = {_ghz(d['delta_0_rad_s'])} GHz")
    print(f"delta_1/2pi = {_ghz(d['delta_1_rad_s'])} GHz")
    for n in (0, 1):
        es = ", ".join(f"{_ghz(e):.9g}" for e in d[f"energies_{n}_rad_s"])
        print(f"dressed energies n={n} (E/2pi GHz, k=1..3): {es}")
    print("zeta/2pi (MHz), rows k (n=1), cols j (n=0):")
    for row in d["zeta_rad_s"]:
        print("  " + "  ".join(f"{v / (TWO_PI * 1e6):12.4f}" for v in row))
    print("Lambda (weighted overlaps), rows j (n=0), cols k (n=1):")
    for row in d["Lambda"]:
        print("  " + "  ".join(f"{v:12.6f}" for v in row))
    disc = d["resonant_discriminant"]
    print(f"resonance-limit discriminant: {disc:.6g} ({'negative' if disc < 0 else 'non-negative'})")
    print(f"estimated steps: {d['n_samples'] - 1} samples x {d['n_substeps_per_sample']} substeps = {d['total_steps']}")
    return EXIT_OK


def _finish_run(cfg, outdir) -> int:
    try:
        summary, warnings = run_single(cfg, outdir)
    except (StepTooLargeError, NormDriftError) as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except CavduetError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for w in warnings:
        print(f"warning: {w}")
    print(f"wrote {outdir}/trajectory.csv, measures.csv, summary.json")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg, code = _load_checked(args.config)
    if cfg is None:
        return code
    return _finish_run(cfg, _resolve_outdir(args.out, args.config))


def _sweep_worker(task):
    cfg, eta, outdir = task
    point_params = cfg.params.replace(eta_L=eta, eta_R=eta)
    point_cfg = replace(cfg, params=point_params, sweep=None)
    try:
        summary, warnings = run_single(point_cfg, outdir)
        return summary, warnings, None
    except CavduetError as exc:
        return None, [], f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    cfg, code = _load_checked(args.config)
    if cfg is None:
        return code
    if cfg.sweep is None:
        print("config error: sweep command needs a [sweep] section", file=sys.stderr)
        return EXIT_CONFIG
    outdir = _resolve_outdir(args.out, args.config)
    os.makedirs(outdir, exist_ok=True)
    jobs = args.jobs if args.jobs else cfg.sweep.jobs
    axis = cfg.sweep.axis()
    etas = axis * cfg.params.Omega_L
    tasks = [
        (cfg, float(eta), os.path.join(outdir, f"point_{i:03d}"))
        for i, eta in enumerate(etas)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_worker, tasks))
    else:
        outcomes = [_sweep_worker(t) for t in tasks]

    observable = cfg.sweep.observable
    tau_key = f"tau_D_{cfg.c3_measure if observable == 'C3' else observable}"
    rows = []
    for ratio, (summary, warnings, error) in zip(axis, outcomes):
        if summary is None:
            print(f"warning: point eta/Omega_L={ratio:.6g} failed: {error}")
            rows.append([_fmt(ratio), _fmt(math.nan), _fmt(math.nan), "false"])
            continue
        for w in warnings:
            print(f"warning: eta/Omega_L={ratio:.6g}: {w}")
        res = summary["results"]
        tau = res.get(tau_key)
        a_bar = res.get("A_bar")
        converged = tau is not None and a_bar is not None
        rows.append(
            [
                _fmt(ratio),
                _fmt(tau if tau is not None else math.nan),
                _fmt(a_bar if a_bar is not None else math.nan),
                "true" if converged else "false",
            ]
        )
    _write_csv(os.path.join(outdir, "sweep.csv"), "eta_over_Omega,tau_D,A_bar,converged", rows)
    print(f"wrote {outdir}/sweep.csv ({len(rows)} points)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cavduet",
        description="Dressed two-qubit/cavity dynamics, concurrence and asynchronicity",
    )
    parser.add_argument("--version", action="version", version=f"cavduet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve one configuration and write CSV/JSON outputs")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help=f"output directory (default: $" + OUT_ENV_VAR + " or <config>.out)")
    p_run.set_defaults(func=cmd_run)

    p_desc = sub.add_parser("describe", help="print derived quantities without integrating")
    p_desc.add_argument("config")
    p_desc.set_defaults(func=cmd_describe)

    p_sweep = sub.add_parser("sweep", help="run the [sweep] block of a configuration")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--jobs", type=int, default=0, help="parallel workers (default: config value)")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
