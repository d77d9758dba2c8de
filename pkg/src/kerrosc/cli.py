"""Scenario runner: dispatches configs to the solvers and writes plot data.

Each subcommand reads one YAML scenario, runs the corresponding computation,
and writes CSV (default) or JSON artifacts whose header block echoes the
fully-resolved configuration, so runs are reproducible from their outputs
alone.  Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, emit_config, load_config
from .driven import displacement_amplitude, energy_level as driven_level
from .evolution import (
    ModelParams,
    evolved_state,
    integrate_wei_norman,
)
from .fock import TruncationError, coherent_state, default_truncation
from .integrators import StepSizeError
from .kerr_states import KerrStateParams, quadrature_variance_ratios
from .observables import autocorrelation_series, husimi_snapshot
from .oracle import OracleError, fidelity, integrate_exact
from .timemap import heisenberg_coefficients, rescaled_time, transformed_frequency

SUBCOMMANDS = ("simulate", "oracle", "variances", "autocorr", "husimi",
               "spectrum", "timemap")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _metadata(cfg: ScenarioConfig, subcommand: str, tol: float,
              trunc: int | None) -> dict:
    return {
        "generator": f"kerrosc {__version__}",
        "subcommand": subcommand,
        "tolerance": tol,
        "truncation": trunc if trunc is not None else "auto",
        "config": emit_config(cfg),
    }


def _write_table(path: Path, columns: list[str], rows: np.ndarray,
                 meta: dict, fmt: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        doc = {"meta": meta, "columns": columns,
               "rows": [[float(v) for v in row] for row in rows]}
        path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        return
    lines = []
    for key, value in meta.items():
        if key == "config":
            lines.append("# config:")
            lines.extend("#   " + ln for ln in value.rstrip("\n").split("\n"))
        else:
            lines.append(f"# {key}: {value}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(f"{float(v):.12g}" for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _model_params(cfg: ScenarioConfig) -> ModelParams:
    if cfg.k != 0.0:
        raise ConfigError(
            "model.k: time evolution is defined for k = 0 only; nonzero k "
            "enters just the frozen-time quantities (spectrum subcommand)")
    return ModelParams(omega0=cfg.omega0, chi=cfg.chi, drive=cfg.drive(),
                       alpha=cfg.alpha)


def _wei_norman_rows(cfg: ScenarioConfig, sol) -> tuple[list[str], np.ndarray]:
    params = sol.params
    eta = sol.eta
    # Model norm of the factorized state before forced normalization: the
    # identity |G|^2 exp(|eta|^2) = 1 holds up to integrator error.
    model_norm = np.exp((sol.x1 + sol.x3 * params.alpha).real
                        - 0.5 * abs(params.alpha) ** 2 + 0.5 * np.abs(eta) ** 2)
    cols = ["t", "tau", "re_x1", "im_x1", "re_x2", "im_x2", "re_x3", "im_x3",
            "re_eta", "im_eta", "norm"]
    rows = np.column_stack([
        sol.times, cfg.omega0 * sol.times,
        sol.x1.real, sol.x1.imag, sol.x2.real, sol.x2.imag,
        sol.x3.real, sol.x3.imag, eta.real, eta.imag, model_norm,
    ])
    return cols, rows


def _auto_truncation(cfg: ScenarioConfig, sol) -> int:
    if cfg.truncation is not None:
        return cfg.truncation
    peak = float(np.max(np.abs(sol.eta)))
    return default_truncation(complex(max(peak, abs(cfg.alpha)))) + 10


def run_simulate(cfg: ScenarioConfig, out: Path, tol: float,
                 trunc: int | None, fmt: str) -> list[Path]:
    params = _model_params(cfg)
    sol = integrate_wei_norman(params, cfg.t_end, tol=tol, samples=cfg.samples)
    cols, rows = _wei_norman_rows(cfg, sol)
    path = out / f"simulate.{fmt}"
    _write_table(path, cols, rows, _metadata(cfg, "simulate", tol, trunc), fmt)
    return [path]


def run_oracle(cfg: ScenarioConfig, out: Path, tol: float,
               trunc: int | None, fmt: str) -> list[Path]:
    params = _model_params(cfg)
    sol = integrate_wei_norman(params, cfg.t_end, tol=tol, samples=cfg.samples)
    n_trunc = trunc if trunc is not None else _auto_truncation(cfg, sol)
    psi0 = coherent_state(params.alpha, n_trunc)
    run = integrate_exact(params, psi0, cfg.t_end, tol=tol,
                          sample_times=sol.times)
    cols, rows = _wei_norman_rows(cfg, sol)
    fid = np.array([
        fidelity(run.state_at(i), evolved_state(params, sol, float(t), n_trunc))
        for i, t in enumerate(run.times)
    ])
    cols = cols + ["norm_drift", "fidelity"]
    rows = np.column_stack([rows, run.norm_drift, fid])
    path = out / f"oracle.{fmt}"
    _write_table(path, cols, rows, _metadata(cfg, "oracle", tol, n_trunc), fmt)
    return [path]


def run_variances(cfg: ScenarioConfig, out: Path, tol: float,
                  trunc: int | None, fmt: str) -> list[Path]:
    xis = np.linspace(cfg.variances_xi_min, cfg.variances_xi_max,
                      cfg.variances_samples)
    rows = np.empty((xis.size, 3))
    for i, xi in enumerate(xis):
        rq, rp = quadrature_variance_ratios(
            KerrStateParams(cfg.variances_beta, float(xi)))
        rows[i] = (xi, rq, rp)
    path = out / f"variances.{fmt}"
    _write_table(path, ["xi", "ratio_q", "ratio_p"], rows,
                 _metadata(cfg, "variances", tol, trunc), fmt)
    return [path]


def run_autocorr(cfg: ScenarioConfig, out: Path, tol: float,
                 trunc: int | None, fmt: str) -> list[Path]:
    params = _model_params(cfg)
    sol = integrate_wei_norman(params, cfg.t_end, tol=tol, samples=cfg.samples)
    series = autocorrelation_series(params, sol).with_revivals(
        cfg.revival_threshold)
    meta = _metadata(cfg, "autocorr", tol, trunc)
    meta["revival_times"] = "[" + ", ".join(
        f"{t:.12g}" for t in series.revival_times) + "]"
    rows = np.column_stack([
        series.times, cfg.omega0 * series.times,
        series.values.real, series.values.imag, series.abs_squared,
    ])
    path = out / f"autocorr.{fmt}"
    _write_table(path, ["t", "tau", "re_F", "im_F", "abs2_F"], rows, meta, fmt)
    return [path]


def run_husimi(cfg: ScenarioConfig, out: Path, tol: float,
               trunc: int | None, fmt: str) -> list[Path]:
    params = _model_params(cfg)
    t_max = max(tau / cfg.omega0 for tau in cfg.husimi_times)
    sol = integrate_wei_norman(params, max(t_max, 1e-12), tol=tol,
                               samples=cfg.samples)
    n_trunc = trunc if trunc is not None else _auto_truncation(cfg, sol)
    written = []
    for idx, tau in enumerate(cfg.husimi_times):
        t = tau / cfg.omega0
        grid = husimi_snapshot(params, sol, t, half_width=cfg.half_width(),
                               resolution=cfg.grid_resolution, n_trunc=n_trunc)
        xx, yy = np.meshgrid(grid.x, grid.y)
        rows = np.column_stack([xx.ravel(), yy.ravel(), grid.values.ravel()])
        meta = _metadata(cfg, "husimi", tol, n_trunc)
        meta["snapshot_tau"] = tau
        meta["snapshot_t"] = t
        path = out / f"husimi_{idx:02d}.{fmt}"
        _write_table(path, ["x", "y", "Q"], rows, meta, fmt)
        sidecar = out / f"husimi_{idx:02d}.meta.json"
        sidecar.write_text(json.dumps({
            "snapshot_tau": tau, "snapshot_t": t, "total_mass": grid.total_mass(),
            "tolerance": tol, "truncation": n_trunc,
            "config": emit_config(cfg)}, indent=1) + "\n", encoding="utf-8")
        written += [path, sidecar]
    return written


def run_spectrum(cfg: ScenarioConfig, out: Path, tol: float,
                 trunc: int | None, fmt: str) -> list[Path]:
    drive, freq = cfg.drive(), cfg.frequency()
    rows = []
    for t in cfg.spectrum_times:
        lam = displacement_amplitude(drive, freq, t)
        for n in range(cfg.spectrum_n_max + 1):
            rows.append((n, t, driven_level(n, drive, freq, t), lam))
    path = out / f"spectrum.{fmt}"
    _write_table(path, ["n", "t", "E_n", "lambda_t"], np.asarray(rows),
                 _metadata(cfg, "spectrum", tol, trunc), fmt)
    return [path]


def run_timemap(cfg: ScenarioConfig, out: Path, tol: float,
                trunc: int | None, fmt: str) -> list[Path]:
    mass, freq = cfg.mass(), cfg.frequency()
    times = np.linspace(0.0, cfg.t_end, cfg.samples)
    cols = ["t", "tau", "mass", "omega_star"]
    base = [(t, rescaled_time(mass, float(t)), mass(float(t)),
             transformed_frequency(mass, freq, float(t))) for t in times]
    rows = np.asarray(base)
    if mass.kind == "exponential" and cfg.k == 0.0:
        extra = []
        for t in times:
            qp = heisenberg_coefficients(mass.m0, cfg.omega0, mass.rate,
                                         float(t))
            extra.append([qp.c_qq, qp.c_qp, qp.c_pq, qp.c_pp,
                          qp.symplectic_determinant()])
        cols += ["c_qq", "c_qp", "c_pq", "c_pp", "det"]
        rows = np.column_stack([rows, np.asarray(extra)])
    path = out / f"timemap.{fmt}"
    _write_table(path, cols, rows, _metadata(cfg, "timemap", tol, trunc), fmt)
    return [path]


_RUNNERS = {
    "simulate": run_simulate,
    "oracle": run_oracle,
    "variances": run_variances,
    "autocorr": run_autocorr,
    "husimi": run_husimi,
    "spectrum": run_spectrum,
    "timemap": run_timemap,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrosc",
        description="Driven Kerr-oscillator scenarios: simulation and "
                    "phase-space diagnostics")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML scenario file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tol", type=float, default=None,
                       help="override the configured integrator tolerance")
        p.add_argument("--trunc", type=int, default=None,
                       help="override the configured basis truncation")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tol = args.tol if args.tol is not None else cfg.tolerance
    trunc = args.trunc if args.trunc is not None else cfg.truncation
    if tol <= 0.0:
        print("error[config]: --tol must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        written = _RUNNERS[args.subcommand](cfg, Path(args.out), tol, trunc,
                                            args.format)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, StepSizeError, OracleError) as exc:
        print(f"error[{args.subcommand}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
