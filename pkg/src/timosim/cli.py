"""Command-line entry point: simulate / fit / sweep / resolvent-check.

All file I/O lives here.  Series go to CSV (one file per run, header
``t,E,E2,diss_measured,diss_predicted,K,K1,K2,K3,K4``, 17 significant
digits), reports and summaries to JSON with sorted keys, so identical
configs reproduce byte-identical outputs.

Exit codes: 0 success, 2 validation, 3 numeric abort, 4 I/O.
``TIMO_LOG`` in {error, warn, info, debug} sets the log level.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import itertools
import json
import logging
import os
import sys

import numpy as np

from . import config as cfgmod
from .decay import DecayProfile, fit_envelope
from .errors import (DomainError, InsufficientDataError, NumericError,
                     TimosimError, ValidationError)
from .integrate import SimReport, run
from .model import stability_number
from .presets import get_preset
from .resolvent import resolvent_report

logger = logging.getLogger("timosim")

CSV_HEADER = "t,E,E2,diss_measured,diss_predicted,K,K1,K2,K3,K4"


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "warn": logging.WARNING,
             "info": logging.INFO, "debug": logging.DEBUG}.get(
                 os.environ.get("TIMO_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_series_csv(report: SimReport, path: str) -> None:
    lines = [CSV_HEADER]
    for i in range(report.t.size):
        lines.append(",".join(format_float(report.column(name)[i])
                              for name in SimReport.COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_series_csv(path: str) -> dict:
    """Parse a run CSV; malformed rows raise with their line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError(f"{path}:1: expected header '{CSV_HEADER}'")
    cols = {name: [] for name in SimReport.COLUMNS}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(SimReport.COLUMNS):
            raise ValidationError(f"{path}:{lineno}: expected "
                                  f"{len(SimReport.COLUMNS)} fields, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        for name, val in zip(SimReport.COLUMNS, values):
            cols[name].append(val)
    return {name: np.asarray(vals) for name, vals in cols.items()}


def write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _out_paths(cfg: dict, out_dir: str | None):
    directory = out_dir or cfg["outputs"]["dir"]
    os.makedirs(directory, exist_ok=True)
    return directory, cfg["outputs"]["prefix"]


def summarize(report: SimReport, cfg: dict) -> dict:
    theta_scale = max(1.0, float(np.max(np.abs(report.mean_theta))) if report.t.size else 0.0)
    drift_theta = float(np.max(np.abs(report.mean_theta - report.mean_theta[0])))
    drift_phit = float(np.max(np.abs(report.mean_phit - report.mean_phit[0])))
    return {
        "config": cfg,
        "mu": report.mu,
        "samples": int(report.t.size),
        "E0": float(report.E[0]),
        "E_final": float(report.E[-1]),
        "monotonicity_violations": report.monotonicity_violations,
        "max_dissipation_residual": report.max_dissipation_residual,
        "mean_theta_drift": drift_theta / theta_scale,
        "mean_phit_drift": drift_phit,
        "aborted_at": report.aborted_at,
    }


def cmd_simulate(cfg: dict, out_dir: str | None = None) -> dict:
    rc = cfgmod.build_run_config(cfg)
    report = run(rc)
    if report.aborted_at is not None:
        directory, prefix = _out_paths(cfg, out_dir)
        write_json(summarize(report, cfg), os.path.join(directory, prefix + "_summary.json"))
        raise NumericError(f"run aborted on non-finite values at t={report.aborted_at:g}")
    directory, prefix = _out_paths(cfg, out_dir)
    csv_path = os.path.join(directory, prefix + ".csv")
    write_series_csv(report, csv_path)
    summary = summarize(report, cfg)
    write_json(summary, os.path.join(directory, prefix + "_summary.json"))
    logger.info("wrote %s (%d samples)", csv_path, report.t.size)
    return summary


def fit_from_series(cfg: dict, series: dict) -> dict:
    params = cfgmod.build_params(cfg)
    damping = cfgmod.build_damping(cfg)
    mu = stability_number(params)
    fit_opts = dict(cfg.get("fit", {}))
    family = fit_opts.pop("family", None)
    if family is None:
        family = "mu_zero" if abs(mu) < 1e-10 else "mu_nonzero"
    profile = DecayProfile(damping.h, eps0=fit_opts.pop("eps0", None))
    report = fit_envelope(series["t"], series["E"], family, profile, damping.alpha,
                          t0=float(fit_opts.pop("T0", 5.0)),
                          t_end=fit_opts.pop("t_end", None),
                          margin=float(fit_opts.pop("margin", 0.05)))
    report["mu"] = mu
    return report


def cmd_fit(cfg: dict, series_path: str, out_dir: str | None = None) -> dict:
    series = read_series_csv(series_path)
    report = fit_from_series(cfg, series)
    report["series"] = os.path.basename(series_path)
    directory, prefix = _out_paths(cfg, out_dir)
    write_json(report, os.path.join(directory, prefix + "_fit.json"))
    return report


def _sweep_point(args):
    """One sweep point: simulate, optionally fit; exceptions become records."""
    base_cfg, names, values, out_dir = args
    label = "_".join(f"{name.split('.')[-1]}={value:g}" if isinstance(value, float)
                     else f"{name.split('.')[-1]}={value}"
                     for name, value in zip(names, values))
    point = {name: value for name, value in zip(names, values)}
    try:
        cfg = base_cfg
        for name, value in zip(names, values):
            cfg = cfgmod.apply_override(cfg, name, value)
        cfg["outputs"]["prefix"] = base_cfg["outputs"]["prefix"] + "_" + label
        cfg = cfgmod.validate_config(cfg)
        summary = cmd_simulate(cfg, out_dir)
        record = {"point": point, "label": label, "mu": summary["mu"],
                  "csv": cfg["outputs"]["prefix"] + ".csv",
                  "summary": {k: v for k, v in summary.items() if k != "config"}}
        if "fit" in cfg:
            series = read_series_csv(os.path.join(out_dir or cfg["outputs"]["dir"],
                                                  cfg["outputs"]["prefix"] + ".csv"))
            record["fit"] = fit_from_series(cfg, series)
        return record
    except TimosimError as exc:
        return {"point": point, "label": label, "error": str(exc)}


def cmd_sweep(cfg: dict, out_dir: str | None = None) -> dict:
    if "sweep" not in cfg:
        raise ValidationError("sweep experiment needs a 'sweep' section", paths=["sweep"])
    axes = cfg["sweep"]["axes"]
    names = sorted(axes)
    directory, prefix = _out_paths(cfg, out_dir)
    jobs = [(cfg, names, values, directory)
            for values in itertools.product(*(axes[name] for name in names))]
    workers = int(cfg["sweep"].get("workers", 0)) or min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        try:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(_sweep_point, jobs))
        except (OSError, PermissionError) as exc:
            logger.warning("worker pool unavailable (%s), sweeping serially", exc)
            records = [_sweep_point(job) for job in jobs]
    else:
        records = [_sweep_point(job) for job in jobs]
    aggregate = {"config": cfg, "points": records}
    write_json(aggregate, os.path.join(directory, prefix + "_sweep.json"))
    return aggregate


def cmd_resolvent_check(cfg: dict, out_dir: str | None = None) -> dict:
    params = cfgmod.build_params(cfg)
    opts = cfg.get("resolvent", {"Ns": [32, 64, 128], "samples": 300, "seed": 0})
    report = resolvent_report(params, ns=tuple(opts["Ns"]),
                              samples=int(opts.get("samples", 300)),
                              seed=int(opts.get("seed", 0)))
    report["config"] = cfg
    directory, prefix = _out_paths(cfg, out_dir)
    write_json(report, os.path.join(directory, prefix + "_resolvent.json"))
    return report


def _resolve_config(args) -> dict:
    cfg = None
    if getattr(args, "preset", None):
        cfg = get_preset(args.preset)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                overlay = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if cfg is None:
            cfg = overlay
        else:
            cfg = _merge(cfg, overlay)
    if cfg is None:
        raise ValidationError("provide --config and/or --preset")
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfgmod.validate_config(cfg)


def _merge(base: dict, overlay: dict) -> dict:
    out = dict(base)
    for key, val in overlay.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timosim",
        description="Second-sound Timoshenko simulator and decay-rate verifier")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "fit", "sweep", "resolvent-check"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", help="named preset (overlaid by --config)")
        p.add_argument("--out-dir", help="output directory (overrides outputs.dir)")
        p.add_argument("--seed", type=int, help="override the run seed")
        if name == "fit":
            p.add_argument("--series", required=True, help="CSV produced by simulate")
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "simulate":
            cmd_simulate(cfg, args.out_dir)
        elif args.command == "fit":
            cmd_fit(cfg, args.series, args.out_dir)
        elif args.command == "sweep":
            cmd_sweep(cfg, args.out_dir)
        else:
            cmd_resolvent_check(cfg, args.out_dir)
    except (ValidationError, DomainError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
