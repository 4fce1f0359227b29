"""Readers for the simulator's CSV/JSON output contracts."""

from __future__ import annotations

import json

import numpy as np

CSV_COLUMNS = ("t", "E", "E2", "diss_measured", "diss_predicted",
               "K", "K1", "K2", "K3", "K4")
CSV_HEADER = ",".join(CSV_COLUMNS)


class FormatError(Exception):
    """Input does not follow the documented CSV/JSON contract."""


def read_series(path: str) -> dict:
    """Parse a run CSV into column arrays; at least one data row required."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file, expected header '{CSV_HEADER}'")
    header = lines[0].split(",")
    missing = [name for name in CSV_COLUMNS if name not in header]
    if missing:
        raise FormatError(f"{path}: missing column(s) {', '.join(missing)}")
    if header != list(CSV_COLUMNS):
        raise FormatError(f"{path}: header mismatch, expected '{CSV_HEADER}'")
    if len(lines) == 1:
        raise FormatError(f"{path}: no data rows")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise FormatError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}


def read_fit(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if "envelope_samples" not in report or "family" not in report:
        raise FormatError(f"{path}: not a fit report (missing envelope_samples/family)")
    return report


def read_sweep(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            agg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if "points" not in agg:
        raise FormatError(f"{path}: not a sweep aggregate (missing points)")
    return agg
