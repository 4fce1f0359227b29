"""Render one figure per job; pure function of its input files.

Every kind returns the arrays it drew so callers (and tests) can verify
the plotted content without parsing the image back.  Figures carry no
timestamps and use a fixed size, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FormatError, read_fit, read_series, read_sweep

KINDS = ("energy_semilog", "energy_vs_envelope", "residual",
         "lyapunov_ratio", "sweep_rates")

FIGSIZE = (7.0, 4.5)


@dataclass(frozen=True)
class PlotJob:
    kind: str
    series: str | None = None
    fit: str | None = None
    out: str = "figure.png"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormatError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if self.kind == "sweep_rates":
            if not self.fit:
                raise FormatError("sweep_rates needs --fit pointing at the sweep aggregate JSON")
        elif not self.series:
            raise FormatError(f"{self.kind} needs --series pointing at a run CSV")
        if self.kind == "energy_vs_envelope" and not self.fit:
            raise FormatError("energy_vs_envelope needs --fit pointing at a fit report")


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=110)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _save(fig, path):
    ext = os.path.splitext(path)[1].lower()
    if ext not in (".png", ".svg"):
        raise FormatError(f"output must be .png or .svg, got {path!r}")
    fig.savefig(path, metadata={"Date": None} if ext == ".svg" else None)
    plt.close(fig)


def render(job: PlotJob) -> dict:
    """Write the figure and return the arrays that were drawn."""
    if job.kind == "energy_semilog":
        s = read_series(job.series)
        fig, ax = _new_axes("Energy decay", "t", "E(t)")
        ax.semilogy(s["t"], s["E"], lw=1.2, color="tab:blue")
        _save(fig, job.out)
        return {"t": s["t"], "E": s["E"]}

    if job.kind == "energy_vs_envelope":
        s = read_series(job.series)
        fit = read_fit(job.fit)
        env = np.asarray(fit["envelope_samples"], dtype=float)
        if env.size == 0:
            raise FormatError(f"{job.fit}: empty envelope_samples")
        t_env, e_env = env[:, 0], env[:, 1]
        mask = (s["t"] >= t_env[0]) & (s["t"] <= t_env[-1])
        e_on_window = s["E"][mask]
        env_on_window = np.interp(s["t"][mask], t_env, e_env)
        dominated = bool(np.all(e_on_window <= env_on_window * (1.0 + 1e-9)))
        ratio = fit.get("domination_ratio", float(np.max(e_on_window / env_on_window)))
        fig, ax = _new_axes("Energy vs certified envelope", "t", "E(t)")
        ax.semilogy(s["t"], s["E"], lw=1.2, color="tab:blue", label="E(t)")
        ax.semilogy(t_env, e_env, lw=1.4, ls="--", color="tab:red",
                    label=f"envelope ({fit['family']})")
        ax.annotate(f"domination ratio = {ratio:.4f}",
                    xy=(0.02, 0.04), xycoords="axes fraction")
        ax.legend()
        _save(fig, job.out)
        return {"t": s["t"][mask], "E": e_on_window, "envelope": env_on_window,
                "dominated": dominated, "ratio": ratio}

    if job.kind == "residual":
        s = read_series(job.series)
        res = np.abs(s["diss_measured"] - s["diss_predicted"])
        fig, ax = _new_axes("Dissipation-identity residual", "t",
                            "|dE/dt - predicted|")
        interior = slice(1, -1) if s["t"].size > 2 else slice(None)
        ax.semilogy(s["t"][interior], np.maximum(res[interior], 1e-300),
                    lw=1.0, color="tab:purple")
        _save(fig, job.out)
        return {"t": s["t"][interior], "residual": res[interior]}

    if job.kind == "lyapunov_ratio":
        s = read_series(job.series)
        good = s["E"] > 0.0
        ratio = s["K"][good] / s["E"][good]
        fig, ax = _new_axes("Lyapunov equivalence band", "t", "K(t) / E(t)")
        ax.plot(s["t"][good], ratio, lw=1.2, color="tab:green")
        ax.axhline(float(np.min(ratio)), ls=":", color="gray")
        ax.axhline(float(np.max(ratio)), ls=":", color="gray")
        _save(fig, job.out)
        return {"t": s["t"][good], "ratio": ratio}

    # sweep_rates
    agg = read_sweep(job.fit)
    points, slopes = [], []
    for pt in agg["points"]:
        if "error" in pt or "fit" not in pt:
            continue
        label = next(iter(pt["point"].values())) if pt["point"] else pt.get("label", "?")
        points.append(float(label))
        slopes.append(float(pt["fit"]["tail_slope"]))
    if not points:
        raise FormatError(f"{job.fit}: no successful sweep points with fits")
    order = np.argsort(points)
    points = np.asarray(points)[order]
    slopes = np.asarray(slopes)[order]
    fig, ax = _new_axes("Tail decay rate across the sweep", "swept value",
                        "semilog tail slope")
    ax.plot(points, slopes, "o-", color="tab:orange")
    _save(fig, job.out)
    return {"points": points, "slopes": slopes}
