"""Experiment configuration: JSON schema validation and typed assembly.

The document layout (all sections except the optional ones required):

    {
      "experiment": "simulate" | "decay-envelope" | "fit" | "sweep"
                  | "resolvent-check",
      "params":  {"rho1": .., "rho2": .., "rho3": .., "b": .., "k": ..,
                  "delta": .., "beta": .., "tau": ..},
      "damping": {"alpha": {"kind": "constant"|"reciprocal", "a": ..},
                  "h": {"kind": ..., "c": .., "p": .., "epsilon": ..,
                        "r": .., "table_s": [...], "table_h": [...]}},
      "ic":      {"kind": "fourier", "phi0": [[m, amp], ...], ...}
               | {"kind": "random", "modes": .., "amplitude": .., "seed": ..},
      "grid":    {"N": 128},
      "time":    {"kind": "rk4"|"imex_midpoint", "dt": .., "T": ..,
                  "stride": .., "cfl_guard": ..},
      "weights": {"N": .., "N2": .., "N3": .., "N4": ..,
                  "k2_phi_w_coeff": "rho2"|"rho1"},
      "outputs": {"dir": .., "prefix": ..},
      "fit":     {"T0": .., "t_end": .., "margin": .., "family": ..,
                  "eps0": ..},                                  (optional)
      "sweep":   {"axes": {"dotted.key": [...], ...}, "workers": ..},
                                                                (optional)
      "resolvent": {"Ns": [...], "samples": .., "seed": ..},    (optional)
      "seed":    0
    }

Unknown keys anywhere are rejected; every nested invariant is checked
before any computation starts, with errors naming the offending dotted
key (e.g. ``params.rho1``).
"""

from __future__ import annotations

import copy
import json

from .diagnostics import LyapunovWeights
from .discretization import Grid
from .errors import ValidationError
from .integrate import RunConfig, TimeScheme
from .model import AlphaSpec, DampingSpec, HSpec, InitialData, PhysicalParams

EXPERIMENTS = ("simulate", "decay-envelope", "fit", "sweep", "resolvent-check")

_IC_FIELDS = ("phi0", "phi1", "psi0", "psi1", "theta0", "q0")

_ALLOWED = {
    "": {"experiment", "params", "damping", "ic", "grid", "time", "weights",
         "outputs", "fit", "sweep", "resolvent", "seed"},
    "params": {"rho1", "rho2", "rho3", "b", "k", "delta", "beta", "tau"},
    "damping": {"alpha", "h"},
    "damping.alpha": {"kind", "a"},
    "damping.h": {"kind", "c", "p", "epsilon", "r", "table_s", "table_h"},
    "ic": {"kind", "modes", "amplitude", "seed", *_IC_FIELDS},
    "grid": {"N"},
    "time": {"kind", "dt", "T", "stride", "cfl_guard"},
    "weights": {"N", "N2", "N3", "N4", "k2_phi_w_coeff"},
    "outputs": {"dir", "prefix"},
    "fit": {"T0", "t_end", "margin", "family", "eps0"},
    "sweep": {"axes", "workers"},
    "resolvent": {"Ns", "samples", "seed"},
}

_DEFAULTS = {
    "experiment": "simulate",
    "grid": {"N": 128},
    "time": {"kind": "rk4", "dt": 1.0 / 256.0, "T": 10.0, "stride": 8,
             "cfl_guard": 0.5},
    "weights": {"N": 60.0, "N2": 1.0, "N3": 1.0, "N4": 1.0,
                "k2_phi_w_coeff": "rho2"},
    "outputs": {"dir": "out", "prefix": "run"},
    "seed": 0,
}


def _reject_unknown(section: dict, path: str, unknown: list) -> None:
    allowed = _ALLOWED.get(path, None)
    if allowed is None:
        return
    for key in section:
        if key not in allowed:
            unknown.append(f"{path}.{key}" if path else key)


def validate_config(raw: dict) -> dict:
    """Return the resolved config (defaults filled in) or raise with key paths."""
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    unknown: list[str] = []
    _reject_unknown(raw, "", unknown)
    for path in ("params", "damping", "grid", "time", "weights", "outputs",
                 "ic", "fit", "sweep", "resolvent"):
        section = raw.get(path)
        if isinstance(section, dict):
            _reject_unknown(section, path, unknown)
    for path in ("damping.alpha", "damping.h"):
        outer, inner = path.split(".")
        section = raw.get(outer, {})
        if isinstance(section, dict) and isinstance(section.get(inner), dict):
            _reject_unknown(section[inner], path, unknown)
    if unknown:
        raise ValidationError("unknown config keys: " + ", ".join(sorted(unknown)),
                              paths=sorted(unknown))

    cfg = copy.deepcopy(raw)
    for key, val in _DEFAULTS.items():
        if key not in cfg:
            cfg[key] = copy.deepcopy(val)
        elif isinstance(val, dict):
            for sub, subval in val.items():
                cfg[key].setdefault(sub, subval)
    if cfg["experiment"] not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {cfg['experiment']!r}",
                              paths=["experiment"])
    for required in ("params", "damping", "ic"):
        if required not in cfg:
            raise ValidationError(f"missing config section {required!r}", paths=[required])

    # constructing the typed objects performs the invariant checks
    build_params(cfg)
    build_damping(cfg)
    build_initial_data(cfg)
    build_grid(cfg)
    build_scheme(cfg)
    build_weights(cfg)
    t_final = cfg["time"]["T"]
    if not (isinstance(t_final, (int, float)) and t_final >= 0.0):
        raise ValidationError("time.T must be >= 0", paths=["time.T"])
    if not (isinstance(cfg["time"]["stride"], int) and cfg["time"]["stride"] >= 1):
        raise ValidationError("time.stride must be an integer >= 1", paths=["time.stride"])
    if "sweep" in cfg:
        axes = cfg["sweep"].get("axes", {})
        if not isinstance(axes, dict) or not axes:
            raise ValidationError("sweep.axes must be a non-empty object", paths=["sweep.axes"])
        for key, values in axes.items():
            if not isinstance(values, list) or not values:
                raise ValidationError(f"sweep axis {key!r} must be a non-empty list",
                                      paths=[f"sweep.axes.{key}"])
    if "fit" in cfg:
        fam = cfg["fit"].get("family")
        if fam is not None and fam not in ("mu_zero", "mu_nonzero"):
            raise ValidationError("fit.family must be 'mu_zero' or 'mu_nonzero'",
                                  paths=["fit.family"])
    if "resolvent" in cfg:
        ns = cfg["resolvent"].get("Ns", [32, 64, 128])
        if not isinstance(ns, list) or not all(isinstance(n, int) and n >= 8 for n in ns):
            raise ValidationError("resolvent.Ns must be a list of integers >= 8",
                                  paths=["resolvent.Ns"])
        cfg["resolvent"]["Ns"] = ns
        cfg["resolvent"].setdefault("samples", 300)
        cfg["resolvent"].setdefault("seed", 0)
    return cfg


def build_params(cfg: dict) -> PhysicalParams:
    sec = cfg["params"]
    missing = [k for k in _ALLOWED["params"] if k not in sec]
    if missing:
        raise ValidationError("missing coefficients: " + ", ".join(sorted(missing)),
                              paths=[f"params.{k}" for k in sorted(missing)])
    return PhysicalParams(**{k: float(sec[k]) for k in _ALLOWED["params"]})


def build_damping(cfg: dict) -> DampingSpec:
    sec = cfg["damping"]
    alpha = AlphaSpec(**sec.get("alpha", {"kind": "constant", "a": 1.0}))
    h_raw = dict(sec.get("h", {"kind": "linear", "c": 1.0}))
    for key in ("table_s", "table_h"):
        if key in h_raw:
            h_raw[key] = tuple(h_raw[key])
    h = HSpec(**h_raw)
    spec = DampingSpec(alpha=alpha, h=h)
    spec.validate_sampled()
    return spec


def build_initial_data(cfg: dict) -> InitialData:
    sec = dict(cfg["ic"])
    kind = sec.get("kind", "fourier")
    if kind == "fourier":
        fields = {name: tuple((int(m), float(a)) for m, a in sec.get(name, []))
                  for name in _IC_FIELDS}
        return InitialData(kind="fourier", **fields)
    return InitialData(kind="random", seed=int(sec.get("seed", cfg.get("seed", 0))),
                       modes=int(sec.get("modes", 4)),
                       amplitude=float(sec.get("amplitude", 0.5)))


def build_grid(cfg: dict) -> Grid:
    n = cfg["grid"]["N"]
    if not isinstance(n, int):
        raise ValidationError("grid.N must be an integer", paths=["grid.N"])
    return Grid(n)


def build_scheme(cfg: dict) -> TimeScheme:
    t = cfg["time"]
    return TimeScheme(kind=t["kind"], dt=float(t["dt"]),
                      cfl_guard=float(t.get("cfl_guard", 0.5)))


def build_weights(cfg: dict) -> LyapunovWeights:
    w = cfg["weights"]
    return LyapunovWeights(N=float(w["N"]), N2=float(w["N2"]), N3=float(w["N3"]),
                           N4=float(w["N4"]),
                           k2_phi_w_coeff=w.get("k2_phi_w_coeff", "rho2"))


def build_run_config(cfg: dict) -> RunConfig:
    return RunConfig(
        params=build_params(cfg),
        damping=build_damping(cfg),
        initial=build_initial_data(cfg),
        grid=build_grid(cfg),
        scheme=build_scheme(cfg),
        t_final=float(cfg["time"]["T"]),
        sample_stride=int(cfg["time"]["stride"]),
        weights=build_weights(cfg),
        seed=int(cfg.get("seed", 0)),
    )


def load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(raw)


def apply_override(cfg: dict, dotted: str, value) -> dict:
    """Return a copy of cfg with one dotted key replaced (sweep axes)."""
    out = copy.deepcopy(cfg)
    node = out
    parts = dotted.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ValidationError(f"sweep axis {dotted!r} does not address a config key",
                                  paths=[f"sweep.axes.{dotted}"])
        node = node[part]
    if parts[-1] not in node:
        raise ValidationError(f"sweep axis {dotted!r} does not address a config key",
                              paths=[f"sweep.axes.{dotted}"])
    node[parts[-1]] = value
    return out
