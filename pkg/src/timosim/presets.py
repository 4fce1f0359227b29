"""Named experiment presets.

``mu_zero_*`` presets share the coefficient set (rho1, rho2, rho3, b, k,
delta, tau) = (1, 3, 1, 1, 1, 1, 2), for which the stability number
vanishes identically; ``mu_nonzero_ones`` sets every coefficient to 1,
giving mu = -1.  The *_power presets use a small constant alpha so that
the certified envelope decays no faster than the simulated energy over
the fit window; the measured tail slope is reported alongside.
"""

import copy

MU_ZERO_PARAMS = {"rho1": 1.0, "rho2": 3.0, "rho3": 1.0, "b": 1.0,
                  "k": 1.0, "delta": 1.0, "beta": 1.0, "tau": 2.0}
ONES_PARAMS = {name: 1.0 for name in MU_ZERO_PARAMS}

# a handful of incommensurate modes per field keeps the dissipation rate
# from pulsing in lockstep, so ln E stays close to a straight line
_DEFAULT_IC = {
    "kind": "fourier",
    "phi0": [[1, 0.4], [3, 0.12], [4, 0.05]],
    "phi1": [[2, 0.25], [1, 0.15], [3, 0.08]],
    "psi0": [[1, 0.5], [2, 0.15], [4, 0.06]],
    "psi1": [[2, 0.3], [3, 0.1], [1, 0.1]],
    "theta0": [[1, 0.5], [2, 0.2], [3, 0.1]],
    "q0": [[1, 0.3], [2, 0.1], [4, 0.05]],
}

_DEFAULT_WEIGHTS = {"N": 60.0, "N2": 1.0, "N3": 1.0, "N4": 1.0,
                    "k2_phi_w_coeff": "rho2"}


def _base(name, params, h, alpha, T, dt=1.0 / 256.0, N=128, stride=8,
          experiment="simulate", fit=None, extra=None):
    cfg = {
        "experiment": experiment,
        "params": dict(params),
        "damping": {"alpha": dict(alpha), "h": dict(h)},
        "ic": copy.deepcopy(_DEFAULT_IC),
        "grid": {"N": N},
        "time": {"kind": "rk4", "dt": dt, "T": T, "stride": stride,
                 "cfl_guard": 0.5},
        "weights": dict(_DEFAULT_WEIGHTS),
        "outputs": {"dir": "out", "prefix": name},
        "seed": 0,
    }
    if fit:
        cfg["fit"] = dict(fit)
    if extra:
        cfg.update(copy.deepcopy(extra))
    return cfg


PRESETS = {
    "mu_zero_linear": _base(
        "mu_zero_linear", MU_ZERO_PARAMS,
        h={"kind": "linear", "c": 1.0}, alpha={"kind": "constant", "a": 1.0},
        T=40.0),
    "mu_zero_power_p1": _base(
        "mu_zero_power_p1", MU_ZERO_PARAMS,
        h={"kind": "power", "c": 1.0, "p": 1.0},
        alpha={"kind": "constant", "a": 0.05},
        T=50.0, fit={"T0": 5.0, "t_end": 40.0, "margin": 0.05}),
    "mu_zero_power_p3": _base(
        "mu_zero_power_p3", MU_ZERO_PARAMS,
        h={"kind": "power", "c": 1.0, "p": 3.0},
        alpha={"kind": "constant", "a": 0.05},
        T=110.0, fit={"T0": 5.0, "t_end": 100.0, "margin": 0.05}),
    "mu_zero_expinv": _base(
        "mu_zero_expinv", MU_ZERO_PARAMS,
        h={"kind": "exp_inv"}, alpha={"kind": "constant", "a": 1.0},
        T=40.0),
    "mu_nonzero_ones": _base(
        "mu_nonzero_ones", ONES_PARAMS,
        h={"kind": "power", "c": 1.0, "p": 1.0},
        alpha={"kind": "constant", "a": 1.0},
        T=110.0, fit={"T0": 5.0, "t_end": 100.0, "margin": 0.05,
                      "family": "mu_nonzero"}),
    "sweep_p": _base(
        "sweep_p", {**MU_ZERO_PARAMS, "beta": 0.3},
        h={"kind": "power", "c": 1.0, "p": 1.0},
        alpha={"kind": "constant", "a": 1.0},
        T=60.0, N=96, experiment="sweep",
        fit={"T0": 5.0, "t_end": 55.0, "margin": 0.05},
        extra={"sweep": {"axes": {"damping.h.p": [1.0, 3.0, 5.0]}, "workers": 0}}),
    "resolvent_default": _base(
        "resolvent_default", MU_ZERO_PARAMS,
        h={"kind": "linear", "c": 1.0}, alpha={"kind": "constant", "a": 1.0},
        T=1.0, experiment="resolvent-check",
        extra={"resolvent": {"Ns": [32, 64, 128], "samples": 300, "seed": 0}}),
}


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        from .errors import ValidationError
        raise ValidationError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])
