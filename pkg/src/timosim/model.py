"""Physical model data for the second-sound Timoshenko system.

The simulated system on the unit interval couples transverse displacement
``phi``, cross-section rotation ``psi``, temperature difference ``theta``
and heat flux ``q``:

    rho1 phi_tt - k (phi_x + psi)_x                                  = 0
    rho2 psi_tt - b psi_xx + k (phi_x + psi) + delta theta_x
                + alpha(t) h(psi_t)                                  = 0
    rho3 theta_t + q_x + delta psi_xt                                = 0
    tau  q_t + beta q + theta_x                                      = 0

with boundary conditions phi_x = psi = q = 0 at both endpoints.  Heat
propagates as a damped wave (Cattaneo law) rather than by Fourier
diffusion, which is what "second sound" refers to.

This module holds the eight positive coefficients, the time weight
``alpha`` and frictional nonlinearity ``h`` (with its comparison function
``h0``), the Fourier/random initial-condition catalog, and the zero-mean
normalization that removes the rigid drift of ``phi`` and the conserved
mean of ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, ValidationError

H_KINDS = ("linear", "power", "exp_inv", "exp_inv_sq", "log_sq", "custom")
ALPHA_KINDS = ("constant", "reciprocal")

# Default convexity radius r per damping kind.  H(x) = sqrt(x) h0(sqrt(x))
# must be convex on (0, r^2]; the exponential members are only convex near
# zero, so their radii are small (log_sq needs ln(r^2) < -4 - 2*sqrt(6)).
_DEFAULT_R = {
    "linear": 1.0,
    "power": 1.0,
    "exp_inv": 0.5,
    "exp_inv_sq": 0.6,
    "log_sq": 0.01,
    "custom": 0.5,
}

# Default crossover threshold epsilon: h0 must be increasing up to it.
# (1/s) exp(-(ln s)^2/4) turns over at s = e^-2, so its window is small.
_DEFAULT_EPSILON = {
    "linear": 1.0,
    "power": 1.0,
    "exp_inv": 1.0,
    "exp_inv_sq": 1.0,
    "log_sq": 0.1,
    "custom": None,  # table end
}


@dataclass(frozen=True)
class PhysicalParams:
    """The eight positive coefficients of the beam/heat system."""

    rho1: float
    rho2: float
    rho3: float
    b: float
    k: float
    delta: float
    beta: float
    tau: float

    def __post_init__(self):
        bad = [name for name in ("rho1", "rho2", "rho3", "b", "k", "delta", "beta", "tau")
               if not (getattr(self, name) > 0.0 and math.isfinite(getattr(self, name)))]
        if bad:
            raise ValidationError(
                "coefficients must be finite and strictly positive: " + ", ".join(bad),
                paths=[f"params.{name}" for name in bad],
            )


def stability_number(params: PhysicalParams) -> float:
    """Parameter combination mu that selects the decay regime.

    mu = (tau - rho1/(k rho3)) (rho2/b - rho1/k) - tau delta^2 rho1 / (b k rho3)

    mu == 0 gives the strong (exponential-class) decay regime; mu != 0
    leaves only the weaker algebraic envelope.
    """
    p = params
    return (p.tau - p.rho1 / (p.k * p.rho3)) * (p.rho2 / p.b - p.rho1 / p.k) \
        - p.tau * p.delta ** 2 * p.rho1 / (p.b * p.k * p.rho3)


@dataclass(frozen=True)
class AlphaSpec:
    """Nonincreasing positive time weight of the friction term.

    kind "constant": alpha(t) = a.
    kind "reciprocal": alpha(t) = a / (1 + t).
    """

    kind: str = "constant"
    a: float = 1.0

    def __post_init__(self):
        if self.kind not in ALPHA_KINDS:
            raise ValidationError(f"unknown alpha kind {self.kind!r}", paths=["damping.alpha.kind"])
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise ValidationError("alpha amplitude a must be > 0", paths=["damping.alpha.a"])

    def __call__(self, t):
        if self.kind == "constant":
            return self.a * np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else self.a
        return self.a / (1.0 + t)

    def integral(self, t):
        """Closed form of int_0^t alpha(s) ds."""
        if self.kind == "constant":
            return self.a * t
        return self.a * np.log1p(t)


@dataclass(frozen=True)
class HSpec:
    """Frictional nonlinearity h with comparison function h0.

    The catalog members define h0 on [0, inf):

        linear      h0(s) = c s
        power       h0(s) = c s^p            (p >= 1)
        exp_inv     h0(s) = exp(-1/s)
        exp_inv_sq  h0(s) = (1/s) exp(-1/s^2)
        log_sq      h0(s) = (1/s) exp(-(ln s)^2 / 4)
        custom      h0 interpolated from a tabulated (s, h) monotone grid

    h itself equals h0 on [-epsilon, epsilon] (odd extension) and
    continues linearly with slope h0(epsilon)/epsilon beyond, so the
    linear growth bounds c1 |s| <= |h(s)| <= c2 |s| hold for |s| >=
    epsilon with c1 = c2 = h0(epsilon)/epsilon.

    ``r`` is the convexity radius used by the decay-rate calculus; it is
    small for the exponential members, whose associated profile is convex
    only near zero.  ``c = 0`` for linear/power is accepted and switches
    the friction off entirely.
    """

    kind: str = "linear"
    c: float = 1.0
    p: float = 1.0
    epsilon: float | None = None
    r: float | None = None
    table_s: tuple = ()
    table_h: tuple = ()

    def __post_init__(self):
        if self.kind not in H_KINDS:
            raise ValidationError(f"unknown damping kind {self.kind!r}", paths=["damping.h.kind"])
        if self.kind in ("linear", "power") and not (self.c >= 0.0 and math.isfinite(self.c)):
            raise ValidationError("damping constant c must be >= 0", paths=["damping.h.c"])
        if self.kind == "power" and not self.p >= 1.0:
            raise ValidationError("damping exponent p must be >= 1", paths=["damping.h.p"])
        if self.epsilon is None:
            default_eps = _DEFAULT_EPSILON[self.kind]
            if default_eps is None and self.kind == "custom" and len(self.table_s) >= 2:
                default_eps = float(self.table_s[-1])
            object.__setattr__(self, "epsilon", default_eps or 1.0)
        if not self.epsilon > 0.0:
            raise ValidationError("crossover threshold epsilon must be > 0", paths=["damping.h.epsilon"])
        if self.r is None:
            object.__setattr__(self, "r", _DEFAULT_R[self.kind])
        if not self.r > 0.0:
            raise ValidationError("convexity radius r must be > 0", paths=["damping.h.r"])
        if self.kind == "custom":
            s = np.asarray(self.table_s, dtype=float)
            h = np.asarray(self.table_h, dtype=float)
            if s.size < 2 or s.size != h.size:
                raise ValidationError("custom table needs matching s/h arrays of length >= 2",
                                      paths=["damping.h.table_s"])
            if s[0] != 0.0 or h[0] != 0.0:
                raise ValidationError("custom table must start at (0, 0)", paths=["damping.h.table_s"])
            if np.any(np.diff(s) <= 0) or np.any(np.diff(h) <= 0):
                raise ValidationError("custom table must be strictly increasing", paths=["damping.h.table_s"])
            object.__setattr__(self, "table_s", tuple(s.tolist()))
            object.__setattr__(self, "table_h", tuple(h.tolist()))

    # -- comparison function h0 on [0, inf) ---------------------------------

    def h0(self, s):
        """Evaluate h0 at s >= 0 (vectorized)."""
        s = np.asarray(s, dtype=float)
        if self.kind == "linear":
            out = self.c * s
        elif self.kind == "power":
            out = self.c * np.power(s, self.p)
        elif self.kind == "exp_inv":
            with np.errstate(divide="ignore"):
                out = np.where(s > 0.0, np.exp(-1.0 / np.where(s > 0.0, s, 1.0)), 0.0)
        elif self.kind == "exp_inv_sq":
            with np.errstate(divide="ignore"):
                safe = np.where(s > 0.0, s, 1.0)
                out = np.where(s > 0.0, np.exp(-1.0 / safe ** 2) / safe, 0.0)
        elif self.kind == "log_sq":
            with np.errstate(divide="ignore"):
                safe = np.where(s > 0.0, s, 1.0)
                out = np.where(s > 0.0, np.exp(-0.25 * np.log(safe) ** 2) / safe, 0.0)
        else:  # custom
            smax = self.table_s[-1]
            if np.any(s < 0.0) or np.any(s > smax):
                raise DomainError(f"custom damping table defined on [0, {smax}]")
            out = np.interp(s, self.table_s, self.table_h)
        return out if out.ndim else float(out)

    def h0_inv(self, y):
        """Inverse of h0 on [0, h0(s_cap)] by closed form or bisection."""
        y = float(y)
        if y == 0.0:
            return 0.0
        if y < 0.0:
            raise DomainError("h0_inv defined for y >= 0")
        if self.kind == "linear":
            return y / self.c
        if self.kind == "power":
            return (y / self.c) ** (1.0 / self.p)
        if self.kind == "exp_inv":
            if y >= 1.0:
                raise DomainError("exp_inv h0 < 1 everywhere")
            return -1.0 / math.log(y)
        # bisection on an expanding bracket
        lo, hi = 0.0, 1.0
        cap = self.table_s[-1] if self.kind == "custom" else 1e6
        while self.h0(hi) < y:
            hi *= 2.0
            if hi > cap:
                raise DomainError("h0_inv argument above the tabulated range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.h0(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    # -- the damping h on all of R ------------------------------------------

    @property
    def linear_slope(self) -> float:
        """Slope of the linear continuation beyond |s| = epsilon."""
        return float(self.h0(self.epsilon)) / self.epsilon

    @property
    def c1(self) -> float:
        return self.linear_slope

    @property
    def c2(self) -> float:
        return self.linear_slope

    def h(self, s):
        """Damping h: odd, equals h0 inside [-eps, eps], linear outside."""
        s = np.asarray(s, dtype=float)
        a = np.abs(s)
        inner = np.minimum(a, self.epsilon)
        out = np.where(a <= self.epsilon, self.h0(inner), self.linear_slope * a)
        out = np.sign(s) * out
        return out if out.ndim else float(out)

    def validate_sampled(self, n: int = 400) -> None:
        """Spot-check the structural hypotheses on a sample grid.

        Checks: h(0) = 0, s h(s) >= 0, h nondecreasing, h0 strictly
        increasing, the linear bounds beyond epsilon, and the near-zero
        sandwich between h0 and its inverse (orientation chosen by which
        of the two is smaller, since super-linear members flip it).
        """
        if self.kind in ("linear", "power") and self.c == 0.0:
            return  # friction switched off
        s = np.linspace(0.0, 2.0 * self.epsilon, n + 1)
        if self.kind == "custom":
            s = np.linspace(0.0, self.table_s[-1], n + 1)
        hv = self.h(s)
        if abs(self.h(0.0)) > 0.0:
            raise ValidationError("h(0) must be 0")
        if np.any(np.diff(hv) < -1e-12):
            raise ValidationError("h must be nondecreasing")
        if np.any(s * hv < -1e-15):
            raise ValidationError("s*h(s) must be nonnegative")
        inner_s = s[s < self.epsilon]
        if inner_s.size >= 2:
            h0v = np.asarray(self.h0(inner_s))
            diffs = np.diff(h0v)
            # exponential members underflow to exactly 0 near the origin
            flat_zero = (h0v[1:] == 0.0) & (h0v[:-1] == 0.0)
            if np.any((diffs <= 0.0) & ~flat_zero):
                raise ValidationError("h0 must be strictly increasing")
        big = s[s >= self.epsilon]
        if big.size:
            hb = np.abs(self.h(big))
            if np.any(hb < self.c1 * big - 1e-12) or np.any(hb > self.c2 * big + 1e-12):
                raise ValidationError("linear growth bounds violated beyond epsilon")
        small = s[(s > 0) & (s <= min(self.epsilon, 0.9))]
        for x in small[:: max(1, small.size // 32)]:
            lo_v = float(self.h0(x))
            try:
                hi_v = self.h0_inv(x)
            except DomainError:
                continue
            lo, hi = min(lo_v, hi_v), max(lo_v, hi_v)
            val = abs(self.h(x))
            if not (lo - 1e-12 <= val <= hi + 1e-12):
                raise ValidationError("near-zero sandwich between h0 and h0^{-1} violated")


@dataclass(frozen=True)
class DampingSpec:
    """Time weight alpha(t) and nonlinearity h(s) together."""

    alpha: AlphaSpec = field(default_factory=AlphaSpec)
    h: HSpec = field(default_factory=HSpec)

    def validate_sampled(self, t_max: float = 50.0, n: int = 200) -> None:
        ts = np.linspace(0.0, t_max, n)
        av = np.asarray(self.alpha(ts))
        if np.any(av <= 0.0):
            raise ValidationError("alpha must stay positive")
        if np.any(np.diff(av) > 1e-14):
            raise ValidationError("alpha must be nonincreasing")
        self.h.validate_sampled()


def sample_damping(spec: DampingSpec, s):
    """Pointwise damping value h(s) (odd-extended)."""
    return spec.h.h(s)


def sample_alpha(spec: DampingSpec, t):
    """Pointwise time weight alpha(t), t >= 0."""
    if np.any(np.asarray(t) < 0.0):
        raise DomainError("alpha defined for t >= 0")
    return spec.alpha(t)


# ---------------------------------------------------------------------------
# Initial conditions
# ---------------------------------------------------------------------------

_COS_FIELDS = ("phi0", "phi1", "theta0")     # cosine modes, zero mean
_SIN_FIELDS = ("psi0", "psi1", "q0")         # sine modes, vanish at endpoints


@dataclass(frozen=True)
class InitialData:
    """Initial fields, either a small Fourier catalog or seeded random data.

    Fourier kind: each field is a list of (mode, amplitude) pairs,

        phi0, phi1, theta0 :  sum_m a_m cos(m pi x)
        psi0, psi1, q0     :  sum_m a_m sin(m pi x)

    Mode 0 entries on the cosine fields are constants; they are exactly
    what :func:`normalize_initial_data` removes.  Random kind: smooth
    random Fourier coefficients with 1/m^2 decay, drawn from ``seed``, so
    data are admissible by construction (projection instead of rejection).
    """

    kind: str = "fourier"
    phi0: tuple = ((1, 0.4),)
    phi1: tuple = ()
    psi0: tuple = ((1, 0.5),)
    psi1: tuple = ()
    theta0: tuple = ((1, 0.5),)
    q0: tuple = ()
    seed: int = 0
    modes: int = 4
    amplitude: float = 0.5

    def __post_init__(self):
        if self.kind not in ("fourier", "random"):
            raise ValidationError(f"unknown initial-data kind {self.kind!r}", paths=["ic.kind"])
        for name in _COS_FIELDS + _SIN_FIELDS:
            object.__setattr__(self, name, tuple((int(m), float(a)) for m, a in getattr(self, name)))
            if self.kind == "fourier":
                for m, _ in getattr(self, name):
                    if m < 0 or (name in _SIN_FIELDS and m == 0):
                        raise ValidationError(f"invalid mode {m} in ic.{name}", paths=[f"ic.{name}"])

    def _random_modes(self):
        rng = np.random.default_rng(self.seed)
        out = {}
        for name in _COS_FIELDS + _SIN_FIELDS:
            coef = rng.standard_normal(self.modes) * self.amplitude
            coef /= np.arange(1, self.modes + 1) ** 2
            out[name] = tuple((m + 1, float(c)) for m, c in enumerate(coef))
        return out

    def modes_for(self, name: str):
        if self.kind == "fourier":
            return getattr(self, name)
        return self._random_modes()[name]

    def evaluate(self, name: str, x: np.ndarray) -> np.ndarray:
        """Sample one field on the coordinates x."""
        out = np.zeros_like(x)
        basis = np.cos if name in _COS_FIELDS else np.sin
        for m, a in self.modes_for(name):
            out += a * basis(m * np.pi * x) if m > 0 else a * np.ones_like(x)
        return out


def normalize_initial_data(data: InitialData) -> InitialData:
    """Remove the conserved constants from phi0, phi1 and theta0.

    The mean of theta and the linear-in-time drift of phi are invariants
    of the flow, so shifting them away yields an equivalent trajectory
    with zero-mean fields.  For the Fourier catalog this simply drops the
    mode-0 entries (cosine modes m >= 1 already have zero mean); random
    data are zero-mean by construction.
    """
    if data.kind != "fourier":
        return data
    stripped = {name: tuple((m, a) for m, a in getattr(data, name) if m > 0)
                for name in _COS_FIELDS}
    return replace(data, **stripped)


def subtract_mean(values: np.ndarray, dx: float) -> np.ndarray:
    """Remove the midpoint-rule mean of a cell-centered field."""
    return values - np.sum(values) * dx
