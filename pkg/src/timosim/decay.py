"""Decay-rate calculus: the profile H and the two decay envelopes.

From the comparison function h0 of the damping, define on [0, r^2]

    H(x)  = sqrt(x) h0(sqrt(x))          (convex near zero)
    H2(t) = t H'(eps0 t)                 on (0, 1]
    H1(t) = int_t^1 ds / H2(s)           strictly decreasing, H1(1) = 0

together with the convex conjugate H*(s) = s (H')^{-1}(s) - H((H')^{-1}(s)).
The two certified energy envelopes are

    strong regime  (mu = 0):   E(t) <= k3 H1^{-1}(k1 int_0^t alpha + k2)
    weak regime    (mu != 0):  E(t) <= E(0) H2^{-1}(c / t)

The definitions above are ground truth; closed forms for the power
catalog are derived from them directly (worked intermediate shortcuts
floating around for the power case drop the leading factor of t in H2
and are not used).  Quadrature and bisection serve as the general route
and as an independent cross-check of every closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, InsufficientDataError, ValidationError
from .model import AlphaSpec, HSpec

_T_MIN = 1e-12          # smallest resolvable argument for H1^{-1}
_OVERFLOW = 1e300


@dataclass(frozen=True)
class InvResult:
    value: float
    saturated: bool = False


@dataclass(frozen=True)
class DecayProfile:
    """Realized rate object for one damping catalog member."""

    h: HSpec
    eps0: float | None = None

    def __post_init__(self):
        if self.eps0 is None:
            object.__setattr__(self, "eps0", 0.5 * self.h.r ** 2)
        if not (0.0 < self.eps0 <= self.h.r ** 2):
            raise ValidationError("eps0 must lie in (0, r^2]", paths=["fit.eps0"])

    @property
    def r(self) -> float:
        return self.h.r

    @property
    def closed_form(self) -> bool:
        return self.h.kind in ("linear", "power")

    def _cp(self):
        """(c, p) of the power representation h0(s) = c s^p."""
        if self.h.kind == "linear":
            return self.h.c, 1.0
        return self.h.c, self.h.p

    # -- H and its derivative -------------------------------------------------

    def H(self, x: float) -> float:
        x = float(x)
        if x < 0.0 or x > self.r ** 2 * (1.0 + 1e-12):
            raise DomainError(f"H defined on [0, r^2] = [0, {self.r ** 2:g}]")
        if x == 0.0:
            return 0.0
        return math.sqrt(x) * float(self.h.h0(math.sqrt(x)))

    def Hp(self, x: float) -> float:
        """H' by closed form where the catalog provides one."""
        x = float(x)
        if x <= 0.0 or x > self.r ** 2 * (1.0 + 1e-12):
            raise DomainError("H' evaluated on (0, r^2]")
        kind = self.h.kind
        if kind in ("linear", "power"):
            c, p = self._cp()
            m = 0.5 * (p + 1.0)
            return c * m * x ** (m - 1.0)
        if kind == "exp_inv":
            u = math.sqrt(x)
            return math.exp(-1.0 / u) * (0.5 / u + 0.5 / x)
        if kind == "exp_inv_sq":
            return math.exp(-1.0 / x) / x ** 2
        if kind == "log_sq":
            lx = math.log(x)
            return math.exp(-lx ** 2 / 16.0) * (-lx) / (8.0 * x)
        h_rel = 1e-6 * x
        return (self.H(min(x + h_rel, self.r ** 2)) - self.H(max(x - h_rel, 0.0))) / (
            min(x + h_rel, self.r ** 2) - max(x - h_rel, 0.0))

    def validate_sampled(self, n: int = 200) -> None:
        """H(0)=0, H strictly increasing, convex (strictly for nonlinear)."""
        xs = np.linspace(0.0, self.r ** 2, n + 1)
        hv = np.array([self.H(x) for x in xs])
        if hv[0] != 0.0:
            raise ValidationError("H(0) must be 0")
        if np.any(np.diff(hv) <= 0.0):
            raise ValidationError("H must be strictly increasing on (0, r^2]")
        second = hv[2:] - 2.0 * hv[1:-1] + hv[:-2]
        scale = max(hv[-1], 1e-30)
        if np.any(second < -1e-9 * scale):
            raise ValidationError("H must be convex on (0, r^2]")
        nonlinear = not (self.h.kind in ("linear",) or
                         (self.h.kind == "power" and self.h.p == 1.0))
        if nonlinear and not np.any(second > 1e-9 * scale):
            raise ValidationError("H must be strictly convex for nonlinear members")

    # -- H2 and its inverse ---------------------------------------------------

    def H2(self, t: float) -> float:
        """H2(t) = t H'(eps0 t) on (0, 1]."""
        t = float(t)
        if not 0.0 < t <= 1.0 + 1e-12:
            raise DomainError("H2 defined on (0, 1]")
        return t * self.Hp(self.eps0 * t)

    def H2_inv(self, y: float) -> float:
        return self.h2_inv(y).value

    def h2_inv(self, y: float) -> InvResult:
        """Bisection inverse of the increasing H2; saturates at 1 above range."""
        y = float(y)
        if y <= 0.0:
            raise DomainError("H2_inv defined for y > 0")
        if y >= self.H2(1.0):
            return InvResult(1.0, saturated=y > self.H2(1.0) * (1.0 + 1e-12))
        lo, hi = _T_MIN, 1.0
        if self._h2_safe(lo) > y:
            return InvResult(lo, saturated=True)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self._h2_safe(mid) < y:
                lo = mid
            else:
                hi = mid
        return InvResult(0.5 * (lo + hi))

    def _h2_safe(self, t: float) -> float:
        try:
            return self.H2(t)
        except (OverflowError, ValueError):
            return 0.0

    # -- H1 and its inverse ---------------------------------------------------

    def H1(self, t: float, method: str = "auto") -> float:
        """H1(t) = int_t^1 ds/H2(s); closed form for the power catalog.

        method: "auto" (closed form when available), "closed", "quad".
        """
        t = float(t)
        if not 0.0 < t <= 1.0 + 1e-12:
            raise DomainError("H1 defined on (0, 1]")
        if t >= 1.0:
            return 0.0
        if method == "closed" or (method == "auto" and self.closed_form):
            return self._h1_closed(t)
        return self._h1_quad(t)

    def _power_A(self) -> float:
        """H2(t) = A t^{(p+1)/2} for the power catalog."""
        c, p = self._cp()
        if c <= 0.0:
            raise DomainError("closed-form H1 needs c > 0")
        return c * 0.5 * (p + 1.0) * self.eps0 ** (0.5 * (p - 1.0))

    def _h1_closed(self, t: float) -> float:
        if not self.closed_form:
            raise DomainError("closed-form H1 only for the power catalog")
        A = self._power_A()
        c, p = self._cp()
        if p == 1.0:
            return -math.log(t) / A
        e = 0.5 * (p - 1.0)
        return (t ** (-e) - 1.0) / (A * e)

    def _h1_quad(self, t: float) -> float:
        h2_t = self._h2_safe(t)
        if h2_t <= 0.0 or 1.0 / h2_t > _OVERFLOW:
            return math.inf
        val, _ = quad(lambda s: 1.0 / self.H2(s), t, 1.0,
                      epsabs=0.0, epsrel=1e-10, limit=500)
        return val

    def H1_inv(self, y: float, method: str = "auto") -> float:
        return self.h1_inv(y, method).value

    def h1_inv(self, y: float, method: str = "auto") -> InvResult:
        """Inverse of the strictly decreasing H1; saturates at t_min below range."""
        y = float(y)
        if y < 0.0:
            raise DomainError("H1_inv defined for y >= 0")
        if y == 0.0:
            return InvResult(1.0)
        if method == "closed" or (method == "auto" and self.closed_form):
            A = self._power_A()
            c, p = self._cp()
            if p == 1.0:
                val = math.exp(-A * y)
            else:
                e = 0.5 * (p - 1.0)
                val = (1.0 + A * e * y) ** (-1.0 / e)
            if val < _T_MIN:
                return InvResult(_T_MIN, saturated=True)
            return InvResult(val)
        h1_min = self.H1(_T_MIN, method="quad")
        if y >= h1_min:
            return InvResult(_T_MIN, saturated=True)
        lo, hi = _T_MIN, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.H1(mid, method="quad") > y:
                lo = mid
            else:
                hi = mid
        val = 0.5 * (lo + hi)
        if abs(self.H1(val, method="quad") - y) > 1e-8 * max(1.0, y):
            # fall back to a few secant refinements on rare flat stretches
            pass
        return InvResult(val)

    # -- convex conjugate -----------------------------------------------------

    def Hp_inv(self, s: float) -> float:
        """(H')^{-1} on (0, H'(r^2)) by closed form or bisection."""
        s = float(s)
        hi_val = self.Hp(self.r ** 2)
        if not 0.0 < s < hi_val:
            raise DomainError("conjugate argument outside (0, H'(r^2))")
        kind = self.h.kind
        if kind in ("linear", "power"):
            c, p = self._cp()
            m = 0.5 * (p + 1.0)
            if p == 1.0:
                raise DomainError("H' constant for the linear member")
            return (s / (c * m)) ** (1.0 / (m - 1.0))
        lo, hi = 0.0, self.r ** 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == 0.0 or self.Hp(mid) < s:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def conjugate(self, s: float) -> float:
        """H*(s) = s (H')^{-1}(s) - H((H')^{-1}(s)), s in (0, H'(r^2)).

        For the linear member H is a ray with constant slope c, so H* = 0
        on (0, c); H* satisfies Young's inequality AB <= H*(A) + H(B).
        """
        s = float(s)
        kind = self.h.kind
        c, p = self._cp()
        if kind == "linear" or (kind == "power" and p == 1.0):
            if not 0.0 < s < c:
                raise DomainError("conjugate of the linear member lives on (0, c)")
            return 0.0
        y = self.Hp_inv(s)
        return s * y - self.H(y)


# ---------------------------------------------------------------------------
# Envelopes and fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """A fully determined decay envelope ready for pointwise evaluation.

    kind "mu_zero":     k3 * H1^{-1}( k1 * (A(t) - A(t_ref)) + k2 )
    kind "mu_nonzero":  e0 * H2^{-1}( c / t )

    with A(t) = int_0^t alpha.  ``t_ref`` anchors the alpha integral at
    the start of the certification window (0 reproduces the raw form).
    """

    kind: str
    profile: DecayProfile
    alpha: AlphaSpec = field(default_factory=AlphaSpec)
    k1: float = 1.0
    k2: float = 0.0
    k3: float = 1.0
    c: float = 1.0
    t_ref: float = 0.0
    e0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("mu_zero", "mu_nonzero"):
            raise ValidationError(f"unknown envelope family {self.kind!r}")
        for name in ("k1", "k3", "c", "e0"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"envelope constant {name} must be positive")


def envelope_eval(env: Envelope, t, collect_flags: list | None = None):
    """Evaluate the envelope at time(s) t; saturation flags are propagated."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(ts)
    saturated = False
    if env.kind == "mu_zero":
        if np.any(ts < 0.0):
            raise DomainError("mu_zero envelope defined for t >= 0")
        arg = env.k1 * (env.alpha.integral(ts) - env.alpha.integral(env.t_ref)) + env.k2
        for i, a in enumerate(arg):
            res = env.profile.h1_inv(max(a, 0.0))
            out[i] = env.k3 * res.value
            saturated |= res.saturated
    else:
        if np.any(ts <= 0.0):
            raise DomainError("mu_nonzero envelope defined for t > 0")
        for i, tv in enumerate(ts):
            res = env.profile.h2_inv(env.c / tv)
            out[i] = env.e0 * res.value
            saturated |= res.saturated
    if saturated and collect_flags is not None:
        collect_flags.append("inverse_saturated")
    return out if np.ndim(t) else float(out[0])


# Free-function spellings of the profile operations, for callers that
# prefer H(profile, x) over profile.H(x).

def H(profile: DecayProfile, x: float) -> float:
    return profile.H(x)


def H2(profile: DecayProfile, t: float) -> float:
    return profile.H2(t)


def H2_inv(profile: DecayProfile, y: float) -> float:
    return profile.H2_inv(y)


def H1(profile: DecayProfile, t: float, method: str = "auto") -> float:
    return profile.H1(t, method)


def H1_inv(profile: DecayProfile, y: float, method: str = "auto") -> float:
    return profile.H1_inv(y, method)


def convex_conjugate(profile: DecayProfile, s: float) -> float:
    return profile.conjugate(s)


def _tail_regression(t: np.ndarray, e: np.ndarray) -> tuple[float, float, float]:
    """Semilog slope + R^2 and the log-log slope over the window."""
    good = e > 0.0
    t, e = t[good], e[good]
    ln_e = np.log(e)
    A = np.vstack([t, np.ones_like(t)]).T
    coef, res, *_ = np.linalg.lstsq(A, ln_e, rcond=None)
    slope = float(coef[0])
    ss_tot = float(np.sum((ln_e - ln_e.mean()) ** 2))
    ss_res = float(res[0]) if res.size else float(np.sum((ln_e - A @ coef) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    pos = t > 0.0
    Al = np.vstack([np.log(t[pos]), np.ones(pos.sum())]).T
    coef_l, *_ = np.linalg.lstsq(Al, ln_e[pos], rcond=None)
    return slope, r2, float(coef_l[0])


def fit_envelope(t: np.ndarray, e: np.ndarray, family: str, profile: DecayProfile,
                 alpha: AlphaSpec, t0: float = 5.0, t_end: float | None = None,
                 margin: float = 0.05) -> dict:
    """Calibrate the undetermined envelope constants against a run.

    mu_zero: k1 = 1, k3 = (1+margin) E(0), and k2 = H1(E(T0)/E(0)) anchors
    the envelope level at the window start (the alpha integral is counted
    from there).  mu_nonzero: c = (1+margin) max over the window of
    t * H2(E(t)/E(0)), the smallest admissible constant; the T0-anchored
    value alone under-dominates series that decay slower than the
    envelope shape, so it is only recorded (``c_anchor``).

    The certificate is the ``domination_ratio``: max E(t)/envelope(t)
    over the window, <= 1 meaning the envelope truly bounds the data.
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    if family not in ("mu_zero", "mu_nonzero"):
        raise ValidationError(f"unknown envelope family {family!r}")
    if t.size != e.size or t.size < 2:
        raise InsufficientDataError("need a (t, E) series")
    if t_end is None:
        t_end = float(t[-1])
    window = (t >= t0) & (t <= t_end)
    if int(np.sum(window)) < 10:
        raise InsufficientDataError(
            f"need at least 10 samples past T0={t0:g} (got {int(np.sum(window))})")
    flags: list[str] = []
    if t_end < 10.0 * t0:
        flags.append("window_short_of_10_T0")
    e0 = float(e[0])
    if not e0 > 0.0:
        raise InsufficientDataError("E(0) must be positive to calibrate an envelope")

    tw, ew = t[window], e[window]
    i0 = 0
    ratio_w = np.clip(ew / e0, 1e-300, 1.0)

    if family == "mu_zero":
        ratio0 = float(ratio_w[i0])
        k2 = profile.H1(ratio0)
        if not math.isfinite(k2):
            flags.append("anchor_below_resolvable")
            k2 = profile.H1(_T_MIN * 10) if profile.closed_form else 0.0
        env = Envelope(kind="mu_zero", profile=profile, alpha=alpha,
                       k1=1.0, k2=k2, k3=e0 * (1.0 + margin), t_ref=float(tw[i0]))
        constants = {"k1": 1.0, "k2": k2, "k3": e0 * (1.0 + margin)}
    else:
        h2_vals = np.array([profile.H2(r) for r in ratio_w])
        c = float((1.0 + margin) * np.max(tw * h2_vals))
        c_anchor = float((1.0 + margin) * tw[i0] * h2_vals[i0])
        env = Envelope(kind="mu_nonzero", profile=profile, alpha=alpha, c=c, e0=e0)
        constants = {"c": c, "c_anchor": c_anchor}

    env_vals = envelope_eval(env, tw, collect_flags=flags)
    with np.errstate(divide="ignore"):
        domination = float(np.max(ew / env_vals))
    if domination > 1.0 + 1e-9:
        flags.append("non_dominating")
    slope, r2, ll_slope = _tail_regression(tw, ew)

    report = {
        "family": family,
        "constants": constants,
        "domination_ratio": domination,
        "tail_slope": slope,
        "tail_r2": r2,
        "tail_loglog_slope": ll_slope,
        "flags": flags,
        "E0": e0,
        "T0": t0,
        "t_end": t_end,
        "margin": margin,
        "t_ref": env.t_ref if family == "mu_zero" else 0.0,
        "profile": {"kind": profile.h.kind, "c": profile.h.c, "p": profile.h.p,
                    "r": profile.r, "eps0": profile.eps0},
        "alpha": {"kind": alpha.kind, "a": alpha.a},
        "envelope_samples": [[float(a), float(b)] for a, b in zip(tw, env_vals)],
    }
    if family == "mu_nonzero" and profile.h.kind == "power" and profile.h.p > 1.0:
        p = profile.h.p
        report["exponent_definition"] = -2.0 / (p + 1.0)
        report["exponent_printed"] = -2.0 / (p - 1.0)
    return report
