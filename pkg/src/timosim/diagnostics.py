"""Energy, dissipation and Lyapunov functionals of the discrete state.

Quadrature conventions: center fields use the midpoint rule (plain sum
times dx), node fields the trapezoid rule (half weights at the
endpoints).  These are exactly the weights under which the staggered
difference operators are mutually adjoint, so summation by parts is
exact and the energy identity of :mod:`timosim.discretization` holds to
rounding.

Cross-grid products are assembled on the grid where both factors are
naturally collocated; the only interpolation is the node->center average
of the auxiliary field w inside K2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .discretization import (Grid, StaggeredState, cumulative_center_to_node,
                             d_node_to_center, rhs, shear, shear_of)
from .errors import ValidationError
from .model import DampingSpec, PhysicalParams


def center_integral(f: np.ndarray, dx: float) -> float:
    return float(np.sum(f) * dx)


def node_integral(f: np.ndarray, dx: float) -> float:
    """Trapezoid rule over the node grid (half-weight endpoints)."""
    return float((np.sum(f) - 0.5 * (f[0] + f[-1])) * dx)


@dataclass(frozen=True)
class LyapunovWeights:
    """Weights of the combined functional K = N E + K1 + N2 K2 + N3 K3 + N4 K4.

    ``k2_phi_w_coeff`` selects which density multiplies the phi_t * w
    term of K2 ("rho2" as printed, "rho1" as the alternative reading).
    """

    N: float = 60.0
    N2: float = 1.0
    N3: float = 1.0
    N4: float = 1.0
    k2_phi_w_coeff: str = "rho2"

    def __post_init__(self):
        bad = [n for n in ("N", "N2", "N3", "N4") if not getattr(self, n) > 0.0]
        if bad:
            raise ValidationError("Lyapunov weights must be positive: " + ", ".join(bad),
                                  paths=[f"weights.{n}" for n in bad])
        if self.k2_phi_w_coeff not in ("rho2", "rho1"):
            raise ValidationError("k2_phi_w_coeff must be 'rho2' or 'rho1'",
                                  paths=["weights.k2_phi_w_coeff"])


def energy(state: StaggeredState, params: PhysicalParams) -> float:
    """First-order energy E(t).

    E = 1/2 int ( rho1 phi_t^2 + rho2 psi_t^2 + b psi_x^2
                  + k (phi_x + psi)^2 + rho3 theta^2 + tau q^2 ) dx

    psi_x is evaluated at centers, the shear at nodes.
    """
    g = state.grid
    dx = g.dx
    p = params
    psix = d_node_to_center(state.psi, dx)
    s = shear(state)
    val = 0.5 * (p.rho1 * center_integral(state.phit ** 2, dx)
                 + p.rho3 * center_integral(state.theta ** 2, dx)
                 + p.b * center_integral(psix ** 2, dx)
                 + p.rho2 * node_integral(state.psit ** 2, dx)
                 + p.k * node_integral(s ** 2, dx)
                 + p.tau * node_integral(state.q ** 2, dx))
    return val


def dissipation(state: StaggeredState, t: float, params: PhysicalParams,
                damping: DampingSpec) -> float:
    """Exact semidiscrete energy rate: -beta int q^2 - alpha int psi_t h(psi_t)."""
    dx = state.grid.dx
    fric = state.psit * damping.h.h(state.psit)
    return float(-params.beta * node_integral(state.q ** 2, dx)
                 - damping.alpha(t) * node_integral(fric, dx))


def energy_rate(state: StaggeredState, t: float, params: PhysicalParams,
                damping: DampingSpec) -> float:
    """Directional derivative of E along the semidiscrete flow (chain rule).

    Used in tests to confirm it coincides with :func:`dissipation` to
    rounding; production code uses the closed form directly.
    """
    g = state.grid
    dx = g.dx
    p = params
    d = rhs(state, t, params, damping)
    s = shear(state)
    ds = shear_of(d.phi, d.psi, dx)
    psix = d_node_to_center(state.psi, dx)
    dpsix = d_node_to_center(d.psi, dx)
    return (p.rho1 * center_integral(state.phit * d.phit, dx)
            + p.rho3 * center_integral(state.theta * d.theta, dx)
            + p.b * center_integral(psix * dpsix, dx)
            + p.rho2 * node_integral(state.psit * d.psit, dx)
            + p.k * node_integral(s * ds, dx)
            + p.tau * node_integral(state.q * d.q, dx))


def second_energy(state: StaggeredState, params: PhysicalParams,
                  damping: DampingSpec, t: float) -> float:
    """Second-order energy: the same quadratic form on time-differentiated fields.

    All second derivatives come from one evaluation of the semidiscrete
    right-hand side at the current state; no history is stored.
    """
    g = state.grid
    dx = g.dx
    p = params
    d = rhs(state, t, params, damping)
    psitx = d_node_to_center(state.psit, dx)
    st = shear_of(state.phit, state.psit, dx)
    return 0.5 * (p.rho1 * center_integral(d.phit ** 2, dx)
                  + p.rho3 * center_integral(d.theta ** 2, dx)
                  + p.b * center_integral(psitx ** 2, dx)
                  + p.rho2 * node_integral(d.psit ** 2, dx)
                  + p.k * node_integral(st ** 2, dx)
                  + p.tau * node_integral(d.q ** 2, dx))


# ---------------------------------------------------------------------------
# Auxiliary elliptic problem and the K functionals
# ---------------------------------------------------------------------------

def solve_w(psi: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve -w_xx = psi_x, w(0) = w(1) = 0 on the node grid.

    psi_x is mapped to interior nodes by averaging the two adjacent
    center differences (a plain central difference), then the standard
    3-point tridiagonal system is eliminated directly.
    """
    n = grid.n
    dx = grid.dx
    rhs_vec = (psi[2:] - psi[:-2]) / (2.0 * dx)
    ab = np.empty((2, n - 1))
    ab[0, :] = -1.0 / dx ** 2
    ab[1, :] = 2.0 / dx ** 2
    w = np.zeros(n + 1)
    w[1:-1] = solveh_banded(ab, rhs_vec, lower=False)
    return w


def k1(state: StaggeredState, params: PhysicalParams) -> float:
    """K1 = -int (rho1 phi phi_t + rho2 psi psi_t)."""
    dx = state.grid.dx
    return -(params.rho1 * center_integral(state.phi * state.phit, dx)
             + params.rho2 * node_integral(state.psi * state.psit, dx))


def k2(state: StaggeredState, params: PhysicalParams,
       phi_w_coeff: str = "rho2") -> float:
    """K2 = rho2 int psi psi_t - rho2 int phi_t w - delta tau int psi q.

    w solves the auxiliary Dirichlet problem above and is averaged to
    centers for the product with phi_t.  The middle coefficient follows
    the printed form (rho2); pass ``phi_w_coeff="rho1"`` for the variant.
    """
    dx = state.grid.dx
    w = solve_w(state.psi, state.grid)
    w_c = 0.5 * (w[1:] + w[:-1])
    coeff = params.rho2 if phi_w_coeff == "rho2" else params.rho1
    return (params.rho2 * node_integral(state.psi * state.psit, dx)
            - coeff * center_integral(state.phit * w_c, dx)
            - params.delta * params.tau * node_integral(state.psi * state.q, dx))


def k3(state: StaggeredState, params: PhysicalParams) -> float:
    """K3 = -tau rho3 int q(x) Theta(x) dx with Theta(x) = int_0^x theta."""
    dx = state.grid.dx
    big_theta = cumulative_center_to_node(state.theta, dx)
    return -params.tau * params.rho3 * node_integral(state.q * big_theta, dx)


def k4(state: StaggeredState, params: PhysicalParams) -> float:
    """Fourth multiplier functional (shear/heat cross couplings)."""
    p = params
    dx = state.grid.dx
    s = shear(state)
    psix = d_node_to_center(state.psi, dx)
    speed_gap = p.rho2 / p.b - p.rho1 / p.k
    return ((p.tau * p.rho2 / p.k) * node_integral(state.psit * s, dx)
            + (p.b * p.tau * p.rho1 / p.k ** 2) * center_integral(state.phit * psix, dx)
            - (p.b * p.tau * p.rho3 / (p.delta * p.k)) * speed_gap
            * center_integral(state.theta * state.phit, dx)
            + (p.b * p.tau / (p.delta * p.k)) * speed_gap * node_integral(state.q * s, dx))


def lyapunov(state: StaggeredState, params: PhysicalParams,
             damping: DampingSpec, weights: LyapunovWeights) -> float:
    """K = N E + K1 + N2 K2 + N3 K3 + N4 K4, equivalent to E for N large."""
    return (weights.N * energy(state, params)
            + k1(state, params)
            + weights.N2 * k2(state, params, weights.k2_phi_w_coeff)
            + weights.N3 * k3(state, params)
            + weights.N4 * k4(state, params))


def all_functionals(state: StaggeredState, t: float, params: PhysicalParams,
                    damping: DampingSpec, weights: LyapunovWeights) -> dict:
    """Every diagnostic in one pass (shared w-solve between K2 and K)."""
    e = energy(state, params)
    v1 = k1(state, params)
    v2 = k2(state, params, weights.k2_phi_w_coeff)
    v3 = k3(state, params)
    v4 = k4(state, params)
    big_k = weights.N * e + v1 + weights.N2 * v2 + weights.N3 * v3 + weights.N4 * v4
    return {
        "E": e,
        "E2": second_energy(state, params, damping, t),
        "diss_predicted": dissipation(state, t, params, damping),
        "K": big_k,
        "K1": v1,
        "K2": v2,
        "K3": v3,
        "K4": v4,
    }


def random_admissible_state(grid: Grid, rng: np.random.Generator,
                            modes: int = 6, amplitude: float = 1.0) -> StaggeredState:
    """Random smooth state in the admissible space (for sampling tests)."""
    xc, xn = grid.centers, grid.nodes
    ms = np.arange(1, modes + 1)
    decay = 1.0 / ms ** 2

    def cos_field():
        return (rng.standard_normal(modes) * decay * amplitude) @ np.cos(np.outer(ms * np.pi, xc))

    def sin_field():
        f = (rng.standard_normal(modes) * decay * amplitude) @ np.sin(np.outer(ms * np.pi, xn))
        f[0] = 0.0
        f[-1] = 0.0
        return f

    return StaggeredState(grid, 0.0, cos_field(), cos_field(), sin_field(),
                          sin_field(), cos_field(), sin_field())


def equivalence_ratios(params: PhysicalParams, damping: DampingSpec,
                       weights: LyapunovWeights, grid: Grid, n_samples: int = 1000,
                       seed: int = 0) -> np.ndarray:
    """K/E over random nonzero admissible states (scale invariant)."""
    rng = np.random.default_rng(seed)
    out = np.empty(n_samples)
    for i in range(n_samples):
        st = random_admissible_state(grid, rng)
        e = energy(st, params)
        if e <= 0.0 or not math.isfinite(e):
            out[i] = np.nan
            continue
        out[i] = lyapunov(st, params, damping, weights) / e
    return out
