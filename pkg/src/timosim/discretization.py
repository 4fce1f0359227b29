"""Staggered-grid semi-discretization of the beam/heat system.

Layout: ``phi``, ``phi_t`` and ``theta`` live at cell centers, ``psi``,
``psi_t`` and ``q`` at nodes.  Every first derivative in the system then
lands exactly on the partner grid through a two-point difference, the
Neumann condition on ``phi`` and the Dirichlet conditions on ``psi`` and
``q`` are exact, and both discrete mean conservations (of ``theta`` and
``phi_t``) are telescoping identities.  The semidiscrete energy identity

    dE_h/dt = -beta * sum_n w_j q_j^2 dx - alpha(t) * sum_n w_j psit_j h(psit_j) dx

holds to rounding (trapezoid node weights w_j), i.e. the continuum
dissipation structure survives discretization with no penalty terms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .model import DampingSpec, PhysicalParams


@dataclass(frozen=True)
class Grid:
    """Uniform staggered grid on [0, 1] with n cells."""

    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValidationError("grid needs at least 8 cells", paths=["grid.N"])

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dx


def d_node_to_center(f: np.ndarray, dx: float) -> np.ndarray:
    """Two-point difference of a node field, valid at every center."""
    return (f[1:] - f[:-1]) / dx


def d_center_to_node(f: np.ndarray, dx: float) -> np.ndarray:
    """Two-point difference of a center field, valid at interior nodes."""
    return (f[1:] - f[:-1]) / dx


def cumulative_center_to_node(f: np.ndarray, dx: float) -> np.ndarray:
    """Running integral of a center field, exact left-endpoint-zero primitive.

    The staggered derivative of the result recovers ``f`` identically,
    which the resolvent solver and the K3 functional both rely on.
    """
    out = np.empty(f.size + 1)
    out[0] = 0.0
    np.cumsum(f * dx, out=out[1:])
    return out


@dataclass(frozen=True)
class StaggeredState:
    """All six fields at one time instant."""

    grid: Grid
    t: float
    phi: np.ndarray    # centers
    phit: np.ndarray   # centers
    psi: np.ndarray    # nodes, psi[0] = psi[-1] = 0
    psit: np.ndarray   # nodes, psit[0] = psit[-1] = 0
    theta: np.ndarray  # centers
    q: np.ndarray      # nodes, q[0] = q[-1] = 0

    def __post_init__(self):
        n = self.grid.n
        if not (self.phi.shape == self.phit.shape == self.theta.shape == (n,)):
            raise ValidationError("center fields must have length N")
        if not (self.psi.shape == self.psit.shape == self.q.shape == (n + 1,)):
            raise ValidationError("node fields must have length N+1")
        for name in ("psi", "psit", "q"):
            f = getattr(self, name)
            if f[0] != 0.0 or f[-1] != 0.0:
                raise ValidationError(f"{name} must vanish at both endpoints")

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(f))) if f.size else 0.0
                   for f in (self.phi, self.phit, self.psi, self.psit, self.theta, self.q))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f))
                   for f in (self.phi, self.phit, self.psi, self.psit, self.theta, self.q))

    def with_time(self, t: float) -> "StaggeredState":
        return replace(self, t=t)


def zero_state(grid: Grid, t: float = 0.0) -> StaggeredState:
    n = grid.n
    return StaggeredState(grid, t, np.zeros(n), np.zeros(n), np.zeros(n + 1),
                          np.zeros(n + 1), np.zeros(n), np.zeros(n + 1))


def state_from_initial_data(grid: Grid, data, normalize: bool = True) -> StaggeredState:
    """Sample initial fields on the staggered grid.

    Residual discrete means of phi, phi_t and theta are subtracted (exact
    projection onto the admissible space), and the node fields are pinned
    to zero at the endpoints.
    """
    from .model import subtract_mean

    xc, xn = grid.centers, grid.nodes
    phi = data.evaluate("phi0", xc)
    phit = data.evaluate("phi1", xc)
    theta = data.evaluate("theta0", xc)
    psi = data.evaluate("psi0", xn)
    psit = data.evaluate("psi1", xn)
    q = data.evaluate("q0", xn)
    for f in (psi, psit, q):
        f[0] = 0.0
        f[-1] = 0.0
    if normalize:
        phi = subtract_mean(phi, grid.dx)
        phit = subtract_mean(phit, grid.dx)
        theta = subtract_mean(theta, grid.dx)
    return StaggeredState(grid, 0.0, phi, phit, psi, psit, theta, q)


def shear(state: StaggeredState) -> np.ndarray:
    """Mean shear distortion phi_x + psi at nodes.

    The endpoint values are pinned to zero: psi vanishes there and the
    Neumann condition phi_x(0) = phi_x(1) = 0 is encoded exactly.
    """
    s = np.zeros(state.grid.n + 1)
    s[1:-1] = d_center_to_node(state.phi, state.grid.dx) + state.psi[1:-1]
    return s


def shear_of(phi: np.ndarray, psi: np.ndarray, dx: float) -> np.ndarray:
    """Shear of an arbitrary (center, node) field pair, endpoints pinned."""
    s = np.zeros(psi.size)
    s[1:-1] = d_center_to_node(phi, dx) + psi[1:-1]
    return s


@dataclass(frozen=True)
class Derivs:
    """Time derivative of every state field on the same layout."""

    phi: np.ndarray
    phit: np.ndarray
    psi: np.ndarray
    psit: np.ndarray
    theta: np.ndarray
    q: np.ndarray


def rhs(state: StaggeredState, t: float, params: PhysicalParams,
        damping: DampingSpec) -> Derivs:
    """Semidiscrete right-hand side of the four evolution equations."""
    g = state.grid
    dx = g.dx
    p = params

    s = shear(state)
    dphit = (p.k / p.rho1) * d_node_to_center(s, dx)

    dpsit = np.zeros(g.n + 1)
    lap_psi = (state.psi[2:] - 2.0 * state.psi[1:-1] + state.psi[:-2]) / dx ** 2
    theta_x = d_center_to_node(state.theta, dx)
    friction = damping.alpha(t) * damping.h.h(state.psit[1:-1])
    dpsit[1:-1] = (p.b * lap_psi - p.k * s[1:-1] - p.delta * theta_x - friction) / p.rho2

    dtheta = -(d_node_to_center(state.q, dx) + p.delta * d_node_to_center(state.psit, dx)) / p.rho3

    dq = np.zeros(g.n + 1)
    dq[1:-1] = -(p.beta * state.q[1:-1] + theta_x) / p.tau

    return Derivs(phi=state.phit.copy(), phit=dphit, psi=state.psit.copy(),
                  psit=dpsit, theta=dtheta, q=dq)


def apply_derivs(state: StaggeredState, d: Derivs, dt: float, t: float) -> StaggeredState:
    """state + dt * d with nodal Dirichlet values re-pinned exactly."""
    psi = state.psi + dt * d.psi
    psit = state.psit + dt * d.psit
    q = state.q + dt * d.q
    for f in (psi, psit, q):
        f[0] = 0.0
        f[-1] = 0.0
    return StaggeredState(state.grid, t,
                          state.phi + dt * d.phi, state.phit + dt * d.phit,
                          psi, psit, state.theta + dt * d.theta, q)
