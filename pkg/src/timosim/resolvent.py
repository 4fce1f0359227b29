"""Numerical checks of the stationary well-posedness construction.

The generator of the flow, acting on V = (v1, v2, v3, v4, v5, v6) =
(phi, phi_t, psi, psi_t, theta, q), is

    A V = ( -v2,
            -(k/rho1)(v1_xx + v3_x),
            -v4,
            -(b/rho2) v3_xx + (k/rho2)(v1_x + v3) + (delta/rho2) v5_x,
            (1/rho3) v6_x + (delta/rho3) v4_x,
            (beta/tau) v6 + (1/tau) v5_x )

discretized with the same staggered differences as the dynamic module.
Two checks are implemented: the dissipativity identity <A V, V>_H =
beta * int v6^2 (exact on this grid for admissible V), and solvability of
(I + A)V = W.  The solve eliminates v2, v4, v6 through

    v2 = v1 - w1,   v4 = v3 - w3,
    v6 = rho3 J w5 + delta w3 - delta v3 - rho3 J v5,   (J f)(x) = int_0^x f

and collocates the reduced integro-differential system in (v1, v3, v5)
on the staggered grid.  The running integrals J are lower-triangular
cumulative matrices whose staggered derivative inverts them exactly, so
the recovered V satisfies the full discrete system to solver precision.
The coercive bilinear form of the reduced weak formulation is assembled
separately and sampled for its smallest Rayleigh quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import (Grid, cumulative_center_to_node, d_center_to_node,
                             d_node_to_center, shear_of)
from .errors import NumericError, ValidationError
from .model import PhysicalParams


@dataclass(frozen=True)
class ResolventField:
    """Six fields on the staggered layout forming one element of the state space.

    v1, v2, v5 live at centers (zero mean for v1, v2, v5 where the space
    requires it), v3, v4, v6 at nodes (v3 vanishing at the endpoints).
    """

    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    v4: np.ndarray
    v5: np.ndarray
    v6: np.ndarray

    def as_tuple(self):
        return (self.v1, self.v2, self.v3, self.v4, self.v5, self.v6)


def validate_member(grid: Grid, f: ResolventField, enforce_d_a: bool = False,
                    tol: float = 1e-10, what: str = "W") -> None:
    """Check the discrete analog of the state-space constraints.

    Zero means for the starred components (1, 2, 5), zero endpoints for
    the third.  With ``enforce_d_a`` the domain conditions of the
    generator (zero endpoints of v4 and v6) are required as well.
    """
    n = grid.n
    dx = grid.dx
    shapes = [(n,), (n,), (n + 1,), (n + 1,), (n,), (n + 1,)]
    for v, shape, name in zip(f.as_tuple(), shapes, ("1", "2", "3", "4", "5", "6")):
        if v.shape != shape:
            raise ValidationError(f"{what}{name} must have shape {shape}")
    scale = max(float(np.max(np.abs(np.concatenate(f.as_tuple())))), 1e-30)
    for v, name in ((f.v1, "1"), (f.v2, "2"), (f.v5, "5")):
        if abs(float(np.sum(v)) * dx) > tol * scale:
            raise ValidationError(f"{what}{name} must have zero mean")
    ends = [(f.v3, "3")]
    if enforce_d_a:
        ends += [(f.v4, "4"), (f.v6, "6")]
    for v, name in ends:
        if abs(v[0]) > tol * scale or abs(v[-1]) > tol * scale:
            raise ValidationError(f"{what}{name} must vanish at the endpoints")


@dataclass(frozen=True)
class ResolventProblem:
    params: PhysicalParams
    grid: Grid
    w: ResolventField

    def __post_init__(self):
        validate_member(self.grid, self.w)


def apply_A(v: ResolventField, params: PhysicalParams, grid: Grid) -> ResolventField:
    """The discrete generator; node components 4 and 6 live at interior nodes
    (their endpoint entries are returned as zero)."""
    p = params
    dx = grid.dx
    n = grid.n
    s = shear_of(v.v1, v.v3, dx)
    a1 = -v.v2
    a2 = -(p.k / p.rho1) * d_node_to_center(s, dx)
    a3 = -v.v4
    a4 = np.zeros(n + 1)
    lap3 = (v.v3[2:] - 2.0 * v.v3[1:-1] + v.v3[:-2]) / dx ** 2
    v5x = d_center_to_node(v.v5, dx)
    a4[1:-1] = -(p.b / p.rho2) * lap3 + (p.k / p.rho2) * s[1:-1] + (p.delta / p.rho2) * v5x
    a5 = (d_node_to_center(v.v6, dx) + p.delta * d_node_to_center(v.v4, dx)) / p.rho3
    a6 = np.zeros(n + 1)
    a6[1:-1] = (p.beta / p.tau) * v.v6[1:-1] + v5x / p.tau
    return ResolventField(a1, a2, a3, a4, a5, a6)


def inner_h(u: ResolventField, v: ResolventField, params: PhysicalParams,
            grid: Grid) -> float:
    """Discrete inner product of the state space H."""
    from .diagnostics import center_integral, node_integral

    p = params
    dx = grid.dx
    su = shear_of(u.v1, u.v3, dx)
    sv = shear_of(v.v1, v.v3, dx)
    return (p.rho1 * center_integral(u.v2 * v.v2, dx)
            + p.rho2 * node_integral(u.v4 * v.v4, dx)
            + p.k * node_integral(su * sv, dx)
            + p.b * center_integral(d_node_to_center(u.v3, dx) * d_node_to_center(v.v3, dx), dx)
            + p.rho3 * center_integral(u.v5 * v.v5, dx)
            + p.tau * node_integral(u.v6 * v.v6, dx))


def monotonicity_defect(v: ResolventField, params: PhysicalParams, grid: Grid) -> float:
    """<A V, V>_H - beta * int v6^2; vanishes to rounding for admissible V."""
    from .diagnostics import node_integral

    av = apply_A(v, params, grid)
    return inner_h(av, v, params, grid) - params.beta * node_integral(v.v6 ** 2, grid.dx)


# ---------------------------------------------------------------------------
# (I + A) V = W
# ---------------------------------------------------------------------------

def _loads(problem: ResolventProblem):
    """Right-hand sides h1 (centers), h2, h3 (interior nodes) of the reduced system."""
    p = problem.params
    g = problem.grid
    w = problem.w
    dx = g.dx
    bt = p.beta + p.tau
    jw5 = cumulative_center_to_node(w.v5, dx)
    h1 = p.rho1 * (w.v1 + w.v2)
    inter = slice(1, g.n)
    h2 = (bt * p.delta ** 2 * w.v3[inter] + bt * p.delta * p.rho3 * jw5[inter]
          - p.delta * p.tau * w.v6[inter] + p.rho2 * (w.v3[inter] + w.v4[inter]))
    h3 = (p.rho3 * bt * p.delta * w.v3[inter] + bt * p.rho3 ** 2 * jw5[inter]
          - p.rho3 * p.tau * w.v6[inter])
    return h1, h2, h3


def _assemble(params: PhysicalParams, grid: Grid) -> np.ndarray:
    """Collocation matrix on unknowns [v1 (N centers), v3 (N-1 interior), v5 (N centers)].

    Rows: reduced equation 1 at every center, equations 2 and 3 at the
    interior nodes, and one zero-mean closure row for v5.
    """
    p = params
    n = grid.n
    dx = grid.dx
    bt = p.beta + p.tau
    dim = 3 * n - 1
    A = np.zeros((dim, dim))

    def i1(i):
        return i

    def i3(j):
        return n + (j - 1)

    def i5(i):
        return 2 * n - 1 + i

    # -k (s_{i+1} - s_i)/dx + rho1 v1_i = h1_i, shear pinned at the ends
    for i in range(n):
        A[i, i1(i)] += p.rho1
        for j, sgn in ((i + 1, 1.0), (i, -1.0)):
            if 1 <= j <= n - 1:
                coeff = -p.k * sgn / dx
                A[i, i3(j)] += coeff
                A[i, i1(j)] += coeff / dx
                A[i, i1(j - 1)] -= coeff / dx

    # -b v3_xx + k v1_x + (k + delta^2 (beta+tau) + rho2) v3
    #   + rho3 delta (beta+tau) (J v5) = h2, at interior nodes
    for j in range(1, n):
        r = n + (j - 1)
        A[r, i3(j)] += 2.0 * p.b / dx ** 2 + p.k + p.delta ** 2 * bt + p.rho2
        if j - 1 >= 1:
            A[r, i3(j - 1)] += -p.b / dx ** 2
        if j + 1 <= n - 1:
            A[r, i3(j + 1)] += -p.b / dx ** 2
        A[r, i1(j)] += p.k / dx
        A[r, i1(j - 1)] += -p.k / dx
        for i in range(j):  # (J v5)_j = dx * sum_{i<j} v5_i
            A[r, i5(i)] += p.rho3 * p.delta * bt * dx

    # -rho3 v5_x + rho3 (beta+tau) delta v3 + rho3^2 (beta+tau) (J v5) = h3
    for j in range(1, n):
        r = 2 * n - 1 + (j - 1)
        A[r, i5(j)] += -p.rho3 / dx
        A[r, i5(j - 1)] += p.rho3 / dx
        A[r, i3(j)] += p.rho3 * bt * p.delta
        for i in range(j):
            A[r, i5(i)] += p.rho3 ** 2 * bt * dx

    # zero-mean closure for v5
    r = dim - 1
    for i in range(n):
        A[r, i5(i)] = dx
    return A


def solve_resolvent(problem: ResolventProblem) -> ResolventField:
    """Solve (I + A)V = W by direct elimination of the reduced system."""
    g = problem.grid
    n = g.n
    h1, h2, h3 = _loads(problem)
    mat = _assemble(problem.params, g)
    rhs_vec = np.concatenate([h1, h2, h3, [0.0]])
    try:
        x = np.linalg.solve(mat, rhs_vec)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"resolvent system singular: {exc}") from exc

    v1 = x[:n]
    v3 = np.zeros(n + 1)
    v3[1:-1] = x[n:2 * n - 1]
    v5 = x[2 * n - 1:]
    w = problem.w
    v2 = v1 - w.v1
    v4 = v3 - w.v3
    dx = g.dx
    v6 = (problem.params.rho3 * cumulative_center_to_node(w.v5, dx)
          + problem.params.delta * w.v3 - problem.params.delta * v3
          - problem.params.rho3 * cumulative_center_to_node(v5, dx))
    return ResolventField(v1, v2, v3, v4, v5, v6)


def v6_from_equation(problem: ResolventProblem, v: ResolventField) -> np.ndarray:
    """Alternative recovery of v6 from the sixth resolvent equation,
    (beta + tau) v6 = tau w6 - v5_x, available at interior nodes."""
    p = problem.params
    g = problem.grid
    out = np.zeros(g.n + 1)
    v5x = d_center_to_node(v.v5, g.dx)
    out[1:-1] = (p.tau * problem.w.v6[1:-1] - v5x) / (p.beta + p.tau)
    return out


def residual(problem: ResolventProblem, v: ResolventField) -> float:
    """Relative strong-form residual ||(I + A)V - W|| / ||W||.

    Node components 4 and 6 are measured at interior nodes, where the
    discrete operator is defined; all pieces are dx-weighted l2 norms.
    """
    g = problem.grid
    dx = g.dx
    av = apply_A(v, problem.params, g)
    w = problem.w
    inter = slice(1, g.n)
    pieces = [
        v.v1 + av.v1 - w.v1,
        v.v2 + av.v2 - w.v2,
        v.v3 + av.v3 - w.v3,
        (v.v4 + av.v4 - w.v4)[inter],
        v.v5 + av.v5 - w.v5,
        (v.v6 + av.v6 - w.v6)[inter],
    ]
    num = math.sqrt(sum(float(np.sum(piece ** 2)) * dx for piece in pieces))
    den = math.sqrt(sum(float(np.sum(piece ** 2)) * dx for piece in w.as_tuple()))
    return num / max(den, 1e-300)


# ---------------------------------------------------------------------------
# Bilinear form of the reduced weak formulation
# ---------------------------------------------------------------------------

def bilinear_form(v, u, params: PhysicalParams, grid: Grid) -> float:
    """b((v1,v3,v5),(u1,u3,u5)) with staggered quadrature.

    b = k <s(v), s(u)> + rho1 <v1, u1> + b <v3_x, u3_x>
        + (delta^2 (beta+tau) + rho2) <v3, u3>
        + rho3 delta (beta+tau) [<J v5, u3> + <v3, J u5>]
        + rho3 <v5, u5> + rho3^2 (beta+tau) <J v5, J u5>
    """
    from .diagnostics import center_integral, node_integral

    p = params
    dx = grid.dx
    bt = p.beta + p.tau
    v1, v3, v5 = v
    u1, u3, u5 = u
    sv = shear_of(v1, v3, dx)
    su = shear_of(u1, u3, dx)
    jv5 = cumulative_center_to_node(v5, dx)
    ju5 = cumulative_center_to_node(u5, dx)
    return (p.k * node_integral(sv * su, dx)
            + p.rho1 * center_integral(v1 * u1, dx)
            + p.b * center_integral(d_node_to_center(v3, dx) * d_node_to_center(u3, dx), dx)
            + (p.delta ** 2 * bt + p.rho2) * node_integral(v3 * u3, dx)
            + p.rho3 * p.delta * bt * (node_integral(jv5 * u3, dx)
                                       + node_integral(v3 * ju5, dx))
            + p.rho3 * center_integral(v5 * u5, dx)
            + p.rho3 ** 2 * bt * node_integral(jv5 * ju5, dx))


def lambda_norm_sq(v, grid: Grid) -> float:
    """||v1_x + v3||^2 + ||v1||^2 + ||v3_x||^2 + ||v5||^2 (discrete)."""
    from .diagnostics import center_integral, node_integral

    dx = grid.dx
    v1, v3, v5 = v
    s = shear_of(v1, v3, dx)
    return (node_integral(s ** 2, dx) + center_integral(v1 ** 2, dx)
            + center_integral(d_node_to_center(v3, dx) ** 2, dx)
            + center_integral(v5 ** 2, dx))


def random_reduced_triple(grid: Grid, rng: np.random.Generator, modes: int = 6):
    """Random (v1, v3, v5) in the reduced trial space (zero means, v3 Dirichlet)."""
    xc, xn = grid.centers, grid.nodes
    ms = np.arange(1, modes + 1)
    decay = 1.0 / ms

    def cos_field():
        return (rng.standard_normal(modes) * decay) @ np.cos(np.outer(ms * np.pi, xc))

    v3 = (rng.standard_normal(modes) * decay) @ np.sin(np.outer(ms * np.pi, xn))
    v3[0] = 0.0
    v3[-1] = 0.0
    return cos_field(), v3, cos_field()


def coercivity_estimate(params: PhysicalParams, grid: Grid, n_samples: int = 1000,
                        seed: int = 0) -> float:
    """Smallest sampled Rayleigh quotient b(v, v) / ||v||_Lambda^2 (> 0)."""
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(n_samples):
        v = random_reduced_triple(grid, rng)
        denom = lambda_norm_sq(v, grid)
        if denom <= 0.0:
            continue
        best = min(best, bilinear_form(v, v, params, grid) / denom)
    return best


def random_admissible_field(grid: Grid, rng: np.random.Generator,
                            modes: int = 6, domain_of_a: bool = True) -> ResolventField:
    """Random smooth element of the discrete state space (optionally of D(A))."""
    xc, xn = grid.centers, grid.nodes
    ms = np.arange(1, modes + 1)
    decay = 1.0 / ms ** 2

    def cos_field():
        return (rng.standard_normal(modes) * decay) @ np.cos(np.outer(ms * np.pi, xc))

    def sin_field():
        f = (rng.standard_normal(modes) * decay) @ np.sin(np.outer(ms * np.pi, xn))
        f[0] = 0.0
        f[-1] = 0.0
        return f

    return ResolventField(cos_field(), cos_field(), sin_field(), sin_field(),
                          cos_field(), sin_field())


# ---------------------------------------------------------------------------
# Manufactured-solution convergence
# ---------------------------------------------------------------------------

def _fourier(series, basis, x):
    out = np.zeros_like(x)
    for m, a in series:
        out += a * basis(m * np.pi * x)
    return out


def _fourier_d(series, basis_d, x, sign=1.0):
    out = np.zeros_like(x)
    for m, a in series:
        out += sign * a * m * np.pi * basis_d(m * np.pi * x)
    return out


MANUFACTURED = {
    # cos series for v1, v2, v5; sin series for v3, v4, v6
    "v1": ((1, 0.7), (2, 0.2)),
    "v2": ((1, 0.3), (3, 0.1)),
    "v3": ((1, 0.6), (3, 0.1)),
    "v4": ((2, 0.4),),
    "v5": ((1, 0.5), (3, 0.15)),
    "v6": ((1, 0.45), (2, 0.2)),
}


def manufactured_problem(params: PhysicalParams, grid: Grid):
    """Smooth exact solution V* and its analytic image W = V* + A V*."""
    p = params
    xc, xn = grid.centers, grid.nodes
    m = MANUFACTURED
    cos, sin = np.cos, np.sin

    v_star = ResolventField(
        _fourier(m["v1"], cos, xc), _fourier(m["v2"], cos, xc),
        _fourier(m["v3"], sin, xn), _fourier(m["v4"], sin, xn),
        _fourier(m["v5"], cos, xc), _fourier(m["v6"], sin, xn))

    def dd_cos(series, x):  # second derivative of a cosine series
        out = np.zeros_like(x)
        for mm, a in series:
            out += -a * (mm * np.pi) ** 2 * np.cos(mm * np.pi * x)
        return out

    def dd_sin(series, x):
        out = np.zeros_like(x)
        for mm, a in series:
            out += -a * (mm * np.pi) ** 2 * np.sin(mm * np.pi * x)
        return out

    w1 = v_star.v1 - v_star.v2
    w2 = (v_star.v2 - (p.k / p.rho1) * (dd_cos(m["v1"], xc)
                                        + _fourier_d(m["v3"], np.cos, xc)))
    w3 = v_star.v3 - v_star.v4
    w4 = (v_star.v4 - (p.b / p.rho2) * dd_sin(m["v3"], xn)
          + (p.k / p.rho2) * (_fourier_d(m["v1"], np.sin, xn, sign=-1.0) + v_star.v3)
          + (p.delta / p.rho2) * _fourier_d(m["v5"], np.sin, xn, sign=-1.0))
    w5 = (v_star.v5 + (_fourier_d(m["v6"], np.cos, xc)
                       + p.delta * _fourier_d(m["v4"], np.cos, xc)) / p.rho3)
    w6 = (v_star.v6 + (p.beta / p.tau) * v_star.v6
          + _fourier_d(m["v5"], np.sin, xn, sign=-1.0) / p.tau)
    w3 = w3.copy()
    w3[0] = 0.0
    w3[-1] = 0.0
    return v_star, ResolventField(w1, w2, w3, w4, w5, w6)


def manufactured_error(params: PhysicalParams, n: int) -> float:
    """dx-weighted l2 error of the discrete solve against the exact fields."""
    grid = Grid(n)
    v_star, w = manufactured_problem(params, grid)
    problem = ResolventProblem(params, grid, w)
    v = solve_resolvent(problem)
    dx = grid.dx
    err = 0.0
    for a, b in zip(v.as_tuple(), v_star.as_tuple()):
        err += float(np.sum((a - b) ** 2)) * dx
    return math.sqrt(err)


def convergence_order(params: PhysicalParams, ns=(32, 64, 128)) -> tuple[float, list]:
    """Least-squares slope of log error vs log N over the given grids."""
    errs = [manufactured_error(params, n) for n in ns]
    logn = np.log(np.asarray(ns, dtype=float))
    loge = np.log(np.asarray(errs))
    slope = float(np.polyfit(logn, loge, 1)[0])
    return -slope, errs


def resolvent_report(params: PhysicalParams, ns=(32, 64, 128), samples: int = 300,
                     seed: int = 0) -> dict:
    """Everything the stationary check asserts, in one JSON-ready dict."""
    order, errs = convergence_order(params, ns)
    grid = Grid(max(ns))
    _, w = manufactured_problem(params, grid)
    problem = ResolventProblem(params, grid, w)
    v = solve_resolvent(problem)
    res = residual(problem, v)
    coerc = coercivity_estimate(params, Grid(min(ns)), n_samples=samples, seed=seed)
    rng = np.random.default_rng(seed)
    defects = []
    for n in ns:
        g = Grid(n)
        worst = 0.0
        for _ in range(20):
            fld = random_admissible_field(g, rng)
            scale = inner_h(fld, fld, params, g)
            worst = max(worst, abs(monotonicity_defect(fld, params, g)) / max(scale, 1e-300))
        defects.append(worst)
    v6_alt = v6_from_equation(problem, v)
    v6_gap = float(np.max(np.abs(v6_alt[1:-1] - v.v6[1:-1])))
    return {
        "convergence_order": order,
        "errors": {str(n): e for n, e in zip(ns, errs)},
        "residual": res,
        "coercivity": coerc,
        "monotonicity_defects": {str(n): d for n, d in zip(ns, defects)},
        "v6_recovery_gap": v6_gap,
        "Ns": list(ns),
    }
