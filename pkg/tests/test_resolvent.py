import numpy as np
import pytest

from timosim import Grid, PhysicalParams, ResolventProblem, apply_A, solve_resolvent
from timosim.errors import ValidationError
from timosim.resolvent import (ResolventField, bilinear_form, coercivity_estimate,
                               convergence_order, inner_h, lambda_norm_sq,
                               manufactured_problem, monotonicity_defect,
                               random_admissible_field, random_reduced_triple,
                               residual, v6_from_equation, validate_member)


def test_apply_A_zero(grid, mu_zero_params):
    z = ResolventField(np.zeros(grid.n), np.zeros(grid.n), np.zeros(grid.n + 1),
                       np.zeros(grid.n + 1), np.zeros(grid.n), np.zeros(grid.n + 1))
    out = apply_A(z, mu_zero_params, grid)
    assert all(np.all(f == 0.0) for f in out.as_tuple())


def test_apply_A_heat_flux_mode(grid):
    # only q = sin(pi x): component 6 = (beta/tau) q, component 5 = q_x / rho3
    p = PhysicalParams(rho1=1, rho2=1, rho3=2, b=1, k=1, delta=1, beta=3, tau=2)
    q = np.sin(np.pi * grid.nodes)
    q[0] = q[-1] = 0.0
    v = ResolventField(np.zeros(grid.n), np.zeros(grid.n), np.zeros(grid.n + 1),
                       np.zeros(grid.n + 1), np.zeros(grid.n), q)
    out = apply_A(v, p, grid)
    assert np.allclose(out.v6[1:-1], (3.0 / 2.0) * q[1:-1], atol=1e-14)
    exact5 = np.pi * np.cos(np.pi * grid.centers) / 2.0
    assert np.max(np.abs(out.v5 - exact5)) < 10.0 * grid.dx ** 2


def test_monotonicity_identity_exact(mu_zero_params):
    # <A V, V>_H == beta int q^2 to rounding on the staggered layout
    rng = np.random.default_rng(1)
    for n in (32, 64, 128):
        g = Grid(n)
        for _ in range(10):
            v = random_admissible_field(g, rng)
            defect = monotonicity_defect(v, mu_zero_params, g)
            assert abs(defect) <= 1e-12 * inner_h(v, v, mu_zero_params, g)


def test_resolvent_solves_homogeneous(grid, mu_zero_params):
    w = ResolventField(np.zeros(grid.n), np.zeros(grid.n), np.zeros(grid.n + 1),
                       np.zeros(grid.n + 1), np.zeros(grid.n), np.zeros(grid.n + 1))
    v = solve_resolvent(ResolventProblem(mu_zero_params, grid, w))
    assert max(np.max(np.abs(f)) for f in v.as_tuple()) < 1e-14


def test_manufactured_convergence(mu_zero_params):
    order, errs = convergence_order(mu_zero_params, ns=(32, 64, 128))
    assert order >= 1.9
    assert errs[0] > errs[1] > errs[2]


def test_strong_residual_machine_level(mu_zero_params):
    g = Grid(64)
    _, w = manufactured_problem(mu_zero_params, g)
    prob = ResolventProblem(mu_zero_params, g, w)
    v = solve_resolvent(prob)
    assert residual(prob, v) <= 1e-8


def test_recovered_fields_admissible(mu_zero_params):
    g = Grid(64)
    _, w = manufactured_problem(mu_zero_params, g)
    v = solve_resolvent(ResolventProblem(mu_zero_params, g, w))
    # v in D(A): v4 and v6 carry the endpoint conditions as well
    validate_member(g, v, enforce_d_a=True, what="V")


def test_v6_recovery_consistency(mu_zero_params):
    # cumulative recovery vs the sixth equation of the system
    g = Grid(64)
    _, w = manufactured_problem(mu_zero_params, g)
    prob = ResolventProblem(mu_zero_params, g, w)
    v = solve_resolvent(prob)
    alt = v6_from_equation(prob, v)
    assert np.max(np.abs(alt[1:-1] - v.v6[1:-1])) < 1e-12


def test_problem_validation_rejects_bad_w(grid, mu_zero_params):
    w = ResolventField(np.ones(grid.n), np.zeros(grid.n), np.zeros(grid.n + 1),
                       np.zeros(grid.n + 1), np.zeros(grid.n), np.zeros(grid.n + 1))
    with pytest.raises(ValidationError):
        ResolventProblem(mu_zero_params, grid, w)  # w1 mean not zero


def test_bilinear_form_positive(mu_zero_params):
    g = Grid(48)
    rng = np.random.default_rng(2)
    for _ in range(200):
        v = random_reduced_triple(g, rng)
        assert bilinear_form(v, v, mu_zero_params, g) > 0.0


def test_rayleigh_quotient_scale_invariant(mu_zero_params):
    g = Grid(48)
    rng = np.random.default_rng(3)
    v = random_reduced_triple(g, rng)
    q1 = bilinear_form(v, v, mu_zero_params, g) / lambda_norm_sq(v, g)
    v_scaled = tuple(3.7 * f for f in v)
    q2 = bilinear_form(v_scaled, v_scaled, mu_zero_params, g) / lambda_norm_sq(v_scaled, g)
    assert q1 == pytest.approx(q2, rel=1e-12)


def test_coercivity_positive(mu_zero_params, ones_params):
    for p in (mu_zero_params, ones_params):
        est = coercivity_estimate(p, Grid(32), n_samples=200, seed=0)
        assert est > 0.0
