import numpy as np
import pytest

from timosim import DampingSpec, Grid, HSpec, InitialData, PhysicalParams, rhs, shear
from timosim.diagnostics import dissipation, energy_rate, random_admissible_state
from timosim.discretization import (StaggeredState, state_from_initial_data,
                                    zero_state)
from timosim.errors import ValidationError


def make_state(grid, **fields):
    base = zero_state(grid)
    return StaggeredState(grid, 0.0,
                          fields.get("phi", base.phi), fields.get("phit", base.phit),
                          fields.get("psi", base.psi), fields.get("psit", base.psit),
                          fields.get("theta", base.theta), fields.get("q", base.q))


def test_grid_dx_exact():
    for n in (8, 48, 128, 100):
        g = Grid(n)
        assert abs(g.dx * n - 1.0) <= np.finfo(float).eps


def test_grid_too_small():
    with pytest.raises(ValidationError):
        Grid(4)


def test_shear_rigid_translation(grid):
    st = make_state(grid, phi=np.full(grid.n, 3.7))
    assert np.all(shear(st) == 0.0)


def test_shear_psi_only(grid):
    psi = np.sin(np.pi * grid.nodes)
    psi[0] = psi[-1] = 0.0
    st = make_state(grid, psi=psi)
    s = shear(st)
    assert np.allclose(s[1:-1], psi[1:-1], atol=1e-15)
    assert s[0] == 0.0 and s[-1] == 0.0


def test_shear_second_order_convergence():
    errs = []
    for n in (32, 64, 128, 256):
        g = Grid(n)
        st = make_state(g, phi=np.sin(np.pi * g.centers) / np.pi)
        s = shear(st)
        exact = np.cos(np.pi * g.nodes)
        errs.append(np.max(np.abs(s[1:-1] - exact[1:-1])))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_rhs_zero_equilibrium(grid, mu_zero_params, linear_damping):
    d = rhs(zero_state(grid), 0.0, mu_zero_params, linear_damping)
    for f in (d.phi, d.phit, d.psi, d.psit, d.theta, d.q):
        assert np.all(f == 0.0)


def test_rhs_thermal_mode(linear_damping):
    # theta = cos(pi x), rest 0, beta = tau = 1: q_t = pi sin(pi x), theta_t = 0
    p = PhysicalParams(rho1=1, rho2=1, rho3=1, b=1, k=1, delta=1, beta=1, tau=1)
    errs = []
    for n in (32, 64, 128):
        g = Grid(n)
        st = make_state(g, theta=np.cos(np.pi * g.centers))
        d = rhs(st, 0.0, p, linear_damping)
        assert np.allclose(d.theta, 0.0, atol=1e-14)
        exact = np.pi * np.sin(np.pi * g.nodes)
        errs.append(np.max(np.abs(d.q[1:-1] - exact[1:-1])))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_rhs_decoupling_as_delta_vanishes(grid, linear_damping):
    # with delta at the underflow floor the thermal block ignores psi_t
    p = PhysicalParams(rho1=1, rho2=3, rho3=1, b=1, k=1, delta=1e-300, beta=1, tau=2)
    psit = np.sin(2 * np.pi * grid.nodes)
    psit[0] = psit[-1] = 0.0
    st1 = make_state(grid, theta=np.cos(np.pi * grid.centers))
    st2 = make_state(grid, theta=np.cos(np.pi * grid.centers), psit=psit)
    d1 = rhs(st1, 0.0, p, linear_damping)
    d2 = rhs(st2, 0.0, p, linear_damping)
    assert np.max(np.abs(d1.theta - d2.theta)) < 1e-290
    assert np.max(np.abs(d1.q - d2.q)) < 1e-290


def test_exact_mean_conservation(mu_zero_params, cubic_damping):
    g = Grid(96)
    rng = np.random.default_rng(3)
    for _ in range(10):
        st = random_admissible_state(g, rng)
        d = rhs(st, 0.5, mu_zero_params, cubic_damping)
        assert abs(np.sum(d.theta) * g.dx) < 1e-14
        assert abs(np.sum(d.phit) * g.dx) < 1e-14


def test_semidiscrete_energy_identity(mu_zero_params, cubic_damping):
    # chain-rule derivative of E along the flow == closed-form dissipation
    g = Grid(128)
    rng = np.random.default_rng(11)
    for _ in range(10):
        st = random_admissible_state(g, rng)
        lhs = energy_rate(st, 0.7, mu_zero_params, cubic_damping)
        rhs_ = dissipation(st, 0.7, mu_zero_params, cubic_damping)
        assert lhs == pytest.approx(rhs_, rel=1e-12, abs=1e-13)


def test_manufactured_spatial_order(mu_zero_params, linear_damping):
    # smooth fields with analytic accelerations; residual orders >= 1.9
    p = mu_zero_params

    def exact_fields(g):
        xc, xn = g.centers, g.nodes
        phi = np.cos(np.pi * xc) / np.pi
        psi = np.sin(np.pi * xn)
        theta = np.cos(2 * np.pi * xc)
        q = np.sin(2 * np.pi * xn)
        return phi, psi, theta, q

    errs = []
    for n in (32, 64, 128, 256):
        g = Grid(n)
        phi, psi, theta, q = exact_fields(g)
        psi[0] = psi[-1] = 0.0
        q[0] = q[-1] = 0.0
        st = make_state(g, phi=phi, psi=psi, theta=theta, q=q)
        d = rhs(st, 0.0, p, linear_damping)
        xc, xn = g.centers, g.nodes
        # phi_tt = (k/rho1) (phi_xx + psi_x)
        acc_phi = (p.k / p.rho1) * (-np.pi * np.cos(np.pi * xc) + np.pi * np.cos(np.pi * xc))
        # psi_tt = (b psi_xx - k (phi_x + psi) - delta theta_x)/rho2
        acc_psi = (p.b * (-np.pi ** 2 * np.sin(np.pi * xn))
                   - p.k * (-np.sin(np.pi * xn) + np.sin(np.pi * xn))
                   - p.delta * (-2 * np.pi * np.sin(2 * np.pi * xn))) / p.rho2
        acc_q = -(p.beta * np.sin(2 * np.pi * xn)
                  - 2 * np.pi * np.sin(2 * np.pi * xn)) / p.tau
        err = max(np.max(np.abs(d.phit - acc_phi)),
                  np.max(np.abs(d.psit[1:-1] - acc_psi[1:-1])),
                  np.max(np.abs(d.q[1:-1] - acc_q[1:-1])))
        errs.append(err)
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_state_boundary_enforced(grid):
    psi = np.ones(grid.n + 1)
    with pytest.raises(ValidationError):
        make_state(grid, psi=psi)


def test_initial_state_normalized(grid):
    data = InitialData(phi0=((0, 5.0), (1, 1.0)), theta0=((0, 2.0), (2, 0.5)))
    st = state_from_initial_data(grid, data)
    assert abs(np.sum(st.phi) * grid.dx) < 1e-12
    assert abs(np.sum(st.theta) * grid.dx) < 1e-12
    assert np.allclose(st.phi, np.cos(np.pi * grid.centers), atol=1e-12)
