import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timosim import (AlphaSpec, DampingSpec, Grid, HSpec, InitialData,
                     PhysicalParams, normalize_initial_data, sample_alpha,
                     sample_damping, stability_number)
from timosim.errors import DomainError, ValidationError
from timosim.model import subtract_mean


def test_stability_number_all_ones(ones_params):
    assert stability_number(ones_params) == pytest.approx(-1.0, abs=1e-15)


def test_stability_number_mu_zero(mu_zero_params):
    # (tau - 1)(rho2 - 1) - tau = 0 solved by tau = 2 at rho2 = 3
    assert stability_number(mu_zero_params) == pytest.approx(0.0, abs=1e-15)


def test_stability_number_vanishing_first_factor():
    # tau = rho1/(k rho3) kills the first factor; delta -> 0 kills the second term
    p = PhysicalParams(rho1=2, rho2=5, rho3=1, b=2, k=1, delta=1e-160, beta=1, tau=2)
    assert abs(stability_number(p)) < 1e-300


@settings(max_examples=50, deadline=None)
@given(lam=st.floats(min_value=1e-3, max_value=1e3))
def test_stability_number_scaling_invariance(lam):
    p = PhysicalParams(rho1=1, rho2=3, rho3=1, b=1, k=1, delta=1, beta=1, tau=2)
    scaled = PhysicalParams(rho1=lam * p.rho1, rho2=p.rho2, rho3=p.rho3, b=p.b,
                            k=lam * p.k, delta=p.delta, beta=p.beta, tau=p.tau)
    assert stability_number(scaled) == pytest.approx(stability_number(p), abs=1e-12)


def test_params_positivity_enforced():
    with pytest.raises(ValidationError) as exc:
        PhysicalParams(rho1=-1, rho2=3, rho3=1, b=1, k=1, delta=1, beta=1, tau=2)
    assert "params.rho1" in exc.value.paths


def test_sample_damping_linear():
    spec = DampingSpec(h=HSpec(kind="linear", c=2.0))
    assert sample_damping(spec, 0.5) == pytest.approx(1.0)


def test_sample_damping_cubic_odd_extension():
    spec = DampingSpec(h=HSpec(kind="power", c=1.0, p=3.0))
    assert sample_damping(spec, -0.5) == pytest.approx(-0.125)


def test_sample_alpha_reciprocal():
    spec = DampingSpec(alpha=AlphaSpec(kind="reciprocal", a=1.0))
    assert sample_alpha(spec, 3.0) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        sample_alpha(spec, -1.0)


@pytest.mark.parametrize("h", [
    HSpec(kind="linear", c=0.7),
    HSpec(kind="power", c=1.0, p=1.0),
    HSpec(kind="power", c=0.5, p=3.0),
    HSpec(kind="power", c=1.0, p=5.0),
    HSpec(kind="exp_inv"),
    HSpec(kind="exp_inv_sq"),
    HSpec(kind="log_sq"),
])
def test_catalog_structure(h):
    h.validate_sampled()
    s = np.linspace(-3.0, 3.0, 601)
    vals = h.h(s)
    assert np.all(s * vals >= -1e-15)          # dissipativity sign condition
    assert np.all(np.diff(vals) >= -1e-12)     # nondecreasing
    assert h.h(0.0) == 0.0
    # odd extension
    assert np.allclose(h.h(-s), -vals, atol=1e-15)


def test_linear_growth_bounds_beyond_epsilon():
    h = HSpec(kind="power", c=1.0, p=3.0, epsilon=1.0)
    s = np.linspace(1.0, 10.0, 50)
    vals = np.abs(h.h(s))
    assert np.all(vals >= h.c1 * s - 1e-12)
    assert np.all(vals <= h.c2 * s + 1e-12)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(min_value=-5.0, max_value=5.0), c=st.floats(min_value=0.1, max_value=3.0),
       p=st.floats(min_value=1.0, max_value=4.0))
def test_damping_odd_and_dissipative(s, c, p):
    h = HSpec(kind="power", c=c, p=p)
    assert h.h(-s) == pytest.approx(-h.h(s), abs=1e-12)
    assert s * h.h(s) >= -1e-15


def test_alpha_monotone_decreasing():
    spec = AlphaSpec(kind="reciprocal", a=2.0)
    ts = np.linspace(0.0, 100.0, 500)
    vals = spec(ts)
    assert np.all(np.diff(vals) <= 0.0)
    assert np.all(vals > 0.0)
    const = AlphaSpec(kind="constant", a=0.3)
    assert np.all(np.diff(const(ts)) == 0.0)


def test_alpha_integral_closed_forms():
    rec = AlphaSpec(kind="reciprocal", a=2.0)
    assert rec.integral(3.0) == pytest.approx(2.0 * math.log(4.0))
    const = AlphaSpec(kind="constant", a=0.5)
    assert const.integral(8.0) == pytest.approx(4.0)


def test_custom_table_domain_error():
    h = HSpec(kind="custom", table_s=(0.0, 0.5, 1.0), table_h=(0.0, 0.2, 0.6))
    assert h.h0(0.5) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        h.h0(2.0)


def test_normalize_strips_constants():
    data = InitialData(phi0=((0, 5.0), (1, 1.0)), phi1=((0, 2.0), (2, 3.0)),
                       theta0=((0, 1.0), (1, 1.0)))
    out = normalize_initial_data(data)
    assert out.phi0 == ((1, 1.0),)
    assert out.phi1 == ((2, 3.0),)
    assert out.theta0 == ((1, 1.0),)


def test_normalize_identity_on_admissible():
    data = InitialData(theta0=((1, 1.0), (3, 0.2)))
    assert normalize_initial_data(data).theta0 == data.theta0


def test_mean_subtraction_by_quadrature(grid):
    # phi1 = 2 + 3 cos(2 pi x): midpoint-rule mean of the cosine is exactly 0
    vals = 2.0 + 3.0 * np.cos(2 * np.pi * grid.centers)
    out = subtract_mean(vals, grid.dx)
    assert np.allclose(out, 3.0 * np.cos(2 * np.pi * grid.centers), atol=1e-13)
    assert abs(np.sum(out) * grid.dx) < 1e-13


def test_initial_data_admissibility(grid):
    from timosim import state_from_initial_data

    data = InitialData(kind="random", seed=7, modes=5, amplitude=0.8)
    st_ = state_from_initial_data(grid, data)
    assert abs(np.sum(st_.phi) * grid.dx) < 1e-14
    assert abs(np.sum(st_.theta) * grid.dx) < 1e-14
    for f in (st_.psi, st_.psit, st_.q):
        assert f[0] == 0.0 and f[-1] == 0.0
    # Neumann ends for phi are encoded through the cosine basis
    fourier = InitialData(phi0=((2, 1.0),))
    x = np.array([0.0, 1.0])
    dphi = -2 * np.pi * np.sin(2 * np.pi * x)
    assert np.allclose(dphi, 0.0, atol=1e-12)


def test_damping_validator_rejects_decreasing_table():
    with pytest.raises(ValidationError):
        HSpec(kind="custom", table_s=(0.0, 0.5, 0.4), table_h=(0.0, 0.1, 0.2))
