import numpy as np
import pytest

from timosim import DampingSpec, Grid, HSpec, InitialData, PhysicalParams


@pytest.fixture
def mu_zero_params():
    # (tau - rho1/(k rho3)) (rho2/b - rho1/k) = 1*2, tau delta^2 rho1/(b k rho3) = 2
    return PhysicalParams(rho1=1, rho2=3, rho3=1, b=1, k=1, delta=1, beta=1, tau=2)


@pytest.fixture
def ones_params():
    return PhysicalParams(*([1.0] * 8))


@pytest.fixture
def grid():
    return Grid(64)


@pytest.fixture
def linear_damping():
    return DampingSpec(h=HSpec(kind="linear", c=1.0))


@pytest.fixture
def cubic_damping():
    return DampingSpec(h=HSpec(kind="power", c=1.0, p=3.0))


@pytest.fixture
def default_ic():
    return InitialData(
        phi0=((1, 0.4),), phi1=((2, 0.25),), psi0=((1, 0.5),),
        psi1=((2, 0.3),), theta0=((1, 0.5),), q0=((1, 0.3),))


def rng(seed=0):
    return np.random.default_rng(seed)
