"""Structure-preserving simulator and decay-rate verifier for a nonlinear
Timoshenko beam coupled to second-sound (Cattaneo) heat conduction."""

from .decay import (DecayProfile, Envelope, H, H1, H1_inv, H2, H2_inv,
                    convex_conjugate, envelope_eval, fit_envelope)
from .diagnostics import (LyapunovWeights, dissipation, energy, k1, k2, k3, k4,
                          lyapunov, second_energy, solve_w)
from .discretization import Grid, StaggeredState, rhs, shear, state_from_initial_data
from .integrate import RunConfig, SimReport, TimeScheme, run, step
from .model import (AlphaSpec, DampingSpec, HSpec, InitialData, PhysicalParams,
                    normalize_initial_data, sample_alpha, sample_damping,
                    stability_number)
from .resolvent import (ResolventField, ResolventProblem, apply_A,
                        coercivity_estimate, solve_resolvent)

__version__ = "0.1.0"

__all__ = [
    "AlphaSpec", "DampingSpec", "DecayProfile", "Envelope", "Grid", "H",
    "H1", "H1_inv", "H2", "H2_inv", "HSpec", "InitialData",
    "LyapunovWeights", "PhysicalParams", "ResolventField",
    "ResolventProblem", "RunConfig", "SimReport", "StaggeredState",
    "TimeScheme", "apply_A", "coercivity_estimate", "convex_conjugate",
    "dissipation", "energy", "envelope_eval", "fit_envelope", "k1", "k2",
    "k3", "k4", "lyapunov", "normalize_initial_data", "rhs", "run",
    "sample_alpha", "sample_damping", "second_energy", "shear",
    "solve_resolvent", "solve_w", "stability_number",
    "state_from_initial_data", "step",
]
