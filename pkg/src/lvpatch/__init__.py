"""Numerical laboratory for the two-patch almost-periodic Lotka-Volterra
competition system with diffusion."""

from .almostperiod import AlmostPeriodCandidate, almost_period_scan, defect, predicted_shifts
from .bounds import DispersalReport, RegionEstimate, check_dispersal_bound, estimate_ultimate_bounds
from .coeffs import QuasiPeriodicCoefficient, Term, empirical_extrema, evaluate, inf_bound, sup_bound
from .integrator import IntegrationOptions, StepUnderflow, Trajectory, integrate, integrate_batch, sample
from .model import (
    PairedState,
    ParameterError,
    State,
    SystemParams,
    adjoint_rhs,
    example51_params,
    rhs,
    validate_params,
)
from .stability import (
    ConditionReport,
    ConvergenceReport,
    DecayReport,
    attractivity_experiment,
    check_contraction,
    lyapunov_value,
    verify_decay,
)

__version__ = "0.1.0"
