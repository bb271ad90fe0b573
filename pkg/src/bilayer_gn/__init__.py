"""Two-layer Green-Naghdi internal-wave model with medium-amplitude topography."""

from .regime import ModelCoefficients, RegimeBounds, RegimeParams, compute_coefficients, validate_regime
from .grid import PeriodicGrid
from .fields import Bathymetry, DerivedFields, State, derive, make_bathymetry
from .elliptic import TOperator
from .dynamics import rhs_primitive, rhs_quasilinear, simulate, step_rk4
from .diagnostics import bottom_norms, check_conditions, energy, growth_bound_fit, order_study
from .scenario import Scenario, default_scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "Bathymetry",
    "DerivedFields",
    "ModelCoefficients",
    "PeriodicGrid",
    "RegimeBounds",
    "RegimeParams",
    "Scenario",
    "State",
    "TOperator",
    "bottom_norms",
    "check_conditions",
    "compute_coefficients",
    "default_scenario",
    "derive",
    "energy",
    "growth_bound_fit",
    "load_scenario",
    "make_bathymetry",
    "order_study",
    "rhs_primitive",
    "rhs_quasilinear",
    "simulate",
    "step_rk4",
    "validate_regime",
]
