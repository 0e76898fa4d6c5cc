"""Independent reference solutions used to validate the grid solver."""
from ..phasespace import GaussianMoments
from .fock import (
    DEFAULT_BASIS,
    FockDensityMatrix,
    MasterEquation,
    coherent_state,
    from_position,
    hermite_functions,
    momentum_operator,
    position_operator,
    potential_matrix,
    propagate_density,
)
from .kramers import kramers_stationary, stationarity_residual
from .moments import drift_system, moment_fixed_point, moment_rhs, moment_trajectory

__all__ = [
    "DEFAULT_BASIS",
    "FockDensityMatrix",
    "GaussianMoments",
    "MasterEquation",
    "coherent_state",
    "drift_system",
    "from_position",
    "hermite_functions",
    "kramers_stationary",
    "moment_fixed_point",
    "moment_rhs",
    "moment_trajectory",
    "momentum_operator",
    "position_operator",
    "potential_matrix",
    "propagate_density",
    "stationarity_residual",
]
