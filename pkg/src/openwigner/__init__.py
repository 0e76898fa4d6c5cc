"""Wigner-function dynamics of one-dimensional open quantum systems."""
from .errors import *  # noqa: F401,F403
from .evolution import (
    RhsField,
    WignerGenerator,
    classical_rhs,
    dissipator_rhs,
    full_rhs,
    quantum_rhs,
    series_convergence,
)
from .integrate import RunConfig, TrajectoryRecord, evolve, step
from .params import LindbladOpCoeffs, LindbladParams, ValidationReport, coefficients_from_ops, validate
from .phasespace import (
    DensityMatrixGrid,
    GaussianMoments,
    PhaseSpaceGrid,
    WignerState,
    expectation,
    gaussian_wigner,
    marginals,
    mass,
    wigner_from_density_matrix,
)
from .potentials import (
    Cosine,
    Exponential,
    Free,
    Harmonic,
    InvertedParabola,
    Linear,
    Polynomial,
    Potential,
    Quartic,
    correction_depth,
)

__version__ = "0.1.0"
