"""Thermal stationary state of the Kramers equation and a stationarity certificate."""
from __future__ import annotations

import numpy as np

from ..errors import NotNormalizable
from ..evolution import full_rhs
from ..params import LindbladParams
from ..phasespace import PhaseSpaceGrid, WignerState
from ..potentials import Potential


def kramers_stationary(potential: Potential, mass: float, kT: float,
                       grid: PhaseSpaceGrid) -> WignerState:
    """``N exp(-p^2 / 2 m kT - U(q) / kT)`` normalised by grid quadrature.

    Only confining potentials (``U -> inf`` faster than ``ln|q|``) have a
    normalisable thermal state.
    """
    if not kT > 0:
        raise ValueError(f"kT must be positive, got {kT!r}")
    if not potential.is_confining():
        raise NotNormalizable(f"exp(-U/kT) is not normalisable for the {potential.kind} potential")
    u = np.asarray(potential.value(grid.q, mass), dtype=float)
    # shift by the minimum on the grid to avoid overflow; normalisation absorbs it
    boltz_q = np.exp(-(u - u.min()) / kT)
    boltz_p = np.exp(-grid.p ** 2 / (2.0 * mass * kT))
    values = np.outer(boltz_q, boltz_p)
    total = grid.cell_area * values.sum()
    return WignerState(grid, values / total)


def stationarity_residual(W: WignerState, potential: Potential, params: LindbladParams,
                          truncation: int | None = None) -> float:
    """``max|dW/dt| / max|W|``; zero for the zero field."""
    scale = float(np.max(np.abs(W.values)))
    if scale == 0.0:
        return 0.0
    rhs = full_rhs(W, potential, params, truncation).total
    return float(np.max(np.abs(rhs))) / scale
