"""Discretised phase space: grid geometry, Wigner fields and their observables."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Tuple, Union

import numpy as np

from .derivatives import SCHEMES, SPECTRAL, make_ops
from .errors import BadCovariance, GridMismatch, NonHermitianInput, NotAQuantumState

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform rectangular grid over ``[q_min, q_max) x [p_min, p_max)``.

    Nodes are ``q_min + i * dq`` for ``i < n_q`` (the right edge is excluded,
    as befits a periodic box); likewise for ``p``.
    """

    q_min: float = -8.0
    q_max: float = 8.0
    p_min: float = -8.0
    p_max: float = 8.0
    n_q: int = 256
    n_p: int = 256
    derivative_scheme: str = SPECTRAL

    def __post_init__(self):
        for name in ("q_min", "q_max", "p_min", "p_max"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if not self.q_max > self.q_min or not self.p_max > self.p_min:
            raise ValueError("grid extents must satisfy q_max > q_min and p_max > p_min")
        for name in ("n_q", "n_p"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {n!r}")
            object.__setattr__(self, name, int(n))
        if self.derivative_scheme not in SCHEMES:
            raise ValueError(
                f"derivative_scheme must be one of {SCHEMES}, got {self.derivative_scheme!r}")

    @classmethod
    def symmetric(cls, q_extent: float, p_extent: float, n_q: int, n_p: int | None = None,
                  derivative_scheme: str = SPECTRAL) -> "PhaseSpaceGrid":
        """Grid on ``[-q_extent, q_extent) x [-p_extent, p_extent)``."""
        return cls(-q_extent, q_extent, -p_extent, p_extent, n_q, n_p or n_q, derivative_scheme)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_q, self.n_p)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_q

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def cell_area(self) -> float:
        return self.dq * self.dp

    @cached_property
    def q(self) -> np.ndarray:
        out = self.q_min + self.dq * np.arange(self.n_q)
        out.flags.writeable = False
        return out

    @cached_property
    def p(self) -> np.ndarray:
        out = self.p_min + self.dp * np.arange(self.n_p)
        out.flags.writeable = False
        return out

    @cached_property
    def Q(self) -> np.ndarray:
        """Position coordinate broadcast to shape ``(n_q, 1)``."""
        return self.q[:, None]

    @cached_property
    def P(self) -> np.ndarray:
        """Momentum coordinate broadcast to shape ``(1, n_p)``."""
        return self.p[None, :]

    @cached_property
    def ops(self):
        return make_ops(self.derivative_scheme, self.n_q, self.n_p, self.dq, self.dp)

    def edge_mask(self, fraction: float = 1.0 / 16.0) -> np.ndarray:
        """Boolean mask of the cells within ``fraction`` of the box edges."""
        wq = max(1, int(round(fraction * self.n_q)))
        wp = max(1, int(round(fraction * self.n_p)))
        mask = np.zeros(self.shape, dtype=bool)
        mask[:wq, :] = mask[-wq:, :] = True
        mask[:, :wp] = mask[:, -wp:] = True
        return mask


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class WignerState:
    """Snapshot of a Wigner function on a grid.

    ``values[i, j]`` is ``W(q_i, p_j)``.  The array is copied on construction
    and made read-only.
    """

    grid: PhaseSpaceGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.grid.shape:
            raise GridMismatch(f"field shape {values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Wigner field contains non-finite values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time", float(self.time))

    def with_values(self, values, time: float | None = None) -> "WignerState":
        return WignerState(self.grid, values, self.time if time is None else time)

    def mass(self) -> float:
        return mass(self)

    def moments(self) -> "GaussianMoments":
        return GaussianMoments.from_state(self)


@dataclass(frozen=True, eq=False)
class DensityMatrixGrid:
    """Position-representation density matrix ``rho[i, j] = <q_i|rho|q_j>``."""

    q: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float, copy=True)
        values = np.array(self.values, dtype=complex, copy=True)
        if q.ndim != 1 or values.shape != (q.size, q.size):
            raise GridMismatch(f"density matrix shape {values.shape} does not match axis of "
                               f"length {q.size}")
        q.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "values", values)

    @property
    def dq(self) -> float:
        return float(self.q[1] - self.q[0])

    def trace(self) -> float:
        return float(np.real(np.trace(self.values)) * self.dq)

    def hermiticity_error(self) -> float:
        scale = max(float(np.max(np.abs(self.values))), np.finfo(float).tiny)
        return float(np.max(np.abs(self.values - self.values.conj().T)) / scale)

    @classmethod
    def from_wavefunction(cls, q, psi) -> "DensityMatrixGrid":
        psi = np.asarray(psi, dtype=complex)
        return cls(q, np.outer(psi, psi.conj()))


def wigner_from_density_matrix(rho: DensityMatrixGrid, grid: PhaseSpaceGrid, hbar: float = 1.0,
                               *, return_residue: bool = False):
    """Wigner transform of a position-space density matrix.

    For each grid point ``q_i`` the off-diagonal samples ``rho(q_i - y, q_i + y)``
    with ``y = j dq`` are Fourier-summed against ``exp(2 i p y / hbar)``;
    samples that would fall outside the box are taken as zero.  The sum is a
    direct DFT so any momentum grid inside the alias-free band
    ``|p| <= pi hbar / (2 dq)`` is allowed.

    Returns the :class:`WignerState`, or ``(state, residue)`` when
    ``return_residue`` is set, where ``residue`` is the discarded imaginary
    part relative to ``max |W|``.
    """
    n = grid.n_q
    if rho.q.size != n or not np.allclose(rho.q, grid.q, rtol=0, atol=1e-9 * max(1.0, grid.dq)):
        raise GridMismatch("density-matrix q axis does not match the grid q axis")
    herm = rho.hermiticity_error()
    if herm > HERMITIAN_TOL:
        raise NonHermitianInput(f"density matrix is not Hermitian (relative error {herm:.3g})")
    band = math.pi * hbar / (2.0 * grid.dq)
    p_edge = max(abs(grid.p_min), abs(grid.p_max - grid.dp))
    if p_edge > band * (1 + 1e-12):
        raise GridMismatch(
            f"momentum grid reaches |p|={p_edge:.6g}, beyond the alias-free band "
            f"pi*hbar/(2*dq)={band:.6g}")

    idx = np.arange(n)
    shifts = np.arange(-(n - 1), n)
    left = idx[:, None] - shifts[None, :]
    right = idx[:, None] + shifts[None, :]
    inside = (left >= 0) & (left < n) & (right >= 0) & (right < n)
    samples = np.zeros((n, shifts.size), dtype=complex)
    samples[inside] = rho.values[left[inside], right[inside]]

    phase = np.exp(2j * np.outer(shifts * grid.dq, grid.p) / hbar)
    field = samples @ phase * (grid.dq / (math.pi * hbar))

    scale = max(float(np.max(np.abs(field.real))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(field.imag))) / scale
    if residue > IMAG_RESIDUE_TOL:
        raise NonHermitianInput(f"imaginary residue {residue:.3g} of the Wigner transform")
    log.debug("Wigner transform imaginary residue %.3g (discarded)", residue)
    state = WignerState(grid, field.real)
    return (state, residue) if return_residue else state


def mass(W: WignerState) -> float:
    """Riemann sum of the field over the grid."""
    return float(W.grid.cell_area * np.sum(W.values))


def marginals(W: WignerState) -> Tuple[np.ndarray, np.ndarray]:
    """Position and momentum densities ``(int dp W, int dq W)``."""
    position = W.grid.dp * np.sum(W.values, axis=1)
    momentum = W.grid.dq * np.sum(W.values, axis=0)
    return position, momentum


Observable = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray, float]


def expectation(W: WignerState, f: Observable) -> float:
    """Phase-space average ``sum f(q, p) W dq dp``.

    ``f`` may be a callable ``f(q, p)`` broadcasting over ``grid.Q``/``grid.P``,
    an array of grid shape, or a scalar.
    """
    grid = W.grid
    if callable(f):
        f = f(grid.Q, grid.P)
    f = np.broadcast_to(np.asarray(f, dtype=float), grid.shape)
    if not np.all(np.isfinite(f)):
        raise ValueError("observable is not finite on the grid")
    return float(grid.cell_area * np.sum(f * W.values))


@dataclass(frozen=True)
class GaussianMoments:
    """First and second moments ``(<q>, <p>, s_qq, s_pp, s_pq)`` of a phase-space density."""

    mean_q: float = 0.0
    mean_p: float = 0.0
    sigma_qq: float = 0.5
    sigma_pp: float = 0.5
    sigma_pq: float = 0.0

    FIELDS = ("mean_q", "mean_p", "sigma_qq", "sigma_pp", "sigma_pq")

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.mean_q, self.mean_p])

    @property
    def covariance(self) -> np.ndarray:
        return np.array([[self.sigma_qq, self.sigma_pq], [self.sigma_pq, self.sigma_pp]])

    @property
    def determinant(self) -> float:
        return self.sigma_qq * self.sigma_pp - self.sigma_pq ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.mean_q, self.mean_p, self.sigma_qq, self.sigma_pp, self.sigma_pq])

    @classmethod
    def from_array(cls, arr) -> "GaussianMoments":
        return cls(*(float(x) for x in arr))

    @classmethod
    def from_mean_cov(cls, mean, cov) -> "GaussianMoments":
        return cls(float(mean[0]), float(mean[1]), float(cov[0][0]), float(cov[1][1]),
                   float(cov[0][1]))

    @classmethod
    def from_state(cls, W: WignerState) -> "GaussianMoments":
        """Moments of a grid field (no division by the mass)."""
        grid = W.grid
        w = W.values * grid.cell_area
        q, p = grid.Q, grid.P
        with np.errstate(over="ignore", invalid="ignore"):
            mq = np.sum(q * w)
            mp = np.sum(p * w)
            sqq = np.sum(q * q * w) - mq * mq
            spp = np.sum(p * p * w) - mp * mp
            spq = np.sum(q * p * w) - mq * mp
        return cls(float(mq), float(mp), float(sqq), float(spp), float(spq))

    def is_admissible(self, hbar: float, rtol: float = 1e-12) -> bool:
        return self.determinant >= hbar ** 2 / 4.0 * (1.0 - rtol)


def gaussian_wigner(moments: GaussianMoments, grid: PhaseSpaceGrid, hbar: float = 1.0,
                    time: float = 0.0) -> WignerState:
    """Normalised bivariate Gaussian with the given moments, sampled on ``grid``."""
    s_qq, s_pp, s_pq = moments.sigma_qq, moments.sigma_pp, moments.sigma_pq
    det = moments.determinant
    if not (s_qq > 0 and s_pp > 0 and det > 0):
        raise BadCovariance(f"covariance is not positive definite (s_qq={s_qq}, s_pp={s_pp}, "
                            f"det={det})")
    if not moments.is_admissible(hbar):
        raise NotAQuantumState(
            f"s_qq*s_pp - s_pq^2 = {det:.6g} < hbar^2/4 = {hbar ** 2 / 4:.6g}")
    dq = grid.Q - moments.mean_q
    dp = grid.P - moments.mean_p
    quad = (s_pp * dq * dq - 2.0 * s_pq * dq * dp + s_qq * dp * dp) / det
    values = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return WignerState(grid, values, time)


def l2_distance(a: WignerState, b: WignerState) -> float:
    """Continuum L2 norm of ``a - b`` on a shared grid."""
    if a.grid != b.grid:
        raise GridMismatch("states live on different grids")
    return float(math.sqrt(a.grid.cell_area * np.sum((a.values - b.values) ** 2)))


def l1_distance(a: WignerState, b: WignerState) -> float:
    if a.grid != b.grid:
        raise GridMismatch("states live on different grids")
    return float(a.grid.cell_area * np.sum(np.abs(a.values - b.values)))


def edge_mass(W: WignerState, fraction: float = 1.0 / 16.0) -> float:
    """Absolute mass in the outer band of the box; a leakage diagnostic."""
    mask = W.grid.edge_mask(fraction)
    return float(W.grid.cell_area * np.sum(np.abs(W.values[mask])))
