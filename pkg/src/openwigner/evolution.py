"""Right-hand side of the open-system Wigner equation.

    dW/dt = -(p/m) dW/dq + U'(q) dW/dp                       (classical)
            + sum_n (-1)^n hbar^2n / (2^2n (2n+1)!) U^(2n+1) d^(2n+1)W/dp^(2n+1)
                                                              (quantum)
            + (lam - mu) d(qW)/dq + (lam + mu) d(pW)/dp
            + D_qq W_qq + D_pp W_pp + 2 D_pq W_qp              (dissipative)

For ``U = U0 cos(kq)`` the force term and the whole series sum to
``U'(q) [W(p + hbar k/2) - W(p - hbar k/2)] / (hbar k)``, which is used
exactly; the quantum component then holds that expression minus the
classical ``U' dW/dp``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .derivatives import SPECTRAL
from .errors import TruncationTooDeep
from .params import LindbladParams
from .phasespace import PhaseSpaceGrid, WignerState
from .potentials import Cosine, Potential

#: truncation used for potentials with an infinite correction series
DEFAULT_SERIES_TRUNCATION = 3

# roundoff in the deepest correction term must stay below this (see _check_depth)
_ROUNDOFF_BUDGET = 1e-6

# RK4 stability radii on the imaginary and negative real axes
_RK4_IMAG = 2.0 * math.sqrt(2.0)
_RK4_REAL = 2.785


def series_coefficient(n: int, hbar: float) -> float:
    """Coefficient of ``U^(2n+1) d^(2n+1)W/dp^(2n+1)`` in the correction series."""
    return (-1) ** n * hbar ** (2 * n) / (2 ** (2 * n) * math.factorial(2 * n + 1))


@dataclass(frozen=True, eq=False)
class RhsField:
    """``dW/dt`` on the grid with its classical / quantum / dissipative split."""

    grid: PhaseSpaceGrid
    classical: np.ndarray
    quantum: np.ndarray
    dissipative: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.classical + self.quantum + self.dissipative

    def integral(self, component: str = "total") -> float:
        return float(self.grid.cell_area * np.sum(getattr(self, component)))

    def __add__(self, other: "RhsField") -> "RhsField":
        return RhsField(self.grid, self.classical + other.classical,
                        self.quantum + other.quantum, self.dissipative + other.dissipative)


def effective_truncation(potential: Potential, truncation: int | None) -> int:
    """Number of correction terms actually used.

    Finite series are used in full unless ``truncation`` asks for fewer;
    infinite series default to :data:`DEFAULT_SERIES_TRUNCATION`.  For the
    cosine potential any positive value selects the exact nonlocal form and
    ``0`` switches the corrections off.
    """
    if truncation is not None and (int(truncation) != truncation or truncation < 0):
        raise ValueError(f"truncation must be a non-negative integer, got {truncation!r}")
    depth = potential.correction_depth()
    if isinstance(potential, Cosine):
        if depth == 0:
            return 0
        return 1 if truncation is None or truncation > 0 else 0
    if truncation is None:
        return int(depth) if math.isfinite(depth) else DEFAULT_SERIES_TRUNCATION
    return int(min(truncation, depth))


def _check_depth(grid: PhaseSpaceGrid, hbar: float, n_terms: int) -> None:
    if n_terms <= 0:
        return
    order = 2 * n_terms + 1
    if order > grid.n_p // 2:
        raise TruncationTooDeep(
            f"derivative order {order} is not resolvable with n_p={grid.n_p}")
    # roundoff amplification of the deepest term relative to a first derivative:
    # eps * (pi hbar / 2 dp)^(2N) / (2N+1)!
    x = math.pi * hbar / (2.0 * grid.dp)
    log_amp = math.log(np.finfo(float).eps) + 2 * n_terms * math.log(x) - math.lgamma(order + 1)
    if log_amp > math.log(_ROUNDOFF_BUDGET):
        raise TruncationTooDeep(
            f"truncation N={n_terms} needs d^{order}W/dp^{order}, which is dominated by roundoff "
            f"at dp={grid.dp:.4g}, hbar={hbar:.4g}")


class WignerGenerator:
    """Prepared evaluator of the right-hand side for one (grid, potential, params) triple.

    Coordinate-dependent factors and Fourier multipliers are computed once,
    so repeated calls only pay for the transforms.  Instances hold no mutable
    state after construction.
    """

    def __init__(self, grid: PhaseSpaceGrid, potential: Potential, params: LindbladParams,
                 truncation: int | None = None):
        self.grid = grid
        self.potential = potential
        self.params = params
        self.n_terms = effective_truncation(potential, truncation)
        self.exact_periodic = isinstance(potential, Cosine) and self.n_terms > 0
        if not self.exact_periodic:
            _check_depth(grid, params.hbar, self.n_terms)

        m = params.mass
        Q, P = grid.Q, grid.P
        self.force = np.asarray(potential.derivative(grid.q, 1, m), dtype=float)[:, None]
        self.velocity = P / m
        self.a = params.q_drift_rate
        self.b = params.p_drift_rate
        self.has_diffusion = bool(params.d_qq or params.d_pp or params.d_pq)
        self.has_drift = bool(self.a or self.b)

        # q-dependent prefactors of the correction series
        self.series: List[Tuple[int, np.ndarray]] = []
        if not self.exact_periodic:
            for n in range(1, self.n_terms + 1):
                coeff = series_coefficient(n, params.hbar)
                factor = coeff * np.asarray(potential.derivative(grid.q, 2 * n + 1, m), dtype=float)
                if np.any(factor != 0.0):
                    self.series.append((n, factor[:, None]))

        # frozen advection speeds and growth rate, used for the stability estimate
        self.coef_dq = -self.velocity + self.a * Q
        self.coef_dp = self.force + self.b * P
        self.coef_w = self.a + self.b

        self.ops = grid.ops
        self.spectral = grid.derivative_scheme == SPECTRAL
        if self.spectral:
            ops = self.ops
            self.sym_q = ops.symbol(1, 0)
            self.sym_p = ops.symbol(0, 1)
            self.sym_diff = None
            if self.has_diffusion:
                self.sym_diff = (params.d_qq * ops.symbol(2, 0) + params.d_pp * ops.symbol(0, 2)
                                 + 2.0 * params.d_pq * ops.symbol(1, 1))
            self.sym_series = [(ops.symbol(0, 2 * n + 1), f) for n, f in self.series]
            if self.exact_periodic:
                hk = params.hbar * potential.k
                self.sym_periodic = ops.p_shift_difference(hk / 2.0) / hk - self.sym_p

    # -- component evaluation -------------------------------------------
    def _derivatives(self, values):
        """Return ``(W_q, W_p, diffusion, quantum)`` for ``values``."""
        ops = self.ops
        if self.spectral:
            spec = ops.forward(values)
            w_q = ops.inverse(self.sym_q * spec)
            w_p = ops.inverse(self.sym_p * spec)
            diffusion = ops.inverse(self.sym_diff * spec) if self.has_diffusion else 0.0
            quantum = 0.0
            for sym, factor in self.sym_series:
                quantum = quantum + factor * ops.inverse(sym * spec)
            if self.exact_periodic:
                quantum = self.force * ops.inverse(self.sym_periodic * spec)
            return w_q, w_p, diffusion, quantum

        w_q = ops.derivative(values, 1, 0)
        w_p = ops.derivative(values, 0, 1)
        diffusion = 0.0
        if self.has_diffusion:
            p = self.params
            diffusion = (p.d_qq * ops.derivative(values, 2, 0) + p.d_pp * ops.derivative(values, 0, 2)
                         + 2.0 * p.d_pq * ops.derivative(w_q, 0, 1))
        quantum = 0.0
        for n, factor in self.series:
            quantum = quantum + factor * ops.derivative(values, 0, 2 * n + 1)
        if self.exact_periodic:
            hk = self.params.hbar * self.potential.k
            quantum = self.force * (ops.p_difference(values, hk / 2.0) / hk - w_p)
        return w_q, w_p, diffusion, quantum

    def _drift(self, values):
        """``a d(qW)/dq + b d(pW)/dp`` in divergence form.

        Differentiating the products keeps the drift exactly mass conserving;
        the expanded ``W + q W_q`` form acts as a source at the periodic seam,
        where ``q`` jumps from one edge to the other, and grows on long runs.
        """
        out = 0.0
        if self.a:
            out = out + self.a * self.ops.derivative(self.grid.Q * values, 1, 0)
        if self.b:
            out = out + self.b * self.ops.derivative(self.grid.P * values, 0, 1)
        return out

    def __call__(self, values) -> RhsField:
        values = np.asarray(values, dtype=float)
        w_q, w_p, diffusion, quantum = self._derivatives(values)
        classical = -self.velocity * w_q + self.force * w_p
        dissipative = self._drift(values) + diffusion
        zeros = np.zeros(self.grid.shape)
        return RhsField(self.grid, classical + zeros, quantum + zeros, dissipative + zeros)

    def total(self, values) -> np.ndarray:
        """Summed right-hand side without the component breakdown."""
        values = np.asarray(values, dtype=float)
        w_q, w_p, diffusion, quantum = self._derivatives(values)
        out = -self.velocity * w_q
        out += self.force * w_p
        if self.has_drift:
            out += self._drift(values)
        return out + diffusion + quantum

    # -- diagnostics ------------------------------------------------------
    def max_stable_dt(self) -> float:
        """Largest RK4 step allowed by a frozen-coefficient spectral-radius estimate."""
        ops, params = self.ops, self.params
        kq, kp = ops.k_max_q, ops.k_max_p
        kq2 = kq ** 2 if self.spectral else ops.k2_max_q
        kp2 = kp ** 2 if self.spectral else ops.k2_max_p
        adv = np.sqrt((self.coef_dq * kq) ** 2 + (self.coef_dp * kp) ** 2)
        rho_imag = float(np.max(adv))
        for n, factor in self.series:
            rho_imag += float(np.max(np.abs(factor))) * kp ** (2 * n + 1)
        if self.exact_periodic:
            hk = params.hbar * self.potential.k
            rho_imag += float(np.max(np.abs(self.force))) * (2.0 / hk + kp)
        rho_real = (abs(params.d_qq) * kq2 + abs(params.d_pp) * kp2
                    + 2.0 * abs(params.d_pq) * kq * kp + abs(self.coef_w))
        rate = rho_imag / _RK4_IMAG + rho_real / _RK4_REAL
        return math.inf if rate == 0.0 else 1.0 / rate


def _as_values(W):
    return W.values if isinstance(W, WignerState) else np.asarray(W, dtype=float)


def classical_rhs(W: WignerState, potential: Potential, mass: float = 1.0) -> RhsField:
    """``-(p/m) dW/dq + U'(q) dW/dp`` using the grid's derivative scheme."""
    gen = WignerGenerator(W.grid, potential, LindbladParams(mass=mass), truncation=0)
    rhs = gen(_as_values(W))
    zeros = np.zeros(W.grid.shape)
    return RhsField(W.grid, rhs.classical, zeros, zeros.copy())


def quantum_rhs(W: WignerState, potential: Potential, hbar: float = 1.0,
                truncation: int | None = None, mass: float = 1.0) -> RhsField:
    """Correction series (or the exact periodic-potential remainder) alone."""
    gen = WignerGenerator(W.grid, potential, LindbladParams(mass=mass, hbar=hbar), truncation)
    zeros = np.zeros(W.grid.shape)
    if gen.n_terms == 0 or (not gen.series and not gen.exact_periodic):
        return RhsField(W.grid, zeros, zeros.copy(), zeros.copy())
    rhs = gen(_as_values(W))
    return RhsField(W.grid, zeros, rhs.quantum, zeros.copy())


def dissipator_rhs(W: WignerState, params: LindbladParams) -> RhsField:
    """Drift and diffusion generated by the environment."""
    from .potentials import Free

    gen = WignerGenerator(W.grid, Free(), params, truncation=0)
    rhs = gen(_as_values(W))
    zeros = np.zeros(W.grid.shape)
    return RhsField(W.grid, zeros, zeros.copy(), rhs.dissipative)


def full_rhs(W: WignerState, potential: Potential, params: LindbladParams,
             truncation: int | None = None) -> RhsField:
    return WignerGenerator(W.grid, potential, params, truncation)(_as_values(W))


def series_convergence(W: WignerState, potential: Potential, params: LindbladParams,
                       truncation: int | None = None) -> dict:
    """Compare the correction series truncated at N and at N+1.

    Returns the sup-norms of both sums and of the first omitted term, the
    latter also relative to the retained sum.
    """
    n = effective_truncation(potential, truncation)
    lo = quantum_rhs(W, potential, params.hbar, n, params.mass).quantum
    hi = quantum_rhs(W, potential, params.hbar, n + 1, params.mass).quantum
    omitted = float(np.max(np.abs(hi - lo)))
    retained = float(np.max(np.abs(lo)))
    return {
        "truncation": n,
        "sup_retained": retained,
        "sup_next": float(np.max(np.abs(hi))),
        "sup_omitted_term": omitted,
        "relative_omitted": omitted / retained if retained else (0.0 if omitted == 0 else math.inf),
    }
