"""Reference propagator: the master equation for rho in a truncated oscillator basis.

The basis is the eigenbasis of a harmonic oscillator with frequency
``omega_ref``; it only sets the length scale and is independent of the
simulated potential.  ``q`` and ``p`` are the truncated matrices

    q = sqrt(hbar / 2 m w) (a + a^+),     p = i sqrt(m w hbar / 2) (a^+ - a)

and ``U(q)`` is evaluated as a matrix function on a padded basis (exact for
polynomials once the padding exceeds half the degree).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BasisTooSmall
from ..params import LindbladParams
from ..phasespace import DensityMatrixGrid
from ..potentials import Cosine, Exponential, Polynomial, Potential

DEFAULT_BASIS = 64
#: fraction of the basis counted as "top levels" for leakage checks
_TOP_FRACTION = 1.0 / 16.0
LEAKAGE_TOL = 1e-4
INITIAL_LEAKAGE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    values: np.ndarray
    omega_ref: float = 1.0
    mass: float = 1.0
    hbar: float = 1.0
    time: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=complex, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("density matrix must be square")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_basis(self) -> int:
        return self.values.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.values))

    def purity(self) -> float:
        return float(np.real(np.trace(self.values @ self.values)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.values)).copy()

    def top_occupation(self) -> float:
        k = max(2, int(round(self.n_basis * _TOP_FRACTION)))
        return float(np.sum(self.populations()[-k:]))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.values + self.values.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(self.values @ operator))

    def to_position(self, q) -> DensityMatrixGrid:
        """``<q_i|rho|q_j>`` on the points ``q``."""
        psi = hermite_functions(self.n_basis, q, self.omega_ref, self.mass, self.hbar)
        return DensityMatrixGrid(q, psi.T @ self.values @ psi)


def hermite_functions(n: int, q, omega=1.0, mass=1.0, hbar=1.0) -> np.ndarray:
    """Oscillator eigenfunctions ``psi_k(q)`` for ``k < n``; shape ``(n, len(q))``."""
    q = np.asarray(q, dtype=float)
    xi = q * math.sqrt(mass * omega / hbar)
    out = np.zeros((n, q.size))
    out[0] = (mass * omega / (math.pi * hbar)) ** 0.25 * np.exp(-0.5 * xi * xi)
    if n > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def ladder(n: int) -> np.ndarray:
    """Annihilation operator on ``n`` levels."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def position_operator(n: int, omega=1.0, mass=1.0, hbar=1.0) -> np.ndarray:
    a = ladder(n)
    return math.sqrt(hbar / (2.0 * mass * omega)) * (a + a.conj().T)


def momentum_operator(n: int, omega=1.0, mass=1.0, hbar=1.0) -> np.ndarray:
    a = ladder(n)
    return 1j * math.sqrt(mass * omega * hbar / 2.0) * (a.conj().T - a)


def _padding(potential: Potential) -> int:
    if isinstance(potential, (Exponential, Cosine)):
        return 96
    if isinstance(potential, Polynomial):
        return potential.degree + 2
    return 8


def potential_matrix(potential: Potential, n: int, omega=1.0, mass=1.0, hbar=1.0) -> np.ndarray:
    """``U(q)`` on ``n`` levels via the spectral decomposition of a padded ``q``."""
    big = n + _padding(potential)
    q_big = np.real(position_operator(big, omega, mass, hbar))
    nodes, vecs = np.linalg.eigh(q_big)
    u = np.asarray(potential.value(nodes, mass), dtype=float)
    full = (vecs * u) @ vecs.T
    return full[:n, :n].astype(complex)


def hamiltonian(potential: Potential, n: int, omega=1.0, mass=1.0, hbar=1.0) -> np.ndarray:
    """``H0 = p^2 / 2m + U(q)``; ``p^2`` is built on a padded basis then truncated."""
    p_big = momentum_operator(n + 2, omega, mass, hbar)
    kinetic = (p_big @ p_big)[:n, :n] / (2.0 * mass)
    return kinetic + potential_matrix(potential, n, omega, mass, hbar)


def coherent_state(q0: float, p0: float, n: int = DEFAULT_BASIS, omega=1.0, mass=1.0,
                   hbar=1.0) -> FockDensityMatrix:
    """Pure coherent state centred at ``(q0, p0)``."""
    alpha = math.sqrt(mass * omega / (2.0 * hbar)) * q0 + 1j * p0 / math.sqrt(2.0 * mass * omega * hbar)
    c = np.zeros(n, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for k in range(1, n):
        c[k] = c[k - 1] * alpha / math.sqrt(k)
    return FockDensityMatrix(np.outer(c, c.conj()), omega, mass, hbar)


def from_position(rho: DensityMatrixGrid, n: int = DEFAULT_BASIS, omega=1.0, mass=1.0,
                  hbar=1.0) -> FockDensityMatrix:
    """Project a position-space density matrix onto the first ``n`` levels."""
    psi = hermite_functions(n, rho.q, omega, mass, hbar)
    dq = rho.dq
    return FockDensityMatrix(psi @ rho.values @ psi.T * dq * dq, omega, mass, hbar)


class MasterEquation:
    """Right-hand side of the Markovian master equation with linear Lindblad operators::

        drho/dt = -i/hbar [H0, rho]
                  + i (lam - mu)/(2 hbar) [p, rho q + q rho]
                  - i (lam + mu)/(2 hbar) [q, rho p + p rho]
                  - D_pp/hbar^2 [q, [q, rho]] - D_qq/hbar^2 [p, [p, rho]]
                  + 2 D_pq/hbar^2 [p, [q, rho]]
    """

    def __init__(self, params: LindbladParams, potential: Potential, n: int, omega_ref: float = 1.0):
        m, hb = params.mass, params.hbar
        self.params = params
        self.q = position_operator(n, omega_ref, m, hb)
        self.p = momentum_operator(n, omega_ref, m, hb)
        self.h0 = hamiltonian(potential, n, omega_ref, m, hb)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        pr, q, p, hb = self.params, self.q, self.p, self.params.hbar

        def comm(a, b):
            return a @ b - b @ a

        out = (-1j / hb) * comm(self.h0, rho)
        if pr.q_drift_rate:
            out += (1j * pr.q_drift_rate / (2.0 * hb)) * comm(p, rho @ q + q @ rho)
        if pr.p_drift_rate:
            out -= (1j * pr.p_drift_rate / (2.0 * hb)) * comm(q, rho @ p + p @ rho)
        if pr.d_pp or pr.d_pq:
            q_rho = comm(q, rho)
            if pr.d_pp:
                out -= (pr.d_pp / hb ** 2) * comm(q, q_rho)
            if pr.d_pq:
                out += (2.0 * pr.d_pq / hb ** 2) * comm(p, q_rho)
        if pr.d_qq:
            out -= (pr.d_qq / hb ** 2) * comm(p, comm(p, rho))
        return out


def propagate_density(rho0: FockDensityMatrix, params: LindbladParams, potential: Potential,
                      t_end: float, dt: float) -> FockDensityMatrix:
    """RK4 integration of the master equation from ``rho0`` over ``t_end``."""
    if rho0.top_occupation() > INITIAL_LEAKAGE_TOL:
        raise BasisTooSmall(
            f"initial top-level occupation {rho0.top_occupation():.3g} exceeds "
            f"{INITIAL_LEAKAGE_TOL:g}; enlarge the basis")
    if not (dt > 0):
        raise ValueError("dt must be positive")
    if abs(params.mass - rho0.mass) > 0 or abs(params.hbar - rho0.hbar) > 0:
        raise ValueError("rho0 and params disagree on mass or hbar")
    n = rho0.n_basis
    rhs = MasterEquation(params, potential, n, rho0.omega_ref)
    k_top = max(2, int(round(n * _TOP_FRACTION)))
    rho = np.array(rho0.values)
    n_steps = max(1, math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    h = t_end / n_steps if n_steps else 0.0
    for i in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        leak = float(np.sum(np.real(np.diag(rho))[-k_top:]))
        if leak > LEAKAGE_TOL:
            raise BasisTooSmall(f"top-level occupation {leak:.3g} at t={(i + 1) * h:.4g}")
        if not np.all(np.isfinite(rho)):
            raise FloatingPointError(f"master-equation propagation diverged at step {i + 1}")
    return FockDensityMatrix(rho, rho0.omega_ref, rho0.mass, rho0.hbar, rho0.time + t_end)
