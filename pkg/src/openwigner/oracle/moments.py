"""Gaussian moment equations for potentials at most quadratic in q.

For ``U'(q) = k q + f`` the Wigner equation is a linear Fokker-Planck
equation with drift ``A x + c`` and constant diffusion ``D``::

    A = [[-(lam - mu), 1/m], [-k, -(lam + mu)]],   c = (0, -f)
    D = [[D_qq, D_pq], [D_pq, D_pp]]

Multiplying by ``q, p, q^2, qp, p^2`` and integrating by parts gives

    d<x>/dt   = A <x> + c
    d Sigma/dt = A Sigma + Sigma A^T + 2 D
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_continuous_lyapunov

from ..errors import UnsupportedPotential
from ..params import LindbladParams
from ..phasespace import GaussianMoments
from ..potentials import Potential, linear_force


def drift_system(params: LindbladParams, potential: Potential):
    """``(A, c, D)`` of the linear Fokker-Planck equation."""
    if not potential.is_quadratic_family:
        raise UnsupportedPotential(
            f"moment equations close only for quadratic potentials, not {potential.kind!r}")
    m = params.mass
    k = potential.force_constant(m)
    f = linear_force(potential, m)
    A = np.array([[-params.q_drift_rate, 1.0 / m], [-k, -params.p_drift_rate]])
    c = np.array([0.0, -f])
    D = np.array([[params.d_qq, params.d_pq], [params.d_pq, params.d_pp]])
    return A, c, D


def moment_rhs(mom: GaussianMoments, params: LindbladParams, potential: Potential) -> GaussianMoments:
    """Time derivative of the five moments, packed as a :class:`GaussianMoments`."""
    A, c, D = drift_system(params, potential)
    dmean = A @ mom.mean + c
    cov = mom.covariance
    dcov = A @ cov + cov @ A.T + 2.0 * D
    return GaussianMoments.from_mean_cov(dmean, dcov)


def _flat_rhs(A, c, D):
    def rhs(_t, y):
        mean = y[:2]
        cov = np.array([[y[2], y[4]], [y[4], y[3]]])
        dmean = A @ mean + c
        dcov = A @ cov + cov @ A.T + 2.0 * D
        return np.array([dmean[0], dmean[1], dcov[0, 0], dcov[1, 1], dcov[0, 1]])
    return rhs


def moment_trajectory(mom0: GaussianMoments, params: LindbladParams, potential: Potential,
                      times, rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Moments at each of ``times`` (measured from 0); shape ``(len(times), 5)``.

    Columns follow :attr:`GaussianMoments.FIELDS`.
    """
    times = np.asarray(times, dtype=float)
    A, c, D = drift_system(params, potential)
    if times.size == 0:
        return np.zeros((0, 5))
    sol = solve_ivp(_flat_rhs(A, c, D), (0.0, float(times.max())), mom0.as_array(),
                    method="DOP853", t_eval=np.sort(np.unique(times)), rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"moment integration failed: {sol.message}")
    lookup = {t: sol.y[:, i] for i, t in enumerate(sol.t)}
    return np.array([lookup[t] for t in times])


def moment_fixed_point(params: LindbladParams, potential: Potential) -> GaussianMoments:
    """Stationary moments; requires a stable drift matrix (all eigenvalues in the left half-plane)."""
    A, c, D = drift_system(params, potential)
    eig = np.linalg.eigvals(A)
    if np.any(eig.real >= 0):
        raise ValueError(f"drift matrix is not stable (eigenvalues {eig}); no unique fixed point")
    mean = np.linalg.solve(A, -c)
    cov = solve_continuous_lyapunov(A, -2.0 * D)
    return GaussianMoments.from_mean_cov(mean, 0.5 * (cov + cov.T))
