"""Derivative kernels on a uniform phase-space grid.

Two schemes share one interface:

* ``SpectralOps`` -- Fourier differentiation on a periodic box.  Odd
  derivatives drop the Nyquist mode so real input gives real output.
* ``FiniteDifferenceOps`` -- 4th-order central stencils with zero values
  outside the box.

Arrays are laid out as ``values[i_q, i_p]``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

SPECTRAL = "spectral_periodic"
FD4 = "central_fd_order4"
SCHEMES = (SPECTRAL, FD4)


def _wavenumbers(n: int, step: float, real: bool = False) -> np.ndarray:
    k = 2.0 * np.pi * (sfft.rfftfreq(n, step) if real else sfft.fftfreq(n, step))
    return k


class SpectralOps:
    """Fourier-spectral derivatives; the box is treated as periodic in both axes."""

    scheme = SPECTRAL

    def __init__(self, n_q: int, n_p: int, dq: float, dp: float):
        self.shape = (n_q, n_p)
        self.dq, self.dp = dq, dp
        kq = _wavenumbers(n_q, dq)
        kp = _wavenumbers(n_p, dp, real=True)
        # odd derivatives: Nyquist mode zeroed
        kq_odd = kq.copy()
        kq_odd[n_q // 2] = 0.0
        kp_odd = kp.copy()
        kp_odd[-1] = 0.0
        self.kq = kq[:, None]
        self.kp = kp[None, :]
        self.kq_odd = kq_odd[:, None]
        self.kp_odd = kp_odd[None, :]
        self.k_max_q = np.pi / dq
        self.k_max_p = np.pi / dp

    # -- transforms -----------------------------------------------------
    def forward(self, values: np.ndarray) -> np.ndarray:
        return sfft.rfft2(values)

    def inverse(self, spectrum: np.ndarray) -> np.ndarray:
        return sfft.irfft2(spectrum, s=self.shape)

    # -- spectral multipliers -------------------------------------------
    def symbol(self, order_q: int, order_p: int) -> np.ndarray:
        """Fourier multiplier of ``d^order_q/dq^order_q d^order_p/dp^order_p``."""
        kq = self.kq_odd if order_q % 2 else self.kq
        kp = self.kp_odd if order_p % 2 else self.kp
        return (1j * kq) ** order_q * (1j * kp) ** order_p

    def p_shift_difference(self, shift: float) -> np.ndarray:
        """Multiplier of ``f(p + shift) - f(p - shift)`` along p."""
        out = 2j * np.sin(self.kp * shift)
        out[:, -1] = 0.0
        return out

    # -- convenience ----------------------------------------------------
    def derivative(self, values: np.ndarray, order_q: int = 0, order_p: int = 0) -> np.ndarray:
        if order_q == 0 and order_p == 0:
            return np.array(values, dtype=float, copy=True)
        return self.inverse(self.symbol(order_q, order_p) * self.forward(values))

    def p_difference(self, values: np.ndarray, shift: float) -> np.ndarray:
        """``f(q, p + shift) - f(q, p - shift)`` by Fourier shift."""
        spec = sfft.rfft(values, axis=1)
        out = 2j * np.sin(self.kp[0] * shift)
        out[-1] = 0.0
        return sfft.irfft(spec * out[None, :], n=self.shape[1], axis=1)


@lru_cache(maxsize=None)
def central_weights(order: int, accuracy: int = 4) -> np.ndarray:
    """Central-difference weights for the ``order``-th derivative on a unit grid."""
    radius = (order + 1) // 2 + accuracy // 2 - 1
    offsets = np.arange(-radius, radius + 1, dtype=float)
    n = offsets.size
    vander = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    weights = np.linalg.solve(vander, rhs)
    weights[np.abs(weights) < 1e-13] = 0.0
    return weights


def _stencil_apply(values: np.ndarray, weights: np.ndarray, step: float, order: int, axis: int):
    radius = (weights.size - 1) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(values, pad)
    n = values.shape[axis]
    out = np.zeros_like(values, dtype=float)
    for offset, w in zip(range(-radius, radius + 1), weights):
        if w == 0.0:
            continue
        sl = [slice(None), slice(None)]
        sl[axis] = slice(radius + offset, radius + offset + n)
        out += w * padded[tuple(sl)]
    return out / step ** order


class FiniteDifferenceOps:
    """4th-order central differences on a non-periodic box (zero outside)."""

    scheme = FD4

    def __init__(self, n_q: int, n_p: int, dq: float, dp: float):
        self.shape = (n_q, n_p)
        self.dq, self.dp = dq, dp
        # largest modified wavenumber of the first-derivative stencil is ~1.372/h
        self.k_max_q = 1.3722 / dq
        self.k_max_p = 1.3722 / dp
        # second-derivative stencil peaks at 16/(3 h^2)
        self.k2_max_q = 16.0 / 3.0 / dq ** 2
        self.k2_max_p = 16.0 / 3.0 / dp ** 2

    def derivative(self, values: np.ndarray, order_q: int = 0, order_p: int = 0) -> np.ndarray:
        out = np.asarray(values, dtype=float)
        if order_q:
            out = _stencil_apply(out, central_weights(order_q), self.dq, order_q, axis=0)
        if order_p:
            out = _stencil_apply(out, central_weights(order_p), self.dp, order_p, axis=1)
        if not order_q and not order_p:
            out = out.copy()
        return out

    def p_difference(self, values: np.ndarray, shift: float) -> np.ndarray:
        """``f(q, p + shift) - f(q, p - shift)``.

        Whole-cell shifts are exact index shifts with zero fill; other shifts
        fall back to a Fourier shift.
        """
        cells = shift / self.dp
        whole = round(cells)
        if abs(cells - whole) < 1e-9:
            n = self.shape[1]
            plus = np.zeros_like(values, dtype=float)
            minus = np.zeros_like(values, dtype=float)
            if whole < n:
                plus[:, : n - whole] = values[:, whole:]
                minus[:, whole:] = values[:, : n - whole]
            return plus - minus
        return SpectralOps(*self.shape, self.dq, self.dp).p_difference(values, shift)


def make_ops(scheme: str, n_q: int, n_p: int, dq: float, dp: float):
    if scheme == SPECTRAL:
        return SpectralOps(n_q, n_p, dq, dp)
    if scheme == FD4:
        return FiniteDifferenceOps(n_q, n_p, dq, dp)
    raise ValueError(f"unknown derivative scheme {scheme!r}; expected one of {SCHEMES}")
