import numpy as np
import pytest

from openwigner.derivatives import FD4, SPECTRAL, FiniteDifferenceOps, SpectralOps, central_weights, make_ops


def periodic_field(n=64, L=2 * np.pi):
    x = np.arange(n) * L / n
    return x, np.sin(x)[:, None] * np.cos(2 * x)[None, :]


def test_central_weights_first_derivative():
    np.testing.assert_allclose(central_weights(1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])


def test_central_weights_second_derivative():
    np.testing.assert_allclose(central_weights(2), [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12])


def test_spectral_derivatives_exact_for_trig():
    x, f = periodic_field()
    h = x[1] - x[0]
    ops = SpectralOps(64, 64, h, h)
    np.testing.assert_allclose(ops.derivative(f, 1, 0), np.cos(x)[:, None] * np.cos(2 * x)[None, :],
                               atol=1e-12)
    np.testing.assert_allclose(ops.derivative(f, 0, 3), np.sin(x)[:, None] * 8 * np.sin(2 * x)[None, :],
                               atol=1e-10)
    np.testing.assert_allclose(ops.derivative(f, 1, 1), np.cos(x)[:, None] * -2 * np.sin(2 * x)[None, :],
                               atol=1e-12)


def test_spectral_odd_derivative_drops_nyquist():
    n = 16
    ops = SpectralOps(n, n, 1.0, 1.0)
    nyq = np.cos(np.pi * np.arange(n))[None, :] * np.ones((n, 1))
    np.testing.assert_allclose(ops.derivative(nyq, 0, 1), 0.0, atol=1e-13)
    assert np.abs(ops.derivative(nyq, 0, 2)).max() > 1.0


def test_spectral_p_difference_is_exact_shift():
    x, f = periodic_field()
    h = x[1] - x[0]
    ops = SpectralOps(64, 64, h, h)
    s = 0.37
    exact = np.sin(x)[:, None] * (np.cos(2 * (x + s)) - np.cos(2 * (x - s)))[None, :]
    np.testing.assert_allclose(ops.p_difference(f, s), exact, atol=1e-12)
    spec = ops.inverse(ops.p_shift_difference(s) * ops.forward(f))
    np.testing.assert_allclose(spec, exact, atol=1e-12)


def test_fd4_converges_at_fourth_order():
    errs = []
    for n in (32, 64, 128):
        x = np.linspace(-6, 6, n, endpoint=False)
        h = x[1] - x[0]
        f = np.exp(-x ** 2)[:, None] * np.ones((1, 8))
        d = FiniteDifferenceOps(n, 8, h, 1.0).derivative(f, 1, 0)[:, 0]
        errs.append(np.abs(d - (-2 * x * np.exp(-x ** 2))).max())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.6)


def test_fd4_whole_cell_shift():
    ops = FiniteDifferenceOps(4, 8, 1.0, 0.5)
    f = np.arange(32, dtype=float).reshape(4, 8)
    out = ops.p_difference(f, 1.0)  # two cells
    assert out[0, 3] == f[0, 5] - f[0, 1]
    assert out[0, 0] == f[0, 2] - 0.0


def test_make_ops_dispatch():
    assert make_ops(SPECTRAL, 8, 8, 1, 1).scheme == SPECTRAL
    assert make_ops(FD4, 8, 8, 1, 1).scheme == FD4
    with pytest.raises(ValueError):
        make_ops("upwind", 8, 8, 1, 1)


@pytest.mark.parametrize("cls", [SpectralOps, FiniteDifferenceOps])
def test_zero_order_returns_copy(cls):
    f = np.ones((8, 8))
    out = cls(8, 8, 1.0, 1.0).derivative(f)
    out[0, 0] = 5
    assert f[0, 0] == 1
