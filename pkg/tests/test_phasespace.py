import math

import numpy as np
import pytest

from openwigner import (
    BadCovariance,
    DensityMatrixGrid,
    GaussianMoments,
    GridMismatch,
    NonHermitianInput,
    NotAQuantumState,
    PhaseSpaceGrid,
    WignerState,
    expectation,
    gaussian_wigner,
    marginals,
    mass,
    wigner_from_density_matrix,
)
from openwigner.phasespace import edge_mass, l1_distance, l2_distance


def test_grid_nodes_exclude_right_edge():
    g = PhaseSpaceGrid(-1, 1, 0, 4, 8, 16)
    assert g.dq == 0.25 and g.dp == 0.25
    assert g.q[0] == -1 and g.q[-1] == 0.75
    assert g.Q.shape == (8, 1) and g.P.shape == (1, 16)
    assert g.shape == (8, 16)


@pytest.mark.parametrize("kwargs", [
    dict(q_min=1, q_max=0), dict(n_q=7), dict(n_p=4), dict(p_max=math.inf),
    dict(derivative_scheme="weno"),
])
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        PhaseSpaceGrid(**kwargs)


def test_edge_mask_width():
    g = PhaseSpaceGrid.symmetric(1, 1, 32)
    m = g.edge_mask()
    assert m[1, 16] and not m[2, 16] and m[16, 30] and not m[16, 29]


def test_state_is_read_only_copy(grid64):
    values = np.zeros(grid64.shape)
    W = WignerState(grid64, values)
    values[0, 0] = 1
    assert W.values[0, 0] == 0
    with pytest.raises(ValueError):
        W.values[0, 0] = 1


def test_state_shape_mismatch(grid64):
    with pytest.raises(GridMismatch):
        WignerState(grid64, np.zeros((4, 4)))


def test_gaussian_normalised_with_moments():
    g = PhaseSpaceGrid.symmetric(10, 10, 128)
    mom = GaussianMoments(1.0, -0.5, 0.8, 0.6, 0.2)
    W = gaussian_wigner(mom, g)
    assert mass(W) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(W.moments().as_array(), mom.as_array(), atol=1e-12)


def test_gaussian_rejects_bad_covariance(grid64):
    with pytest.raises(BadCovariance):
        gaussian_wigner(GaussianMoments(0, 0, 1.0, 1.0, 1.0), grid64)
    with pytest.raises(NotAQuantumState):
        gaussian_wigner(GaussianMoments(0, 0, 0.1, 0.1, 0.0), grid64)


def test_gaussian_admissible_for_smaller_hbar(grid64):
    W = gaussian_wigner(GaussianMoments(0, 0, 0.1, 0.1, 0.0), grid64, hbar=0.2)
    assert mass(W) == pytest.approx(1.0)


def test_moment_helpers():
    mom = GaussianMoments(1, 2, 3, 4, 0.5)
    assert mom.determinant == pytest.approx(11.75)
    assert GaussianMoments.from_array(mom.as_array()) == mom
    assert GaussianMoments.from_mean_cov(mom.mean, mom.covariance) == mom


def test_marginals_and_expectation(coherent64):
    pos, mom = marginals(coherent64)
    g = coherent64.grid
    assert pos.sum() * g.dq == pytest.approx(1.0)
    assert np.sum(g.q * pos) * g.dq == pytest.approx(1.0)
    assert np.sum(g.p * mom) * g.dp == pytest.approx(-0.5)
    assert expectation(coherent64, lambda q, p: p) == pytest.approx(-0.5)
    assert expectation(coherent64, 2.0) == pytest.approx(2.0)
    assert expectation(coherent64, np.broadcast_to(g.Q, g.shape)) == pytest.approx(1.0)


def test_distances(coherent64):
    other = coherent64.with_values(coherent64.values * 0.5)
    assert l1_distance(coherent64, other) == pytest.approx(0.5)
    assert l2_distance(coherent64, coherent64) == 0.0
    with pytest.raises(GridMismatch):
        l2_distance(coherent64, gaussian_wigner(GaussianMoments(), PhaseSpaceGrid.symmetric(8, 8, 32)))


def test_edge_mass_small_for_centred_state(coherent64):
    assert edge_mass(coherent64) < 1e-12


def oscillator_state(n, q):
    xi = q
    psi0 = math.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    return psi0 if n == 0 else math.sqrt(2) * xi * psi0


def test_transform_ground_state():
    g = PhaseSpaceGrid.symmetric(8, 8, 256)
    W = wigner_from_density_matrix(DensityMatrixGrid.from_wavefunction(g.q, oscillator_state(0, g.q)), g)
    exact = np.exp(-g.Q ** 2 - g.P ** 2) / math.pi
    assert np.abs(W.values - exact).max() < 1e-6


def test_transform_first_excited_is_negative_at_origin():
    g = PhaseSpaceGrid.symmetric(8, 8, 256)
    W = wigner_from_density_matrix(DensityMatrixGrid.from_wavefunction(g.q, oscillator_state(1, g.q)), g)
    assert W.values[128, 128] == pytest.approx(-1 / math.pi, abs=1e-4)
    assert mass(W) == pytest.approx(1.0, abs=1e-10)


def test_transform_hbar_scaling():
    hbar = 0.5
    g = PhaseSpaceGrid.symmetric(6, 6, 128)
    psi = (1 / (math.pi * hbar)) ** 0.25 * np.exp(-g.q ** 2 / (2 * hbar))
    W = wigner_from_density_matrix(DensityMatrixGrid.from_wavefunction(g.q, psi), g, hbar)
    exact = np.exp(-(g.Q ** 2 + g.P ** 2) / hbar) / (math.pi * hbar)
    assert np.abs(W.values - exact).max() < 1e-8


def test_transform_is_real_and_reports_residue():
    g = PhaseSpaceGrid.symmetric(8, 6, 64)
    psi = np.exp(-(g.q - 1) ** 2 / 2 + 0.7j * g.q) * math.pi ** -0.25
    W, residue = wigner_from_density_matrix(DensityMatrixGrid.from_wavefunction(g.q, psi), g,
                                            return_residue=True)
    assert residue < 1e-12
    assert W.moments().mean_p == pytest.approx(0.7, abs=1e-8)


def test_transform_rejects_non_hermitian(grid64):
    rho = np.zeros((64, 64), dtype=complex)
    rho[0, 1] = 1.0
    with pytest.raises(NonHermitianInput):
        wigner_from_density_matrix(DensityMatrixGrid(grid64.q, rho), grid64)


def test_transform_rejects_momentum_beyond_band():
    g = PhaseSpaceGrid(-4, 4, -40, 40, 64, 64)  # band is pi/(2*0.125) ~ 12.6
    rho = DensityMatrixGrid.from_wavefunction(g.q, np.exp(-g.q ** 2))
    with pytest.raises(GridMismatch):
        wigner_from_density_matrix(rho, g)


def test_transform_rejects_mismatched_axis(grid64):
    rho = DensityMatrixGrid.from_wavefunction(np.linspace(-1, 1, 64), np.ones(64))
    with pytest.raises(GridMismatch):
        wigner_from_density_matrix(rho, grid64)


def test_density_matrix_grid_shape_checked():
    with pytest.raises(GridMismatch):
        DensityMatrixGrid(np.arange(3.0), np.eye(4))
