"""The reference solutions are tested first: everything else is judged against them."""
import math

import numpy as np
import pytest

from openwigner import (
    BasisTooSmall,
    Free,
    GaussianMoments,
    Harmonic,
    InvertedParabola,
    LindbladParams,
    Linear,
    NotNormalizable,
    PhaseSpaceGrid,
    Quartic,
    UnsupportedPotential,
    full_rhs,
    gaussian_wigner,
    wigner_from_density_matrix,
)
from openwigner.oracle import (
    MasterEquation,
    coherent_state,
    drift_system,
    from_position,
    hermite_functions,
    kramers_stationary,
    moment_fixed_point,
    moment_rhs,
    moment_trajectory,
    position_operator,
    potential_matrix,
    propagate_density,
    stationarity_residual,
)
from openwigner.phasespace import l2_distance

DAMPED = LindbladParams(lam=0.2, mu=0.2, d_pp=0.5, d_qq=0.5)


# -- moment equations -----------------------------------------------------

def test_drift_system_harmonic():
    params = LindbladParams(mass=2.0, lam=0.3, mu=0.1, d_pp=0.4, d_qq=0.2, d_pq=0.05)
    A, c, D = drift_system(params, Harmonic(1.5))
    np.testing.assert_allclose(A, [[-0.2, 0.5], [-2.0 * 2.25, -0.4]])
    np.testing.assert_allclose(c, [0.0, 0.0])
    np.testing.assert_allclose(D, [[0.2, 0.05], [0.05, 0.4]])


def test_drift_system_linear_force():
    _, c, _ = drift_system(LindbladParams(), Linear(0.7))
    np.testing.assert_allclose(c, [0.0, -0.7])


def test_moments_reject_anharmonic():
    with pytest.raises(UnsupportedPotential):
        drift_system(DAMPED, Quartic(1.0, 0.1))


def test_free_closed_trajectory_is_ballistic():
    mom0 = GaussianMoments(1.0, 0.5, 0.5, 0.5, 0.0)
    times = np.array([0.0, 1.0, 2.0])
    traj = moment_trajectory(mom0, LindbladParams(), Free(), times)
    np.testing.assert_allclose(traj[:, 0], 1.0 + 0.5 * times, atol=1e-12)
    np.testing.assert_allclose(traj[:, 1], 0.5, atol=1e-12)
    np.testing.assert_allclose(traj[:, 2], 0.5 + 0.5 * times ** 2, atol=1e-11)
    np.testing.assert_allclose(traj[:, 4], 0.5 * times, atol=1e-11)


def test_closed_harmonic_trajectory_rotates():
    mom0 = GaussianMoments(2.0, 0.0, 0.5, 0.5, 0.0)
    times = np.linspace(0.0, 3.0, 7)
    traj = moment_trajectory(mom0, LindbladParams(), Harmonic(1.0), times)
    np.testing.assert_allclose(traj[:, 0], 2.0 * np.cos(times), atol=1e-10)
    np.testing.assert_allclose(traj[:, 1], -2.0 * np.sin(times), atol=1e-10)


def test_trajectory_preserves_requested_order():
    mom0 = GaussianMoments(1.0, 0.0)
    fwd = moment_trajectory(mom0, DAMPED, Harmonic(), [0.5, 1.0])
    rev = moment_trajectory(mom0, DAMPED, Harmonic(), [1.0, 0.5])
    np.testing.assert_allclose(fwd[::-1], rev)


def test_fixed_point_is_stationary():
    fp = moment_fixed_point(DAMPED, Harmonic(1.0))
    np.testing.assert_allclose(fp.as_array(), [0.0, 0.0, 2.7, 2.5, -0.5], atol=1e-12)
    np.testing.assert_allclose(moment_rhs(fp, DAMPED, Harmonic(1.0)).as_array(), 0.0, atol=1e-12)


def test_fixed_point_needs_stable_drift():
    with pytest.raises(ValueError):
        moment_fixed_point(LindbladParams(d_pp=0.5, d_qq=0.5), InvertedParabola(1.0))


@pytest.mark.parametrize("potential", [Harmonic(1.3), Free(), Linear(0.4), InvertedParabola(0.5)])
@pytest.mark.parametrize("params", [
    DAMPED,
    LindbladParams(mass=1.7, lam=0.3, mu=-0.1, d_pp=0.3, d_qq=0.4, d_pq=0.1),
])
def test_moment_coefficients_match_grid_probe(potential, params):
    """Each coefficient of the moment equations against d<f>/dt measured from the grid rhs."""
    grid = PhaseSpaceGrid.symmetric(12.0, 12.0, 96)
    mom = GaussianMoments(0.7, -0.4, 0.8, 0.6, 0.15)
    W = gaussian_wigner(mom, grid)
    rhs = full_rhs(W, potential, params).total * grid.cell_area
    Q, P = grid.Q, grid.P
    d = {name: float(np.sum(f * rhs)) for name, f in
         {"q": Q, "p": P, "qq": Q * Q, "pp": P * P, "qp": Q * P}.items()}
    measured = np.array([
        d["q"], d["p"],
        d["qq"] - 2 * mom.mean_q * d["q"],
        d["pp"] - 2 * mom.mean_p * d["p"],
        d["qp"] - mom.mean_q * d["p"] - mom.mean_p * d["q"],
    ])
    predicted = moment_rhs(mom, params, potential).as_array()
    np.testing.assert_allclose(measured, predicted, atol=1e-9)


# -- Fock-basis master equation ------------------------------------------

def test_hermite_functions_orthonormal():
    q = np.linspace(-12, 12, 2001)
    psi = hermite_functions(20, q, omega=1.3)
    gram = psi @ psi.T * (q[1] - q[0])
    np.testing.assert_allclose(gram, np.eye(20), atol=1e-10)


def test_potential_matrix_exact_for_quartic():
    n = 12
    q = position_operator(n + 4)
    exact = (0.5 * q @ q + 0.1 * q @ q @ q @ q)[:n, :n]
    np.testing.assert_allclose(potential_matrix(Quartic(1.0, 0.1), n), exact, atol=1e-12)


def test_coherent_state_is_pure_and_matches_gaussian():
    rho = coherent_state(1.0, -0.5, 48, omega=2.0)
    assert abs(rho.trace() - 1) < 1e-12
    assert abs(rho.purity() - 1) < 1e-12
    grid = PhaseSpaceGrid.symmetric(6.0, 6.0, 96)
    W = wigner_from_density_matrix(rho.to_position(grid.q), grid)
    ref = gaussian_wigner(GaussianMoments(1.0, -0.5, 0.25, 1.0, 0.0), grid)
    assert l2_distance(W, ref) < 1e-10


def test_from_position_round_trip():
    rho = coherent_state(0.5, 0.5, 32)
    q = np.linspace(-10, 10, 400, endpoint=False)
    back = from_position(rho.to_position(q), 32)
    np.testing.assert_allclose(back.values, rho.values, atol=1e-10)


def test_closed_evolution_is_unitary():
    rho0 = coherent_state(1.0, 0.0, 40)
    rho = propagate_density(rho0, LindbladParams(), Quartic(1.0, 0.05), 1.0, 2e-3)
    assert abs(rho.trace() - 1) < 1e-8
    assert abs(rho.purity() - 1) < 1e-8


def test_open_evolution_keeps_trace_and_positivity():
    rho0 = coherent_state(1.0, 0.0, 40)
    params = LindbladParams(lam=0.2, mu=0.1, d_pp=0.3, d_qq=0.2, d_pq=0.05)
    rho = propagate_density(rho0, params, Quartic(1.0, 0.05), 1.0, 2e-3)
    assert abs(rho.trace() - 1) < 1e-8
    assert rho.min_eigenvalue() > -1e-6
    assert rho.purity() < 1.0
    assert rho.hermiticity_error() < 1e-12


def test_fock_harmonic_means_follow_moment_oracle():
    params = LindbladParams(lam=0.2, mu=0.1, d_pp=0.3, d_qq=0.2)
    rho0 = coherent_state(1.0, 0.5, 48)
    rho = propagate_density(rho0, params, Harmonic(1.0), 1.5, 2e-3)
    q = position_operator(48)
    ref = moment_trajectory(GaussianMoments(1.0, 0.5, 0.5, 0.5, 0.0), params, Harmonic(1.0), [1.5])[0]
    assert abs(rho.expectation(q).real - ref[0]) < 1e-8


def test_master_equation_is_traceless():
    # support on the low levels keeps the truncated ladder exact
    rng = np.random.default_rng(0)
    x = np.zeros((16, 16), dtype=complex)
    x[:8, :8] = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    rho = x @ x.conj().T
    rhs = MasterEquation(LindbladParams(lam=0.3, mu=0.2, d_pp=0.4, d_qq=0.3, d_pq=0.1),
                         Harmonic(), 16)(rho)
    assert abs(np.trace(rhs)) < 1e-10 * np.abs(rhs).max()
    np.testing.assert_allclose(rhs, rhs.conj().T, atol=1e-10)


def test_basis_too_small_detected():
    with pytest.raises(BasisTooSmall):
        propagate_density(coherent_state(6.0, 0.0, 24), LindbladParams(), Harmonic(), 0.1, 1e-2)


# -- Kramers stationary state ----------------------------------------------

def test_thermal_state_harmonic_closed_form():
    grid = PhaseSpaceGrid.symmetric(10.0, 10.0, 128)
    W = kramers_stationary(Harmonic(1.0), 1.0, 1.0, grid)
    ref = np.exp(-grid.P ** 2 / 2 - grid.Q ** 2 / 2) / (2 * math.pi)
    np.testing.assert_allclose(W.values, ref, atol=1e-12)
    assert abs(W.mass() - 1) < 1e-12


def test_thermal_state_not_normalizable():
    with pytest.raises(NotNormalizable):
        kramers_stationary(InvertedParabola(1.0), 1.0, 1.0, PhaseSpaceGrid())
    with pytest.raises(NotNormalizable):
        kramers_stationary(Free(), 1.0, 1.0, PhaseSpaceGrid())


def test_stationarity_residual_decreases_under_refinement():
    params = LindbladParams.kramers(0.25, 1.0)
    res = [stationarity_residual(kramers_stationary(Harmonic(), 1.0, 1.0,
                                                    PhaseSpaceGrid.symmetric(10.0, 10.0, n)),
                                 Harmonic(), params) for n in (16, 32, 64)]
    assert res[0] > res[1] > res[2]
    assert res[2] < 1e-9


def test_stationarity_residual_of_moving_state_is_order_one(coherent64):
    params = LindbladParams.kramers(0.25, 1.0)
    assert stationarity_residual(coherent64, Harmonic(), params) > 0.1


def test_stationarity_residual_zero_field(grid64):
    from openwigner import WignerState

    assert stationarity_residual(WignerState(grid64, np.zeros(grid64.shape)), Harmonic(),
                                 LindbladParams()) == 0.0
