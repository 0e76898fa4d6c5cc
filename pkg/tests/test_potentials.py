import math

import numpy as np
import pytest

from openwigner import (
    Cosine,
    Exponential,
    Free,
    Harmonic,
    InvertedParabola,
    Linear,
    Polynomial,
    Quartic,
    correction_depth,
)
from openwigner.potentials import CATALOG, INFINITE, linear_force, make_potential

ALL = [Free(), Linear(0.3), Harmonic(1.3), InvertedParabola(0.7), Quartic(1.1, 0.2),
       Exponential(0.5, 0.8), Cosine(0.4, 2.0), Polynomial((0.1, -0.3, 0.2, 0.05, 0.01))]


@pytest.mark.parametrize("pot", ALL, ids=lambda p: p.kind)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_derivatives_match_numerical_differentiation(pot, n):
    q = np.linspace(-1.5, 1.5, 7)
    h = 1e-3
    # central difference of the (n-1)-th derivative
    lower = (lambda x: pot.value(x, 1.7)) if n == 1 else (lambda x: pot.derivative(x, n - 1, 1.7))
    numeric = (lower(q + h) - lower(q - h)) / (2 * h)
    np.testing.assert_allclose(pot.derivative(q, n, 1.7), numeric, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("pot,depth", [
    (Free(), 0), (Linear(1), 0), (Harmonic(), 0), (InvertedParabola(), 0),
    (Quartic(1, 0.1), 1), (Quartic(1, 0.0), 0), (Polynomial((0, 0, 0, 0, 1)), 2),
    (Polynomial((0, 1)), 0), (Polynomial((0, 1, 1)), 1), (Exponential(), INFINITE), (Cosine(), INFINITE), (Cosine(0.0, 1), 0),
])
def test_correction_depth(pot, depth):
    assert correction_depth(pot) == depth


@pytest.mark.parametrize("pot,confining", [
    (Harmonic(), True), (Quartic(1, 0.1), True), (Quartic(1, -0.1), False), (Free(), False),
    (InvertedParabola(), False), (Cosine(), False), (Polynomial((0, 0, 0, 1)), True),
    (Polynomial((0, 0, 1)), False), (Polynomial((0, -1)), False),
])
def test_confining(pot, confining):
    assert pot.is_confining() is confining


def test_quadratic_family_force_constants():
    assert Harmonic(2.0).force_constant(3.0) == 12.0
    assert InvertedParabola(2.0).force_constant(1.0) == -4.0
    assert Polynomial((1.0, 0.5)).force_constant() == 1.0
    assert linear_force(Polynomial((1.0, 0.5))) == 1.0
    assert linear_force(Linear(0.2)) == 0.2
    assert not Quartic().is_quadratic_family


def test_make_potential_round_trip():
    for pot in ALL:
        assert make_potential(pot.kind, **pot.params()) == pot
    with pytest.raises(ValueError):
        make_potential("morse")
    assert set(CATALOG) == {p.kind for p in ALL}


@pytest.mark.parametrize("cls,kwargs", [
    (Harmonic, dict(omega=0)), (Cosine, dict(k=-1)), (Exponential, dict(beta=0)),
    (Linear, dict(gamma=math.nan)),
])
def test_parameter_validation(cls, kwargs):
    with pytest.raises(ValueError):
        cls(**kwargs)


def test_derivative_order_must_be_positive():
    with pytest.raises(ValueError):
        Harmonic().derivative(0.0, 0)


def test_cosine_derivative_cycle():
    c = Cosine(1.0, 2.0)
    q = np.linspace(0, 1, 5)
    np.testing.assert_allclose(c.derivative(q, 4), 16 * c.value(q), atol=1e-12)
