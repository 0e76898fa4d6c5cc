"""Catalogue of one-dimensional potentials with closed-form derivatives.

Every potential evaluates ``U(q)`` and its exact ``n``-th derivative; no
numerical differentiation happens anywhere.  The mass enters the
oscillator-type potentials, so ``value``/``derivative`` take it as an
argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

#: returned by :func:`correction_depth` for potentials with an infinite series
INFINITE = math.inf


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


class Potential:
    """Base class; subclasses are frozen dataclasses."""

    kind = "abstract"

    def value(self, q, mass=1.0):
        raise NotImplementedError

    def derivative(self, q, n=1, mass=1.0):
        raise NotImplementedError

    def correction_depth(self) -> float:
        raise NotImplementedError

    def is_confining(self) -> bool:
        """True if ``exp(-U/kT)`` is integrable over the real line."""
        return False

    @property
    def is_quadratic_family(self) -> bool:
        return False

    def force_constant(self, mass=1.0) -> float:
        """``U''`` for quadratic-family potentials."""
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def _zeros(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))


@dataclass(frozen=True)
class Free(Potential):
    kind = "free"

    def value(self, q, mass=1.0):
        return self._zeros(q)

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        return self._zeros(q)

    def correction_depth(self):
        return 0

    @property
    def is_quadratic_family(self):
        return True

    def force_constant(self, mass=1.0):
        return 0.0


@dataclass(frozen=True)
class Linear(Potential):
    """``U = gamma q``; ``gamma`` is the constant force magnitude."""

    gamma: float = 1.0
    kind = "linear"

    def __post_init__(self):
        object.__setattr__(self, "gamma", _finite("gamma", self.gamma))

    def value(self, q, mass=1.0):
        return self.gamma * np.asarray(q, dtype=float)

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        out = self._zeros(q)
        return out + self.gamma if n == 1 else out

    def correction_depth(self):
        return 0

    @property
    def is_quadratic_family(self):
        return True

    def force_constant(self, mass=1.0):
        return 0.0

    def params(self):
        return {"gamma": self.gamma}


@dataclass(frozen=True)
class Harmonic(Potential):
    omega: float = 1.0
    kind = "harmonic"

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive("omega", self.omega))

    def value(self, q, mass=1.0):
        q = np.asarray(q, dtype=float)
        return 0.5 * mass * self.omega ** 2 * q * q

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        q = np.asarray(q, dtype=float)
        k = mass * self.omega ** 2
        if n == 1:
            return k * q
        if n == 2:
            return self._zeros(q) + k
        return self._zeros(q)

    def correction_depth(self):
        return 0

    def is_confining(self):
        return True

    @property
    def is_quadratic_family(self):
        return True

    def force_constant(self, mass=1.0):
        return mass * self.omega ** 2

    def params(self):
        return {"omega": self.omega}


@dataclass(frozen=True)
class InvertedParabola(Potential):
    """``U = -m kappa^2 q^2 / 2``: the harmonic oscillator with ``omega^2 -> -kappa^2``."""

    kappa: float = 1.0
    kind = "inverted_parabola"

    def __post_init__(self):
        object.__setattr__(self, "kappa", _positive("kappa", self.kappa))

    def value(self, q, mass=1.0):
        q = np.asarray(q, dtype=float)
        return -0.5 * mass * self.kappa ** 2 * q * q

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        q = np.asarray(q, dtype=float)
        k = -mass * self.kappa ** 2
        if n == 1:
            return k * q
        if n == 2:
            return self._zeros(q) + k
        return self._zeros(q)

    def correction_depth(self):
        return 0

    @property
    def is_quadratic_family(self):
        return True

    def force_constant(self, mass=1.0):
        return -mass * self.kappa ** 2

    def params(self):
        return {"kappa": self.kappa}


@dataclass(frozen=True)
class Quartic(Potential):
    """Anharmonic oscillator ``U = m omega^2 q^2 / 2 + C q^4``."""

    omega: float = 1.0
    c: float = 0.1
    kind = "quartic"

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive("omega", self.omega))
        object.__setattr__(self, "c", _finite("c", self.c))

    def value(self, q, mass=1.0):
        q = np.asarray(q, dtype=float)
        q2 = q * q
        return 0.5 * mass * self.omega ** 2 * q2 + self.c * q2 * q2

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        q = np.asarray(q, dtype=float)
        k = mass * self.omega ** 2
        if n == 1:
            return k * q + 4.0 * self.c * q ** 3
        if n == 2:
            return k + 12.0 * self.c * q * q
        if n == 3:
            return 24.0 * self.c * q
        if n == 4:
            return self._zeros(q) + 24.0 * self.c
        return self._zeros(q)

    def correction_depth(self):
        return 1 if self.c != 0.0 else 0

    def is_confining(self):
        return self.c >= 0.0

    def params(self):
        return {"omega": self.omega, "c": self.c}


@dataclass(frozen=True)
class Exponential(Potential):
    """``U = alpha exp(-beta q)``."""

    alpha: float = 1.0
    beta: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _finite("alpha", self.alpha))
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    def value(self, q, mass=1.0):
        return self.alpha * np.exp(-self.beta * np.asarray(q, dtype=float))

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        return (-self.beta) ** n * self.value(q)

    def correction_depth(self):
        return INFINITE if self.alpha != 0.0 else 0

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Cosine(Potential):
    """Periodic potential ``U = U0 cos(k q)``."""

    u0: float = 1.0
    k: float = 1.0
    kind = "cosine"

    def __post_init__(self):
        object.__setattr__(self, "u0", _finite("u0", self.u0))
        object.__setattr__(self, "k", _positive("k", self.k))

    def value(self, q, mass=1.0):
        return self.u0 * np.cos(self.k * np.asarray(q, dtype=float))

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        # d^n/dq^n cos(kq) = k^n cos(kq + n pi/2)
        return self.u0 * self.k ** n * np.cos(self.k * np.asarray(q, dtype=float) + n * math.pi / 2)

    def correction_depth(self):
        return INFINITE if self.u0 != 0.0 else 0

    def params(self):
        return {"u0": self.u0, "k": self.k}


@dataclass(frozen=True)
class Polynomial(Potential):
    """``U = sum_{n>=1} a_n q^n``; ``coefficients[0]`` is ``a_1``."""

    coefficients: Tuple[float, ...] = (0.0,)
    kind = "polynomial"

    def __post_init__(self):
        coeffs = tuple(_finite("coefficient", c) for c in self.coefficients)
        if not coeffs:
            coeffs = (0.0,)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def _full(self) -> np.ndarray:
        return np.concatenate([[0.0], self.coefficients])

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coefficients)[0]
        return int(nz[-1]) + 1 if nz.size else 0

    def value(self, q, mass=1.0):
        return npoly.polyval(np.asarray(q, dtype=float), self._full)

    def derivative(self, q, n=1, mass=1.0):
        _check_order(n)
        q = np.asarray(q, dtype=float)
        if n > self.degree:
            return self._zeros(q)
        return npoly.polyval(q, npoly.polyder(self._full, n)) + self._zeros(q)

    def correction_depth(self):
        return max(0, (self.degree - 1) // 2)

    def is_confining(self):
        d = self.degree
        return d >= 2 and d % 2 == 0 and self.coefficients[d - 1] > 0

    @property
    def is_quadratic_family(self):
        return self.degree <= 2

    def force_constant(self, mass=1.0):
        if self.degree > 2:
            raise ValueError("polynomial is not quadratic")
        return 2.0 * self.coefficients[1] if len(self.coefficients) > 1 else 0.0

    def params(self):
        return {"coefficients": self.coefficients}


def _check_order(n):
    if int(n) != n or n < 1:
        raise ValueError(f"derivative order must be a positive integer, got {n!r}")


def value(potential: Potential, q, mass=1.0):
    return potential.value(q, mass)


def derivative(potential: Potential, q, n=1, mass=1.0):
    return potential.derivative(q, n, mass)


def correction_depth(potential: Potential):
    """Number of ``hbar^(2n)`` terms in the Wigner-Moyal series (``math.inf`` if unbounded)."""
    return potential.correction_depth()


def linear_force(potential: Potential, mass=1.0) -> float:
    """Constant part of ``U'`` for quadratic-family potentials."""
    if isinstance(potential, Linear):
        return potential.gamma
    if isinstance(potential, Polynomial) and potential.degree <= 2:
        return potential.coefficients[0]
    return 0.0


CATALOG = {
    cls.kind: cls
    for cls in (Free, Linear, Harmonic, InvertedParabola, Quartic, Exponential, Cosine, Polynomial)
}


def make_potential(kind: str, **params) -> Potential:
    try:
        cls = CATALOG[kind]
    except KeyError:
        raise ValueError(f"unknown potential {kind!r}; expected one of {sorted(CATALOG)}") from None
    return cls(**params)
