"""Physical constants and open-system coefficients.

The environment enters through two Lindblad operators that are linear in
``p`` and ``q``,  ``V_j = a_j p + b_j q``.  Their coefficients fix the
diffusion matrix ``(D_qq, D_pp, D_pq)`` and the friction constant ``lambda``;
the Hamiltonian coupling ``mu`` is an independent input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

from .errors import InvalidCoefficients, InvalidParameters

#: absolute slack used by every constraint comparison
CONSTRAINT_ATOL = 1e-12


@dataclass(frozen=True)
class LindbladOpCoeffs:
    """Coefficients of ``V_1 = a1 p + b1 q`` and ``V_2 = a2 p + b2 q``."""

    a1: complex = 0j
    b1: complex = 0j
    a2: complex = 0j
    b2: complex = 0j

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise InvalidCoefficients(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def pairs(self) -> Tuple[Tuple[complex, complex], ...]:
        return ((self.a1, self.b1), (self.a2, self.b2))


def coefficients_from_ops(ops: LindbladOpCoeffs, hbar: float) -> Tuple[float, float, float, float]:
    """Diffusion and friction coefficients generated by two linear Lindblad operators.

    Returns
    -------
    (d_pp, d_qq, d_pq, lam)
    """
    if not (math.isfinite(hbar) and hbar > 0):
        raise InvalidCoefficients(f"hbar must be positive and finite, got {hbar!r}")
    if not isinstance(ops, LindbladOpCoeffs):
        ops = LindbladOpCoeffs(*ops)
    sum_aa = sum(abs(a) ** 2 for a, _ in ops.pairs)
    sum_bb = sum(abs(b) ** 2 for _, b in ops.pairs)
    cross = sum(a.conjugate() * b for a, b in ops.pairs)
    d_qq = 0.5 * hbar * sum_aa
    d_pp = 0.5 * hbar * sum_bb
    d_pq = -0.5 * hbar * cross.real
    lam = -cross.imag
    return d_pp, d_qq, d_pq, lam


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    margin: float
    description: str


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[ConstraintCheck, ...]
    closed_system: bool

    @property
    def valid(self) -> bool:
        return self.closed_system or all(c.passed for c in self.checks)

    @property
    def failures(self) -> Tuple[ConstraintCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> ConstraintCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def summary(self) -> str:
        if self.closed_system:
            return "closed system (no dissipation)"
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            lines.append(f"{c.name}) {c.description}: margin {c.margin:.6g} [{status}]")
        return "; ".join(lines)


@dataclass(frozen=True)
class LindbladParams:
    """Mass, Planck constant and the open-system coefficients.

    ``lam`` is the friction constant, ``mu`` the coupling of the
    ``(pq + qp)/2`` Hamiltonian term.  With every dissipation field zero the
    parameters describe a closed system.
    """

    mass: float = 1.0
    hbar: float = 1.0
    lam: float = 0.0
    mu: float = 0.0
    d_pp: float = 0.0
    d_qq: float = 0.0
    d_pq: float = 0.0
    ops: LindbladOpCoeffs | None = field(default=None, compare=True)

    def __post_init__(self):
        for name in ("mass", "hbar", "lam", "mu", "d_pp", "d_qq", "d_pq"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.mass <= 0:
            raise InvalidParameters(f"mass must be positive, got {self.mass}")
        if self.hbar <= 0:
            raise InvalidParameters(f"hbar must be positive, got {self.hbar}")

    @classmethod
    def from_ops(cls, ops: LindbladOpCoeffs, *, mass=1.0, hbar=1.0, mu=0.0) -> "LindbladParams":
        d_pp, d_qq, d_pq, lam = coefficients_from_ops(ops, hbar)
        return cls(mass=mass, hbar=hbar, lam=lam, mu=mu, d_pp=d_pp, d_qq=d_qq, d_pq=d_pq, ops=ops)

    @classmethod
    def kramers(cls, gamma: float, kT: float, *, mass=1.0, hbar=1.0) -> "LindbladParams":
        """High-temperature bath: ``lam = mu = gamma``, momentum diffusion ``2 m gamma kT`` only.

        This configuration has ``D_qq = 0`` and therefore does not pass
        :func:`validate`; evolve it with ``enforce_constraints=False``.
        """
        return cls(mass=mass, hbar=hbar, lam=gamma, mu=gamma, d_pp=2.0 * mass * gamma * kT)

    @property
    def is_closed(self) -> bool:
        return self.d_pp == 0.0 and self.d_qq == 0.0 and self.d_pq == 0.0 and self.lam == 0.0

    @property
    def is_free_of_environment(self) -> bool:
        """No dissipation and no ``mu`` coupling: the generator is purely Hamiltonian in ``H0``."""
        return self.is_closed and self.mu == 0.0

    @property
    def q_drift_rate(self) -> float:
        """Coefficient of ``d/dq (q W)``."""
        return self.lam - self.mu

    @property
    def p_drift_rate(self) -> float:
        """Coefficient of ``d/dp (p W)``."""
        return self.lam + self.mu


def validate(params: LindbladParams) -> ValidationReport:
    """Check the positivity constraints on the diffusion coefficients.

    Never raises; inspect ``report.valid`` and ``report.failures``.
    """
    margin_iii = (
        params.d_pp * params.d_qq - params.d_pq ** 2 - (params.lam * params.hbar) ** 2 / 4.0
    )
    checks = (
        ConstraintCheck("i", params.d_pp > 0.0, params.d_pp, "D_pp > 0"),
        ConstraintCheck("ii", params.d_qq > 0.0, params.d_qq, "D_qq > 0"),
        ConstraintCheck("iii", margin_iii >= -CONSTRAINT_ATOL, margin_iii,
                        "D_pp D_qq - D_pq^2 >= lambda^2 hbar^2 / 4"),
    )
    return ValidationReport(checks=checks, closed_system=params.is_closed)
