"""Explicit RK4 time stepping of Wigner fields with trajectory recording."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameters, NotAQuantumState, NumericalBlowup
from .evolution import WignerGenerator
from .params import LindbladParams, validate
from .phasespace import GaussianMoments, WignerState, edge_mass
from .potentials import Potential

log = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = (
    "t", "mass", "mean_q", "mean_p", "sigma_qq", "sigma_pp", "sigma_pq",
    "edge_mass", "min_w", "energy",
)


@dataclass(frozen=True)
class RunConfig:
    """Time-stepping controls.

    ``dt=None`` picks ``safety * max_stable_dt``; ``truncation=None`` uses the
    full finite correction series, or the default depth for infinite ones.
    """

    t_end: float = 1.0
    dt: Optional[float] = None
    stride: int = 1
    truncation: Optional[int] = None
    safety: float = 0.4
    snapshot_times: Tuple[float, ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be a positive integer, got {self.stride!r}")
        if not (0 < self.safety <= 1):
            raise ValueError(f"safety factor must lie in (0, 1], got {self.safety!r}")
        times = tuple(sorted(float(t) for t in self.snapshot_times))
        if any(t < 0 or t > self.t_end for t in times):
            raise ValueError("snapshot times must lie within [0, t_end]")
        object.__setattr__(self, "snapshot_times", times)
        object.__setattr__(self, "stride", int(self.stride))


class TrajectoryRecord:
    """Append-only table of observables sampled during a run."""

    columns = TRAJECTORY_COLUMNS

    def __init__(self):
        self._rows: List[Tuple[float, ...]] = []

    def __len__(self):
        return len(self._rows)

    def append(self, row: Sequence[float]) -> None:
        row = tuple(float(x) for x in row)
        if len(row) != len(self.columns):
            raise ValueError("row has the wrong number of columns")
        if not all(math.isfinite(x) for x in row):
            raise ValueError("trajectory entries must be finite")
        if self._rows and row[0] < self._rows[-1][0]:
            raise ValueError("trajectory times must be monotone")
        self._rows.append(row)

    def as_array(self) -> np.ndarray:
        return np.array(self._rows, dtype=float).reshape(-1, len(self.columns))

    def column(self, name: str) -> np.ndarray:
        return self.as_array()[:, self.columns.index(name)]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.column(name)

    @property
    def rows(self) -> Tuple[Tuple[float, ...], ...]:
        return tuple(self._rows)


def observe(W: WignerState, potential: Potential, mass: float) -> Tuple[float, ...]:
    """One trajectory row for ``W``."""
    grid = W.grid
    mom = GaussianMoments.from_state(W)
    w = W.values * grid.cell_area
    energy = float(np.sum((grid.P ** 2 / (2.0 * mass)) * w)
                   + np.sum(potential.value(grid.q, mass)[:, None] * w))
    return (W.time, float(np.sum(w)), mom.mean_q, mom.mean_p, mom.sigma_qq, mom.sigma_pp,
            mom.sigma_pq, edge_mass(W), float(np.min(W.values)), energy)


def _rk4(gen: WignerGenerator, values: np.ndarray, dt: float) -> np.ndarray:
    k1 = gen.total(values)
    k2 = gen.total(values + 0.5 * dt * k1)
    k3 = gen.total(values + 0.5 * dt * k2)
    k4 = gen.total(values + dt * k3)
    return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(W: WignerState, potential: Potential, params: LindbladParams, dt: float,
         truncation: int | None = None, *, generator: WignerGenerator | None = None) -> WignerState:
    """Advance ``W`` by one RK4 step of length ``dt``."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return W
    gen = generator or WignerGenerator(W.grid, potential, params, truncation)
    new = _rk4(gen, W.values, dt)
    if not np.all(np.isfinite(new)):
        cfl = dt / gen.max_stable_dt()
        raise NumericalBlowup(f"non-finite values at t={W.time + dt:.6g} (dt/dt_max={cfl:.3g})",
                              step=None, cfl=cfl)
    return WignerState(W.grid, new, W.time + dt)


def check_admissible(W: WignerState, hbar: float, rtol: float = 1e-6) -> None:
    """Reject fields whose covariance violates the uncertainty relation."""
    mom = GaussianMoments.from_state(W)
    m = float(np.sum(W.values) * W.grid.cell_area)
    if m <= 0:
        raise NotAQuantumState(f"state has non-positive mass {m:.6g}")
    # covariance of the normalised density
    mq, mp = mom.mean_q / m, mom.mean_p / m
    sqq = (mom.sigma_qq + mom.mean_q ** 2) / m - mq ** 2
    spp = (mom.sigma_pp + mom.mean_p ** 2) / m - mp ** 2
    spq = (mom.sigma_pq + mom.mean_q * mom.mean_p) / m - mq * mp
    det = sqq * spp - spq ** 2
    if det < hbar ** 2 / 4.0 * (1.0 - rtol):
        raise NotAQuantumState(
            f"covariance determinant {det:.6g} below hbar^2/4 = {hbar ** 2 / 4:.6g}")


def _stop_times(cfg: RunConfig) -> List[float]:
    stops = [t for t in cfg.snapshot_times if t > 0.0]
    if not stops or stops[-1] < cfg.t_end:
        stops.append(cfg.t_end)
    return sorted(set(stops))


def evolve(W0: WignerState, potential: Potential, params: LindbladParams, cfg: RunConfig,
           *, enforce_constraints: bool = True,
           on_sample: Callable[[WignerState], None] | None = None,
           on_snapshot: Callable[[WignerState], None] | None = None,
           ) -> Tuple[WignerState, TrajectoryRecord]:
    """Integrate from ``W0.time`` to ``W0.time + cfg.t_end``.

    The observer records a row every ``cfg.stride`` steps and at the final
    time.  Steps are shortened to land exactly on each snapshot time and on
    ``t_end``.  ``on_sample`` receives every recorded state and
    ``on_snapshot`` the states at ``cfg.snapshot_times``.
    """
    report = validate(params)
    if enforce_constraints and not report.valid:
        raise InvalidParameters("open-system constraints violated: " + report.summary())
    check_admissible(W0, params.hbar)

    gen = WignerGenerator(W0.grid, potential, params, cfg.truncation)
    dt_max = gen.max_stable_dt()
    dt = cfg.dt if cfg.dt is not None else cfg.safety * dt_max
    if not math.isfinite(dt):
        dt = cfg.t_end if cfg.t_end > 0 else 1.0
    if dt > dt_max:
        log.warning("dt=%.4g exceeds the estimated RK4 stability bound %.4g", dt, dt_max)

    record = TrajectoryRecord()
    t0 = W0.time

    def sample(state):
        with np.errstate(all="ignore"):
            row = observe(state, potential, params.mass)
        if not all(math.isfinite(x) for x in row):
            raise NumericalBlowup(f"observables overflowed at t={state.time:.6g} "
                                  f"(dt/dt_max={dt / dt_max:.3g})", cfl=dt / dt_max)
        record.append(row)
        if on_sample is not None:
            on_sample(state)

    sample(W0)
    if on_snapshot is not None and 0.0 in cfg.snapshot_times:
        on_snapshot(W0)

    values = np.array(W0.values, dtype=float)
    elapsed = 0.0
    n_steps = 0
    snapshot_set = set(cfg.snapshot_times)
    for stop in _stop_times(cfg):
        n_sub = max(1, math.ceil((stop - elapsed) / dt - 1e-9)) if stop > elapsed else 0
        for i in range(n_sub):
            h = min(dt, stop - elapsed) if i < n_sub - 1 else stop - elapsed
            values = _rk4(gen, values, h)
            elapsed = stop if i == n_sub - 1 else elapsed + h
            n_steps += 1
            if not np.all(np.isfinite(values)):
                raise NumericalBlowup(
                    f"non-finite values at step {n_steps}, t={t0 + elapsed:.6g} "
                    f"(dt/dt_max={dt / dt_max:.3g})", step=n_steps, cfl=dt / dt_max)
            if n_steps % cfg.stride == 0 and elapsed < cfg.t_end:
                sample(WignerState(W0.grid, values, t0 + elapsed))
        if stop in snapshot_set and on_snapshot is not None:
            on_snapshot(WignerState(W0.grid, values, t0 + elapsed))

    final = WignerState(W0.grid, values, t0 + cfg.t_end)
    if cfg.t_end > 0:
        sample(final)
    return final, record
