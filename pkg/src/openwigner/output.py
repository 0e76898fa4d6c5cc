"""Data products: trajectory and field CSV, PGM heatmaps, density-matrix files.

Numbers are written with 17 significant digits, which round-trips every
double exactly, so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import GridMismatch, IoError
from .integrate import TrajectoryRecord
from .phasespace import DensityMatrixGrid, WignerState

NUMBER_FORMAT = ".17g"
FIELD_COLUMNS = ("q", "p", "w")
DENSITY_COLUMNS = ("q", "q_prime", "re", "im")


def fmt(x: float) -> str:
    return format(float(x), NUMBER_FORMAT)


def _open(path: str, mode: str = "w"):
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        if "b" in mode:
            return open(path, mode)
        return open(path, mode, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def write_trajectory(path: str, record: TrajectoryRecord) -> None:
    _write_rows(path, record.columns, record.rows)


def write_field(path: str, W: WignerState) -> None:
    """``(q, p, w)`` triples, ``q`` varying slowest."""
    grid = W.grid
    qq, pp = np.meshgrid(grid.q, grid.p, indexing="ij")
    rows = np.column_stack([qq.ravel(), pp.ravel(), W.values.ravel()])
    _write_rows(path, FIELD_COLUMNS, rows)


def heatmap_bytes(values: np.ndarray) -> np.ndarray:
    """Map ``[min, max]`` linearly onto 0..255; a constant field maps to 0."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint8)
    scaled = np.rint((values - lo) * (255.0 / (hi - lo)))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def write_pgm(path: str, W: WignerState) -> None:
    """Binary 8-bit PGM with ``q`` along the columns and ``p`` increasing upward.

    A sidecar ``<path>.txt`` records the time and the ``min``/``max`` of W
    mapped to 0 and 255.
    """
    image = heatmap_bytes(W.values).T[::-1]
    height, width = image.shape
    with _open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image).tobytes())
    lo, hi = float(np.min(W.values)), float(np.max(W.values))
    with _open(path + ".txt") as fh:
        fh.write(f"time = {fmt(W.time)}\nmin = {fmt(lo)}\nmax = {fmt(hi)}\n")


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError(f"{path} is not an 8-bit binary PGM")
    width, height = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)


def read_density_matrix(path: str) -> DensityMatrixGrid:
    """Load a ``q, q_prime, re, im`` CSV on a uniform square grid."""
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise GridMismatch(f"{path}: malformed density-matrix table ({exc})") from exc
    with open(path, encoding="utf-8") as fh:
        header = tuple(h.strip() for h in fh.readline().split(","))
    if header != DENSITY_COLUMNS:
        raise GridMismatch(f"{path}: expected columns {DENSITY_COLUMNS}, got {header}")
    q = np.unique(table[:, 0])
    if table.shape[0] != q.size ** 2 or not np.array_equal(np.unique(table[:, 1]), q):
        raise GridMismatch(f"{path}: entries do not form a square grid over one q axis")
    i = np.searchsorted(q, table[:, 0])
    j = np.searchsorted(q, table[:, 1])
    values = np.zeros((q.size, q.size), dtype=complex)
    values[i, j] = table[:, 2] + 1j * table[:, 3]
    return DensityMatrixGrid(q, values)


def write_density_matrix(path: str, rho: DensityMatrixGrid) -> None:
    qq, qp = np.meshgrid(rho.q, rho.q, indexing="ij")
    rows = np.column_stack([qq.ravel(), qp.ravel(), rho.values.real.ravel(), rho.values.imag.ravel()])
    _write_rows(path, DENSITY_COLUMNS, rows)
