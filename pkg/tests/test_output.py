import numpy as np
import pytest

from openwigner import DensityMatrixGrid, GridMismatch, PhaseSpaceGrid, WignerState
from openwigner.errors import IoError
from openwigner.integrate import TrajectoryRecord
from openwigner.output import (
    heatmap_bytes,
    read_density_matrix,
    read_pgm,
    write_density_matrix,
    write_field,
    write_pgm,
    write_trajectory,
)


def test_trajectory_csv_exact(tmp_path):
    rec = TrajectoryRecord()
    rec.append([0.1, 1 / 3, 2, 3, 4, 5, 6, 7, -1e-300, 9])
    path = tmp_path / "t.csv"
    write_trajectory(str(path), rec)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,mass,mean_q,mean_p,sigma_qq,sigma_pp,sigma_pq,edge_mass,min_w,energy"
    values = [float(x) for x in lines[1].split(",")]
    assert values == list(rec.rows[0])
    assert lines[1].split(",")[1] == "0.33333333333333331"


def test_field_csv_triples(tmp_path):
    g = PhaseSpaceGrid.symmetric(1, 2, 8)
    W = WignerState(g, np.arange(64.0).reshape(8, 8))
    write_field(str(tmp_path / "f.csv"), W)
    data = np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)
    assert data.shape == (64, 3)
    assert tuple(data[9]) == (g.q[1], g.p[1], 9.0)


def test_heatmap_mapping():
    v = np.array([[-1.0, 0.0], [1.0, 0.5]])
    np.testing.assert_array_equal(heatmap_bytes(v), [[0, 128], [255, 191]])
    assert heatmap_bytes(np.ones((2, 2))).max() == 0


def test_pgm_and_sidecar(tmp_path):
    g = PhaseSpaceGrid(0, 1, 0, 1, 8, 16)
    values = np.zeros(g.shape)
    values[0, -1] = 2.0  # q smallest, p largest -> top-left pixel
    values[-1, 0] = -1.0
    path = tmp_path / "w.pgm"
    write_pgm(str(path), WignerState(g, values, 0.5))
    img = read_pgm(str(path))
    assert img.shape == (16, 8)
    assert img[0, 0] == 255 and img[-1, -1] == 0
    side = (tmp_path / "w.pgm.txt").read_text()
    assert "min = -1\n" in side and "max = 2\n" in side and "time = 0.5" in side


def test_density_matrix_round_trip(tmp_path):
    q = np.linspace(-2, 2, 8, endpoint=False)
    psi = np.exp(-q ** 2 + 0.3j * q)
    rho = DensityMatrixGrid.from_wavefunction(q, psi)
    write_density_matrix(str(tmp_path / "r.csv"), rho)
    back = read_density_matrix(str(tmp_path / "r.csv"))
    np.testing.assert_array_equal(back.q, q)
    np.testing.assert_array_equal(back.values, rho.values)


def test_density_matrix_bad_files(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c,d\n0,0,1,0\n")
    with pytest.raises(GridMismatch):
        read_density_matrix(str(bad))
    bad.write_text("q,q_prime,re,im\n0,0,1,0\n0,1,0,0\n")
    with pytest.raises(GridMismatch):
        read_density_matrix(str(bad))
    with pytest.raises(IoError):
        read_density_matrix(str(tmp_path / "missing.csv"))


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoError):
        write_trajectory(str(blocker / "sub" / "t.csv"), TrajectoryRecord())
