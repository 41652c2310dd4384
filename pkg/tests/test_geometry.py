import io
import math

import numpy as np
import pytest

from spherelab.errors import ResourceLimitError
from spherelab.geometry import (
    QuadratureGrid,
    chordal_distance,
    fibonacci_sphere_grid,
    icosphere_mesh,
    read_grid,
    uniform_circle_grid,
    write_grid,
)

from conftest import random_unit


def test_circle_grid_angles_and_weights():
    g = uniform_circle_grid(4)
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(g.points, expected, atol=1e-15)
    assert np.allclose(g.weights, math.pi / 2)


def test_circle_grid_weight_sum_exact():
    g = uniform_circle_grid(3)
    assert g.weights.sum() == pytest.approx(2 * math.pi, abs=1e-14)


def test_circle_grid_equispacing():
    g = uniform_circle_grid(4096)
    ang = np.arctan2(g.points[:, 1], g.points[:, 0]) % (2 * math.pi)
    gaps = np.diff(np.sort(ang))
    assert gaps.max() == pytest.approx(2 * math.pi / 4096, rel=1e-9)


def test_circle_grid_rejects_small_n():
    with pytest.raises(ValueError):
        uniform_circle_grid(2)


def test_icosphere_counts():
    mesh, grid = icosphere_mesh(0)
    assert mesh.n_vertices == 12 and mesh.n_triangles == 20
    for level in (1, 2, 3):
        mesh, grid = icosphere_mesh(level)
        assert mesh.n_triangles == 20 * 4**level
        assert mesh.n_vertices == 10 * 4**level + 2
        assert grid.n == mesh.n_vertices


@pytest.mark.parametrize("level", [0, 2, 3])
def test_icosphere_invariants(level):
    mesh, grid = icosphere_mesh(level)
    assert mesh.euler_characteristic() == 2
    # outward orientation
    v, t = mesh.vertices, mesh.triangles
    dets = np.einsum("ij,ij->i", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]]))
    assert (dets > 0).all()
    assert abs(grid.weights.sum() - 4 * math.pi) / (4 * math.pi) < 1e-9
    assert np.all(np.abs(np.linalg.norm(grid.points, axis=1) - 1) < 1e-12)


def test_icosphere_level_guard():
    with pytest.raises(ResourceLimitError):
        icosphere_mesh(9)


def test_icosphere_linear_quadrature_symmetry(ico3):
    _, grid = ico3
    for i in range(3):
        assert abs(grid.weights @ grid.points[:, i]) < 1e-6


def test_fibonacci_grid():
    g = fibonacci_sphere_grid(100)
    assert np.allclose(g.weights, 4 * math.pi / 100)
    g2 = fibonacci_sphere_grid(1000)
    assert g2.weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)
    assert g2.spacing() > 0  # pairwise distinct
    with pytest.raises(ValueError):
        fibonacci_sphere_grid(11)


def test_chordal_distance_cases():
    assert chordal_distance([1, 0], [-1, 0]) == pytest.approx(2.0)
    assert chordal_distance([1, 0], [0, 1]) == pytest.approx(math.sqrt(2))
    assert chordal_distance([0, 1], [0, 1]) == 0.0


def test_chordal_distance_properties():
    rng = np.random.default_rng(1)
    p = random_unit(rng, 2, 200)
    q = random_unit(rng, 2, 200)
    d_pq = np.linalg.norm(p - q, axis=1)
    for a, b, d in zip(p, q, d_pq):
        assert chordal_distance(a, b) == pytest.approx(d)
        assert chordal_distance(b, a) == chordal_distance(a, b)
        assert 0.0 <= chordal_distance(a, b) <= 2.0


def test_grid_constructor_normalizes():
    pts = np.array([[2.0, 0.0], [0.0, 3.0], [-1.0, 0.0]])
    g = QuadratureGrid(1, pts, np.ones(3))
    assert np.allclose(np.linalg.norm(g.points, axis=1), 1.0, atol=1e-15)


def test_grid_rejects_bad_weights():
    pts = np.eye(3)[:2, :]
    with pytest.raises(ValueError):
        QuadratureGrid(2, np.eye(3), np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        QuadratureGrid(1, pts, np.ones(3))


def test_grid_serialization_roundtrip(ico3):
    mesh, grid = ico3
    buf = io.StringIO()
    write_grid(grid, buf)
    buf.seek(0)
    back = read_grid(buf)
    assert back.dim == 2 and back.n == grid.n
    assert np.allclose(back.points, grid.points, atol=1e-15)
    assert np.allclose(back.weights, grid.weights, atol=1e-15)
    assert back.mesh.n_triangles == mesh.n_triangles


def test_grid_serialization_d1():
    g = uniform_circle_grid(8)
    buf = io.StringIO()
    write_grid(g, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "1 8"
    assert len(lines[1].split()) == 3  # x y w
