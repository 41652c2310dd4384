"""Discretizations of S^1 and S^2: quadrature grids, oriented triangle
meshes, and the chordal metric.

Conventions
-----------
* A sphere point is a unit vector in R^(d+1), stored as a row of a float64
  array.  Constructors renormalize as a final step, so downstream code may
  assume |p| = 1 to 1e-12.
* All distances are chordal (Euclidean in the ambient space), never
  geodesic.
* Grid weights are in surface-measure units and sum to |S^d|
  (2*pi for d=1, 4*pi for d=2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError

SPHERE_MEASURE = {1: 2.0 * math.pi, 2: 4.0 * math.pi}

MAX_ICOSPHERE_LEVEL = 8


def as_unit(v) -> np.ndarray:
    """Return v (vector or array of row vectors) scaled to unit norm."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise ValueError("cannot normalize a zero vector")
    return v / n


def chordal_distance(p, q) -> float:
    """Euclidean distance |p - q| between two sphere points; in [0, 2]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.linalg.norm(p - q))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class TriangleMesh:
    """Oriented triangulation of S^2.

    Every triangle (a, b, c) satisfies det(v_a, v_b, v_c) > 0, i.e. the
    vertex order is counter-clockwise seen from outside.
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        verts = _freeze(self.vertices)
        tris = np.ascontiguousarray(self.triangles, dtype=np.int64)
        a, b, c = (verts[tris[:, k]] for k in range(3))
        dets = np.einsum("ij,ij->i", a, np.cross(b, c))
        flip = dets <= 0.0
        if np.any(flip):
            tris[flip] = tris[flip][:, [0, 2, 1]]
        tris.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def edges(self) -> np.ndarray:
        """Unique undirected edges as an (e, 2) index array."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.edges().shape[0] + self.n_triangles

    def max_edge_length(self) -> float:
        e = self.edges()
        d = self.vertices[e[:, 0]] - self.vertices[e[:, 1]]
        return float(np.linalg.norm(d, axis=1).max())


@dataclass(frozen=True)
class QuadratureGrid:
    """Point set on S^d with surface-measure weights.

    ``mesh`` is set for icosphere grids (the degree integral needs oriented
    triangles) and None otherwise.  ``kind`` is the spec string that
    rebuilds the grid, e.g. ``circle:4096``.
    """

    dim: int
    points: np.ndarray
    weights: np.ndarray
    mesh: TriangleMesh | None = None
    kind: str = ""
    _spacing: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim + 1:
            raise ValueError("points must have shape (n, dim+1)")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (pts.shape[0],) or np.any(w <= 0.0):
            raise ValueError("weights must be positive, one per point")
        object.__setattr__(self, "points", _freeze(as_unit(pts)))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def spacing(self) -> float:
        """Max nearest-neighbor chordal gap; the grid's resolution scale."""
        if not self._spacing:
            self._spacing.append(self._compute_spacing())
        return self._spacing[0]

    def _compute_spacing(self) -> float:
        if self.dim == 1:
            # equispaced circle: consecutive chord
            return 2.0 * math.sin(math.pi / self.n)
        if self.mesh is not None:
            return self.mesh.max_edge_length()
        # generic point set: exact nearest-neighbor pass, blocked
        pts = self.points
        out = 0.0
        block = max(1, 4_000_000 // max(self.n, 1))
        for i0 in range(0, self.n, block):
            sub = pts[i0 : i0 + block]
            d2 = 2.0 - 2.0 * (sub @ pts.T)
            rows = np.arange(sub.shape[0])
            d2[rows, rows + i0] = np.inf
            out = max(out, float(np.sqrt(np.maximum(d2.min(axis=1), 0.0)).max()))
        return out


def uniform_circle_grid(n: int) -> QuadratureGrid:
    """n equispaced points on S^1 at angles 2*pi*i/n, each weight 2*pi/n."""
    if n < 3:
        raise ValueError(f"circle grid needs n >= 3, got {n}")
    theta = 2.0 * math.pi * np.arange(n) / n
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    w = np.full(n, 2.0 * math.pi / n)
    return QuadratureGrid(1, pts, w, kind=f"circle:{n}")


def fibonacci_sphere_grid(n: int) -> QuadratureGrid:
    """n golden-angle spiral points on S^2 with equal weights 4*pi/n.

    Quasi-uniform; used to cross-check the icosphere quadrature.  Carries
    no mesh, so it cannot feed the degree integral.
    """
    if n < 12:
        raise ValueError(f"fibonacci grid needs n >= 12, got {n}")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * i
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    w = np.full(n, 4.0 * math.pi / n)
    return QuadratureGrid(2, pts, w, kind=f"fibonacci:{n}")


# Icosahedron with consistently oriented outward faces.
_ICO_T = (1.0 + math.sqrt(5.0)) / 2.0
_ICO_VERTS = np.array(
    [
        (-1, _ICO_T, 0), (1, _ICO_T, 0), (-1, -_ICO_T, 0), (1, -_ICO_T, 0),
        (0, -1, _ICO_T), (0, 1, _ICO_T), (0, -1, -_ICO_T), (0, 1, -_ICO_T),
        (_ICO_T, 0, -1), (_ICO_T, 0, 1), (-_ICO_T, 0, -1), (-_ICO_T, 0, 1),
    ],
    dtype=float,
)
_ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)


def _subdivide(verts: np.ndarray, tris: np.ndarray):
    """Split each triangle into four, new vertices pushed to the sphere."""
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    mids = as_unit(verts[uniq[:, 0]] + verts[uniq[:, 1]])
    base = verts.shape[0]
    m01, m12, m20 = (inv.reshape(3, -1) + base)
    children = np.concatenate(
        [
            np.stack([tris[:, 0], m01, m20], axis=1),
            np.stack([tris[:, 1], m12, m01], axis=1),
            np.stack([tris[:, 2], m20, m12], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ]
    )
    return np.concatenate([verts, mids]), children


def signed_solid_angles(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed spherical areas of triangles (a, b, c) on S^2, vectorized.

    Half-tangent (solid-angle) formula: stable on slim triangles, sign
    follows the vertex orientation.  Returns values in (-2*pi, 2*pi].
    """
    det = np.einsum("...i,...i->...", a, np.cross(b, c))
    denom = (
        1.0
        + np.einsum("...i,...i->...", a, b)
        + np.einsum("...i,...i->...", b, c)
        + np.einsum("...i,...i->...", c, a)
    )
    return 2.0 * np.arctan2(det, denom)


def icosphere_mesh(level: int) -> tuple[TriangleMesh, QuadratureGrid]:
    """Subdivided icosahedron projected to S^2.

    Vertex weights lump one third of each incident spherical triangle's
    area, so they sum to 4*pi exactly up to rounding.
    """
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    if level > MAX_ICOSPHERE_LEVEL:
        raise ResourceLimitError(
            f"icosphere level {level} exceeds the guard ({MAX_ICOSPHERE_LEVEL})"
        )
    verts = as_unit(_ICO_VERTS)
    tris = _ICO_FACES.copy()
    for _ in range(level):
        verts, tris = _subdivide(verts, tris)
    mesh = TriangleMesh(as_unit(verts), tris)
    v, t = mesh.vertices, mesh.triangles
    areas = signed_solid_angles(v[t[:, 0]], v[t[:, 1]], v[t[:, 2]])
    w = np.bincount(
        t.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=mesh.n_vertices
    )
    grid = QuadratureGrid(2, v, w, mesh=mesh, kind=f"icosphere:{level}")
    return mesh, grid


def write_grid(grid: QuadratureGrid, stream) -> None:
    """Serialize a grid to the plain-text format ``dim n`` header plus one
    ``x y z w`` (``x y w`` for d=1) row per point, then ``tri a b c`` rows
    when a mesh is attached."""
    stream.write(f"{grid.dim} {grid.n}\n")
    for p, w in zip(grid.points, grid.weights):
        coords = " ".join(repr(float(c)) for c in p)
        stream.write(f"{coords} {float(w)!r}\n")
    if grid.mesh is not None:
        for a, b, c in grid.mesh.triangles:
            stream.write(f"tri {a} {b} {c}\n")


def read_grid(stream) -> QuadratureGrid:
    """Parse the format written by :func:`write_grid`."""
    header = stream.readline().split()
    if len(header) != 2:
        raise ValueError("grid header must be 'dim n'")
    dim, n = int(header[0]), int(header[1])
    pts, ws, tris = [], [], []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "tri":
            tris.append([int(x) for x in parts[1:4]])
        else:
            vals = [float(x) for x in parts]
            if len(vals) != dim + 2:
                raise ValueError(f"expected {dim + 2} columns, got {len(vals)}")
            pts.append(vals[:-1])
            ws.append(vals[-1])
    if len(pts) != n:
        raise ValueError(f"header promised {n} points, file has {len(pts)}")
    pts = np.asarray(pts)
    mesh = TriangleMesh(as_unit(pts), np.asarray(tris, dtype=np.int64)) if tris else None
    return QuadratureGrid(dim, pts, np.asarray(ws), mesh=mesh, kind=f"file:{dim}x{n}")
