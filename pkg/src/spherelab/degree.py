"""Topological degree of sampled sphere maps.

Three routes that must agree:

* :func:`winding_number` - d=1, total swept angle / 2*pi.
* :func:`kronecker_degree` - d=2, sum of signed spherical areas of image
  triangles / 4*pi (the discretized Jacobian integral).
* :func:`preimage_count` - signed count of preimages of a regular value;
  the independent oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NotRegularValueError, ResolutionError
from .geometry import as_unit, fibonacci_sphere_grid, signed_solid_angles
from .maps import SampledMap, SphereMap, tangent_frame

ANTIPODAL_GAP = 1e-6  # consecutive winding samples must stay this far from antipodal
RESIDUAL_WARN = 0.1  # rounding residual above this hints at under-resolution
JACOBIAN_FLOOR = 1e-6  # |Jacobian| below this means the target is not regular
REFINE_TOL = 1e-10  # preimages are located to this chordal accuracy
MAX_NEWTON_SEEDS = 64  # refine from this many closest-image scan points


@dataclass(frozen=True)
class DegreeResult:
    """Integral value, its nearest integer, and the rounding residual."""

    raw: float
    degree: int
    residual: float

    @classmethod
    def from_raw(cls, raw: float) -> "DegreeResult":
        deg = int(round(raw))
        res = abs(raw - deg)
        if res >= RESIDUAL_WARN:
            warnings.warn(
                f"degree residual {res:.3f} suggests an under-resolved grid",
                stacklevel=3,
            )
        return cls(raw=raw, degree=deg, residual=res)


def winding_number(sm: SampledMap) -> DegreeResult:
    """Degree of a sampled circle map: wrapped angle increments / 2*pi.

    Raises ResolutionError when consecutive image points come within
    ANTIPODAL_GAP of antipodal, where the wrap is ambiguous.
    """
    if sm.dim != 1:
        raise ValueError("winding_number needs a map sampled on S^1")
    v = sm.values
    nxt = np.roll(v, -1, axis=0)
    dots = np.einsum("ij,ij->i", v, nxt)
    if np.any(dots <= -1.0 + 2.0 * ANTIPODAL_GAP):
        # chordal gap to antipodal below ANTIPODAL_GAP: dot <= -1 + ~2*gap
        raise ResolutionError(
            "consecutive image points nearly antipodal; refine the circle grid"
        )
    cross = v[:, 0] * nxt[:, 1] - v[:, 1] * nxt[:, 0]
    raw = float(np.arctan2(cross, dots).sum() / (2.0 * math.pi))
    return DegreeResult.from_raw(raw)


DEGENERATE_TRIANGLE_FLOOR = 1e-12


def kronecker_degree(sm: SampledMap, mesh=None) -> DegreeResult:
    """Degree of a sampled S^2 map via signed image areas over a mesh.

    The mesh defaults to the one attached to the sampling grid.  An image
    triangle whose vertices nearly span a great circle makes the solid
    angle ill-defined and raises ResolutionError; coincident image points
    are harmless (zero area).
    """
    if sm.dim != 2:
        raise ValueError("kronecker_degree needs a map sampled on S^2")
    if mesh is None:
        mesh = sm.grid.mesh
    if mesh is None:
        raise ValueError("grid carries no triangle mesh; sample on an icosphere")
    t = mesh.triangles
    a, b, c = sm.values[t[:, 0]], sm.values[t[:, 1]], sm.values[t[:, 2]]
    denom = (
        1.0
        + np.einsum("ij,ij->i", a, b)
        + np.einsum("ij,ij->i", b, c)
        + np.einsum("ij,ij->i", c, a)
    )
    if np.any(denom <= DEGENERATE_TRIANGLE_FLOOR):
        raise ResolutionError(
            "degenerate image triangle (near a great circle); refine the mesh"
        )
    det = np.einsum("ij,ij->i", a, np.cross(b, c))
    raw = float((2.0 * np.arctan2(det, denom)).sum() / (4.0 * math.pi))
    return DegreeResult.from_raw(raw)


def degree_of(sm: SampledMap) -> DegreeResult:
    """Dimension dispatch: winding number on S^1, Kronecker sum on S^2."""
    return winding_number(sm) if sm.dim == 1 else kronecker_degree(sm)


# ---------------------------------------------------------------------------
# preimage counting (the oracle)


def _wrap_angle(a: np.ndarray) -> np.ndarray:
    return np.arctan2(np.sin(a), np.cos(a))


def _image_angle(m: SphereMap, theta) -> np.ndarray:
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    out = m(np.atleast_2d(pts))
    return np.arctan2(out[:, 1], out[:, 0])


def _circle_preimages(m: SphereMap, target: np.ndarray, resolution: int):
    t_ang = math.atan2(target[1], target[0])
    theta = 2.0 * math.pi * np.arange(resolution + 1) / resolution
    rel = _wrap_angle(_image_angle(m, theta) - t_ang)
    roots = []
    for i in range(resolution):
        lo, hi = theta[i], theta[i + 1]
        f_lo, f_hi = rel[i], rel[i + 1]
        if f_lo == 0.0:
            roots.append(lo)
            continue
        # genuine sign change without branch jump
        if f_lo * f_hi < 0.0 and abs(f_hi - f_lo) < math.pi:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                f_mid = float(_wrap_angle(_image_angle(m, np.asarray([mid])) - t_ang)[0])
                if f_lo * f_mid <= 0.0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
                if hi - lo < REFINE_TOL:
                    break
            roots.append(0.5 * (lo + hi))
    return roots


def _circle_jacobian(m: SphereMap, theta: float) -> float:
    h = 1e-6
    a = _image_angle(m, np.asarray([theta - h, theta + h]))
    return float(_wrap_angle(np.asarray([a[1] - a[0]]))[0]) / (2.0 * h)


def _sphere_newton(m: SphereMap, p0: np.ndarray, target: np.ndarray, frame_t):
    tau1, tau2 = frame_t
    p = p0.copy()
    h = 1e-6
    for _ in range(60):
        t1, t2 = tangent_frame(p[None, :], 2)
        t1, t2 = t1[0], t2[0]

        def f(q):
            gq = m(q)
            return np.array([np.dot(gq - target, tau1), np.dot(gq - target, tau2)])

        f0 = f(p)
        j = np.empty((2, 2))
        for col, t in enumerate((t1, t2)):
            qp = as_unit(p + h * t)
            qm = as_unit(p - h * t)
            j[:, col] = (f(qp) - f(qm)) / (2.0 * h)
        try:
            step = np.linalg.solve(j, -f0)
        except np.linalg.LinAlgError:
            return None
        norm = float(np.linalg.norm(step))
        if norm > 0.2:
            step *= 0.2 / norm
        p = as_unit(p + step[0] * t1 + step[1] * t2)
        if norm < REFINE_TOL:
            return p
    return None


def preimage_count(m: SphereMap, target, resolution: int = 4096) -> int:
    """Signed number of preimages of ``target``, a regular value of ``m``.

    Locates preimages by a coarse scan (``resolution`` points) plus local
    refinement: bisection on S^1, projected Newton on S^2.  Each located
    preimage must have |Jacobian| >= 1e-6, else NotRegularValueError.
    The result equals the degree when the target is regular and the scan
    is fine enough to seed every preimage basin.
    """
    target = as_unit(np.asarray(target, dtype=float))
    if m.dim == 1:
        total = 0
        for theta in _circle_preimages(m, target, resolution):
            jac = _circle_jacobian(m, theta)
            if abs(jac) < JACOBIAN_FLOOR:
                raise NotRegularValueError(
                    f"preimage at angle {theta:.6f} has |Jacobian| {abs(jac):.2e}"
                )
            total += 1 if jac > 0 else -1
        return total

    scan = fibonacci_sphere_grid(max(int(resolution), 12))
    img = m(scan.points)
    d2 = np.einsum("ij,ij->i", img - target, img - target)
    # Newton from the scan points landing closest to the target; basins of
    # concentrated maps are far smaller than the scan spacing, so a radius
    # cut would miss them
    order = np.argsort(d2, kind="stable")
    seeds = scan.points[order[: MAX_NEWTON_SEEDS]]
    seeds = seeds[d2[order[: MAX_NEWTON_SEEDS]] < 0.25]
    tau = tangent_frame(target[None, :], 2)
    tau = (tau[0][0], tau[1][0])
    found: list[np.ndarray] = []
    signs: list[int] = []
    for p0 in seeds:
        p = _sphere_newton(m, p0, target, tau)
        if p is None:
            continue
        if float(np.linalg.norm(m(p) - target)) > 1e-8:
            continue
        if any(float(np.linalg.norm(p - q)) < 1e-6 for q in found):
            continue
        # local signed Jacobian in right-handed frames at p and target
        t1, t2 = tangent_frame(p[None, :], 2)
        t1, t2 = t1[0], t2[0]
        h = 1e-6
        j = np.empty((2, 2))
        for col, t in enumerate((t1, t2)):
            gp = m(as_unit(p + h * t))
            gm = m(as_unit(p - h * t))
            dgt = (gp - gm) / (2.0 * h)
            j[:, col] = (np.dot(dgt, tau[0]), np.dot(dgt, tau[1]))
        det = float(np.linalg.det(j))
        if abs(det) < JACOBIAN_FLOOR:
            raise NotRegularValueError(
                f"preimage near {p.round(6).tolist()} has |Jacobian| {abs(det):.2e}"
            )
        found.append(p)
        signs.append(1 if det > 0 else -1)
    return int(sum(signs))
