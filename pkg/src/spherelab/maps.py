"""Parametric families of maps S^d -> S^d with known degrees.

A map is a :class:`SphereMap`: a vectorized pure function taking an
(n, d+1) array of unit rows to unit rows, plus the spec string that
rebuilds it.  Families:

* ``power_map(k)`` - angle multiplication on S^1, degree k.
* ``rational_map(num, den)`` - quotient of polynomials in the
  stereographic chart of S^2, degree max(deg num, deg den).
* ``bubble_map(k, lam, dim)`` - conformal dilation concentrating all
  topological charge in a cap of scale 1/lam, degree k.
* ``perturb_map(base, amplitude, seed)`` - seeded smooth vector-field
  perturbation, renormalized.

The stereographic chart projects from the north pole (0, 0, 1) onto the
equatorial plane; rational-map poles go to the north pole by continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import QuadratureGrid, as_unit

MAX_POWER_DEGREE = 64
MAX_BUBBLE_DEGREE = 16
BUBBLE_LAMBDA_RANGE = (1.0, 1e4)
MAX_PERTURB_AMPLITUDE = 0.9

FOURIER_ORDER = 8  # d=1 perturbation basis: modes up to this order
HARMONIC_ORDER = 4  # d=2 perturbation basis: spherical harmonics up to this degree


class SphereMap:
    """Map S^d -> S^d.  Evaluators are pure; instances are immutable."""

    def __init__(self, dim: int, spec: str, fn):
        self.dim = dim
        self.spec = spec
        self._fn = fn

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            return self._fn(pts[None, :])[0]
        return self._fn(pts)

    def __repr__(self):
        return f"SphereMap({self.spec!r}, dim={self.dim})"


@dataclass(frozen=True)
class SampledMap:
    """A map's unit-norm values on the points of a grid."""

    grid: QuadratureGrid
    values: np.ndarray
    map_spec: str = ""

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.shape != self.grid.points.shape:
            raise ValueError("values must align with the grid points")
        norms = np.linalg.norm(vals, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("sampled values must be unit vectors (1e-10)")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.grid.dim


def sample_map(m: SphereMap, grid: QuadratureGrid) -> SampledMap:
    """Evaluate ``m`` on the grid points, renormalized to unit norm."""
    if m.dim != grid.dim:
        raise ValueError(f"map is on S^{m.dim} but grid is on S^{grid.dim}")
    return SampledMap(grid, as_unit(m(grid.points)), map_spec=m.spec)


# ---------------------------------------------------------------------------
# basic families


def constant_map(dim: int, point=None) -> SphereMap:
    """The constant map; degree 0."""
    if point is None:
        point = np.eye(dim + 1)[0]
    p = as_unit(np.asarray(point, dtype=float))

    def fn(pts):
        return np.broadcast_to(p, pts.shape).copy()

    return SphereMap(dim, "constant", fn)


def identity_map(dim: int) -> SphereMap:
    return SphereMap(dim, "identity", lambda pts: pts.copy())


def antipodal_map(dim: int) -> SphereMap:
    """x -> -x; degree (-1)^(d+1), i.e. +1 on S^1 and -1 on S^2."""
    return SphereMap(dim, "antipodal", lambda pts: -pts)


def power_map(k: int) -> SphereMap:
    """Angle multiplication theta -> k*theta on S^1; degree k."""
    k = int(k)
    if abs(k) > MAX_POWER_DEGREE:
        raise ValueError(f"|k| <= {MAX_POWER_DEGREE} required, got {k}")

    def fn(pts):
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        return np.stack([np.cos(k * theta), np.sin(k * theta)], axis=1)

    return SphereMap(1, f"power:k={k}", fn)


# ---------------------------------------------------------------------------
# stereographic machinery (d = 2)
#
# Points are carried in homogeneous chart coordinates (p : q) with
# z_chart = p/q, p = x + iy, q = 1 - z.  A chart value (a : b) maps back by
#   (2 Re(a conj(b)), 2 Im(a conj(b)), |a|^2 - |b|^2) / (|a|^2 + |b|^2),
# which handles poles (b = 0 -> north pole) without special cases.


def _to_chart(pts: np.ndarray):
    p = pts[:, 0] + 1j * pts[:, 1]
    q = 1.0 - pts[:, 2]
    scale = np.maximum(np.abs(p), np.abs(q))
    pole = scale == 0.0  # exactly the north pole: chart value infinity
    scale[pole] = 1.0
    p = p / scale
    q = q / scale
    p[pole] = 1.0
    q[pole] = 0.0
    return p, q


def _from_chart(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(a), np.abs(b))
    bad = scale == 0.0
    if np.any(bad):
        raise ValueError("chart value 0/0: numerator and denominator share a root")
    a = a / scale
    b = b / scale
    ab = a * np.conjugate(b)
    na = np.abs(a) ** 2
    nb = np.abs(b) ** 2
    denom = na + nb
    out = np.stack([2.0 * ab.real, 2.0 * ab.imag, na - nb], axis=1)
    return out / denom[:, None]


def _strip_trailing_zeros(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    keep = len(c)
    while keep > 1 and c[keep - 1] == 0:
        keep -= 1
    return c[:keep]


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        r = c.real
        return str(int(r)) if r == int(r) else repr(r)
    return f"{c.real:g}{c.imag:+g}j"


def _homogeneous_eval(coeffs: np.ndarray, p: np.ndarray, q: np.ndarray, deg: int):
    # sum_i c_i p^i q^(deg-i), Horner in p with a q-power ladder
    out = np.zeros_like(p)
    qpow = q ** (deg - (len(coeffs) - 1))
    for c in coeffs[::-1]:
        out = out * p + c * qpow
        qpow = qpow * q
    return out


def rational_map(num, den) -> SphereMap:
    """S^2 -> S^2 through the stereographic chart: z -> P(z)/Q(z).

    Coefficients are ascending (``num=(0, 1)`` is z).  Degree equals
    max(deg P, deg Q) when P and Q share no root; sharing is checked at a
    fixed point sample, not symbolically.
    """
    num = _strip_trailing_zeros(num)
    den = _strip_trailing_zeros(den)
    if np.all(den == 0):
        raise ValueError("denominator polynomial is zero")
    return _build_rational(num, den)


def _build_rational(num: np.ndarray, den: np.ndarray) -> SphereMap:
    deg = max(len(num), len(den)) - 1

    def fn(pts):
        p, q = _to_chart(pts)
        a = _homogeneous_eval(num, p, q, deg)
        b = _homogeneous_eval(den, p, q, deg)
        return _from_chart(a, b)

    spec = (
        "rational:num=" + ",".join(_fmt_coeff(c) for c in num)
        + ";den=" + ",".join(_fmt_coeff(c) for c in den)
    )
    m = SphereMap(2, spec, fn)
    # cheap common-root screen at a fixed sample
    probe = as_unit(np.random.default_rng(12345).standard_normal((256, 3)))
    m(probe)
    return m


def bubble_map(k: int, lam: float, dim: int) -> SphereMap:
    """Conformal dilation by ``lam`` composed with a degree-k map.

    d=1: theta -> k * M(theta) with M the Mobius dilation of the circle
    fixing theta=0 (expansion lam there).  d=2: z -> (lam*z)^k in the
    stereographic chart (conjugated chart for k < 0 so the degree is k).
    Degree is k for every lam; the charge concentrates in a cap of scale
    1/lam around (1, 0) resp. the south pole.
    """
    k = int(k)
    lam = float(lam)
    if abs(k) > MAX_BUBBLE_DEGREE:
        raise ValueError(f"|k| <= {MAX_BUBBLE_DEGREE} required, got {k}")
    if not (BUBBLE_LAMBDA_RANGE[0] <= lam <= BUBBLE_LAMBDA_RANGE[1]):
        raise ValueError(f"lambda must lie in {BUBBLE_LAMBDA_RANGE}, got {lam}")
    spec = f"bubble:k={k},lambda={lam:g},d={dim}"

    if dim == 1:

        def fn(pts):
            theta = np.arctan2(pts[:, 1], pts[:, 0])
            # M(theta) = 2*atan(lam*tan(theta/2)), written pole-free
            m = 2.0 * np.arctan2(lam * np.sin(theta / 2.0), np.cos(theta / 2.0))
            return np.stack([np.cos(k * m), np.sin(k * m)], axis=1)

        return SphereMap(1, spec, fn)

    if dim == 2:
        mdeg = abs(k)

        def fn(pts):
            p, q = _to_chart(pts)
            if k < 0:
                p = np.conjugate(p)  # chart conjugation: orientation reversal
            if k == 0:
                a = np.ones_like(p)
                b = np.ones_like(q)
            elif k > 0:
                a = (lam * p) ** mdeg
                b = q ** mdeg
            else:
                a = np.ones_like(p) * q ** mdeg
                b = (lam * p) ** mdeg
            # renormalize homogeneous pair for stability at large lam
            return _from_chart(a, b)

        return SphereMap(2, spec, fn)

    raise ValueError(f"bubble_map supports dim 1 or 2, got {dim}")


# ---------------------------------------------------------------------------
# seeded smooth perturbations


def _fourier_basis(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cols = [np.ones_like(theta)]
    sup = [1.0]
    for m in range(1, FOURIER_ORDER + 1):
        cols.append(np.cos(m * theta))
        cols.append(np.sin(m * theta))
        sup += [1.0, 1.0]
    return np.stack(cols, axis=1), np.asarray(sup)


def _assoc_legendre(lmax: int, z: np.ndarray) -> dict:
    """P_l^m(z) for 0 <= m <= l <= lmax (Condon-Shortley phase included)."""
    s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    P = {(0, 0): np.ones_like(z)}
    for m in range(1, lmax + 1):
        P[(m, m)] = -(2 * m - 1) * s * P[(m - 1, m - 1)]
    for m in range(0, lmax):
        P[(m + 1, m)] = (2 * m + 1) * z * P[(m, m)]
    for m in range(0, lmax + 1):
        for l in range(m + 2, lmax + 1):
            P[(l, m)] = ((2 * l - 1) * z * P[(l - 1, m)] - (l + m - 1) * P[(l - 2, m)]) / (l - m)
    return P


def _sph_harm_basis(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real orthonormal spherical harmonics up to degree HARMONIC_ORDER.

    Returns the (n, nbasis) design matrix and per-function sup-norm bounds
    sqrt((2l+1)/(4*pi)) from the addition theorem.
    """
    z = np.clip(pts[:, 2], -1.0, 1.0)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    P = _assoc_legendre(HARMONIC_ORDER, z)
    cols, sup = [], []
    for l in range(HARMONIC_ORDER + 1):
        bound = math.sqrt((2 * l + 1) / (4.0 * math.pi))
        n0 = math.sqrt((2 * l + 1) / (4.0 * math.pi))
        cols.append(n0 * P[(l, 0)])
        sup.append(bound)
        for m in range(1, l + 1):
            nm = math.sqrt(
                (2 * l + 1) / (2.0 * math.pi) * math.factorial(l - m) / math.factorial(l + m)
            )
            cols.append(nm * P[(l, m)] * np.cos(m * phi))
            cols.append(nm * P[(l, m)] * np.sin(m * phi))
            sup += [bound, bound]
    return np.stack(cols, axis=1), np.asarray(sup)


def perturb_map(base: SphereMap, amplitude: float, seed: int) -> SphereMap:
    """Add a seeded low-order harmonic vector field and renormalize.

    The field is scaled so its pointwise norm never exceeds 1, hence
    |base + amplitude*field| >= 1 - amplitude > 0.1 and the renormalization
    stays well-conditioned for amplitude < 0.9.  Deterministic per seed.
    """
    amplitude = float(amplitude)
    seed = int(seed)
    if amplitude >= MAX_PERTURB_AMPLITUDE:
        raise ValueError(f"amplitude must be < {MAX_PERTURB_AMPLITUDE}, got {amplitude}")
    if amplitude < 0.0:
        raise ValueError("amplitude must be >= 0")
    dim = base.dim
    rng = np.random.default_rng(seed)
    nbasis = 2 * FOURIER_ORDER + 1 if dim == 1 else (HARMONIC_ORDER + 1) ** 2
    coeffs = rng.standard_normal((dim + 1, nbasis))
    spec = f"perturb:base={base.spec},amp={amplitude:g},seed={seed}"

    if amplitude == 0.0:
        return SphereMap(dim, spec, base._fn)

    # rigorous pointwise bound: |field_j| <= sum_b |c_jb| * sup_b
    if dim == 1:
        sup = np.ones(nbasis)
    else:
        _, sup = _sph_harm_basis(np.array([[0.0, 0.0, 1.0]]))
    comp_bounds = np.abs(coeffs) @ sup
    field_scale = float(np.sqrt(np.sum(comp_bounds**2)))

    def fn(pts):
        if dim == 1:
            theta = np.arctan2(pts[:, 1], pts[:, 0])
            basis, _ = _fourier_basis(theta)
        else:
            basis, _ = _sph_harm_basis(pts)
        field = basis @ coeffs.T / field_scale
        return as_unit(base._fn(pts) + amplitude * field)

    return SphereMap(dim, spec, fn)


# ---------------------------------------------------------------------------
# tangent frames and derivatives

GRADIENT_STEP_RANGE = (1e-7, 1e-2)


def tangent_frame(pts: np.ndarray, dim: int):
    """Deterministic orthonormal tangent frame(s) at unit points.

    d=1: the single counterclockwise tangent.  d=2: (t1, t2) right-handed,
    t1 x t2 = p, built from the coordinate axis least aligned with p.
    """
    if dim == 1:
        return (np.stack([-pts[:, 1], pts[:, 0]], axis=1),)
    idx = np.argmin(np.abs(pts), axis=1)
    e = np.zeros_like(pts)
    e[np.arange(pts.shape[0]), idx] = 1.0
    t1 = e - np.einsum("ij,ij->i", e, pts)[:, None] * pts
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(pts, t1)
    return t1, t2


def gradient_norm(m: SphereMap, point, h: float = 1e-3):
    """Frobenius norm of the differential in orthonormal tangent frames.

    Central finite differences with geodesic steps of size h; the image
    difference quotient is projected onto the image tangent plane.  For the
    identity on S^d this gives sqrt(d); for power_map(k), |k|.
    """
    if not (GRADIENT_STEP_RANGE[0] <= h <= GRADIENT_STEP_RANGE[1]):
        raise ValueError(f"h must lie in {GRADIENT_STEP_RANGE}, got {h}")
    pts = np.asarray(point, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    g0 = m(pts)
    ch, sh = math.cos(h), math.sin(h)
    acc = np.zeros(pts.shape[0])
    for t in tangent_frame(pts, m.dim):
        gp = m(ch * pts + sh * t)
        gm = m(ch * pts - sh * t)
        diff = (gp - gm) / (2.0 * h)
        diff -= np.einsum("ij,ij->i", diff, g0)[:, None] * g0
        acc += np.einsum("ij,ij->i", diff, diff)
    out = np.sqrt(acc)
    return float(out[0]) if single else out
