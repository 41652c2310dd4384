"""Mean increments of a scalar function on a flat ball versus the
thresholded singular-kernel integral.

For bounded measurable f on an interval (d=1) or disk (d=2) B, compare

    lhs      = |B|^(-2) * double integral of |f(x)-f(y)|^p
    rhs_core = |B|^(p/d-1) * double integral over {|f(x)-f(y)| > delta}
               of delta^p / |x-y|^(d+p)

through ratio_bound = lhs / (rhs_core + delta^p).  The supremum of
ratio_bound over a test population is a lower estimate of the best
constant for which lhs <= C * (rhs_core + delta^p) holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FlatBall:
    """Quadrature for an interval (dim 1) or disk (dim 2) in R^dim."""

    dim: int
    measure: float
    points: np.ndarray  # (n, dim)
    weights: np.ndarray  # (n,)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def interval_ball(a: float = 0.0, b: float = 1.0, n: int = 512) -> FlatBall:
    """Midpoint rule on (a, b) with n points."""
    if b <= a:
        raise ValueError("need b > a")
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return FlatBall(1, b - a, x[:, None], np.full(n, h))


def disk_ball(radius: float = 1.0, n: int = 48) -> FlatBall:
    """Sunflower (golden-angle spiral) points on a disk, equal weights.

    ``n`` is the per-dimension resolution: the disk carries n^2 points.
    """
    m = n * n
    k = np.arange(1, m + 1)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    r = radius * np.sqrt((k - 0.5) / m)
    th = golden * k
    pts = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    area = math.pi * radius**2
    return FlatBall(2, area, pts, np.full(m, area / m))


@dataclass(frozen=True)
class IncrementBoundReport:
    p: float
    delta: float
    n: int
    lhs: float
    rhs_core: float
    ratio_bound: float


class PairTables:
    """Precomputed |x-y| kernel tables for one ball, reusable across f."""

    def __init__(self, ball: FlatBall, p: float):
        if p < 1.0:
            raise ValueError(f"p must be >= 1, got {p}")
        self.ball = ball
        self.p = float(p)
        diff = ball.points[:, None, :] - ball.points[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, 1.0)  # masked out; avoids 0^negative
        self.wij = np.multiply.outer(ball.weights, ball.weights)
        self.kernel = self.wij / dist ** (ball.dim + self.p)
        np.fill_diagonal(self.kernel, 0.0)


def increment_bound_report(
    f, ball: FlatBall, p: float, delta: float, tables: PairTables | None = None
) -> IncrementBoundReport:
    """Evaluate both sides for one function; ``f`` maps (n, dim) -> (n,)."""
    if delta <= 0.0:
        raise ValueError("delta must be > 0")
    if tables is None:
        tables = PairTables(ball, p)
    elif tables.ball is not ball or tables.p != p:
        raise ValueError("tables were built for a different ball or exponent")
    fv = np.asarray(f(ball.points), dtype=float).reshape(ball.n)
    df = np.abs(fv[:, None] - fv[None, :])
    lhs = float((tables.wij * df**p).sum()) / ball.measure**2
    mask = df > delta  # strict; the diagonal is zero so it never passes
    core = float(np.where(mask, tables.kernel, 0.0).sum()) * delta**p
    rhs_core = ball.measure ** (p / ball.dim - 1.0) * core
    return IncrementBoundReport(
        p=float(p),
        delta=float(delta),
        n=ball.n,
        lhs=lhs,
        rhs_core=rhs_core,
        ratio_bound=lhs / (rhs_core + delta**p),
    )


def random_piecewise_linear(seed: int, n_knots: int = 8, lo: float = 0.0, hi: float = 1.0):
    """Seeded piecewise-linear function: N(0,1) values at equispaced knots.

    Equispaced knots keep the population's Lipschitz constants bounded, so
    the pair quadrature resolves every sample at moderate n.
    """
    rng = np.random.default_rng(seed)
    knots = np.linspace(lo, hi, n_knots)
    vals = rng.standard_normal(len(knots))

    def f(points):
        x = np.asarray(points, dtype=float)
        if x.ndim > 1:
            x = x[:, 0]
        return np.interp(x, knots, vals)

    return f


def random_trig_poly(seed: int, dim: int = 1, order: int = 4):
    """Seeded random trigonometric polynomial on R^dim, frequencies <= order."""
    rng = np.random.default_rng(seed)
    freqs = []
    if dim == 1:
        for k in range(1, order + 1):
            freqs.append((k,))
    else:
        for kx in range(0, order + 1):
            for ky in range(-order, order + 1):
                if (kx, ky) > (0, 0):
                    freqs.append((kx, ky))
    amps = rng.standard_normal(len(freqs)) / max(len(freqs), 1) ** 0.5
    phases = rng.uniform(0.0, 2.0 * math.pi, size=len(freqs))

    def f(points):
        x = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(x.shape[0])
        for (fr, a, ph) in zip(freqs, amps, phases):
            arg = sum(math.pi * fr[i] * x[:, i] for i in range(len(fr)))
            out += a * np.cos(arg + ph)
        return out

    return f
