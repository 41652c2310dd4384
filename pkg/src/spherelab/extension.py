"""Cap-average extension into the unit ball and the stopping radius.

For a sampled map g and a ball point X (|X| < 1), the extension value is
the weighted mean of g over the closed spherical cap of chordal radius
r = 2*(1 - |X|) centered at x = X/|X|; it is an average of unit vectors,
so |u(X)| <= 1, and it is deliberately NOT renormalized.

Marching inward from a surface point x, the stopping radius rho(x) is the
smallest depth t (in steps) at which |u((1-t)*x)| drops to 1/2 or below,
else 1.  Small rho flags topological concentration near x, and the
quadrature of rho^(-d) over {rho < 1} dominates the degree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .degree import degree_of
from .errors import CapUnderResolvedError
from .maps import SampledMap

ALPHA = 0.5  # |u| level defining the stopping radius
STEP_RANGE = (1e-4, 1e-1)
FIELD_BLOCK = 4_000_000  # distance-matrix elements per row block


def average_extension(sm: SampledMap, X) -> np.ndarray:
    """Cap average of the sampled values at ball point X (|X| < 1)."""
    X = np.asarray(X, dtype=float)
    if X.shape != (sm.dim + 1,):
        raise ValueError(f"X must be a vector of length {sm.dim + 1}")
    nx = float(np.linalg.norm(X))
    if nx >= 1.0:
        raise ValueError(f"|X| must be < 1, got {nx}")
    w, vals = sm.grid.weights, sm.values
    if nx == 0.0:
        return (w @ vals) / w.sum()
    x = X / nx
    r = 2.0 * (1.0 - nx)
    dist = np.linalg.norm(sm.grid.points - x, axis=1)
    sel = dist <= r  # closed cap
    if not np.any(sel):
        raise CapUnderResolvedError(
            f"cap of radius {r:.3g} at {x.round(4).tolist()} contains no grid point"
        )
    return (w[sel] @ vals[sel]) / w[sel].sum()


def _march_depths(step: float) -> np.ndarray:
    if not (STEP_RANGE[0] <= step <= STEP_RANGE[1]):
        raise ValueError(f"step must lie in {STEP_RANGE}, got {step}")
    n_steps = int(math.ceil(1.0 / step)) - 1  # depths step, 2*step, ... < 1
    return step * np.arange(1, n_steps + 1)


def _binned_norms(sm: SampledMap, dists: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """|u| profiles along the march for a block of centers.

    dists: (rows, n) chordal distances from each center to the grid.
    Returns (rows, len(edges)) cap-average norms; nan where the cap is
    still empty.
    """
    rows = dists.shape[0]
    nbins = len(edges) + 1
    idx = np.searchsorted(edges, dists, side="left")  # member of caps k >= idx
    flat = idx + (np.arange(rows) * nbins)[:, None]
    flat = flat.ravel()
    w = sm.grid.weights
    wsum = np.bincount(flat, weights=np.broadcast_to(w, dists.shape).ravel(),
                       minlength=rows * nbins).reshape(rows, nbins)
    comp_sums = []
    for c in range(sm.dim + 1):
        wc = w * sm.values[:, c]
        comp_sums.append(
            np.bincount(flat, weights=np.broadcast_to(wc, dists.shape).ravel(),
                        minlength=rows * nbins).reshape(rows, nbins)
        )
    W = np.cumsum(wsum[:, :-1], axis=1)  # cap weight at each edge
    S2 = np.zeros_like(W)
    for cs in comp_sums:
        S2 += np.cumsum(cs[:, :-1], axis=1) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(W > 0.0, np.sqrt(S2) / W, np.nan)


def cap_average_profile(sm: SampledMap, x, step: float):
    """March depths t and cap-average norms |u((1-t)x)| for one center."""
    x = np.asarray(x, dtype=float)
    t = _march_depths(step)
    edges = 2.0 * t  # cap radius at depth t is 2t
    dist = np.linalg.norm(sm.grid.points - x, axis=1)[None, :]
    norms = _binned_norms(sm, dist, edges)[0]
    if np.isnan(norms[0]):
        raise CapUnderResolvedError(
            f"first cap (radius {edges[0]:.3g}) contains no grid point; "
            "increase the step or refine the grid"
        )
    return t, norms


def _first_crossings(t: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Per row: smallest depth with |u| <= ALPHA, else 1."""
    hit = norms <= ALPHA  # nan compares False: empty caps never cross
    any_hit = hit.any(axis=1)
    first = hit.argmax(axis=1)
    out = np.ones(norms.shape[0])
    out[any_hit] = t[first[any_hit]]
    return out


def stopping_radius(sm: SampledMap, x, step: float = 1e-2) -> float:
    """Smallest march depth where the cap-average norm reaches 1/2, else 1."""
    t, norms = cap_average_profile(sm, x, step)
    return float(_first_crossings(t, norms[None, :])[0])


def stopping_radius_field(sm: SampledMap, step: float = 1e-2, threads: int = 1) -> np.ndarray:
    """Stopping radius at every grid point (each cap contains its center,
    so the march never under-resolves)."""
    t = _march_depths(step)
    edges = 2.0 * t
    pts = sm.grid.points
    n = sm.grid.n
    rows = max(1, FIELD_BLOCK // n)
    out = np.empty(n)

    def run(i0):
        i1 = min(i0 + rows, n)
        d2 = 2.0 - 2.0 * (pts[i0:i1] @ pts.T)
        dist = np.sqrt(np.maximum(d2, 0.0))
        norms = _binned_norms(sm, dist, edges)
        out[i0:i1] = _first_crossings(t, norms)

    starts = list(range(0, n, rows))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return out


@dataclass(frozen=True)
class RadiusBoundReport:
    """Both sides of the degree-versus-concentration bound."""

    degree: int  # signed; the bound controls its absolute value
    integral: float  # quadrature of rho^(-d) over {rho < 1}
    ratio: float
    flag: str  # "", "degenerate" (0/0), or "violation" (deg != 0, integral 0)


def radius_degree_bound(sm: SampledMap, step: float = 1e-2, threads: int = 1) -> RadiusBoundReport:
    """|deg g| against the quadrature of rho^(-d) over {rho < 1}."""
    rho = stopping_radius_field(sm, step=step, threads=threads)
    mask = rho < 1.0
    integral = float(np.dot(sm.grid.weights[mask], rho[mask] ** (-sm.dim)))
    deg = degree_of(sm).degree
    if integral > 0.0:
        return RadiusBoundReport(deg, integral, abs(deg) / integral, "")
    if deg == 0:
        return RadiusBoundReport(deg, integral, 0.0, "degenerate")
    return RadiusBoundReport(deg, integral, math.inf, "violation")
