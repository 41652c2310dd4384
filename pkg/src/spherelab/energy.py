"""The thresholded nonlocal energy and its small-threshold limit.

For a sampled map g on a weighted grid, the scaled energy at threshold
``delta`` is the double sum over ordered pairs i != j with
|g_i - g_j| > delta (strict) of

    w_i * w_j * delta^d / |x_i - x_j|^(2d),

the discrete form of the degree-controlling double integral.  As
delta -> 0 the scaled energy approaches a universal constant times the
d-Dirichlet energy of g; :func:`estimate_limit_constant` measures that
constant by linear extrapolation.

Determinism contract
--------------------
The pair space is cut into fixed row blocks (a function of n only, never
of the worker count).  Each block reduces in canonical order, block
partials reduce in canonical block order, so results are bit-identical
across thread counts.  The unscaled energy is computed as suffix sums of
nonnegative per-threshold buckets, which makes it exactly non-increasing
in delta on a fixed grid.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UndefinedRatioError
from .geometry import SPHERE_MEASURE, QuadratureGrid
from .maps import SampledMap, SphereMap, gradient_norm, sample_map

BLOCK_TARGET = 6_000_000  # pair-matrix elements per row block
MC_CHUNK = 1 << 18
RESOLUTION_FLOOR_FACTOR = 4.0


@dataclass(frozen=True)
class EnergyReport:
    """One evaluation of the thresholded double sum."""

    delta: float
    scaled: bool
    value: float
    estimator: str  # "pairwise-quadrature" | "monte-carlo"
    n: int  # grid points or MC samples
    stderr: float
    pair_fraction: float


@dataclass(frozen=True)
class LimitEstimate:
    """Linear-in-delta extrapolation of energy/dirichlet to delta = 0."""

    k_estimate: float
    deltas: tuple
    ratios: tuple
    residual: float
    dirichlet: float


def _block_starts(n: int) -> list:
    rows = max(1, BLOCK_TARGET // max(n, 1))
    return list(range(0, n, rows))


@lru_cache(maxsize=32)
def _tril(r: int):
    return np.tril_indices(r)


def _pair_block(points, weights, values, component, thresholds, dim, i0, i1):
    """Bucket sums/counts of upper-triangle pairs with rows in [i0, i1).

    ``thresholds`` are squared chordal image distances for the full-map
    threshold (component is None) or plain component differences.
    Bucket b collects pairs whose comparison value exceeds thresholds[:b]
    only; bucket 0 is the reject bin.
    """
    r = i1 - i0
    r2 = points[i0:i1] @ points[i0:].T
    np.multiply(r2, -2.0, out=r2)
    r2 += 2.0
    if component is None:
        cmp_vals = values[i0:i1] @ values[i0:].T
        np.multiply(cmp_vals, -2.0, out=cmp_vals)
        cmp_vals += 2.0
    else:
        comp = values[:, component]
        cmp_vals = np.abs(comp[i0:i1, None] - comp[None, i0:])
    # kill i >= j inside the leading diagonal sub-block
    il, jl = _tril(r)
    cmp_vals[il, jl] = -1.0
    r2[il, jl] = 1.0
    np.maximum(r2, 1e-300, out=r2)  # exact-duplicate guard; grids are distinct
    if dim == 2:
        np.multiply(r2, r2, out=r2)
    if weights[0] == weights.min() == weights.max():
        # equal weights: w_i*w_j is one constant; reuse the r2 buffer
        kern = np.divide(float(weights[0]) ** 2, r2, out=r2)
    else:
        kern = np.multiply.outer(weights[i0:i1], weights[i0:])
        np.divide(kern, r2, out=kern)
    idx = np.searchsorted(thresholds, cmp_vals.ravel(), side="left")
    nb = len(thresholds) + 1
    sums = np.bincount(idx, weights=kern.ravel(), minlength=nb)
    counts = np.bincount(idx, minlength=nb)
    return sums, counts


def _pair_pass(grid: QuadratureGrid, values, component, thresholds, threads: int):
    pts, w = grid.points, grid.weights
    starts = _block_starts(grid.n)
    nb = len(thresholds) + 1
    sums = np.zeros((len(starts), nb))
    counts = np.zeros((len(starts), nb), dtype=np.int64)

    def run(k):
        i0 = starts[k]
        i1 = starts[k + 1] if k + 1 < len(starts) else grid.n
        sums[k], counts[k] = _pair_block(
            pts, w, values, component, thresholds, grid.dim, i0, i1
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(starts))))
    else:
        for k in range(len(starts)):
            run(k)
    # canonical reduction: over blocks first, then suffix over thresholds
    bucket = sums.sum(axis=0)
    bucket_n = counts.sum(axis=0)
    m = len(thresholds)
    energy = np.zeros(m)
    npairs = np.zeros(m, dtype=np.int64)
    acc = 0.0
    acc_n = 0
    for j in range(m - 1, -1, -1):
        acc = acc + bucket[j + 1]
        acc_n += bucket_n[j + 1]
        energy[j] = acc
        npairs[j] = acc_n
    return energy, npairs


def _check_deltas(deltas) -> np.ndarray:
    d = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(d <= 0.0) or np.any(d > 2.0):
        raise ValueError("delta must lie in (0, 2]")
    return d


def lipschitz_estimate(sm: SampledMap) -> float:
    """Max image/domain chordal difference quotient over grid neighbors."""
    g = sm.grid
    if g.dim == 1:
        a = np.arange(g.n)
        b = np.roll(a, -1)
    elif g.mesh is not None:
        e = g.mesh.edges()
        a, b = e[:, 0], e[:, 1]
    else:
        a = np.arange(g.n)
        b = _nearest_neighbors(g.points)
    dx = np.linalg.norm(g.points[a] - g.points[b], axis=1)
    dg = np.linalg.norm(sm.values[a] - sm.values[b], axis=1)
    return float((dg / dx).max())


def _nearest_neighbors(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[0]
    out = np.empty(n, dtype=np.int64)
    block = max(1, 4_000_000 // n)
    for i0 in range(0, n, block):
        sub = pts[i0 : i0 + block]
        d2 = 2.0 - 2.0 * (sub @ pts.T)
        rows = np.arange(sub.shape[0])
        d2[rows, rows + i0] = np.inf
        out[i0 : i0 + block] = d2.argmin(axis=1)
    return out


def resolution_floor(sm: SampledMap) -> float:
    """Thresholds below this are under-resolved by the grid's pair set."""
    return RESOLUTION_FLOOR_FACTOR * sm.grid.spacing() * lipschitz_estimate(sm)


def threshold_energy_multi(
    sm: SampledMap,
    deltas,
    scaled: bool = True,
    threads: int = 1,
    check_floor: bool = True,
) -> list:
    """Thresholded pair sums at several deltas in one pass over the pairs.

    Returns one :class:`EnergyReport` per requested delta, in input order.
    """
    deltas = _check_deltas(deltas)
    if sm.grid.n < 3:
        raise ValueError("grid must have at least 3 points")
    if check_floor:
        floor = resolution_floor(sm)
        if float(deltas.min()) < floor:
            # stable message: see resolution_floor(sm) for the actual value
            warnings.warn(
                "delta below the grid's resolution floor; "
                "the threshold shell is under-resolved",
                stacklevel=2,
            )
    order = np.argsort(deltas, kind="stable")
    thresholds = deltas[order] ** 2  # compare against squared image distances
    energy, npairs = _pair_pass(sm.grid, sm.values, None, thresholds, threads)
    total_pairs = sm.grid.n * (sm.grid.n - 1)
    reports = [None] * len(deltas)
    for rank, pos in enumerate(order):
        d = float(deltas[pos])
        unscaled = 2.0 * float(energy[rank])  # ordered pairs: both (i,j) and (j,i)
        value = (d ** sm.dim) * unscaled if scaled else unscaled
        reports[pos] = EnergyReport(
            delta=d,
            scaled=scaled,
            value=value,
            estimator="pairwise-quadrature",
            n=sm.grid.n,
            stderr=0.0,
            pair_fraction=2.0 * float(npairs[rank]) / total_pairs,
        )
    return reports


def threshold_energy(
    sm: SampledMap, delta: float, scaled: bool = True, threads: int = 1
) -> EnergyReport:
    """The thresholded double sum at a single delta."""
    return threshold_energy_multi(sm, [delta], scaled=scaled, threads=threads)[0]


def component_threshold_energy(
    sm: SampledMap, component: int, delta: float, threads: int = 1
) -> EnergyReport:
    """Same kernel with the threshold on one coordinate difference
    |g_j(x) - g_j(y)|; always the scaled form.  ``component`` is 1-based."""
    if not (1 <= component <= sm.dim + 1):
        raise ValueError(f"component must lie in 1..{sm.dim + 1}, got {component}")
    deltas = _check_deltas([delta])
    energy, npairs = _pair_pass(
        sm.grid, sm.values, component - 1, deltas.copy(), threads
    )
    total_pairs = sm.grid.n * (sm.grid.n - 1)
    d = float(deltas[0])
    return EnergyReport(
        delta=d,
        scaled=True,
        value=(d ** sm.dim) * 2.0 * float(energy[0]),
        estimator="pairwise-quadrature",
        n=sm.grid.n,
        stderr=0.0,
        pair_fraction=2.0 * float(npairs[0]) / total_pairs,
    )


def monte_carlo_energy(
    m: SphereMap, delta: float, n_samples: int, seed: int, scaled: bool = True
) -> EnergyReport:
    """Uniform-pair Monte Carlo estimate of the same integral.

    Deterministic for a fixed seed (fixed chunking of the sample stream).
    stderr is the sample standard deviation over sqrt(n_samples).
    """
    delta = float(_check_deltas([delta])[0])
    n_samples = int(n_samples)
    if n_samples < 1000:
        raise ValueError(f"n_samples must be >= 1000, got {n_samples}")
    rng = np.random.default_rng(seed)
    measure = SPHERE_MEASURE[m.dim]
    const = measure**2 * (delta**m.dim if scaled else 1.0)
    thr = delta * delta
    s1 = 0.0
    s2 = 0.0
    hits = 0
    done = 0
    while done < n_samples:
        k = min(MC_CHUNK, n_samples - done)
        if m.dim == 1:
            ang = rng.uniform(0.0, 2.0 * math.pi, size=(2, k))
            a = np.stack([np.cos(ang[0]), np.sin(ang[0])], axis=1)
            b = np.stack([np.cos(ang[1]), np.sin(ang[1])], axis=1)
        else:
            v = rng.standard_normal((2, k, 3))
            v /= np.linalg.norm(v, axis=2, keepdims=True)
            a, b = v[0], v[1]
        ga, gb = m(a), m(b)
        img2 = 2.0 - 2.0 * np.einsum("ij,ij->i", ga, gb)
        sel = img2 > thr
        r2 = 2.0 - 2.0 * np.einsum("ij,ij->i", a[sel], b[sel])
        vals = np.zeros(k)
        vals[sel] = const / r2**m.dim
        s1 += float(vals.sum())
        s2 += float((vals * vals).sum())
        hits += int(sel.sum())
        done += k
    mean = s1 / n_samples
    var = max(s2 - n_samples * mean * mean, 0.0) / (n_samples - 1)
    return EnergyReport(
        delta=delta,
        scaled=scaled,
        value=mean,
        estimator="monte-carlo",
        n=n_samples,
        stderr=math.sqrt(var / n_samples),
        pair_fraction=hits / n_samples,
    )


def dirichlet_energy(m: SphereMap, grid: QuadratureGrid, h: float = 1e-3) -> float:
    """Quadrature of |grad g|^d over the grid (Frobenius-norm convention)."""
    gn = gradient_norm(m, grid.points, h=h)
    return float(np.dot(grid.weights, gn**m.dim))


def estimate_limit_constant(
    m: SphereMap,
    grid: QuadratureGrid,
    deltas,
    h: float = 1e-3,
    threads: int = 1,
) -> LimitEstimate:
    """Estimate the delta -> 0 constant in energy ~ K * dirichlet.

    Fits ratio(delta) = K + a*delta by least squares over the given
    strictly decreasing deltas; K is the intercept, residual the max
    absolute fit deviation.  The constant should not depend on the map.
    """
    d = np.atleast_1d(np.asarray(deltas, dtype=float))
    if len(d) < 2 or np.any(np.diff(d) >= 0.0):
        raise ValueError("deltas must be a strictly decreasing list of length >= 2")
    dir_energy = dirichlet_energy(m, grid, h=h)
    if dir_energy == 0.0:
        raise UndefinedRatioError("constant map: Dirichlet energy is zero")
    sm = sample_map(m, grid)
    reports = threshold_energy_multi(sm, d, scaled=True, threads=threads)
    ratios = np.array([r.value for r in reports]) / dir_energy
    design = np.stack([np.ones_like(d), d], axis=1)
    coef, *_ = np.linalg.lstsq(design, ratios, rcond=None)
    residual = float(np.abs(design @ coef - ratios).max())
    return LimitEstimate(
        k_estimate=float(coef[0]),
        deltas=tuple(float(x) for x in d),
        ratios=tuple(float(r) for r in ratios),
        residual=residual,
        dirichlet=dir_energy,
    )
