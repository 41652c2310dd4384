"""Empirical study of the degree-versus-energy bound.

The pointwise statistic is ratio = |deg g| / E_delta(g) (scaled energy);
its max over a tested map population is the empirical constant for the
bound at that delta - a LOWER estimate of the true best constant, since
the population is finite.

``failure_threshold(d)`` is sqrt(2 + 2/(d+1)), the chordal side of the
regular (d+2)-simplex: above it the bound is known to fail, and
:func:`failure_probe` tabulates the evidence on concentrating families.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .degree import degree_of
from .energy import threshold_energy, threshold_energy_multi
from .errors import ResolutionError, SphereLabError
from .geometry import QuadratureGrid, icosphere_mesh, uniform_circle_grid
from .maps import SphereMap, bubble_map, perturb_map, sample_map

FLAG_OK = ""
FLAG_DEGENERATE = "degenerate"
FLAG_VIOLATION = "violation-witness"
FLAG_SUMMARY = "summary"

MAX_SEARCH_BUDGET = 100_000


def failure_threshold(dim: int) -> float:
    """sqrt(2 + 2/(d+1)); the bound cannot hold at or above this delta."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    return math.sqrt(2.0 + 2.0 / (dim + 1))


@dataclass(frozen=True)
class SweepRecord:
    """One (map, delta) evaluation of degree, energy, and their ratio."""

    map_spec: str
    dim: int
    n: int
    delta: float
    degree: int
    energy_scaled: float
    ratio: float
    flag: str = FLAG_OK


def _ratio_and_flag(degree: int, energy: float):
    if energy > 0.0:
        return abs(degree) / energy, FLAG_OK
    if degree == 0:
        return 0.0, FLAG_DEGENERATE
    return math.inf, FLAG_VIOLATION


def ratio_record(
    m: SphereMap, grid: QuadratureGrid, delta: float, threads: int = 1
) -> SweepRecord:
    """Degree and scaled energy of one map at one delta."""
    if not (0.0 < delta < 2.0):
        raise ValueError(f"delta must lie in (0, 2), got {delta}")
    sm = sample_map(m, grid)
    deg = degree_of(sm).degree
    rep = threshold_energy(sm, delta, scaled=True, threads=threads)
    ratio, flag = _ratio_and_flag(deg, rep.value)
    return SweepRecord(m.spec, m.dim, grid.n, delta, deg, rep.value, ratio, flag)


def sweep(maps, grid: QuadratureGrid, deltas, threads: int = 1) -> list:
    """Full (map, delta) Cartesian product, records in canonical order.

    Per-map failures become error-flagged rows; the sweep continues.
    Degree and the multi-delta energy pass are shared across each map's
    deltas, so the full sweep costs one pair pass per map.
    """
    deltas = [float(d) for d in deltas]
    if not maps or not deltas:
        raise ValueError("need at least one map and one delta")
    if any(not (0.0 < d < 2.0) for d in deltas):
        raise ValueError("sweep deltas must lie in (0, 2)")
    records = []
    for m in maps:
        try:
            sm = sample_map(m, grid)
            deg = degree_of(sm).degree
            reps = threshold_energy_multi(sm, deltas, scaled=True, threads=threads)
        except (SphereLabError, ValueError) as exc:
            for d in deltas:
                records.append(
                    SweepRecord(m.spec, m.dim, grid.n, d, 0, math.nan, math.nan,
                                f"error:{type(exc).__name__}")
                )
            continue
        for d, rep in zip(deltas, reps):
            ratio, flag = _ratio_and_flag(deg, rep.value)
            records.append(
                SweepRecord(m.spec, m.dim, grid.n, d, deg, rep.value, ratio, flag)
            )
    return records


def empirical_constants(records) -> dict:
    """Per-delta max ratio with its argmax map, plus the headline max.

    Returns {"per_delta": {delta: (max_ratio, argmax_spec)}, "headline": x}.
    Error rows are skipped; a violation witness makes the max infinite.
    """
    per = {}
    for rec in records:
        if rec.flag.startswith("error") or math.isnan(rec.ratio):
            continue
        best = per.get(rec.delta)
        if best is None or rec.ratio > best[0]:
            per[rec.delta] = (rec.ratio, rec.map_spec)
    headline = max((v[0] for v in per.values()), default=0.0)
    return {"per_delta": dict(sorted(per.items())), "headline": headline}


def summary_records(records) -> list:
    """One summary row per delta carrying the empirical constant."""
    stats = empirical_constants(records)
    out = []
    for delta, (ratio, spec) in stats["per_delta"].items():
        rec = next(r for r in records if r.delta == delta and r.map_spec == spec)
        out.append(replace(rec, ratio=ratio, flag=FLAG_SUMMARY))
    return out


# ---------------------------------------------------------------------------
# extremal search

SEARCH_BOUNDS = ((0.0, 4.0), (0.0, 0.85))  # (log10 lambda, perturbation amplitude)


def _default_search_grid(dim: int) -> QuadratureGrid:
    return uniform_circle_grid(1024) if dim == 1 else icosphere_mesh(4)[1]


def extremal_search(
    dim: int,
    target_degree: int,
    delta: float,
    budget: int,
    seed: int,
    grid: QuadratureGrid | None = None,
    threads: int = 1,
):
    """Simulated annealing over (lambda, perturbation) maximizing the ratio
    at fixed degree and delta.

    The chain starts from the plain degree-k family (lambda=1, no
    perturbation) and only ever improves its incumbent best, so the result
    never scores below the seed.  Candidates whose verified degree drifts
    from the target are rejected and logged.  Deterministic per seed; the
    winner's degree is re-verified on a refined grid.

    Returns (best_spec, best_record, info) where info counts proposals,
    rejections, and carries the refined-grid check.
    """
    if budget < 1 or budget > MAX_SEARCH_BUDGET:
        raise ValueError(f"budget must lie in 1..{MAX_SEARCH_BUDGET}")
    if not (0.0 < delta < 2.0):
        raise ValueError(f"delta must lie in (0, 2), got {delta}")
    if grid is None:
        grid = _default_search_grid(dim)
    rng = np.random.default_rng(seed)
    pseed = int(rng.integers(0, 2**31 - 1))

    def build(loglam: float, amp: float) -> SphereMap:
        base = bubble_map(target_degree, 10.0**loglam, dim)
        return perturb_map(base, amp, pseed) if amp > 0.0 else base

    def evaluate(m: SphereMap):
        sm = sample_map(m, grid)
        try:
            dres = degree_of(sm)
        except ResolutionError:
            return None, None  # not verifiable at this resolution: reject
        if dres.degree != target_degree or dres.residual >= 0.1:
            return None, dres.degree
        # concentrated candidates trip the resolution-floor warning on every
        # step; the search grid is fixed, so silence it inside the chain
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            rep = threshold_energy(sm, delta, scaled=True, threads=threads)
        ratio, _ = _ratio_and_flag(dres.degree, rep.value)
        return SweepRecord(m.spec, dim, grid.n, delta, dres.degree, rep.value, ratio), None

    params = np.array([0.0, 0.0])
    record, _ = evaluate(build(*params))
    if record is None:
        raise SphereLabError("seed family failed degree verification")
    best_params, best = params.copy(), record
    current = record
    evals = 1
    drifts = []
    temperature = 0.5
    cool = (1e-3 / temperature) ** (1.0 / max(budget - 1, 1))
    scale = np.array([0.25, 0.08])
    while evals < budget:
        prop = params + rng.normal(0.0, 1.0, size=2) * scale
        prop[0] = min(max(prop[0], SEARCH_BOUNDS[0][0]), SEARCH_BOUNDS[0][1])
        prop[1] = min(max(prop[1], SEARCH_BOUNDS[1][0]), SEARCH_BOUNDS[1][1])
        u = rng.random()
        evals += 1
        cand, drift_deg = evaluate(build(*prop))
        temperature *= cool
        if cand is None:
            drifts.append((evals, float(prop[0]), float(prop[1]), drift_deg))
            continue
        diff = cand.ratio - current.ratio
        if diff > 0.0 or u < math.exp(min(diff, 0.0) / max(temperature, 1e-12)):
            params, current = prop, cand
        if cand.ratio > best.ratio:
            best_params, best = prop.copy(), cand
    refined = _refine_grid(grid)
    refined_deg = degree_of(sample_map(build(*best_params), refined)).degree
    info = {
        "evaluations": evals,
        "degree_drifts": drifts,
        "refined_n": refined.n,
        "refined_degree": refined_deg,
        "refined_ok": refined_deg == target_degree,
    }
    return best.map_spec, best, info


def _refine_grid(grid: QuadratureGrid) -> QuadratureGrid:
    if grid.dim == 1:
        return uniform_circle_grid(4 * grid.n)
    level = int(round(math.log((grid.n - 2) / 10.0, 4.0)))
    return icosphere_mesh(level + 1)[1]


# ---------------------------------------------------------------------------
# failure regime


@dataclass(frozen=True)
class ProbeRow:
    map_spec: str
    dim: int
    n: int
    delta: float
    lam: float  # nan for non-bubble families
    degree: int
    energy_unscaled: float
    ratio: float
    flag: str


def _bubble_lambda(spec: str) -> float:
    if not spec.startswith("bubble:"):
        return math.nan
    for tok in spec.split(":", 1)[1].replace(";", ",").split(","):
        if tok.startswith("lambda="):
            return float(tok.split("=", 1)[1])
    return math.nan


def failure_probe(dim: int, delta: float, maps, grid: QuadratureGrid, threads: int = 1) -> list:
    """Tabulate (degree, unscaled energy, ratio) in the failure regime
    delta >= failure_threshold(d).

    Bubble rows escalating in lambda with |degree| >= 1 and strictly
    increasing ratio are flagged as witnesses; nothing is asserted beyond
    the table.
    """
    ell = failure_threshold(dim)
    if not (ell <= delta < 2.0):
        raise ValueError(
            f"probe delta must lie in [{ell:.5f}, 2); got {delta}"
        )
    rows = []
    for m in maps:
        sm = sample_map(m, grid)
        deg = degree_of(sm).degree
        rep = threshold_energy(sm, delta, scaled=False, threads=threads)
        ratio, flag = _ratio_and_flag(deg, rep.value)
        rows.append(
            ProbeRow(m.spec, dim, grid.n, delta, _bubble_lambda(m.spec), deg,
                     rep.value, ratio, flag)
        )
    # mark lambda-escalation witnesses within each bubble family
    groups: dict = {}
    for i, row in enumerate(rows):
        if math.isnan(row.lam) or abs(row.degree) < 1:
            continue
        key = row.map_spec.replace(f"lambda={row.lam:g}", "lambda=*")
        groups.setdefault(key, []).append(i)
    out = list(rows)
    for idxs in groups.values():
        if len(idxs) < 2:
            continue
        seq = sorted(idxs, key=lambda i: rows[i].lam)
        ratios = [rows[i].ratio for i in seq]
        if all(b > a for a, b in zip(ratios, ratios[1:])):
            for i in seq:
                if out[i].flag == FLAG_OK:
                    out[i] = replace(out[i], flag="witness")
    return out
