"""Command-line surface: every operation as a subcommand with
machine-readable output.

Output layout (CSV): ``#``-prefixed provenance lines (version, build id,
config echo, runtime), then a header row, then data rows.  The
determinism contract covers every non-``#`` byte: identical configs give
byte-identical bodies regardless of thread count or wall time.  JSON
output carries no timing and is fully deterministic.

Exit codes: 0 success, 2 invalid arguments, 3 resolution insufficient,
4 resource limit exceeded, 1 other computational failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .conjecture import (
    extremal_search,
    failure_probe,
    failure_threshold,
    empirical_constants,
    summary_records,
    sweep,
)
from .degree import degree_of
from .energy import estimate_limit_constant, monte_carlo_energy, threshold_energy_multi
from .errors import ResolutionError, ResourceLimitError, SphereLabError
from .extension import average_extension, radius_degree_bound, stopping_radius_field
from .geometry import write_grid
from .increments import (
    PairTables,
    disk_ball,
    increment_bound_report,
    interval_ball,
    random_piecewise_linear,
    random_trig_poly,
)
from .maps import sample_map
from .specs import default_families, derive_seed, parse_deltas, parse_grid_spec, parse_map_spec

ENV_THREADS = "SPHERELAB_THREADS"

_build_id_cache = []


def build_id() -> str:
    """Content hash of the installed package sources; stable per build."""
    if not _build_id_cache:
        h = hashlib.sha256()
        pkg = Path(__file__).parent
        for path in sorted(pkg.glob("*.py")):
            h.update(path.name.encode())
            h.update(path.read_bytes())
        _build_id_cache.append(h.hexdigest()[:12])
    return _build_id_cache[0]


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _config_echo(args: argparse.Namespace) -> str:
    # out and threads are excluded: neither may influence the results (the
    # deterministic-reduction contract), so the echo stays byte-stable
    skip = {"handler", "t0", "out", "threads"}
    items = [(k, v) for k, v in sorted(vars(args).items()) if k not in skip]
    return " ".join(f"{k}={v}" for k, v in items)


def _emit(args, columns, rows, extras=None) -> int:
    runtime_ms = int((time.perf_counter() - args.t0) * 1000.0)
    if args.format == "json":
        doc = {
            "version": __version__,
            "build": build_id(),
            "config": _config_echo(args),
            "columns": list(columns),
            "rows": [[None if isinstance(v, float) and math.isnan(v) else v for v in row] for row in rows],
        }
        if extras:
            doc.update(extras)
        text = json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        lines = [
            f"# spherelab {__version__} build {build_id()}",
            f"# config {_config_echo(args)}",
            f"# runtime_ms {runtime_ms}",
            buf.getvalue().rstrip("\n"),
        ]
        if extras:
            for key, val in sorted(extras.items()):
                lines.append(f"# {key} {json.dumps(val, sort_keys=True, default=str)}")
        text = "\n".join(lines) + "\n"
    _write_text(args.out, text)
    return 0


def _write_text(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _resolve_grid(args, need_mesh_default=True):
    if getattr(args, "grid", None):
        return parse_grid_spec(args.grid)
    dim = getattr(args, "d", None)
    if dim is None:
        raise ValueError("provide --grid or --d")
    if dim == 1:
        return parse_grid_spec("circle:8192")
    return parse_grid_spec("icosphere:6" if need_mesh_default else "icosphere:5")


# ---------------------------------------------------------------------------
# handlers


def _cmd_degree(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    res = degree_of(sample_map(m, grid))
    return _emit(args, ["raw", "degree", "residual"], [[res.raw, res.degree, res.residual]])


def _cmd_energy(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    deltas = parse_deltas(args.delta)
    scaled = not args.unscaled
    sm = sample_map(m, grid)
    rows = []
    for rep in threshold_energy_multi(sm, deltas, scaled=scaled, threads=args.threads):
        rows.append([m.spec, grid.dim, rep.n, rep.delta, rep.scaled, rep.estimator,
                     rep.value, rep.stderr, rep.pair_fraction])
    if args.mc:
        n_str, seed_str = args.mc.split(",")
        for d in deltas:
            rep = monte_carlo_energy(m, d, int(n_str), int(seed_str), scaled=scaled)
            rows.append([m.spec, grid.dim, rep.n, rep.delta, rep.scaled, rep.estimator,
                         rep.value, rep.stderr, rep.pair_fraction])
    cols = ["map", "d", "n", "delta", "scaled", "estimator", "value", "stderr", "pair_fraction"]
    return _emit(args, cols, rows)


def _record_row(rec) -> list:
    return [rec.map_spec, rec.dim, rec.n, rec.delta, rec.degree,
            rec.energy_scaled, rec.ratio, rec.flag]

_RECORD_COLS = ["map", "d", "n", "delta", "degree", "energy_scaled", "ratio", "flag"]


def _cmd_sweep(args) -> int:
    grid = _resolve_grid(args)
    specs = list(args.families)
    if specs == ["default"]:
        specs = default_families(grid.dim)
    maps = [parse_map_spec(s, dim=grid.dim) for s in specs]
    deltas = parse_deltas(args.deltas)
    records = sweep(maps, grid, deltas, threads=args.threads)
    stats = empirical_constants(records)
    rows = [_record_row(r) for r in records + summary_records(records)]
    extras = {
        "empirical_C_per_delta": {
            repr(d): {"value": v, "map": spec} for d, (v, spec) in stats["per_delta"].items()
        },
        "headline_C": stats["headline"],
    }
    return _emit(args, _RECORD_COLS, rows, extras)


def _cmd_search(args) -> int:
    grid = parse_grid_spec(args.grid) if args.grid else None
    spec, best, info = extremal_search(
        args.d, args.target_degree, args.delta, args.budget, args.seed,
        grid=grid, threads=args.threads,
    )
    extras = {
        "search_evaluations": info["evaluations"],
        "degree_drift_rejections": len(info["degree_drifts"]),
        "refined_degree": info["refined_degree"],
        "refined_ok": info["refined_ok"],
    }
    return _emit(args, _RECORD_COLS, [_record_row(best)], extras)


def _cmd_probe(args) -> int:
    grid = _resolve_grid(args, need_mesh_default=False)
    specs = list(args.families)
    if specs == ["default"]:
        specs = [f"bubble:k=1,lambda={lam}" for lam in (1, 10, 100)] + ["identity"]
    maps = [parse_map_spec(s, dim=grid.dim) for s in specs]
    rows = failure_probe(grid.dim, args.delta, maps, grid, threads=args.threads)
    cols = ["map", "d", "n", "delta", "lambda", "degree", "energy_unscaled", "ratio", "flag"]
    out = [[r.map_spec, r.dim, r.n, r.delta, r.lam, r.degree, r.energy_unscaled,
            r.ratio, r.flag] for r in rows]
    return _emit(args, cols, out)


def _cmd_limit(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    deltas = sorted(set(parse_deltas(args.deltas)), reverse=True)
    est = estimate_limit_constant(m, grid, deltas, threads=args.threads)
    cols = ["map", "d", "n", "delta", "ratio", "dirichlet", "k_estimate", "residual"]
    rows = [[m.spec, grid.dim, grid.n, d, r, est.dirichlet, est.k_estimate, est.residual]
            for d, r in zip(est.deltas, est.ratios)]
    return _emit(args, cols, rows)


def _cmd_extension(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    sm = sample_map(m, grid)
    X = np.array([float(tok) for tok in args.point.split(",")])
    u = average_extension(sm, X)
    axes = ["x", "y", "z"][: grid.dim + 1]
    cols = (["map", "d", "n"] + [f"X_{a}" for a in axes] + [f"u_{a}" for a in axes]
            + ["u_norm"])
    row = [m.spec, grid.dim, grid.n, *X.tolist(), *u.tolist(), float(np.linalg.norm(u))]
    return _emit(args, cols, [row])


def _cmd_rho(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    sm = sample_map(m, grid)
    rho = stopping_radius_field(sm, step=args.step, threads=args.threads)
    axes = ["x", "y", "z"][: grid.dim + 1]
    cols = axes + ["rho"]
    rows = [[*p.tolist(), float(r)] for p, r in zip(grid.points, rho)]
    return _emit(args, cols, rows)


def _cmd_rho_bound(args) -> int:
    grid = parse_grid_spec(args.grid)
    m = parse_map_spec(args.map, dim=grid.dim)
    sm = sample_map(m, grid)
    rep = radius_degree_bound(sm, step=args.step, threads=args.threads)
    cols = ["map", "d", "n", "step", "degree", "integral", "ratio", "flag"]
    row = [m.spec, grid.dim, grid.n, args.step, rep.degree, rep.integral, rep.ratio, rep.flag]
    return _emit(args, cols, [row])


def _cmd_lemma1(args) -> int:
    if args.d == 1:
        ball = interval_ball(0.0, 1.0, args.n)
    else:
        ball = disk_ball(1.0, args.n)
    tables = PairTables(ball, args.p)
    rows = []
    kinds = ("pwl", "trig") if args.d == 1 else ("trig",)
    for trial in range(args.trials):
        for kind in kinds:
            fseed = derive_seed(args.seed, f"lemma1/{kind}/{trial}")
            f = (random_piecewise_linear(fseed) if kind == "pwl"
                 else random_trig_poly(fseed, dim=args.d))
            rep = increment_bound_report(f, ball, args.p, args.delta, tables=tables)
            rows.append([trial, kind, rep.p, rep.delta, rep.n, rep.lhs, rep.rhs_core,
                         rep.ratio_bound])
    cols = ["trial", "kind", "p", "delta", "n", "lhs", "rhs_core", "ratio_bound"]
    finite = [r[-1] for r in rows if not math.isnan(r[-1])]
    extras = {"max_ratio_bound": max(finite) if finite else 0.0}
    return _emit(args, cols, rows, extras)


def _cmd_grids(args) -> int:
    grid = parse_grid_spec(args.grid)
    import io

    buf = io.StringIO()
    write_grid(grid, buf)
    _write_text(args.out, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sp, seed_default=0):
    sp.add_argument("--out", default="-", help="output path ('-' for stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--threads", type=int, default=None,
                    help=f"worker cap (default ${ENV_THREADS} or 1)")
    sp.add_argument("--seed", type=int, default=seed_default)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spherelab",
        description="degrees and threshold energies of sphere maps",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("degree", help="topological degree of a sampled map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_degree)

    sp = sub.add_parser("energy", help="thresholded pair energy")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--delta", required=True, help="value, list, or log:lo:hi:k")
    sp.add_argument("--unscaled", action="store_true")
    sp.add_argument("--mc", default=None, metavar="N,SEED",
                    help="also run the Monte Carlo estimator")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_energy)

    sp = sub.add_parser("sweep", help="degree/energy ratios over families x deltas")
    sp.add_argument("--families", nargs="+", required=True,
                    help="map specs, or the single word 'default'")
    sp.add_argument("--deltas", required=True)
    sp.add_argument("--grid", default=None)
    sp.add_argument("--d", type=int, choices=(1, 2), default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_sweep)

    sp = sub.add_parser("search", help="annealing search for extremal ratio maps")
    sp.add_argument("--d", type=int, choices=(1, 2), required=True)
    sp.add_argument("--target-degree", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--budget", type=int, required=True)
    sp.add_argument("--grid", default=None)
    _add_common(sp, seed_default=7)
    sp.set_defaults(handler=_cmd_search)

    sp = sub.add_parser("probe", help="failure-regime table (delta >= ell_d)")
    sp.add_argument("--d", type=int, choices=(1, 2), default=None)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--families", nargs="+", default=["default"])
    sp.add_argument("--grid", default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_probe)

    sp = sub.add_parser("limit", help="small-delta limit constant estimate")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--deltas", required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_limit)

    sp = sub.add_parser("extension", help="cap-average extension at a ball point")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--point", required=True, help="comma-separated coordinates, |X|<1")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_extension)

    sp = sub.add_parser("rho", help="stopping radius at every grid point")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--step", type=float, default=1e-2)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_rho)

    sp = sub.add_parser("rho-bound", help="degree vs stopping-radius integral")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--step", type=float, default=1e-2)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_rho_bound)

    sp = sub.add_parser("lemma1", help="flat-ball increment inequality trials")
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--n", type=int, default=512, help="grid points per dimension")
    sp.add_argument("--d", type=int, choices=(1, 2), default=1)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_lemma1)

    sp = sub.add_parser("grids", help="serialize a grid to the text format")
    sp.add_argument("--grid", required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_grids)

    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.threads is None:
        args.threads = int(os.environ.get(ENV_THREADS, "1"))
    args.t0 = time.perf_counter()
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"spherelab: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except ResolutionError as exc:
        print(f"spherelab: resolution insufficient: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"spherelab: resource limit: {exc}", file=sys.stderr)
        return 4
    except SphereLabError as exc:
        print(f"spherelab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
