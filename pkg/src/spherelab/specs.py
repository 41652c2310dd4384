"""Textual spec strings for maps, grids, and delta lists.

Map grammar: ``family:key=value,key=value,...`` where a token that does
not introduce a known parameter of the family is absorbed into the
previous value (so nested specs and coefficient lists survive), e.g.

    power:k=3
    rational:num=0,1;den=1
    bubble:k=2,lambda=50,d=2
    perturb:base=bubble:k=2,lambda=50,amp=0.1,seed=7

Grid grammar: ``circle:N`` | ``icosphere:LEVEL`` | ``fibonacci:N``.
Delta grammar: a single value, a comma list, or ``log:lo:hi:count``.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .geometry import QuadratureGrid, fibonacci_sphere_grid, icosphere_mesh, uniform_circle_grid
from .maps import (
    SphereMap,
    antipodal_map,
    bubble_map,
    constant_map,
    identity_map,
    perturb_map,
    power_map,
    rational_map,
)

FAMILY_PARAMS = {
    "power": {"k"},
    "rational": {"num", "den"},
    "bubble": {"k", "lambda", "d"},
    "perturb": {"base", "amp", "seed"},
    "identity": {"d"},
    "antipodal": {"d"},
    "constant": {"d"},
}


def _parse_args(argstr: str, keys) -> dict:
    pairs: dict = {}
    cur = None
    parts = re.split(r"([,;])", argstr)
    toks = parts[0::2]
    delims = [""] + parts[1::2]
    for tok, delim in zip(toks, delims):
        head = tok.split("=", 1)[0]
        if "=" in tok and head in keys:
            cur = head
            pairs[cur] = tok.split("=", 1)[1]
        elif cur is not None:
            pairs[cur] += delim + tok
        else:
            raise ValueError(f"unexpected token {tok!r} in map spec")
    return pairs


def _coeff_list(text: str) -> list:
    return [complex(tok.strip()) for tok in text.split(",") if tok.strip() != ""]


def parse_map_spec(spec: str, dim: int | None = None) -> SphereMap:
    """Build the map a spec string describes; ``dim`` resolves families
    that exist on both spheres when the spec carries no ``d=``."""
    family, _, argstr = spec.strip().partition(":")
    if family not in FAMILY_PARAMS:
        raise ValueError(
            f"unknown map family {family!r}; known: {sorted(FAMILY_PARAMS)}"
        )
    args = _parse_args(argstr, FAMILY_PARAMS[family]) if argstr else {}
    d = int(args["d"]) if "d" in args else dim

    def need_dim() -> int:
        if d is None:
            raise ValueError(f"{family!r} needs d=1 or d=2 (or a grid for context)")
        return d

    if family == "power":
        return power_map(int(args["k"]))
    if family == "rational":
        return rational_map(_coeff_list(args["num"]), _coeff_list(args["den"]))
    if family == "bubble":
        return bubble_map(int(args["k"]), float(args["lambda"]), need_dim())
    if family == "perturb":
        base = parse_map_spec(args["base"], dim=dim)
        return perturb_map(base, float(args["amp"]), int(args["seed"]))
    if family == "identity":
        return identity_map(need_dim())
    if family == "antipodal":
        return antipodal_map(need_dim())
    return constant_map(need_dim())


def parse_grid_spec(spec: str) -> QuadratureGrid:
    kind, _, arg = spec.strip().partition(":")
    if kind == "circle":
        return uniform_circle_grid(int(arg))
    if kind == "icosphere":
        return icosphere_mesh(int(arg))[1]
    if kind == "fibonacci":
        return fibonacci_sphere_grid(int(arg))
    raise ValueError(f"unknown grid kind {kind!r}; use circle:N, icosphere:L, fibonacci:N")


def parse_deltas(spec: str) -> list:
    spec = spec.strip()
    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValueError("log delta spec is log:lo:hi:count")
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        if lo <= 0 or hi <= lo or count < 2:
            raise ValueError("log delta spec needs 0 < lo < hi and count >= 2")
        return [float(x) for x in np.geomspace(lo, hi, count)]
    return [float(tok) for tok in spec.split(",") if tok.strip() != ""]


def default_families(dim: int) -> list:
    """The canonical sweep population for each dimension."""
    if dim == 1:
        return [
            "power:k=1",
            "power:k=2",
            "power:k=3",
            "bubble:k=1,lambda=1",
            "bubble:k=1,lambda=10",
            "bubble:k=1,lambda=100",
            "perturb:base=power:k=1,amp=0.1,seed=11",
            "constant",
        ]
    if dim == 2:
        return [
            "identity",
            "rational:num=0,0,1;den=1",
            "bubble:k=1,lambda=1",
            "bubble:k=1,lambda=10",
            "bubble:k=1,lambda=100",
            "bubble:k=2,lambda=10",
            "perturb:base=identity,amp=0.1,seed=11",
            "antipodal",
            "constant",
        ]
    raise ValueError(f"dim must be 1 or 2, got {dim}")


def derive_seed(seed: int, tag: str) -> int:
    """Child stream seed: first 8 bytes of sha256 of ``"{seed}:{tag}"``."""
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
