import math

import numpy as np
import pytest

from spherelab.energy import (
    component_threshold_energy,
    dirichlet_energy,
    estimate_limit_constant,
    lipschitz_estimate,
    monte_carlo_energy,
    resolution_floor,
    threshold_energy,
    threshold_energy_multi,
)
from spherelab.errors import UndefinedRatioError
from spherelab.geometry import QuadratureGrid, uniform_circle_grid
from spherelab.maps import (
    SphereMap,
    bubble_map,
    constant_map,
    identity_map,
    power_map,
    sample_map,
)

from conftest import random_unit


def circle_identity_energy(delta):
    """Closed form for the identity on S^1, verified by 1-D quadrature."""
    return 4 * math.pi * math.sqrt(1 - delta**2 / 4)


@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
def test_identity_circle_oracle(delta, circle_8192):
    sm = sample_map(identity_map(1), circle_8192)
    rep = threshold_energy(sm, delta, scaled=True)
    oracle = circle_identity_energy(delta)
    assert abs(rep.value - oracle) / oracle < 0.005
    assert rep.stderr == 0.0 and 0.0 <= rep.pair_fraction <= 1.0


def test_constant_map_zero(circle_4096):
    sm = sample_map(constant_map(1), circle_4096)
    for delta in (0.1, 0.9, 1.9):
        assert threshold_energy(sm, delta).value == 0.0


def test_delta_two_zero(circle_4096, ico3):
    sm = sample_map(identity_map(1), circle_4096)
    assert threshold_energy(sm, 2.0).value == 0.0
    _, grid = ico3
    assert threshold_energy(sample_map(identity_map(2), grid), 2.0).value == 0.0


def test_delta_validation(circle_4096):
    sm = sample_map(identity_map(1), circle_4096)
    for bad in (0.0, -0.3, 2.5):
        with pytest.raises(ValueError):
            threshold_energy(sm, bad)


def test_unscaled_monotone_in_delta_exact(circle_4096):
    sm = sample_map(identity_map(1), circle_4096)
    deltas = np.linspace(0.02, 1.98, 40)
    vals = [r.value for r in threshold_energy_multi(sm, deltas, scaled=False)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_pair_symmetry_under_reversed_iteration(ico3):
    _, grid = ico3
    sm = sample_map(bubble_map(2, 5.0, 2), grid)
    fwd = threshold_energy(sm, 0.4).value
    rgrid = QuadratureGrid(2, grid.points[::-1], grid.weights[::-1])
    rsm = sample_map(bubble_map(2, 5.0, 2), rgrid)
    rev = threshold_energy(rsm, 0.4).value
    assert abs(fwd - rev) / fwd < 1e-12


def test_codomain_rotation_exact(ico4):
    _, grid = ico4
    z2_vals_map = SphereMap(2, "z2", lambda p: _z2(p))
    base = threshold_energy(sample_map(z2_vals_map, grid), 0.37).value
    R = _rotation([0.2, 1.0, -0.5], 0.9)
    rot = SphereMap(2, "rot-z2", lambda p: _z2(p) @ R.T)
    val = threshold_energy(sample_map(rot, grid), 0.37).value
    assert abs(val - base) / base < 1e-12


def test_domain_rotation_quadrature_tolerance(circle_4096):
    m = power_map(2)
    base = threshold_energy(sample_map(m, circle_4096), 0.5).value
    alpha = 0.321
    ca, sa = math.cos(alpha), math.sin(alpha)
    Q = np.array([[ca, -sa], [sa, ca]])
    rot = SphereMap(1, "rot-dom", lambda p: m(p @ Q.T))
    val = threshold_energy(sample_map(rot, circle_4096), 0.5).value
    assert abs(val - base) / base < 1e-3


def _z2(pts):
    from spherelab.maps import rational_map

    return rational_map([0, 0, 1], [1])(pts)


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis /= np.linalg.norm(axis)
    K = np.array([
        [0, -axis[2], axis[1]],
        [axis[2], 0, -axis[0]],
        [-axis[1], axis[0], 0],
    ])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


def test_component_energy_basics(circle_8192, ico3):
    smc = sample_map(constant_map(1), circle_8192)
    assert component_threshold_energy(smc, 1, 0.4).value == 0.0
    smi = sample_map(identity_map(1), circle_8192)
    full = threshold_energy(smi, 0.3).value
    comp = component_threshold_energy(smi, 1, 0.3)
    assert 0.0 < comp.value <= full
    # regression pin; bit-identical across runs
    assert comp.value == 7.658818577647379
    assert comp.value == component_threshold_energy(smi, 1, 0.3).value
    _, grid = ico3
    smi2 = sample_map(identity_map(2), grid)
    full2 = threshold_energy(smi2, 0.5).value
    for j in (1, 2, 3):
        assert component_threshold_energy(smi2, j, 0.5).value <= full2
    with pytest.raises(ValueError):
        component_threshold_energy(smi2, 4, 0.5)


def test_component_threshold_predicate():
    # |v| > delta*sqrt(d+1) forces max_j |v_j| > delta
    rng = np.random.default_rng(77)
    for dim in (1, 2):
        a = random_unit(rng, dim, 100_000)
        b = random_unit(rng, dim, 100_000)
        v = a - b
        delta = 0.35
        sel = np.linalg.norm(v, axis=1) > delta * math.sqrt(dim + 1)
        assert np.all(np.abs(v[sel]).max(axis=1) > delta)


def test_monte_carlo_constant_exact_zero():
    rep = monte_carlo_energy(constant_map(2), 0.5, 10_000, seed=3)
    assert rep.value == 0.0 and rep.stderr == 0.0


def test_monte_carlo_identity_vs_closed_form():
    rep = monte_carlo_energy(identity_map(1), 0.5, 10**6, seed=12)
    oracle = circle_identity_energy(0.5)
    assert abs(rep.value - oracle) <= 3.0 * rep.stderr


def test_monte_carlo_seed_reproducibility():
    a = monte_carlo_energy(power_map(2), 0.4, 50_000, seed=9)
    b = monte_carlo_energy(power_map(2), 0.4, 50_000, seed=9)
    assert (a.value, a.stderr, a.pair_fraction) == (b.value, b.stderr, b.pair_fraction)
    with pytest.raises(ValueError):
        monte_carlo_energy(power_map(2), 0.4, 500, seed=9)


def test_quadrature_mc_agreement_small():
    g = uniform_circle_grid(2048)
    for m in (identity_map(1), power_map(3)):
        sm = sample_map(m, g)
        for delta in (0.2, 0.5, 1.0):
            quad = threshold_energy(sm, delta).value
            mc = monte_carlo_energy(m, delta, 200_000, seed=1)
            assert abs(quad - mc.value) <= 3.0 * mc.stderr


def test_dirichlet_energies(circle_8192, ico4):
    assert dirichlet_energy(identity_map(1), circle_8192) == pytest.approx(
        2 * math.pi, rel=1e-4
    )
    assert dirichlet_energy(power_map(2), circle_8192) == pytest.approx(
        4 * math.pi, rel=1e-4
    )
    _, grid = ico4
    assert dirichlet_energy(identity_map(2), grid) == pytest.approx(
        8 * math.pi, rel=1e-4
    )
    assert dirichlet_energy(constant_map(2), grid) == 0.0


def test_limit_constant_identity_circle(circle_8192):
    est = estimate_limit_constant(identity_map(1), circle_8192, [0.4, 0.2, 0.1, 0.05])
    assert est.k_estimate == pytest.approx(2.0, rel=0.02)
    assert est.residual < 0.1 * est.k_estimate


def test_limit_constant_map_independence(circle_8192):
    e1 = estimate_limit_constant(identity_map(1), circle_8192, [0.4, 0.2, 0.1, 0.05])
    e2 = estimate_limit_constant(power_map(2), circle_8192, [0.4, 0.2, 0.1, 0.05])
    assert abs(e2.k_estimate - e1.k_estimate) / e1.k_estimate < 0.05


def test_limit_constant_errors(circle_4096):
    with pytest.raises(UndefinedRatioError):
        estimate_limit_constant(constant_map(1), circle_4096, [0.4, 0.2])
    with pytest.raises(ValueError):
        estimate_limit_constant(identity_map(1), circle_4096, [0.2, 0.4])


def test_thread_count_bit_determinism(ico3, circle_4096):
    _, grid = ico3  # icosphere weights are non-uniform: exercises both paths
    sm = sample_map(bubble_map(1, 7.0, 2), grid)
    vals = {threshold_energy(sm, 0.33, threads=t).value for t in (1, 2, 5, 8)}
    assert len(vals) == 1
    smc = sample_map(power_map(3), circle_4096)
    vals = {threshold_energy(smc, 0.61, threads=t).value for t in (1, 8)}
    assert len(vals) == 1


def test_resolution_floor_warning():
    g = uniform_circle_grid(512)
    sm = sample_map(bubble_map(1, 100.0, 1), g)
    assert resolution_floor(sm) > 0.2
    with pytest.warns(UserWarning, match="resolution floor"):
        threshold_energy(sm, 0.2)


def test_lipschitz_estimate_identity(circle_4096):
    sm = sample_map(identity_map(1), circle_4096)
    assert lipschitz_estimate(sm) == pytest.approx(1.0, rel=1e-6)
