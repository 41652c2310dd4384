import math

import numpy as np
import pytest

from spherelab.degree import (
    DegreeResult,
    degree_of,
    kronecker_degree,
    preimage_count,
    winding_number,
)
from spherelab.errors import NotRegularValueError, ResolutionError
from spherelab.geometry import icosphere_mesh, uniform_circle_grid
from spherelab.maps import (
    SphereMap,
    antipodal_map,
    bubble_map,
    constant_map,
    identity_map,
    perturb_map,
    power_map,
    rational_map,
    sample_map,
)

from conftest import zoo_maps_d1, zoo_maps_d2


def rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis /= np.linalg.norm(axis)
    K = np.array([
        [0, -axis[2], axis[1]],
        [axis[2], 0, -axis[0]],
        [-axis[1], axis[0], 0],
    ])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


def test_winding_power3_exact(circle_4096):
    res = winding_number(sample_map(power_map(3), circle_4096))
    assert res.degree == 3 and res.residual < 1e-12


def test_winding_constant(circle_4096):
    res = winding_number(sample_map(constant_map(1), circle_4096))
    assert res.degree == 0 and res.raw == 0.0


def test_winding_perturbed_negative_degree():
    g = uniform_circle_grid(4096)
    m = perturb_map(power_map(-2), 0.05, 1)
    assert winding_number(sample_map(m, g)).degree == -2
    t = np.array([math.cos(0.9), math.sin(0.9)])
    assert preimage_count(m, t, 4096) == -2


def test_winding_antipodal_consecutive_error():
    g = uniform_circle_grid(8)
    # power 4 on 8 points: consecutive images pi apart (antipodal)
    with pytest.raises(ResolutionError):
        winding_number(sample_map(power_map(4), g))


def test_kronecker_identity_and_antipodal(ico3):
    _, grid = ico3
    r = kronecker_degree(sample_map(identity_map(2), grid))
    assert r.degree == 1 and r.residual < 1e-9
    r = kronecker_degree(sample_map(antipodal_map(2), grid))
    assert r.degree == -1 and r.residual < 1e-9


def test_kronecker_constant_is_zero(ico3):
    _, grid = ico3
    r = kronecker_degree(sample_map(constant_map(2), grid))
    assert r.degree == 0 and r.raw == 0.0


@pytest.mark.parametrize("k", [2, 3])
def test_kronecker_rational_powers(k, ico5):
    _, grid = ico5
    zk = rational_map([0] * k + [1], [1])
    r = kronecker_degree(sample_map(zk, grid))
    assert r.degree == k and r.residual < 0.01
    target = np.array([0.2, -0.3, math.sqrt(1 - 0.13)])
    assert preimage_count(zk, target, 4096) == k


def test_kronecker_needs_mesh():
    from spherelab.geometry import fibonacci_sphere_grid

    sm = sample_map(identity_map(2), fibonacci_sphere_grid(100))
    with pytest.raises(ValueError):
        kronecker_degree(sm)


def test_kronecker_rotation_invariance(ico4):
    _, grid = ico4
    z2 = rational_map([0, 0, 1], [1])
    base = kronecker_degree(sample_map(z2, grid)).raw
    R = rotation([1.0, -2.0, 0.5], 1.234)
    Q = rotation([0.3, 1.0, 2.0], -0.777)
    dom = SphereMap(2, "z2-domain-rot", lambda pts: z2(pts @ Q.T))
    cod = SphereMap(2, "z2-codomain-rot", lambda pts: z2(pts) @ R.T)
    assert kronecker_degree(sample_map(dom, grid)).raw == pytest.approx(base, abs=1e-9)
    assert kronecker_degree(sample_map(cod, grid)).raw == pytest.approx(base, abs=1e-9)


@pytest.mark.parametrize("lam", [1.0, 10.0, 100.0])
@pytest.mark.parametrize("k", [1, 2, -1])
def test_bubble_degree_is_k_for_all_lambda(k, lam, ico5, ico6):
    # a cap of scale 1/lam needs mesh spacing below it: level 6 for lam=100
    _, grid = ico6 if lam > 10 else ico5
    assert kronecker_degree(sample_map(bubble_map(k, lam, 2), grid)).degree == k
    c = uniform_circle_grid(8192)
    assert winding_number(sample_map(bubble_map(k, lam, 1), c)).degree == k


def test_underresolved_concentration_raises(ico5):
    _, grid = ico5
    with pytest.raises(ResolutionError):
        kronecker_degree(sample_map(bubble_map(2, 100.0, 2), grid))


def test_preimage_identity_and_powers():
    assert preimage_count(identity_map(1), [0.6, 0.8], 512) == 1
    t = np.array([math.cos(1.1), math.sin(1.1)])
    assert preimage_count(power_map(4), t, 4096) == 4
    assert preimage_count(identity_map(2), np.array([0.0, 0.6, 0.8]), 2048) == 1


def test_preimage_bubble_near_pole():
    # the exact south pole is a critical value of (lam*z)^2 (double root at
    # z=0), so count at a nearby regular target and check the oracle
    b = bubble_map(2, 50.0, 2)
    _, grid = icosphere_mesh(5)
    near = np.array([0.02, 0.01, -math.sqrt(1 - 0.0005)])
    assert preimage_count(b, near, 30_000) == 2
    assert kronecker_degree(sample_map(b, grid)).degree == 2


def test_preimage_rejects_critical_value():
    with pytest.raises(NotRegularValueError):
        preimage_count(bubble_map(2, 50.0, 2), np.array([0.0, 0.0, -1.0]), 20_000)


def test_degree_result_residual_warning():
    with pytest.warns(UserWarning):
        DegreeResult.from_raw(1.3)


def test_integer_stability_across_resolutions():
    degrees = {
        "identity": 1, "power:k=2": 2, "power:k=-2": -2, "power:k=3": 3,
        "bubble:k=1,lambda=10,d=1": 1,
        "perturb:base=power:k=1,amp=0.1,seed=11": 1, "constant": 0,
    }
    for m in zoo_maps_d1():
        d_lo = winding_number(sample_map(m, uniform_circle_grid(1024))).degree
        d_hi = winding_number(sample_map(m, uniform_circle_grid(4096))).degree
        assert d_lo == d_hi == degrees[m.spec]
    degrees2 = {
        "identity": 1, "rational:num=0,0,1;den=1": 2, "antipodal": -1,
        "bubble:k=1,lambda=10,d=2": 1,
        "perturb:base=identity,amp=0.1,seed=11": 1, "constant": 0,
    }
    _, g3 = icosphere_mesh(3)
    _, g4 = icosphere_mesh(4)
    for m in zoo_maps_d2():
        d_lo = kronecker_degree(sample_map(m, g3)).degree
        d_hi = kronecker_degree(sample_map(m, g4)).degree
        assert d_lo == d_hi == degrees2[m.spec]


def test_three_routes_agree(circle_8192, ico4):
    _, grid = ico4
    target1 = np.array([math.cos(0.77), math.sin(0.77)])
    for m in zoo_maps_d1():
        wn = winding_number(sample_map(m, circle_8192)).degree
        if m.spec == "constant":
            continue  # no regular values for a constant map
        assert preimage_count(m, target1, 8192) == wn
    target2 = np.array([0.1, 0.5, math.sqrt(1 - 0.26)])
    for m in zoo_maps_d2():
        kd = kronecker_degree(sample_map(m, grid)).degree
        if m.spec == "constant":
            continue
        assert preimage_count(m, target2, 12_000) == kd


def test_degree_of_dispatch(circle_4096, ico3):
    _, grid = ico3
    assert degree_of(sample_map(power_map(2), circle_4096)).degree == 2
    assert degree_of(sample_map(identity_map(2), grid)).degree == 1
