import warnings

import numpy as np
import pytest

from spherelab.geometry import icosphere_mesh, uniform_circle_grid
from spherelab.maps import (
    antipodal_map,
    bubble_map,
    constant_map,
    identity_map,
    perturb_map,
    power_map,
    rational_map,
)

# the resolution-floor warning is expected noise in sweep-style tests
warnings.filterwarnings("ignore", message="delta below the grid's resolution floor")


@pytest.fixture(scope="session")
def circle_4096():
    return uniform_circle_grid(4096)


@pytest.fixture(scope="session")
def circle_8192():
    return uniform_circle_grid(8192)


@pytest.fixture(scope="session")
def ico3():
    return icosphere_mesh(3)


@pytest.fixture(scope="session")
def ico4():
    return icosphere_mesh(4)


@pytest.fixture(scope="session")
def ico5():
    return icosphere_mesh(5)


@pytest.fixture(scope="session")
def ico6():
    return icosphere_mesh(6)


def zoo_maps_d1():
    return [
        identity_map(1),
        power_map(2),
        power_map(-2),
        power_map(3),
        bubble_map(1, 10.0, 1),
        perturb_map(power_map(1), 0.1, 11),
        constant_map(1),
    ]


def zoo_maps_d2():
    return [
        identity_map(2),
        rational_map([0, 0, 1], [1]),
        antipodal_map(2),
        bubble_map(1, 10.0, 2),
        perturb_map(identity_map(2), 0.1, 11),
        constant_map(2),
    ]


def agreement_zoo_d2():
    """Zoo representatives resolvable at level 6: maps whose resolution
    floor stays below the smallest tested delta (0.2)."""
    return [
        identity_map(2),
        rational_map([0, 0, 1], [1]),
        antipodal_map(2),
        bubble_map(1, 1.5, 2),
        bubble_map(2, 1.5, 2),
        perturb_map(identity_map(2), 0.1, 11),
    ]


def random_unit(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    v = rng.standard_normal((n, dim + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
