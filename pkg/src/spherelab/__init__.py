"""Numerical laboratory for sphere maps: degrees, threshold energies, and
the cap-average machinery that connects them.

Everything works on the unit spheres S^1 and S^2 with the chordal
(ambient Euclidean) metric.  Grids carry surface-measure quadrature
weights; maps are vectorized callables taking (n, d+1) arrays of unit
vectors to unit vectors.
"""

__version__ = "0.1.0"

from .errors import (
    SphereLabError,
    ResolutionError,
    CapUnderResolvedError,
    ResourceLimitError,
    NotRegularValueError,
    UndefinedRatioError,
)

__all__ = [
    "__version__",
    "SphereLabError",
    "ResolutionError",
    "CapUnderResolvedError",
    "ResourceLimitError",
    "NotRegularValueError",
    "UndefinedRatioError",
]
