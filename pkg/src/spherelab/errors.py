"""Package exception hierarchy.

Invalid arguments raise plain ValueError; the classes below mark failure
modes the CLI maps to distinct exit codes (3 for resolution problems,
4 for resource limits).
"""


class SphereLabError(Exception):
    """Base class for spherelab-specific failures."""


class ResolutionError(SphereLabError):
    """The grid is too coarse for the requested computation."""


class CapUnderResolvedError(ResolutionError):
    """A spherical cap contains no quadrature point."""


class ResourceLimitError(SphereLabError):
    """Requested size exceeds a hard memory/time guard."""


class NotRegularValueError(SphereLabError):
    """A located preimage has a near-singular Jacobian."""


class UndefinedRatioError(SphereLabError):
    """A ratio with zero denominator that has no 0/0 convention."""
