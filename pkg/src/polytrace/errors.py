"""Exception types shared across the package."""


class PolytraceError(Exception):
    """Base class for all library errors."""


class DomainError(PolytraceError):
    """An argument lies outside the mathematically admissible domain."""


class GeometryError(PolytraceError):
    """Base class for polygon construction failures."""


class DegenerateLoop(GeometryError):
    """A vertex loop has fewer than 3 vertices or zero area."""


class CollinearAdjacentEdges(GeometryError):
    """Two consecutive edges are collinear (interior angle of pi)."""


class SelfIntersection(GeometryError):
    """A loop self-intersects, or two loops of the same polygon intersect."""


class TriangulationFailure(GeometryError):
    """Ear clipping could not complete (invalid or unsupported polygon)."""


class QuadratureNonConvergence(PolytraceError):
    """An adaptive quadrature failed to meet its tolerance.

    Carries the name of the failing integral so callers (and the CLI)
    can report which evaluation broke.
    """

    def __init__(self, name: str, residual: float, tol: float):
        self.name = name
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"quadrature '{name}' did not converge: residual {residual:.3e} > tol {tol:.3e}"
        )


class PVNonConvergence(QuadratureNonConvergence):
    """Richardson extrapolation of a principal-value integral did not settle."""


class BudgetExceeded(PolytraceError):
    """A grid request would exceed the configured node budget."""


class EigenFailure(PolytraceError):
    """Symmetric eigendecomposition of the discretized kernel failed."""
