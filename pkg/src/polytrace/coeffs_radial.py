"""Closed-form asymptotic coefficients for radial symbols and quadratic h.

For a radially symmetric symbol and h(z) = a2 z^2 + a1 z the three-term
expansion  tr h(A_{P_L}) = L^2 c2 + L c1 + c0 + O(L^-inf)  has

    c2 = (|P| / 2 pi) int_0^inf R h(sigma(R)) dR
    c1 = -2 |dP| I2 * a2
    c0 = sum_X  (1/2) f(gamma_X) I3 * a2,      f(g) = 1 + (pi - g) cot g

with the moment integrals I_k = int_0^inf r^k sigma_check(r)^2 dr.  The
same c1 and c0 decompose into per-edge terms |E| a1(nu_E), F(E) a0(nu_E)
and per-vertex corner terms b0(X) = (1 - gamma cot gamma)/2 * I3; both
the totals and the breakdowns are exposed.

Only the purely quadratic part of h reaches c1 and c0; the linear part
contributes the bulk term |P| sigma_check(0) to c2 alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .geometry import Polygon, angle_function_f, edge_F
from .quadrature import DEFAULT_SPEC, QuadratureSpec, adaptive_gauss
from .symbols import RadialKernel, RadialSymbol, TestFunction, hankel_kernel, moment_integral

TWO_PI = 2.0 * math.pi

# Angles this close to pi are rejected: the polygon model never produces
# them and the corner formulas degenerate there.
_PI_EXCLUSION = 1e-12


@dataclass(frozen=True)
class EdgeTerms:
    """Per-edge breakdown entry: strip trace a1, weighted trace a0, F(E)."""

    a1: float
    a0: float
    F: float
    length: float


@dataclass(frozen=True)
class CoefficientSet:
    """(c2, c1, c0) with per-edge and per-vertex breakdowns.

    Invariants (checked by the test suite):
      c1 = sum_E length * a1      over per_edge
      c0 = sum_E F * a0 + sum_X b0  over per_edge / per_vertex
    """

    c2: complex
    c1: float
    c0: float
    per_edge: list[EdgeTerms]
    per_vertex: list[float]
    metadata: dict = field(default_factory=dict)

    def breakdown_c1(self) -> float:
        return sum(e.length * e.a1 for e in self.per_edge)

    def breakdown_c0(self) -> float:
        return sum(e.F * e.a0 for e in self.per_edge) + sum(self.per_vertex)

    def to_dict(self) -> dict:
        c2 = self.c2
        return {
            "c2": c2 if not isinstance(c2, complex) else {"re": c2.real, "im": c2.imag},
            "c1": self.c1,
            "c0": self.c0,
            "per_edge": [
                {"a1": e.a1, "a0": e.a0, "F": e.F, "length": e.length}
                for e in self.per_edge
            ],
            "per_vertex": list(self.per_vertex),
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class SmoothBaseline:
    """Constant-order coefficient for smooth boundaries and quadratic h.

    Identically zero: an analytic fact, never computed numerically.  The
    polygon value c0 > 0 is the anomaly against this baseline.
    """

    B0: float = 0.0


def smooth_baseline() -> SmoothBaseline:
    return SmoothBaseline()


def c2_radial(
    p: Polygon,
    h: TestFunction,
    sym: RadialSymbol,
    spec: QuadratureSpec = DEFAULT_SPEC,
):
    """Area coefficient c2 = (|P| / 2 pi) int_0^inf R h(sigma(R)) dR.

    Works for any polynomial h; complex coefficients give a complex c2.
    """
    if h.is_real:
        value, _ = adaptive_gauss(
            lambda R: R * h(sym(R)),
            0.0,
            sym.decay_radius,
            spec,
            max_len=sym.decay_radius / 16.0,
            name="c2_radial",
        )
        return p.area / TWO_PI * value
    re, _ = adaptive_gauss(
        lambda R: R * h(sym(R)).real,
        0.0,
        sym.decay_radius,
        spec,
        max_len=sym.decay_radius / 16.0,
        name="c2_radial_re",
    )
    im, _ = adaptive_gauss(
        lambda R: R * h(sym(R)).imag,
        0.0,
        sym.decay_radius,
        spec,
        max_len=sym.decay_radius / 16.0,
        name="c2_radial_im",
    )
    return p.area / TWO_PI * complex(re, im)


def a1_radial(kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Per-unit-length edge coefficient for h = z^2: a1 = -2 I2."""
    return -2.0 * moment_integral(2, kernel, spec)


def a0_radial(kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Weighted edge coefficient for h = z^2: a0 = -(pi/4) I3.

    The per-edge value is fixed so that sum_E F(E) a0 reproduces the
    aggregate (pi/2) sum_X cot(gamma_X) I3; for radial symbols it does not
    depend on the edge direction.
    """
    return -(math.pi / 4.0) * moment_integral(3, kernel, spec)


def c1_radial(p: Polygon, kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Perimeter coefficient for h = z^2: c1 = -2 |dP| I2."""
    return -2.0 * p.perimeter * moment_integral(2, kernel, spec)


def c0_radial(p: Polygon, kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Constant-order coefficient for h = z^2: c0 = sum_X (1/2) f(gamma_X) I3.

    Strictly positive for any polygon and nonzero real radial symbol.
    """
    I3 = moment_integral(3, kernel, spec)
    return 0.5 * sum(angle_function_f(c.angle) for c in p.corners) * I3


def b0_closed(gamma: float, kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Corner coefficient b0 = (1 - gamma cot gamma)/2 * I3 for h = z^2.

    One formula covers convex and concave corners.  gamma = pi is excluded
    (no corner there); the value grows like 1/|gamma - pi| nearby, which is
    genuine, not a numerical artifact: it cancels against the edge terms.
    """
    if gamma <= 0 or gamma >= TWO_PI:
        raise DomainError(f"corner angle must lie in (0, 2*pi), got {gamma}")
    if abs(gamma - math.pi) < _PI_EXCLUSION:
        raise DomainError("corner angle pi is not a corner")
    I3 = moment_integral(3, kernel, spec)
    return 0.5 * (1.0 - gamma * math.cos(gamma) / math.sin(gamma)) * I3


def coefficients(
    p: Polygon,
    h: TestFunction,
    sym: RadialSymbol,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> CoefficientSet:
    """Full coefficient set for radial sigma and h of degree <= 2."""
    if not h.quadratic_exact:
        raise DomainError(
            f"exact coefficients need deg h <= 2, got degree {h.degree}; "
            "use the grid oracle for higher degrees"
        )
    a2 = h.quadratic_part()
    if isinstance(a2, complex):
        raise DomainError("the quadratic coefficient of h must be real")

    kernel = hankel_kernel(sym, spec)
    c2 = c2_radial(p, h, sym, spec)
    I2 = moment_integral(2, kernel, spec)
    I3 = moment_integral(3, kernel, spec)

    a1_edge = -2.0 * I2 * a2
    a0_edge = -(math.pi / 4.0) * I3 * a2
    per_edge = [
        EdgeTerms(a1=a1_edge, a0=a0_edge, F=edge_F(p, i), length=e.length)
        for i, e in enumerate(p.edges)
    ]
    per_vertex = [
        a2 * 0.5 * (1.0 - c.angle * math.cos(c.angle) / math.sin(c.angle)) * I3
        for c in p.corners
    ]

    c1 = -2.0 * p.perimeter * I2 * a2
    c0 = a2 * 0.5 * sum(angle_function_f(c.angle) for c in p.corners) * I3

    return CoefficientSet(
        c2=c2,
        c1=c1,
        c0=c0,
        per_edge=per_edge,
        per_vertex=per_vertex,
        metadata={
            "symbol": sym.name,
            "h_coeffs": list(h.coeffs),
            "I2": I2,
            "I3": I3,
            "kernel_provenance": kernel.provenance,
        },
    )


def asymptotic_trace(cs: CoefficientSet, L: float):
    """Evaluate the three-term expansion L^2 c2 + L c1 + c0 at scale L >= 1."""
    if L < 1:
        raise DomainError(f"the expansion is stated for L >= 1, got {L}")
    return L * L * cs.c2 + L * cs.c1 + cs.c0
