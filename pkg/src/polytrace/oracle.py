"""Independent direct evaluation of traces and corner constants.

These oracles never touch the asymptotic formulas they are meant to check:

  * tr A        = L^2 |P| sigma_check(0)                  (exact product)
  * tr A^2      = int sigma_check(z)^2 |P_L n (P_L + z)| dz, evaluated in
                  polar coordinates with the covariogram computed exactly
                  by triangle clipping
  * corner b0   = int over the sector C of sigma_check(y)^2 |(y-C) n C| dy,
                  reduced to a radial moment times a numeric angular factor
  * grid trace  = Nystrom discretization of the kernel on clipped midpoint
                  cells, tr h(K) by symmetric eigendecomposition (the only
                  route for polynomial h of degree >= 3)

The covariogram is piecewise quadratic in z; its kink loci are the
segments {V - E} between polygon vertices and edges.  The polar integrator
splits every angular integral exactly at the circle/kink-segment
intersection angles and the radial integral at the corresponding critical
radii, so plain Gauss panels see analytic integrands everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial.distance import cdist

from .errors import BudgetExceeded, DomainError, EigenFailure, QuadratureNonConvergence
from .geometry import Polygon, convex_clip_areas, covariogram_batch, scale
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    adaptive_gauss,
    composite_nodes,
    halve_breaks,
    panel_breaks,
)
from .symbols import RadialKernel, RadialSymbol, TestFunction, hankel_kernel, moment_integral

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DirectTraceResult:
    """Directly computed trace with its estimated numerical error."""

    value: float
    L: float
    method: str  # 'covariogram' | 'grid'
    err_est: float

    def to_dict(self) -> dict:
        return {"L": self.L, "value": self.value, "err_est": self.err_est, "method": self.method}


@dataclass(frozen=True)
class SectorResult:
    """Corner constant of a semi-infinite sector of opening gamma."""

    gamma: float
    value: float
    method: str  # 'brute-force' | 'composed' | 'closed-form'


def trace_A(p: Polygon, kernel: RadialKernel, L: float) -> float:
    """Bulk identity tr A_{P_L} = |P_L| sigma_check(0), exact in L."""
    return L * L * p.area * kernel.at_zero()


# -- polar covariogram integrator ---------------------------------------------------


def _kink_segments(p: Polygon) -> tuple[np.ndarray, np.ndarray]:
    """Segments {E - V} and {V - E}: the kink loci of the covariogram."""
    starts = []
    dirs = []
    verts = p.vertices
    for e in p.edges:
        d = e.end - e.start
        for v in verts:
            starts.append(e.start - v)
            dirs.append(d)
            starts.append(v - e.end)
            dirs.append(d)  # (v - e.end) + s*d traces v - E backwards
    return np.asarray(starts), np.asarray(dirs)


def _critical_radii(P0: np.ndarray, D: np.ndarray, r_top: float) -> np.ndarray:
    """Radii where the circle meets a kink-segment endpoint or tangentially."""
    ends = P0 + D
    radii = [np.hypot(P0[:, 0], P0[:, 1]), np.hypot(ends[:, 0], ends[:, 1])]
    dd = np.einsum("ij,ij->i", D, D)
    s_foot = -np.einsum("ij,ij->i", P0, D) / dd
    foot = P0 + s_foot[:, None] * D
    inside = (s_foot > 0.0) & (s_foot < 1.0)
    radii.append(np.where(inside, np.hypot(foot[:, 0], foot[:, 1]), np.inf))
    r = np.unique(np.concatenate(radii))
    return r[(r > 1e-12) & (r < r_top)]


def _kink_angles(P0: np.ndarray, D: np.ndarray, r: float) -> np.ndarray:
    """Angles (mod 2*pi) at which the circle of radius r crosses a kink segment."""
    a = np.einsum("ij,ij->i", D, D)
    b = 2.0 * np.einsum("ij,ij->i", P0, D)
    c = np.einsum("ij,ij->i", P0, P0) - r * r
    disc = b * b - 4.0 * a * c
    ok = disc >= 0.0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    angles = []
    for roots in ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)):
        hit = ok & (roots >= 0.0) & (roots <= 1.0)
        if np.any(hit):
            pts = P0[hit] + roots[hit][:, None] * D[hit]
            angles.append(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), TWO_PI))
    if not angles:
        return np.empty(0)
    return np.unique(np.concatenate(angles))


_MAX_ARC = math.pi / 4.0


def _theta_rule(kinks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes/weights over [0, 2*pi) split at every kink angle."""
    if kinks.size == 0:
        edges = np.array([0.0, TWO_PI])
    else:
        edges = np.concatenate([kinks, [kinks[0] + TWO_PI]])
    nodes_all = []
    weights_all = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo < 1e-14:
            continue
        nseg = max(1, int(np.ceil((hi - lo) / _MAX_ARC)))
        nodes, weights = composite_nodes(np.linspace(lo, hi, nseg + 1), order)
        nodes_all.append(nodes)
        weights_all.append(weights)
    return np.concatenate(nodes_all), np.concatenate(weights_all)


def _radial_pass(
    pL: Polygon,
    kernel: RadialKernel,
    r_breaks: np.ndarray,
    order_r: int,
    order_theta: int,
    segs: tuple[np.ndarray, np.ndarray],
) -> float:
    r_nodes, r_weights = composite_nodes(r_breaks, order_r)
    factor = r_weights * r_nodes * kernel(r_nodes) ** 2

    theta_parts = []
    slices = []
    start = 0
    for r in r_nodes:
        th, wth = _theta_rule(_kink_angles(*segs, r), order_theta)
        theta_parts.append((r * np.cos(th), r * np.sin(th), wth))
        slices.append((start, start + len(th)))
        start += len(th)

    Z = np.empty((start, 2))
    for (zx, zy, _), (lo, hi) in zip(theta_parts, slices):
        Z[lo:hi, 0] = zx
        Z[lo:hi, 1] = zy
    g = covariogram_batch(pL, Z)

    total = 0.0
    for fac, (_, _, wth), (lo, hi) in zip(factor, theta_parts, slices):
        total += fac * float(np.dot(wth, g[lo:hi]))
    return total


def trace_A2_covariogram(
    p: Polygon,
    kernel: RadialKernel,
    L: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> DirectTraceResult:
    """tr A^2_{P_L} = int sigma_check(z)^2 g_{P_L}(z) dz by exact polar quadrature."""
    if L < 1:
        raise DomainError(f"scaling parameter must be >= 1, got {L}")
    pL = scale(p, L)
    r_top = min(pL.diameter(), kernel.r_max)
    segs = _kink_segments(pL)
    crit = _critical_radii(*segs, r_top)
    cap = min(kernel.r_max, r_top) / 24.0
    breaks = panel_breaks(0.0, r_top, cap, splits=crit)

    value = _radial_pass(pL, kernel, breaks, 14, 12, segs)
    err = np.inf
    for k in range(min(spec.max_refine, 4)):
        breaks = halve_breaks(breaks)
        refined = _radial_pass(pL, kernel, breaks, 14, min(12 + 4 * (k + 1), 20), segs)
        err = abs(refined - value)
        value = refined
        if err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            return DirectTraceResult(value=value, L=L, method="covariogram", err_est=err)
    raise QuadratureNonConvergence("trace_A2_covariogram", err, spec.abs_tol)


def trace_h_quadratic(
    p: Polygon,
    sym: RadialSymbol,
    h: TestFunction,
    L: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> DirectTraceResult:
    """Direct tr h(A_{P_L}) for h = a2 z^2 + a1 z by linearity of the trace."""
    if not h.quadratic_exact:
        raise DomainError(
            f"direct trace needs deg h <= 2, got {h.degree}; use grid_trace instead"
        )
    kernel = hankel_kernel(sym, spec)
    a2 = h.quadratic_part()
    a1 = h.linear_part()
    bulk = trace_A(p, kernel, L)
    if a2 == 0:
        return DirectTraceResult(value=a1 * bulk, L=L, method="covariogram", err_est=0.0)
    quad = trace_A2_covariogram(p, kernel, L, spec)
    return DirectTraceResult(
        value=a2 * quad.value + a1 * bulk,
        L=L,
        method="covariogram",
        err_est=abs(a2) * quad.err_est,
    )


# -- sector (corner) oracles --------------------------------------------------------


def b0_convex_bruteforce(
    gamma: float,
    kernel: RadialKernel,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SectorResult:
    """Corner constant of a convex sector, from the overlap-area integral.

    For the sector C of opening gamma in (0, pi) the overlap area is
    |(y - C) n C| = y1 y2 - cot(gamma) y2^2, so in polar coordinates

        b0 = int_0^inf r^3 sigma_check(r)^2 dr
             * int_0^gamma (cos t sin t - cot(gamma) sin^2 t) dt.

    The angular factor is integrated numerically on purpose: this oracle
    must not share the closed form (1 - gamma cot gamma)/2 that it checks.
    """
    if not 0.0 < gamma < math.pi:
        raise DomainError(f"convex sector angle must lie in (0, pi), got {gamma}")
    radial = moment_integral(3, kernel, spec)
    cot = math.cos(gamma) / math.sin(gamma)
    angular, _ = adaptive_gauss(
        lambda t: np.cos(t) * np.sin(t) - cot * np.sin(t) ** 2,
        0.0,
        gamma,
        spec,
        max_len=gamma / 8.0,
        name="sector_angular",
    )
    return SectorResult(gamma=gamma, value=radial * angular, method="brute-force")


def b0_concave_composed(
    gamma: float,
    kernel: RadialKernel,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SectorResult:
    """Corner constant of a concave sector, composed from convex sector traces.

    A corner of opening gamma in (pi, 2*pi) decomposes into convex sectors:
    b0(gamma) = -s(2*pi - gamma) + 2 s(gamma - pi), where s is the convex
    brute-force trace above.
    """
    if not math.pi < gamma < TWO_PI:
        raise DomainError(f"concave sector angle must lie in (pi, 2*pi), got {gamma}")
    s_outer = b0_convex_bruteforce(TWO_PI - gamma, kernel, spec).value
    s_wing = b0_convex_bruteforce(gamma - math.pi, kernel, spec).value
    return SectorResult(gamma=gamma, value=-s_outer + 2.0 * s_wing, method="composed")


# -- grid (Nystrom) estimator -------------------------------------------------------


def _bulk_kernel_evaluator(kernel: RadialKernel):
    """Kernel evaluator safe for huge batches (splines a numeric kernel)."""
    if kernel.provenance == "closed-form":
        return lambda d: kernel(d)
    r = np.linspace(0.0, kernel.r_max, 4001)
    spline = CubicSpline(r, kernel(r))

    def f(d):
        d = np.asarray(d)
        return np.where(d <= kernel.r_max, spline(np.minimum(d, kernel.r_max)), 0.0)

    return f


def grid_cells(p: Polygon, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes and polygon-clipped cell weights on an n x n grid.

    Cells tile the bounding box; each weight is the exact area of the cell
    intersected with the polygon, so the weights sum to |P| exactly.
    """
    lo, hi = p.bounding_box()
    step = (hi - lo) / n
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    origins = lo[None, :] + np.stack([ii.ravel(), jj.ravel()], axis=1) * step[None, :]
    cell = np.array([[0.0, 0.0], [step[0], 0.0], [step[0], step[1]], [0.0, step[1]]])
    weights = np.zeros(len(origins))
    for sign, tris in p.signed_triangles():
        for tri in tris:
            weights += sign * convex_clip_areas(cell, tri, origins)
    keep = weights > 1e-12 * step[0] * step[1]
    nodes = origins[keep] + 0.5 * step[None, :]
    return nodes, weights[keep]


def grid_trace(
    p: Polygon,
    kernel: RadialKernel,
    h: TestFunction,
    L: float,
    n: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    max_matrix_nodes: int = 8192,
    _estimate_error: bool = True,
) -> DirectTraceResult:
    """Nystrom estimate of tr h(A_{P_L}) on an n x n clipped midpoint grid.

    Assembles K_ij = w_i^(1/2) sigma_check(|x_i - x_j|) w_j^(1/2) and sums
    h over its eigenvalues; a sanity oracle for degree >= 3, not a precision
    tool.  Linear h skips the matrix entirely (tr K = sigma_check(0) sum w).
    The error estimate compares against the n/2 resolution.
    """
    if h.degree < 1 or all(c == 0 for c in h.coeffs):
        raise DomainError("grid_trace needs a nonzero polynomial h")
    if n < 2:
        raise DomainError(f"grid resolution must be >= 2, got {n}")
    pL = scale(p, L)

    def compute(res: int) -> float:
        nodes, weights = grid_cells(pL, res)
        if h.degree == 1:
            return h.coefficient(1) * kernel.at_zero() * float(np.sum(weights))
        if len(nodes) > max_matrix_nodes:
            raise BudgetExceeded(
                f"{len(nodes)} nodes exceed the {max_matrix_nodes}-node matrix budget"
            )
        K = cdist(nodes, nodes)
        K = _bulk_kernel_evaluator(kernel)(K)
        sw = np.sqrt(weights)
        K *= sw[:, None]
        K *= sw[None, :]
        try:
            eigs = np.linalg.eigvalsh(K)
        except np.linalg.LinAlgError as exc:
            raise EigenFailure(f"eigendecomposition failed at resolution {res}") from exc
        return float(np.sum(h(eigs)).real)

    value = compute(n)
    err = 0.0
    if _estimate_error and n >= 4:
        err = abs(value - compute(n // 2))
    return DirectTraceResult(value=value, L=L, method="grid", err_est=err)
