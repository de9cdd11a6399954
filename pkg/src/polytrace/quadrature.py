"""Deterministic panel quadrature shared by all integral evaluators.

Every 1-D integral in the package is computed on composite Gauss-Legendre
panels: the interval is split at caller-supplied breakpoints (kinks,
oscillation caps), each panel gets a fixed-order rule, and convergence is
checked by halving every panel and comparing.  This keeps results
independent of evaluation order and thread count, which the CLI promises.

Integrands must be vectorized (ndarray in, ndarray out).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, QuadratureNonConvergence


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and truncation knobs shared by all integral evaluators.

    abs_tol / rel_tol apply to each 1-D quadrature; refinement stops once
    the panel-halving residual drops below max(abs_tol, rel_tol*|value|).
    max_refine is the panel-halving depth; r_max / xi_max override the
    decay-based truncation radii of kernel and slice transforms.
    """

    abs_tol: float = 1e-11
    rel_tol: float = 1e-9
    max_refine: int = 8
    r_max: float | None = None
    xi_max: float | None = None

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_refine < 1:
            raise DomainError("max_refine must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_breaks(
    a: float,
    b: float,
    max_len: float,
    splits: Iterable[float] = (),
) -> np.ndarray:
    """Sorted breakpoints of [a, b]: mandatory splits, panels capped at max_len."""
    if b <= a:
        raise DomainError(f"empty integration interval [{a}, {b}]")
    pts = [a, b]
    for s in splits:
        if a < s < b:
            pts.append(float(s))
    pts = np.unique(np.asarray(pts, dtype=float))
    out = [pts[0]]
    for left, right in zip(pts[:-1], pts[1:]):
        n = max(1, int(np.ceil((right - left) / max_len)))
        out.extend(np.linspace(left, right, n + 1)[1:])
    return np.asarray(out)


def composite_nodes(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """All Gauss nodes and weights for the given panel decomposition."""
    x, w = gauss_rule(order)
    lo = breaks[:-1]
    hi = breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def halve_breaks(breaks: np.ndarray) -> np.ndarray:
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    out = np.empty(2 * len(breaks) - 1)
    out[0::2] = breaks
    out[1::2] = mids
    return out


def integrate_on(f: Callable[[np.ndarray], np.ndarray], breaks: np.ndarray, order: int):
    nodes, weights = composite_nodes(breaks, order)
    return float(np.dot(weights, np.asarray(f(nodes), dtype=float)))


def adaptive_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    max_len: float | None = None,
    splits: Iterable[float] = (),
    order: int = 16,
    name: str = "integral",
) -> tuple[float, float]:
    """Integrate a vectorized f over [a, b]; returns (value, error estimate).

    Raises QuadratureNonConvergence (tagged with `name`) if panel halving
    does not settle within spec.max_refine rounds.
    """
    if b == a:
        return 0.0, 0.0
    if max_len is None:
        max_len = (b - a) / 8.0
    breaks = panel_breaks(a, b, max_len, splits)
    value = integrate_on(f, breaks, order)
    err = np.inf
    for _ in range(spec.max_refine):
        breaks = halve_breaks(breaks)
        refined = integrate_on(f, breaks, order)
        err = abs(refined - value)
        value = refined
        if err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            return value, err
    raise QuadratureNonConvergence(name, err, max(spec.abs_tol, spec.rel_tol * abs(value)))
