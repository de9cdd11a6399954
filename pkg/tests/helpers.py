"""Shared test utilities: independent oracles and random geometry.

Everything here deliberately avoids the library's own quadrature and
clipping code paths, so tests compare two genuinely different routes.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from polytrace.errors import GeometryError
from polytrace.geometry import Polygon, build_polygon

TWO_PI = 2.0 * math.pi


def bessel_j0_series(x: float) -> float:
    """J0 by its power series; independent of scipy, good for |x| <= 12."""
    term = 1.0
    total = 1.0
    q = -(x * x) / 4.0
    for k in range(1, 60):
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-18:
            break
    return total


def quad_tight(f, a, b, **kw) -> float:
    """scipy adaptive quadrature with tight tolerances (test oracle only)."""
    val, _ = quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400, **kw)
    return val


def gaussian_moment(k: int) -> float:
    """int_0^inf r^k (e^{-r^2/2}/(2 pi))^2 dr by independent quadrature."""
    return quad_tight(lambda r: r**k * np.exp(-r * r) / (4.0 * np.pi**2), 0.0, 12.0)


def square_trace_A2_exact(L: float) -> float:
    """Separable closed form of int sigma_check^2 g dz for the L-scaled unit
    square and the width-1 Gaussian: (1/4 pi^2) [L sqrt(pi) erf(L) - 1 + e^{-L^2}]^2."""
    return (L * math.sqrt(math.pi) * math.erf(L) - 1.0 + math.exp(-L * L)) ** 2 / (
        4.0 * math.pi**2
    )


def random_simple_polygon(rng: np.random.Generator, n: int) -> Polygon:
    """Star-shaped polygon with n vertices and a healthy mix of corner types.

    Angles are kept away from pi by construction retries; star-shapedness
    guarantees simplicity.
    """
    for _ in range(200):
        theta = np.sort(rng.uniform(0.0, TWO_PI, size=n))
        if np.min(np.diff(np.concatenate([theta, [theta[0] + TWO_PI]]))) < 0.15:
            continue
        radii = rng.uniform(0.45, 1.5, size=n)
        pts = np.stack([radii * np.cos(theta), radii * np.sin(theta)], axis=1)
        try:
            p = build_polygon([pts])
        except GeometryError:
            continue
        if min(abs(c.angle - math.pi) for c in p.corners) < 0.05:
            continue
        return p
    raise RuntimeError("could not generate a random polygon")


def point_in_polygon(p: Polygon, pt) -> bool:
    """Even-odd ray casting over all loops (independent membership oracle)."""
    x, y = pt
    inside = False
    for loop in p.loops:
        n = len(loop)
        for i in range(n):
            x1, y1 = loop[i]
            x2, y2 = loop[(i + 1) % n]
            if (y1 > y) != (y2 > y):
                xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xi:
                    inside = not inside
    return inside
