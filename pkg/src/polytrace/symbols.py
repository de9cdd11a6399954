"""Radial symbols, their kernels, 1-D slices and polynomial test functions.

Conventions (unitary Fourier transform on L^2):
    kernel      sigma_check(r) = (2*pi)^-1 * int_0^inf sigma(R) J0(r*R) R dR
    1-D slice   sigma_t(xi) = sigma(sqrt(t^2 + xi^2))
    slice kernel sigma_t_check(y) = pi^-1 * int_0^inf sigma_t(xi) cos(y*xi) dxi

so that the translation-invariant operator with symbol sigma has difference
kernel sigma_check(x - y) in 2-D, and the half-space fibre operators have
difference kernel sigma_t_check in 1-D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError, QuadratureNonConvergence
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    composite_nodes,
    halve_breaks,
    panel_breaks,
)

TWO_PI = 2.0 * np.pi

# |sigma(R)| * R below this value is treated as numerically zero when
# choosing truncation radii.
DECAY_CUTOFF = 1e-16


def bessel_j0(x) -> np.ndarray | float:
    """Bessel function J0, the radial Fourier kernel in 2-D."""
    return special.j0(x)


@dataclass(frozen=True)
class RadialSymbol:
    """Radially symmetric symbol R >= 0 -> sigma(R).

    decay_radius marks where |sigma(R)|*R has dropped below 1e-16; all
    quadratures truncate there.  Built-ins attach a closed-form kernel
    and the radial derivative; custom symbols may leave both None.
    """

    func: Callable[[np.ndarray], np.ndarray]
    decay_radius: float
    name: str = "custom"
    kernel_closed_form: Callable[[np.ndarray], np.ndarray] | None = None
    radial_derivative: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, R) -> np.ndarray:
        return np.asarray(self.func(np.asarray(R, dtype=float)))

    def derivative(self, R) -> np.ndarray:
        """d sigma / dR; 4th-order central differences unless analytic."""
        R = np.asarray(R, dtype=float)
        if self.radial_derivative is not None:
            return np.asarray(self.radial_derivative(R))
        h = 1e-4 * max(self.decay_radius / 8.0, 1.0)
        return (
            -self(R + 2 * h) + 8 * self(R + h) - 8 * self(R - h) + self(R - 2 * h)
        ) / (12 * h)

    def scaled(self, c: float) -> "RadialSymbol":
        """Pointwise multiple c*sigma; kernels and moments scale accordingly."""
        closed = None
        if self.kernel_closed_form is not None:
            closed = lambda r, f=self.kernel_closed_form: c * f(r)
        deriv = None
        if self.radial_derivative is not None:
            deriv = lambda R, f=self.radial_derivative: c * f(R)
        return RadialSymbol(
            func=lambda R, f=self.func: c * f(R),
            decay_radius=self.decay_radius,
            name=f"{c}*{self.name}",
            kernel_closed_form=closed,
            radial_derivative=deriv,
        )


def _decay_radius(f: Callable, lo: float, hi: float) -> float:
    """Smallest R in [lo, hi] with |f(R)|*R < DECAY_CUTOFF (f eventually decaying)."""
    R = lo
    while R < hi and abs(float(f(np.asarray(R)))) * R >= DECAY_CUTOFF:
        R *= 1.25
    return min(R, hi)


def gaussian_symbol(width: float = 1.0) -> RadialSymbol:
    """sigma(R) = exp(-R^2 / (2 width^2)); kernel width^2 exp(-width^2 r^2/2)/(2 pi)."""
    if width <= 0:
        raise DomainError(f"gaussian width must be positive, got {width}")
    w2 = width * width

    def f(R):
        return np.exp(-np.square(R) / (2.0 * w2))

    def kernel(r):
        return w2 * np.exp(-w2 * np.square(r) / 2.0) / TWO_PI

    def deriv(R):
        return -(R / w2) * np.exp(-np.square(R) / (2.0 * w2))

    return RadialSymbol(
        func=f,
        decay_radius=_decay_radius(f, width, 1e3 * width + 10),
        name=f"gaussian:width={width:g}",
        kernel_closed_form=kernel,
        radial_derivative=deriv,
    )


def fermi_symbol(mu: float, T: float) -> RadialSymbol:
    """Fermi-Dirac occupation sigma(R) = [1 + exp((R^2 - mu)/T)]^-1."""
    if T <= 0:
        raise DomainError(f"temperature must be positive, got {T}")

    def f(R):
        return special.expit(-(np.square(R) - mu) / T)

    def deriv(R):
        x = (np.square(R) - mu) / T
        return -(2.0 * R / T) * special.expit(-x) * special.expit(x)

    lo = np.sqrt(max(mu, 0.0)) + np.sqrt(T)
    return RadialSymbol(
        func=f,
        decay_radius=_decay_radius(f, lo, 1e3 * (lo + 1.0)),
        name=f"fermi:mu={mu:g},T={T:g}",
        radial_derivative=deriv,
    )


def zero_symbol() -> RadialSymbol:
    return RadialSymbol(
        func=lambda R: np.zeros_like(np.asarray(R, dtype=float)),
        decay_radius=1.0,
        name="zero",
        kernel_closed_form=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        radial_derivative=lambda R: np.zeros_like(np.asarray(R, dtype=float)),
    )


# -- Hankel transform -------------------------------------------------------------


@dataclass(frozen=True)
class RadialKernel:
    """2-D kernel profile r -> sigma_check(r), real for real symbols.

    provenance records whether values come from an attached closed form or
    from the oscillatory Hankel quadrature; r_max is the truncation radius
    used by all downstream integrals.
    """

    func: Callable[[np.ndarray], np.ndarray]
    provenance: str  # 'closed-form' | 'hankel-numeric'
    r_max: float
    symbol: RadialSymbol

    def __call__(self, r) -> np.ndarray:
        return np.asarray(self.func(np.asarray(r, dtype=float)))

    def at_zero(self) -> float:
        return float(self(0.0))


def _hankel_values(sym: RadialSymbol, r: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    """sigma_check on a batch of radii by panel quadrature with oscillation caps."""
    R_max = sym.decay_radius
    r_top = float(np.max(r)) if r.size else 0.0
    cap = R_max / 16.0
    if r_top > 0:
        cap = min(cap, np.pi / (2.0 * r_top))
    breaks = panel_breaks(0.0, R_max, cap)

    def evaluate(brk):
        nodes, weights = composite_nodes(brk, 16)
        base = weights * sym(nodes) * nodes
        return special.j0(np.outer(r, nodes)) @ base / TWO_PI

    vals = evaluate(breaks)
    for _ in range(spec.max_refine):
        breaks = halve_breaks(breaks)
        refined = evaluate(breaks)
        err = float(np.max(np.abs(refined - vals))) if r.size else 0.0
        vals = refined
        if err <= max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(vals), initial=0.0))):
            return vals
    raise QuadratureNonConvergence("hankel_kernel", err, spec.abs_tol)


def _kernel_truncation_radius(eval_fn, start: float, spec: QuadratureSpec) -> float:
    """March outward until |kernel(r)| * r^4 stays below 1e-9."""
    if spec.r_max is not None:
        return spec.r_max
    r = max(start, 1.0)
    for _ in range(200):
        probe = np.linspace(r, 1.25 * r, 4)
        vals = np.abs(eval_fn(probe)) * probe**4
        if np.all(vals < 1e-9):
            return 1.25 * r
        r *= 1.25
    raise QuadratureNonConvergence("kernel_truncation", float(vals.max()), 1e-9)


def hankel_kernel(sym: RadialSymbol, spec: QuadratureSpec = DEFAULT_SPEC) -> RadialKernel:
    """Radial inverse Fourier transform of the symbol.

    Returns the attached closed form when the symbol carries one, otherwise
    evaluates the oscillatory integral (2*pi)^-1 int sigma(R) J0(rR) R dR on
    refinement-checked Gauss panels.
    """
    if sym.kernel_closed_form is not None:
        closed = sym.kernel_closed_form

        def f(r):
            return np.asarray(closed(np.abs(np.asarray(r, dtype=float))))

        r_max = _kernel_truncation_radius(f, sym.decay_radius, spec)
        return RadialKernel(func=f, provenance="closed-form", r_max=r_max, symbol=sym)

    def f(r):
        r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
        return _hankel_values(sym, r, spec)

    r_max = _kernel_truncation_radius(f, sym.decay_radius, spec)
    return RadialKernel(func=f, provenance="hankel-numeric", r_max=r_max, symbol=sym)


def moment_integral(k: int, kernel: RadialKernel, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """I_k = int_0^inf r^k sigma_check(r)^2 dr for k in {2, 3}.

    I_2 drives the perimeter coefficient, I_3 the corner coefficients.
    """
    if k not in (2, 3):
        raise DomainError(f"moment order must be 2 or 3, got {k}")
    from .quadrature import adaptive_gauss

    value, _ = adaptive_gauss(
        lambda r: r**k * kernel(r) ** 2,
        0.0,
        kernel.r_max,
        spec,
        max_len=kernel.r_max / 16.0,
        order=16,
        name=f"moment_I{k}",
    )
    return value


# -- 1-D slices --------------------------------------------------------------------


@dataclass(frozen=True)
class Slice1D:
    """One-dimensional symbol slice sigma_t(xi) = sigma(sqrt(t^2 + xi^2)).

    For radial symbols the edge direction drops out, so the slice only
    depends on the offset t.  kernel() evaluates the even (cosine) Fourier
    transform on a batch of points.
    """

    symbol: RadialSymbol
    t: float
    spec: QuadratureSpec = field(default=DEFAULT_SPEC)

    @property
    def xi_max(self) -> float:
        if self.spec.xi_max is not None:
            return self.spec.xi_max
        d2 = self.symbol.decay_radius**2 - self.t * self.t
        return float(np.sqrt(d2)) if d2 > 0 else 0.0

    def profile(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.symbol(np.sqrt(self.t * self.t + np.square(xi)))

    def profile_derivative(self, xi) -> np.ndarray:
        """d sigma_t / d xi via the radial chain rule."""
        xi = np.asarray(xi, dtype=float)
        rho = np.sqrt(self.t * self.t + np.square(xi))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(rho > 0, xi / np.where(rho > 0, rho, 1.0), 0.0)
        return self.symbol.derivative(rho) * ratio

    def kernel(self, y) -> np.ndarray:
        """sigma_t_check(y) = (2*pi)^-1 int sigma_t(xi) e^{i y xi} d xi, real and even."""
        y = np.abs(np.atleast_1d(np.asarray(y, dtype=float)))
        top = self.xi_max
        if top <= 0.0:
            return np.zeros_like(y)
        y_top = float(y.max())
        cap = top / 8.0
        if y_top > 0:
            cap = min(cap, np.pi / (2.0 * y_top))
        breaks = panel_breaks(0.0, top, cap)

        def evaluate(brk):
            nodes, weights = composite_nodes(brk, 16)
            base = weights * self.profile(nodes)
            return np.cos(np.outer(y, nodes)) @ base / np.pi

        vals = evaluate(breaks)
        err = 0.0
        for _ in range(self.spec.max_refine):
            breaks = halve_breaks(breaks)
            refined = evaluate(breaks)
            err = float(np.max(np.abs(refined - vals)))
            vals = refined
            if err <= max(self.spec.abs_tol, self.spec.rel_tol * float(np.max(np.abs(vals)))):
                return vals
        raise QuadratureNonConvergence("slice_kernel", err, self.spec.abs_tol)


def slice_symbol(sym: RadialSymbol, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Slice1D:
    """Slice of a radial symbol at tangential offset t."""
    return Slice1D(symbol=sym, t=float(t), spec=spec)


# -- test functions ----------------------------------------------------------------


class TestFunction:
    """Polynomial test function h(z) = sum_{k>=1} a_k z^k (h(0) = 0 built in).

    Degree <= 2 unlocks the exact coefficient paths; higher degrees are
    served only by the principal-value route and the grid oracle.
    """

    def __init__(self, coeffs):
        coeffs = [complex(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0j]
        if all(c.imag == 0 for c in coeffs):
            coeffs = [c.real for c in coeffs]
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def quadratic_exact(self) -> bool:
        return self.degree <= 2

    @property
    def is_real(self) -> bool:
        return not any(isinstance(c, complex) for c in self.coeffs)

    def __call__(self, z):
        z = np.asarray(z)
        acc = np.zeros_like(z, dtype=complex if not self.is_real else float)
        for a in reversed(self.coeffs):
            acc = z * (a + acc)
        return acc

    def coefficient(self, k: int):
        """a_k, zero outside the stored range (k >= 1)."""
        if 1 <= k <= len(self.coeffs):
            return self.coeffs[k - 1]
        return 0.0

    def quadratic_part(self):
        return self.coefficient(2)

    def linear_part(self):
        return self.coefficient(1)

    def without_linear(self) -> "TestFunction":
        """h1(z) = h(z) - z h'(0): the part driving boundary and corner terms."""
        return TestFunction((0.0,) + self.coeffs[1:])

    def __repr__(self):
        terms = [f"{a!r}*z^{k}" for k, a in enumerate(self.coeffs, start=1) if a != 0]
        return "TestFunction(" + (" + ".join(terms) if terms else "0") + ")"


def h_quadratic(b=0.0) -> TestFunction:
    """h(z) = z^2 + b z."""
    return TestFunction([b, 1.0])


def h_pnf() -> TestFunction:
    """Particle-number-fluctuation test function h(x) = x(1 - x)."""
    return TestFunction([1.0, -1.0])
