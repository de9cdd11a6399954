"""Edge coefficients via one-dimensional Wiener-Hopf traces.

Two independent routes to the per-edge coefficients, used to cross-check
the radial closed forms of coeffs_radial:

  * half-line route (h = z^2): the trace of M(x^alpha)[W(s_t)^2 - W(s_t^2)]
    reduces to the explicit kernel integral
        tr = -1/2 int |y|^(alpha+1)/(alpha+1) * s_t_check(y)^2 dy,
    integrated over the slice offset t with a 1/(2 pi) factor.

  * principal-value route (any polynomial h):
        a1 = (8 pi^3)^-1 int dt int dxi1  PV int dxi2
             [h(s_t(xi1)) - h(s_t(xi2))] / [s_t(xi1) - s_t(xi2)]
             * s_t'(xi2) / (xi2 - xi1),
    with the PV realized by symmetric excision of half-width delta plus
    first-order singularity subtraction, Richardson-extrapolated in delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PVNonConvergence
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    adaptive_gauss,
    composite_nodes,
    panel_breaks,
)
from .symbols import RadialSymbol, Slice1D, TestFunction, slice_symbol

_EIGHT_PI3 = 8.0 * math.pi**3


@dataclass(frozen=True)
class PVIntegralSpec:
    """Knobs of the principal-value evaluation.

    delta is the excision half-width (the result is extrapolated from
    delta and delta/2); xi_max overrides the slice-decay truncation; tol
    bounds the admissible extrapolation residual.
    """

    delta: float = 0.08
    xi_max: float | None = None
    tol: float = 2e-6
    xi_panel: float = 0.5
    order: int = 12

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError("excision half-width must be positive")
        if self.xi_max is not None and self.xi_max <= 0:
            raise DomainError("xi_max must be positive")


@dataclass(frozen=True)
class HalfLineTrace:
    """Diagnostic record of one half-line trace evaluation."""

    alpha: int
    value: float
    t: float
    y_cutoff: float


def divided_difference(h: TestFunction, a, b):
    """[h(a) - h(b)] / (a - b) in product form, regular at a = b.

    For h = sum a_k z^k this is sum_k a_k S_k with S_k = sum_{i+j=k-1} a^i b^j,
    accumulated through S_{k+1} = a S_k + b^k to avoid repeated powers.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    shape = np.broadcast(a, b).shape
    dtype = np.result_type(a, b, float)
    total = np.zeros(shape, dtype=dtype)
    S = np.ones(shape, dtype=dtype)
    b_pow = np.ones(shape, dtype=dtype)
    last = len(h.coeffs)
    for k, ak in enumerate(h.coeffs, start=1):
        total = total + ak * S
        if k < last:
            b_pow = b_pow * b
            S = a * S + b_pow
    return total if total.shape else total[()]


def _slice_y_cutoff(sl: Slice1D) -> float:
    """Radius beyond which the slice kernel is numerically negligible."""
    y = 4.0
    for _ in range(40):
        probe = np.linspace(y, 1.3 * y, 3)
        if np.all(np.abs(sl.kernel(probe)) < 1e-14):
            return 1.3 * y
        y *= 1.3
    return y


def wh_quadratic_halfline(
    sl: Slice1D,
    alpha: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    y_cutoff: float | None = None,
) -> float:
    """tr(M(x^alpha)[W(s_t)^2 - W(s_t^2)]) for a real even slice kernel.

    Equals -int_0^inf y^(alpha+1)/(alpha+1) * s_t_check(y)^2 dy; alpha = 0
    feeds a1, alpha = 1 feeds a0.
    """
    if alpha not in (0, 1):
        raise DomainError(f"alpha must be 0 or 1, got {alpha}")
    if sl.xi_max <= 0.0:
        return 0.0
    top = y_cutoff if y_cutoff is not None else _slice_y_cutoff(sl)

    value, _ = adaptive_gauss(
        lambda y: y ** (alpha + 1) / (alpha + 1) * sl.kernel(y) ** 2,
        0.0,
        top,
        spec,
        max_len=top / 12.0,
        name=f"wh_halfline_alpha{alpha}",
    )
    return -value


def _a_via_halfline(sym: RadialSymbol, alpha: int, spec: QuadratureSpec) -> float:
    T = sym.decay_radius
    y_top = _slice_y_cutoff(slice_symbol(sym, 0.0, spec))

    def t_fn(ts: np.ndarray) -> np.ndarray:
        return np.array(
            [
                wh_quadratic_halfline(slice_symbol(sym, t, spec), alpha, spec, y_cutoff=y_top)
                for t in ts
            ]
        )

    value, _ = adaptive_gauss(
        t_fn,
        0.0,
        T,
        spec,
        max_len=T / 8.0,
        order=12,
        name=f"a{1 - alpha}_via_halfline_t",
    )
    return value / math.pi  # (1/2pi) * 2 (even in t)


def a1_via_halfline(sym: RadialSymbol, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """a1 = (2 pi)^-1 int dt tr[W(s_t)^2 - W(s_t^2)]; equals -2 I2 for radial symbols."""
    return _a_via_halfline(sym, 0, spec)


def a0_via_halfline(sym: RadialSymbol, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """a0 = (2 pi)^-1 int dt tr(M(x)[W(s_t)^2 - W(s_t^2)]); equals -(pi/4) I3."""
    return _a_via_halfline(sym, 1, spec)


def _pv_inner(sl: Slice1D, h: TestFunction, delta: float, pv: PVIntegralSpec) -> float:
    """int dxi1 PV int dxi2 of the divided-difference integrand, one slice.

    The xi1-independent component of the divided difference (its value at
    s_t(xi1) = 0) is subtracted first: its inner integral is a Hilbert
    transform of an odd integrable function, which integrates to zero over
    xi1, so the double integral is unchanged -- but the remaining integrand
    decays like the symbol in BOTH variables, making symmetric truncation
    at the slice decay radius harmless.  Without this the xi1 far field
    only falls off like 1/xi1^2 and truncation wrecks the value.
    """
    top = pv.xi_max if pv.xi_max is not None else sl.xi_max
    if top <= 0.0:
        return 0.0
    # joint flip (xi1, xi2) -> (-xi1, -xi2) leaves the integrand invariant,
    # so xi1 runs over [0, top] and the result is doubled
    n1, w1 = composite_nodes(panel_breaks(0.0, top, pv.xi_panel), pv.order)
    s1 = sl.profile(n1)
    g1 = (divided_difference(h, s1, s1) - divided_difference(h, 0.0, s1)) * (
        sl.profile_derivative(n1)
    )

    # template rule on [0, 1], mapped affinely onto both kept pieces of
    # [-top, top] \ (xi1 - delta, xi1 + delta) for every xi1 at once
    n_panels = max(1, int(np.ceil(2.0 * top / pv.xi_panel)))
    u, wu = composite_nodes(np.linspace(0.0, 1.0, n_panels + 1), pv.order)

    inner = np.zeros_like(n1)
    log_term = np.zeros_like(n1)
    pieces = (
        (np.full_like(n1, -top), n1 - delta),
        (n1 + delta, np.full_like(n1, top)),
    )
    for lo, hi in pieces:
        length = np.clip(hi - lo, 0.0, None)
        nonempty = length > 0.0
        XI2 = lo[:, None] + length[:, None] * u[None, :]
        W2 = length[:, None] * wu[None, :]
        S2 = sl.profile(XI2)
        G2 = (
            divided_difference(h, s1[:, None], S2) - divided_difference(h, 0.0, S2)
        ) * sl.profile_derivative(XI2)
        inner += np.sum(W2 * (G2 - g1[:, None]) / (XI2 - n1[:, None]), axis=1)
        # exact integral of the subtracted pole over this piece
        with np.errstate(divide="ignore", invalid="ignore"):
            piece_log = np.log(np.abs(hi - n1)) - np.log(np.abs(lo - n1))
        log_term += np.where(nonempty, piece_log, 0.0)
    return 2.0 * float(np.dot(w1, inner + g1 * log_term))


def a1_pv(
    sym: RadialSymbol,
    h: TestFunction,
    pv: PVIntegralSpec = PVIntegralSpec(),
    spec: QuadratureSpec = DEFAULT_SPEC,
    return_residual: bool = False,
):
    """Edge coefficient a1 by the double principal-value integral.

    Works for any polynomial h (the only route beyond degree 2); the
    excision parameter enters linearly after subtraction, so the returned
    value is the two-point Richardson extrapolation 2 I(delta/2) - I(delta).
    """

    def integral(delta: float) -> float:
        def t_fn(ts: np.ndarray) -> np.ndarray:
            return np.array(
                [_pv_inner(slice_symbol(sym, t, spec), h, delta, pv) for t in ts]
            )

        value, _ = adaptive_gauss(
            t_fn,
            0.0,
            sym.decay_radius,
            QuadratureSpec(
                abs_tol=max(pv.tol * _EIGHT_PI3 / 16.0, 1e-12),
                rel_tol=1e-8,
                max_refine=spec.max_refine,
            ),
            max_len=sym.decay_radius / 4.0,
            order=12,
            name="a1_pv_t",
        )
        return 2.0 * value  # even in t

    levels = [integral(pv.delta / 2**k) for k in range(3)]
    extrap_coarse = 2.0 * levels[1] - levels[0]
    extrap_fine = 2.0 * levels[2] - levels[1]
    value = extrap_fine / _EIGHT_PI3
    # after removing the linear term the next correction is O(delta^3), so
    # the spread of the two extrapolants bounds the remaining error
    residual = abs(extrap_fine - extrap_coarse) / _EIGHT_PI3
    if residual > pv.tol:
        raise PVNonConvergence("a1_pv", residual, pv.tol)
    if return_residual:
        return value, residual
    return value
