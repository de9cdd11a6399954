"""Szego-type trace asymptotics for truncated Wiener-Hopf operators on polygons.

tr h(A_{P_L}) = L^2 c2 + L c1 + c0 + O(L^-inf) for scaled polygons P_L,
with every coefficient backed by an independent brute-force integral oracle.

Submodule imports are lazy so that the CLI can pin BLAS thread pools
before numpy loads; `import polytrace` alone stays cheap.
"""

__version__ = "0.1.0"

_EXPORTS = {
    # geometry
    "Polygon": "geometry",
    "build_polygon": "geometry",
    "polygon_from_json": "geometry",
    "regular_ngon": "geometry",
    "unit_square": "geometry",
    "rectangle": "geometry",
    "l_shape": "geometry",
    "equilateral_triangle": "geometry",
    "scale": "geometry",
    "covariogram": "geometry",
    "triangulate": "geometry",
    "interior_angle": "geometry",
    "edge_F": "geometry",
    "angle_function_f": "geometry",
    # symbols
    "RadialSymbol": "symbols",
    "RadialKernel": "symbols",
    "TestFunction": "symbols",
    "gaussian_symbol": "symbols",
    "fermi_symbol": "symbols",
    "zero_symbol": "symbols",
    "hankel_kernel": "symbols",
    "bessel_j0": "symbols",
    "moment_integral": "symbols",
    "slice_symbol": "symbols",
    "h_quadratic": "symbols",
    "h_pnf": "symbols",
    # quadrature
    "QuadratureSpec": "quadrature",
    # coefficients
    "CoefficientSet": "coeffs_radial",
    "coefficients": "coeffs_radial",
    "asymptotic_trace": "coeffs_radial",
    "c2_radial": "coeffs_radial",
    "c1_radial": "coeffs_radial",
    "c0_radial": "coeffs_radial",
    "b0_closed": "coeffs_radial",
    "a1_radial": "coeffs_radial",
    "a0_radial": "coeffs_radial",
    "smooth_baseline": "coeffs_radial",
    "divided_difference": "coeffs_general",
    "a1_via_halfline": "coeffs_general",
    "a0_via_halfline": "coeffs_general",
    "a1_pv": "coeffs_general",
    "PVIntegralSpec": "coeffs_general",
    # oracles
    "trace_A": "oracle",
    "trace_A2_covariogram": "oracle",
    "trace_h_quadratic": "oracle",
    "b0_convex_bruteforce": "oracle",
    "b0_concave_composed": "oracle",
    "grid_trace": "oracle",
    "DirectTraceResult": "oracle",
    "SectorResult": "oracle",
}


def __getattr__(name):
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module 'polytrace' has no attribute '{name}'")
    import importlib

    return getattr(importlib.import_module(f".{module}", __name__), name)


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
