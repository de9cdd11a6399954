"""Command-line front end: coefficients, verification sweeps, anomaly, sectors, PNF.

Exit codes: 0 success, 2 configuration error, 3 numeric (quadrature)
failure, 4 verification failure.  Coefficient objects are emitted as JSON,
sweeps as CSV with 17-significant-digit numbers, so reruns are diffable.

POLYTRACE_NUM_THREADS caps the BLAS/OpenMP thread pools (default 1): output
files are byte-identical across runs and across machines' core counts.
"""

from __future__ import annotations

import os


def _cap_threads() -> None:
    cap = os.environ.get("POLYTRACE_NUM_THREADS", "1")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(var, cap)


_cap_threads()  # must precede the first numpy import

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import coeffs_radial, geometry, oracle, symbols
from .coeffs_general import a1_pv
from .errors import DomainError, GeometryError, PolytraceError, QuadratureNonConvergence
from .quadrature import QuadratureSpec
from .symbols import TestFunction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# -- argument parsing ---------------------------------------------------------------


def parse_polygon(spec: str) -> geometry.Polygon:
    """Named builtin polygon or a JSON file {"loops": [[[x,y],...],...]}."""
    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        try:
            return geometry.polygon_from_json(path.read_text())
        except (OSError, json.JSONDecodeError, GeometryError) as exc:
            raise ConfigError(f"cannot load polygon from {spec}: {exc}") from exc
    name, _, arg = spec.partition(":")
    try:
        if name == "square":
            return geometry.unit_square()
        if name == "rect":
            a, b = (float(v) for v in arg.split(","))
            return geometry.rectangle(a, b)
        if name == "ngon":
            parts = arg.split(",")
            r = float(parts[1]) if len(parts) > 1 else 1.0
            return geometry.regular_ngon(int(parts[0]), r)
        if name == "lshape":
            return geometry.l_shape()
        if name == "triangle" and arg in ("equilateral", ""):
            return geometry.equilateral_triangle()
    except (ValueError, DomainError, GeometryError) as exc:
        raise ConfigError(f"bad polygon spec '{spec}': {exc}") from exc
    raise ConfigError(
        f"unknown polygon '{spec}' (use square, rect:a,b, ngon:n[,r], lshape, "
        "triangle:equilateral, or a JSON file)"
    )


def parse_symbol(spec: str) -> symbols.RadialSymbol:
    """Symbol spec string: 'gaussian:width=1' or 'fermi:mu=1,T=1'."""
    name, _, arg = spec.partition(":")
    params = {}
    if arg:
        for tok in arg.split(","):
            key, _, val = tok.partition("=")
            if not val:
                raise ConfigError(f"bad symbol parameter '{tok}' in '{spec}'")
            try:
                params[key.strip()] = float(val)
            except ValueError as exc:
                raise ConfigError(f"bad symbol parameter '{tok}' in '{spec}'") from exc
    try:
        if name == "gaussian":
            return symbols.gaussian_symbol(params.pop("width", 1.0))
        if name == "fermi":
            return symbols.fermi_symbol(params.pop("mu", 1.0), params.pop("T", 1.0))
    except DomainError as exc:
        raise ConfigError(f"bad symbol '{spec}': {exc}") from exc
    raise ConfigError(f"unknown symbol '{spec}' (use gaussian:width=w or fermi:mu=m,T=t)")


def parse_h(spec: str) -> TestFunction:
    """Comma list of coefficients starting at the linear term: 'a1,a2,...'.

    Keyed tokens 'a3=2' are also accepted; a nonzero constant term 'a0=...'
    is rejected because the trace asymptotics require h(0) = 0.
    """
    coeffs: dict[int, float] = {}
    position = 1
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        m = re.fullmatch(r"a(\d+)\s*=\s*(.+)", tok)
        try:
            if m:
                k, val = int(m.group(1)), float(m.group(2))
            else:
                k, val = position, float(tok)
                position += 1
        except ValueError as exc:
            raise ConfigError(f"bad test-function token '{tok}'") from exc
        if k == 0 and val != 0.0:
            raise ConfigError(
                "test function has a constant term, but h(0) = 0 is required"
            )
        if k > 0:
            coeffs[k] = coeffs.get(k, 0.0) + val
    if not coeffs:
        raise ConfigError(f"empty test function spec '{spec}'")
    top = max(coeffs)
    return TestFunction([coeffs.get(k, 0.0) for k in range(1, top + 1)])


_PI_RE = re.compile(r"^\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(tok: str) -> float:
    """Angle token: plain float or 'pi', 'pi/6', '3pi/2', '0.5*pi'."""
    m = _PI_RE.match(tok)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(tok)
    except ValueError as exc:
        raise ConfigError(f"bad angle '{tok}'") from exc


def parse_float_list(spec: str, minimum: float | None = None, what: str = "value"):
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            v = float(tok)
        except ValueError as exc:
            raise ConfigError(f"bad {what} '{tok}'") from exc
        if minimum is not None and v < minimum:
            raise ConfigError(f"{what} {v} is below the minimum {minimum}")
        out.append(v)
    if not out:
        raise ConfigError(f"empty {what} list")
    return out


def _make_spec(args) -> QuadratureSpec:
    if args.tol is None:
        return QuadratureSpec()
    if args.tol <= 0:
        raise ConfigError("--tol must be positive")
    return QuadratureSpec(abs_tol=args.tol, rel_tol=max(args.tol * 100.0, 1e-12))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _check_format(args, expected: str) -> None:
    if args.format is not None and args.format != expected:
        raise ConfigError(f"command '{args.command}' writes {expected}, not {args.format}")


# -- commands -----------------------------------------------------------------------


def cmd_coeffs(args) -> int:
    _check_format(args, "json")
    p = parse_polygon(args.polygon)
    sym = parse_symbol(args.symbol)
    h = parse_h(args.h)
    if not h.quadratic_exact:
        raise ConfigError(
            f"coeffs needs deg h <= 2, got degree {h.degree} (higher degrees have "
            "no exact coefficient path; see 'verify --grid')"
        )
    cs = coeffs_radial.coefficients(p, h, sym, _make_spec(args))
    _emit(json.dumps(cs.to_dict(), indent=2, sort_keys=True), args.out)
    return EXIT_OK


def _verify_rows(args, p, sym, h, spec):
    Ls = parse_float_list(args.L, minimum=1.0, what="L")
    kernel = symbols.hankel_kernel(sym, spec)
    if h.quadratic_exact:
        cs = coeffs_radial.coefficients(p, h, sym, spec)
        asym = lambda L: complex(coeffs_radial.asymptotic_trace(cs, L)).real
    else:
        if args.grid is None:
            raise ConfigError("deg h >= 3 requires --grid <n> (no exact direct trace)")
        # constant order has no exact path for deg >= 3: compare against the
        # two computable terms; the residual then plateaus at |c0|
        c2 = complex(coeffs_radial.c2_radial(p, h, sym, spec)).real
        c1 = p.perimeter * a1_pv(sym, h, spec=spec)
        asym = lambda L: L * L * c2 + L * c1
    rows = []
    for L in Ls:
        if args.grid is not None:
            n = int(round(args.grid * L / max(Ls)))
            direct = oracle.grid_trace(p, kernel, h, L, max(n, 2), spec)
        else:
            direct = oracle.trace_h_quadratic(p, sym, h, L, spec)
        a = asym(L)
        rows.append((L, complex(direct.value).real, a, abs(direct.value - a), direct.err_est))
    return rows


def cmd_verify(args) -> int:
    _check_format(args, "csv")
    p = parse_polygon(args.polygon)
    sym = parse_symbol(args.symbol)
    h = parse_h(args.h)
    spec = _make_spec(args)
    rows = _verify_rows(args, p, sym, h, spec)

    lines = ["L,direct,asymptotic,residual"]
    for L, direct, asym, resid, _ in rows:
        lines.append(",".join(_fmt(v) for v in (L, direct, asym, resid)))
    _emit("\n".join(lines), args.out)

    ok = rows[-1][3] <= args.threshold
    if len(rows) == 1:
        sys.stderr.write("verify: single L value, monotonicity check skipped\n")
    else:
        eps = np.finfo(float).eps
        for (_, d0, a0, r0, e0), (_, d1, a1_, r1, e1) in zip(rows[:-1], rows[1:]):
            slack = 64.0 * eps * max(1.0, abs(d0), abs(d1), abs(a0), abs(a1_))
            if r1 > r0 + e0 + e1 + slack:
                ok = False
                sys.stderr.write(
                    f"verify: residual not decreasing beyond error estimates "
                    f"({_fmt(r0)} -> {_fmt(r1)})\n"
                )
    if not ok and rows[-1][3] > args.threshold:
        sys.stderr.write(
            f"verify: residual {_fmt(rows[-1][3])} at L={rows[-1][0]:g} exceeds "
            f"threshold {_fmt(args.threshold)}\n"
        )
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_anomaly(args) -> int:
    _check_format(args, "csv")
    sym = parse_symbol(args.symbol)
    spec = _make_spec(args)
    kernel = symbols.hankel_kernel(sym, spec)
    ns = [int(v) for v in parse_float_list(args.n, minimum=3, what="n")]
    lines = ["n,c0,n_times_c0,note"]
    for n in ns:
        p = geometry.regular_ngon(n, 1.0)
        c0 = coeffs_radial.c0_radial(p, kernel, spec)
        lines.append(f"{n},{_fmt(c0)},{_fmt(n * c0)},")
    lines.append(f"smooth,{_fmt(0.0)},{_fmt(0.0)},analytic")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_sector(args) -> int:
    _check_format(args, "csv")
    sym = parse_symbol(args.symbol)
    spec = _make_spec(args)
    kernel = symbols.hankel_kernel(sym, spec)
    gammas = [parse_angle(t) for t in args.gamma.split(",") if t.strip()]
    if not gammas:
        raise ConfigError("empty gamma list")
    for g in gammas:
        if not 0.0 < g < 2.0 * math.pi or abs(g - math.pi) < 1e-12:
            raise ConfigError(f"sector angle {g:g} outside (0, pi) u (pi, 2*pi)")

    lines = ["gamma,closed,oracle,diff,method"]
    worst = 0.0
    for g in gammas:
        closed = coeffs_radial.b0_closed(g, kernel, spec)
        if g < math.pi:
            res = oracle.b0_convex_bruteforce(g, kernel, spec)
        else:
            res = oracle.b0_concave_composed(g, kernel, spec)
        diff = abs(res.value - closed)
        worst = max(worst, diff)
        lines.append(
            f"{_fmt(g)},{_fmt(closed)},{_fmt(res.value)},{_fmt(diff)},{res.method}"
        )
    _emit("\n".join(lines), args.out)
    if worst > args.threshold:
        sys.stderr.write(
            f"sector: worst deviation {_fmt(worst)} exceeds {_fmt(args.threshold)}\n"
        )
        return EXIT_VERIFY
    return EXIT_OK


def cmd_pnf(args) -> int:
    _check_format(args, "json")
    p = parse_polygon(args.polygon)
    try:
        sym = symbols.fermi_symbol(args.mu, args.T)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    h = symbols.h_pnf()
    cs = coeffs_radial.coefficients(p, h, sym, _make_spec(args))
    payload = cs.to_dict()
    payload["note"] = (
        "h(x) = x(1-x) has quadratic coefficient -1, so c1 > 0 and c0 < 0 here; "
        "the positive-anomaly comparison concerns the h = z^2 orientation"
    )
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return EXIT_OK


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polytrace",
        description=(
            "Szego-type trace asymptotics for truncated Wiener-Hopf operators "
            "on scaled polygons, with independent integral oracles"
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(cmd):
        cmd.add_argument("--polygon", default="square", help="builtin name or JSON file")
        cmd.add_argument("--symbol", default="gaussian:width=1")
        cmd.add_argument("--h", default="0,1", help="coefficients a1,a2,... of h")
        cmd.add_argument("--tol", type=float, default=None, help="quadrature abs tolerance")
        cmd.add_argument("--out", default=None, help="output file (default stdout)")
        cmd.add_argument("--format", choices=("json", "csv"), default=None)

    c = sub.add_parser("coeffs", help="coefficient set with per-edge/vertex breakdowns")
    common(c)
    c.set_defaults(func=cmd_coeffs)

    v = sub.add_parser("verify", help="direct trace vs asymptotics over an L sweep")
    common(v)
    v.add_argument("--L", default="2,4,6,8,10", help="comma list of scales, each >= 1")
    v.add_argument("--threshold", type=float, default=1e-8, help="residual bound at max L")
    v.add_argument("--grid", type=int, default=None, help="grid oracle resolution at max L")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("anomaly", help="c0 > 0 for regular n-gons vs smooth baseline 0")
    common(a)
    a.add_argument("--n", default="3,6,12,24,48,96", help="comma list of n-gon sizes")
    a.set_defaults(func=cmd_anomaly)

    s = sub.add_parser("sector", help="corner constants: closed form vs sector oracles")
    common(s)
    s.add_argument(
        "--gamma",
        default="pi/6,pi/3,pi/2,2pi/3,5pi/6,7pi/6,4pi/3,3pi/2,5pi/3",
        help="angles (floats or pi fractions), excluding pi",
    )
    s.add_argument("--threshold", type=float, default=1e-9, help="allowed |closed - oracle|")
    s.set_defaults(func=cmd_sector)

    f = sub.add_parser("pnf", help="particle number fluctuation coefficients, Fermi symbol")
    common(f)
    f.add_argument("--mu", type=float, default=1.0, help="chemical potential")
    f.add_argument("--T", type=float, default=1.0, help="temperature (> 0)")
    f.set_defaults(func=cmd_pnf)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except QuadratureNonConvergence as exc:
        sys.stderr.write(f"numeric failure in integral '{exc.name}': {exc}\n")
        return EXIT_NUMERIC
    except (DomainError, GeometryError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except PolytraceError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
