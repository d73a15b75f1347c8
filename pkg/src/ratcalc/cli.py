"""Command line interface for the rational-calculus toolkit.

Every command reads structured JSON (complex numbers as [re, im]
pairs), prints a JSON report to stdout, and with --out also writes the
report plus any figures or grids into the given directory.  Outputs
are deterministic: identical input produces identical bytes.

Exit codes: 0 success, 1 bad input or geometry, 2 separator search
exhausted, 3 convergence failure.
"""

import argparse
import os
import sys

import numpy as np

from . import jsonio
from . import sylvester as sylvester_mod
from .algebra import gelfand_check, table_from_rational
from .cpoly import Polynomial
from .errors import (CalcError, ConvergenceError, InputError,
                     NoSeparatorError, RootSolveError)
from .lemniscate import (Window, axis_min_level, fit_separator, level_grid,
                         level_window, max_segment_ratio, sublevel_components,
                         trace_level_curve, two_segment_rational,
                         two_segment_search, verify_separation)
from .matfun import kspectral, mat_apply
from .represent import cauchy_coefficients


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, but 2 is reserved for
    # an exhausted separator search; remap onto the input-error path
    def error(self, message):
        raise InputError(message)


def _parse_window(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 4:
        raise InputError('window must be "xmin,xmax,ymin,ymax", got %r'
                         % text)
    return Window(*vals)


def _parse_floats(text, what):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError("%s must be comma-separated numbers, got %r"
                         % (what, text))


def _parse_pair(text, what):
    vals = _parse_floats(text, what)
    if len(vals) != 2:
        raise InputError('%s must be "lo,hi", got %r' % (what, text))
    return tuple(vals)


def _emit(args, name, payload):
    text = jsonio.dumps(payload)
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_out(args, name, text):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def _rational_from(data, what="input"):
    if not isinstance(data, dict):
        raise InputError("%s must be a JSON object" % what)
    if "p" in data and "q" in data:
        return jsonio.decode_rational(data, what)
    if "r" in data:
        return jsonio.decode_rational(data["r"], what + " separator")
    raise InputError('%s needs "r" or top-level "p"/"q"' % what)


def _phi_spec(obj):
    """Scalar-function specifier: a polynomial in z, constant values per
    contour loop, or the sign of the real part per loop."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError('phi must be an object with a "type"')
    kind = obj["type"]
    if kind == "polynomial":
        poly = jsonio.decode_poly(obj.get("coeffs"), "phi coefficients")
        return poly, None
    if kind == "component_values":
        vals = jsonio.decode_complex_list(obj.get("values"), "phi values")
        return None, list(vals)
    if kind == "halfplane_sign":
        return None, "halfplane"
    raise InputError("unknown phi type %r (want polynomial, "
                     "component_values, or halfplane_sign)" % kind)


def _loop_values_for(contour, values):
    if values == "halfplane":
        out = []
        for lp in contour.loops:
            c = complex(np.mean(lp.vertices))
            out.append(1.0 if c.real >= 0 else -1.0)
        return out
    if len(values) != len(contour.loops):
        raise InputError("phi gives %d component values but the contour "
                         "has %d loops" % (len(values), len(contour.loops)))
    return values


def _segment_samples(alpha_deg, scale=1.0, n=100):
    # two vertical segments at +-scale with half-height scale*tan(alpha)
    t = np.tan(np.radians(alpha_deg))
    y = np.linspace(-t, t, n) * scale
    return np.concatenate([scale + 1j * y, -scale + 1j * y])


def _axis_samples(hi, n=100):
    return 1j * np.linspace(-hi, hi, n)


def _build_representation(r, phi_obj, rho, order, window, resolution, tol):
    win = window if window is not None else level_window(r, rho)
    contour = trace_level_curve(r, rho, win, resolution=resolution)
    phi, values = _phi_spec(phi_obj)
    if phi is not None:
        rep = cauchy_coefficients(r, phi, contour, order, tol=tol)
    else:
        vals = _loop_values_for(contour, values)
        rep = cauchy_coefficients(r, None, contour, order,
                                  loop_values=vals, tol=tol)
    return rep


# -- commands ---------------------------------------------------------

def cmd_lemniscate(args):
    data = jsonio.load_json(args.input)
    r = _rational_from(data)
    levels = sorted(_parse_floats(args.levels, "levels"))
    if not levels or any(v <= 0 for v in levels):
        raise InputError("levels must be positive")
    window = args.window or level_window(r, max(levels))
    n = args.resolution
    grid = level_grid(r, window, n, n)
    components = {}
    for lvl in levels:
        components["%g" % lvl] = sublevel_components(grid, lvl).count

    payload = {
        "levels": levels,
        "window": [window.xmin, window.xmax, window.ymin, window.ymax],
        "resolution": n,
        "components": components,
        "zeros": jsonio.encode_complex_list(r.lambdas),
        "poles": jsonio.encode_complex_list(
            r.q.roots() if r.q.degree > 0 else []),
    }
    files = []
    if args.out:
        lines = ["x,y,absr"]
        for iy in range(n):
            for ix in range(n):
                lines.append("%.12g,%.12g,%.12g"
                             % (grid.xs[ix], grid.ys[iy],
                                grid.values[iy, ix]))
        files.append(_write_out(args, "grid.csv", "\n".join(lines) + "\n"))
        from . import plotting
        fig = plotting.lemniscate_figure(r, levels, window,
                                         resolution=args.resolution)
        svg = os.path.join(args.out, "lemniscate.svg")
        plotting.save_svg(fig, svg)
        files.append(svg)
    payload["files"] = sorted(os.path.basename(f) for f in files)
    _emit(args, "lemniscate", payload)


def _separate_sweep(args):
    a_range = _parse_pair(args.a_range, "a-range")
    b_range = _parse_pair(args.b_range, "b-range")
    result = two_segment_search(a_range=a_range, b_range=b_range,
                                step=args.step, angle=args.angle,
                                nx=args.resolution)
    if not result.rows or not np.isfinite(result.ratio):
        raise NoSeparatorError("no two-segment candidate admits an on-axis "
                               "inside point over the requested grid")
    payload = {
        "mode": "sweep",
        "a": result.a, "b": result.b, "level": result.level,
        "x0": result.x0, "y0": result.y0,
        "ratio": result.ratio, "angle_deg": result.angle_deg,
        "found": bool(result.found),
        "n_grid": len(result.rows),
    }
    if args.out:
        from . import plotting
        os.makedirs(args.out, exist_ok=True)
        fig = plotting.sweep_figure(result)
        plotting.save_svg(fig, os.path.join(args.out, "sweep.svg"))
        payload["files"] = ["sweep.svg"]
    _emit(args, "separate", payload)
    if args.angle is not None and not result.found:
        raise NoSeparatorError(
            "best angle %.2f deg over the grid is below the requested "
            "%.2f deg" % (result.angle_deg, args.angle))


def _separate_family(args):
    if args.family == "two-segment":
        if args.a is None or args.b is None:
            raise InputError("two-segment family needs --a and --b")
        r = two_segment_rational(args.a, args.b)
        level = 0.98 * axis_min_level(args.a, args.b)
        got = max_segment_ratio(r, level, nx=args.resolution)
        if got is None:
            raise NoSeparatorError("level %g leaves no on-axis inside "
                                   "points for a=%g, b=%g"
                                   % (level, args.a, args.b))
        x0, y0, ratio = got
        angle_deg = float(np.degrees(np.arctan(ratio)))
        # verify the inscribed open segment: 2 percent off the crossing
        # keeps |r| clear of the level by more than the slack
        ys = np.linspace(-0.98 * y0, 0.98 * y0, 100)
        inside = np.concatenate([x0 + 1j * ys, -x0 + 1j * ys])
        outside = _axis_samples(max(3.0, 1.5 * y0))
        report = verify_separation(r, inside, outside, level)
        payload = {
            "mode": "family", "family": "two-segment",
            "a": args.a, "b": args.b, "level": level,
            "x0": x0, "y0": y0, "ratio": ratio, "angle_deg": angle_deg,
            "separator": jsonio.encode_rational(r),
            "verify": report.as_dict(),
        }
        _emit(args, "separate", payload)
        if not report.passed:
            raise NoSeparatorError("verification margins %.3g/%.3g miss "
                                   "the slack" % (report.margin_inside,
                                                  report.margin_outside))
        if args.angle is not None and angle_deg < args.angle:
            raise NoSeparatorError("family reaches %.2f deg, below the "
                                   "requested %.2f deg"
                                   % (angle_deg, args.angle))
        return

    if args.family == "bernoulli":
        if args.angle is None:
            raise InputError("bernoulli family needs --angle")
        ta2 = float(np.tan(np.radians(args.angle)) ** 2)
        # the degree-2 lobe subtends 45 degrees in the scaling limit;
        # the optimal scale comes from minimizing the on-segment maximum
        ustar = 2.0 * (1.0 - ta2) / (1.0 + ta2) ** 2
        if ustar <= 1e-12:
            raise NoSeparatorError(
                "the degree-2 lobe cannot open to %g degrees; 45 is the "
                "supremum" % args.angle)
        s = float(np.sqrt(ustar / 2.0))
        inside = _segment_samples(args.angle, scale=s)
        outside = _axis_samples(max(3.0, 3.0 * s))
        p = Polynomial([-1.0, 0.0, 1.0])
        level = 0.5 * (float(np.max(np.abs(p(inside)))) + 1.0)
        from .ratfun import RationalFunction
        r = RationalFunction(Polynomial([-1.0 / level, 0.0, 1.0 / level]),
                             Polynomial([1.0]), lambdas=[1.0, -1.0])
        report = verify_separation(r, inside, outside, 1.0)
        payload = {
            "mode": "family", "family": "bernoulli",
            "alpha_deg": args.angle, "scale": s, "level": level,
            "separator": jsonio.encode_rational(r),
            "verify": report.as_dict(),
        }
        _emit(args, "separate", payload)
        if not report.passed:
            raise NoSeparatorError("verification margins %.3g/%.3g miss "
                                   "the slack" % (report.margin_inside,
                                                  report.margin_outside))
        return

    raise InputError("unknown family %r" % args.family)


def _separate_fit(args):
    if args.angle is None:
        raise InputError("fit mode needs --angle")
    inside = _segment_samples(args.angle)
    outside = _axis_samples(max(3.0, 1.5 * np.tan(np.radians(args.angle))))
    r = fit_separator(inside, outside, (args.dp, args.dq))
    report = verify_separation(r, inside, outside, 1.0)
    payload = {
        "mode": "fit", "alpha_deg": args.angle,
        "degrees": [args.dp, args.dq],
        "separator": jsonio.encode_rational(r),
        "verify": report.as_dict(),
    }
    _emit(args, "separate", payload)
    if not report.passed:
        raise NoSeparatorError("fitted candidate fails verification with "
                               "margins %.3g/%.3g"
                               % (report.margin_inside,
                                  report.margin_outside))


def cmd_separate(args):
    if args.mode == "sweep":
        _separate_sweep(args)
    elif args.mode == "family":
        _separate_family(args)
    elif args.mode == "fit":
        _separate_fit(args)
    else:
        raise InputError("unknown mode %r" % args.mode)


def cmd_represent(args):
    data = jsonio.load_json(args.input)
    r = _rational_from(data)
    if "phi" not in data:
        raise InputError('represent needs a "phi" specifier')
    rep = _build_representation(r, data["phi"], args.rho, args.order,
                                args.window, args.resolution, args.tol)
    payload = {
        "representation": jsonio.encode_representation(rep),
        "provenance": {
            "rho": args.rho,
            "tol": args.tol,
            "truncation_order": rep.order,
            "n_nodes": rep.n_nodes,
            "tail_bound": rep.tail_bound,
        },
    }
    _emit(args, "represent", payload)


def cmd_funmat(args):
    data = jsonio.load_json(args.input)
    r = _rational_from(data)
    if "phi" not in data or "matrix" not in data:
        raise InputError('funmat needs "phi" and "matrix"')
    A = jsonio.decode_matrix(data["matrix"], "matrix", square=True)
    rep = _build_representation(r, data["phi"], args.rho, args.order,
                                args.window, args.resolution, args.tol)
    FA = mat_apply(rep, A, tol=args.tol)
    payload = {
        "result": jsonio.encode_matrix(FA),
        "provenance": {
            "r": jsonio.encode_rational(r),
            "rho": args.rho,
            "tol": args.tol,
            "truncation_order": rep.order,
            "n_nodes": rep.n_nodes,
        },
    }
    _emit(args, "funmat", payload)


def cmd_sylvester(args):
    data = jsonio.load_json(args.input)
    if not isinstance(data, dict) or not all(k in data for k in "ABC"):
        raise InputError('sylvester needs "A", "B", and "C"')
    A = jsonio.decode_matrix(data["A"], "A", square=True)
    B = jsonio.decode_matrix(data["B"], "B", square=True)
    C = jsonio.decode_matrix(data["C"], "C")
    problem = sylvester_mod.SylvesterProblem(A, B, C)
    r = jsonio.decode_rational(data["r"], "separator") if "r" in data else None
    plan = sylvester_mod.plan_separation(problem, r=r)
    result = sylvester_mod.solve(problem, plan, tol=args.tol)
    payload = {
        "X": jsonio.encode_matrix(result.X),
        "residual": result.residual,
        "eta": result.eta,
        "rho": result.rho,
        "truncation_order": result.order,
        "n_nodes": result.n_nodes,
        "plan": plan.as_dict(),
        "provenance": {
            "separator": jsonio.encode_rational(plan.r),
            "tol": args.tol,
        },
    }
    _emit(args, "sylvester", payload)


def cmd_kspectral(args):
    data = jsonio.load_json(args.input)
    r = _rational_from(data)
    if "R" not in data or "matrix" not in data:
        raise InputError('kspectral needs "R" and "matrix"')
    A = jsonio.decode_matrix(data["matrix"], "matrix", square=True)
    report = kspectral(r, float(data["R"]), A,
                       boundary_samples=max(args.resolution, 64),
                       window=args.window)
    payload = {
        "report": report.as_dict(),
        "provenance": {"r": jsonio.encode_rational(r), "tol": args.tol},
    }
    _emit(args, "kspectral", payload)


def cmd_algebra_check(args):
    data = jsonio.load_json(args.input)
    r = _rational_from(data)
    if "phi" in data:
        phi, values = _phi_spec(data["phi"])
        if phi is None or values is not None:
            raise InputError("algebra-check needs a polynomial phi")
    else:
        phi = Polynomial([0.0, 1.0])
    n_samples = int(data.get("n_samples", 40))
    if not 1 <= n_samples <= 500:
        raise InputError("n_samples must be between 1 and 500")

    rng = np.random.default_rng(args.seed)
    scale = r.q.coefficient_scale()
    zs = []
    while len(zs) < n_samples:
        z = rng.uniform(-2.5, 2.5, 4 * n_samples) \
            + 1j * rng.uniform(-2.5, 2.5, 4 * n_samples)
        ok = np.abs(r.q(z)) > 1e-3 * scale
        zs.extend(z[ok][: n_samples - len(zs)])
    zs = np.array(zs)

    table = table_from_rational(r)
    report = gelfand_check(r, phi, zs, table=table, tol=args.tol)
    payload = {
        "gelfand": report.as_dict(),
        "table_residual": table.formula_residual(),
        "n_samples": n_samples,
        "provenance": {"r": jsonio.encode_rational(r), "seed": args.seed,
                       "tol": args.tol},
    }
    _emit(args, "algebra_check", payload)


# -- wiring -----------------------------------------------------------

def _build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9,
                        help="numeric tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=20260819,
                        help="seed for any randomized sampling")
    common.add_argument("--window", type=_parse_window, default=None,
                        metavar="XMIN,XMAX,YMIN,YMAX",
                        help="explicit plotting/tracing window")
    common.add_argument("--resolution", type=int, default=400,
                        help="grid or sampling resolution (default 400)")
    common.add_argument("--out", default=None, metavar="DIR",
                        help="directory for JSON/CSV/SVG artifacts")

    parser = _Parser(prog="ratcalc",
                     description="multicentric calculus with a rational "
                                 "function as the variable")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("lemniscate", parents=[common],
                       help="sample |r| on a grid and draw level curves")
    p.add_argument("--input", required=True, help="JSON with the rational")
    p.add_argument("--levels", default="1.0",
                   help="comma-separated level values (default 1.0)")
    p.set_defaults(func=cmd_lemniscate)

    p = sub.add_parser("separate", parents=[common],
                       help="search for a separating rational")
    p.add_argument("--mode", choices=["sweep", "family", "fit"],
                   default="sweep")
    p.add_argument("--family", choices=["two-segment", "bernoulli"],
                   default="two-segment")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--a-range", default="1.0,1.8")
    p.add_argument("--b-range", default="1.1,1.9")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--angle", type=float, default=None,
                   help="target or requested segment angle in degrees")
    p.add_argument("--dp", type=int, default=4)
    p.add_argument("--dq", type=int, default=3)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("represent", parents=[common],
                       help="series coefficients of a scalar function")
    p.add_argument("--input", required=True,
                   help="JSON with the rational and a phi specifier")
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--order", type=int, default=24)
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("funmat", parents=[common],
                       help="apply a scalar function to a matrix")
    p.add_argument("--input", required=True,
                   help="JSON with rational, phi, and matrix")
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--order", type=int, default=24)
    p.set_defaults(func=cmd_funmat)

    p = sub.add_parser("sylvester", parents=[common],
                       help="solve AX - XB = C by spectral separation")
    p.add_argument("--input", required=True,
                   help="JSON with A, B, C and an optional separator r")
    p.set_defaults(func=cmd_sylvester)

    p = sub.add_parser("kspectral", parents=[common],
                       help="norm bound constant for a sublevel region")
    p.add_argument("--input", required=True,
                   help="JSON with rational, R, and matrix")
    p.set_defaults(func=cmd_kspectral)

    p = sub.add_parser("algebra-check", parents=[common],
                       help="sampled checks of the vector-function algebra")
    p.add_argument("--input", required=True,
                   help="JSON with the rational and an optional phi")
    p.set_defaults(func=cmd_algebra_check)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_help(sys.stderr)
            return 1
        if args.tol <= 0:
            raise InputError("tol must be positive")
        if args.resolution < 2:
            raise InputError("resolution must be at least 2")
        args.func(args)
        return 0
    except NoSeparatorError as exc:
        print("no separator: %s" % exc, file=sys.stderr)
        return 2
    except (ConvergenceError, RootSolveError) as exc:
        print("convergence failure: %s" % exc, file=sys.stderr)
        return 3
    except CalcError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
