"""Command-line interface: ``planarop <command> [options]``.

Commands: poly, zeros, curves, validate, specialfn.  Options may also come
from a ``--config`` file of ``key=value`` lines; command-line flags win.
Exit codes: 0 ok, 2 domain error, 3 precision error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import mpmath as mp
import numpy as np

from .errors import DomainError, NonConvergenceError, PrecisionError
from .io import atomic_write, fmt_real, write_csv

EXIT_OK, EXIT_DOMAIN, EXIT_PRECISION, EXIT_NONCONV = 0, 2, 3, 4
_PARSE_BITS = 2048
_DEFAULT_A = "sqrt(2)"


def parse_real(text):
    """Decimal string, or one of sqrt(x), 1/sqrt(x), exp(x) for exact constants."""
    s = str(text).strip().replace(" ", "")
    with mp.workprec(_PARSE_BITS):
        m = re.fullmatch(r"(1/)?sqrt\(([^()]+)\)", s)
        if m:
            v = mp.sqrt(mp.mpf(m.group(2)))
            return 1 / v if m.group(1) else v
        m = re.fullmatch(r"exp\(([^()]+)\)", s)
        if m:
            return mp.exp(mp.mpf(m.group(1)))
        try:
            return mp.mpf(s)
        except (ValueError, TypeError) as exc:
            raise DomainError(f"cannot parse {text!r} as a real number") from exc


def parse_complex(text):
    with mp.workprec(_PARSE_BITS):
        try:
            return mp.mpc(mp.mpmathify(str(text).strip().replace(" ", "")))
        except (ValueError, TypeError) as exc:
            raise DomainError(f"cannot parse {text!r} as a complex number") from exc


def load_config(path):
    """key=value lines; '#' starts a comment; keys use - or _ freely."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            k, v = (p.strip() for p in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _default_bits():
    env = os.environ.get("PLANAR_PREC_BITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"PLANAR_PREC_BITS must be an integer, got {env!r}")
    return 256


def _common(p):
    p.add_argument("--a", default=_DEFAULT_A, help="charge position a > 0 (decimal or sqrt(x), 1/sqrt(x))")
    p.add_argument("--c", default="1", help="charge strength c > -1")
    p.add_argument("--n", type=int, default=80, help="polynomial degree")
    p.add_argument("--N", default=None, help="scaling parameter (defaults to n)")
    p.add_argument("--eta", default=None, help="set c = exp(-eta*n)")
    p.add_argument("--gamma", default=None, help="gamma value or comma-separated list")
    p.add_argument("--init", default="auto", choices=["auto", "paper", "contour", "oracle"])
    p.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)
    p.add_argument("--overlay", default=None, choices=["skeleton", "eta", "attraction", "gamma"])
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("--digits", type=int, default=None, help="truncate decimal output")
    p.add_argument("--config", default=None, help="key=value configuration file")


def build_parser():
    parser = argparse.ArgumentParser(prog="planarop", description="Planar orthogonal polynomials with a point charge.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="coefficients of P_n and the recurrence trace")
    _common(p)
    p.add_argument("--trace", default=None, help="also write the coefficient-state trace here")

    p = sub.add_parser("zeros", help="roots of P_n with distance to a curve")
    _common(p)
    p.add_argument("--svg", default=None, help="SVG overlay path (default: <out>.svg when --overlay is set)")

    p = sub.add_parser("curves", help="skeleton, level curves, gamma family")
    _common(p)
    p.add_argument("--kind", default="skeleton", choices=["skeleton", "eta", "attraction", "gamma", "droplet", "hausdorff"])
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--step", type=float, default=1e-3, help="tracer step for the gamma skeleton")

    p = sub.add_parser("validate", help="asymptotic formula vs recurrence truth")
    _common(p)
    p.add_argument("--z", default=None, help="evaluation point, e.g. 2 or 0.3+0.2j (required)")
    p.add_argument("--N-list", dest="N_list", default="50,100,200")
    p.add_argument("--theorem", default="auto", choices=["auto", "fixed_c", "uniform_c"])

    p = sub.add_parser("specialfn", help="Weber D, f-hat and c_k values")
    p.add_argument("function", choices=["D", "fhat", "ck"])
    p.add_argument("--c", default="1")
    p.add_argument("--zeta", default="1")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    return parser, sub


def parse_args(argv=None):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = load_config(args.config)
        sp = sub.choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(cfg) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
        # argparse applies type= only to command-line strings
        for k in ("n", "precision_bits", "digits", "samples", "k"):
            if isinstance(getattr(args, k, None), str):
                setattr(args, k, int(getattr(args, k)))
        if isinstance(getattr(args, "step", None), str):
            args.step = float(args.step)
    if args.precision_bits is None:
        args.precision_bits = _default_bits()
    return args


def _ctx(args):
    from .mpnum import PrecisionContext

    return PrecisionContext(int(args.precision_bits))


def _params(args):
    from .geometry import ProblemParams

    a = parse_real(args.a)
    n = int(args.n)
    if n < 1:
        raise DomainError("--n must be at least 1")
    N = parse_real(args.N) if args.N is not None else mp.mpf(n)
    if args.eta is not None:
        with mp.workprec(_PARSE_BITS):
            c = mp.exp(-parse_real(args.eta) * n)
    else:
        c = parse_real(args.c)
    return ProblemParams(a, c, N), n


def _emit(args, text, path=None):
    path = path or args.out
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _param_header(params, n, bits):
    return f"a={fmt_real(params.a, 40)} c={fmt_real(params.c, 40)} N={fmt_real(params.N, 40)} n={n} bits={bits}"


def cmd_poly(args):
    from .lax import coeffs_csv_rows, synthesize, trace_csv_rows

    params, n = _params(args)
    ctx = _ctx(args)
    polys, states = synthesize(params, n, args.init, ctx, return_states=True)
    P = polys[-1]
    head = [f"poly {_param_header(params, n, ctx.mantissa_bits)} log_scale={fmt_real(P.log_scale)} init={args.init}"]
    text = write_csv(None, head, ["k", "re", "im"], coeffs_csv_rows(P, args.digits))
    _emit(args, text)
    trace_path = args.trace or (args.out + ".trace.csv" if args.out else None)
    if trace_path:
        rows = trace_csv_rows(states, args.digits) if states else []
        write_csv(trace_path, [f"trace {_param_header(params, n, ctx.mantissa_bits)}"], ["n", "a_n", "b_n", "alpha_n", "beta_n", "gamma_n", "c_n"], rows)
    return EXIT_OK


def _overlay_curves(args, params, n):
    from .geometry import eta_curve, trace_skeleton, zero_attraction_curve

    curves = [("skeleton", trace_skeleton(params))]
    kind = args.overlay
    if kind == "eta" or (kind is None and args.eta is not None):
        curves.append(("eta", eta_curve(params, float(parse_real(args.eta or "0.4")))))
    elif kind == "attraction":
        curves.append(("attraction", zero_attraction_curve(params, n)))
    elif kind == "gamma":
        from .gammafam import solve_gamma_params, trace_S_gamma

        g = float(parse_real((args.gamma or "0.05").split(",")[0]))
        curves.append(("gamma_skeleton", trace_S_gamma(solve_gamma_params(params.a, g))))
    return curves


def cmd_zeros(args):
    from .geometry import default_d_beta_radius
    from .lax import synthesize
    from .zeros import find_roots, roots_csv_rows

    params, n = _params(args)
    ctx = _ctx(args)
    P = synthesize(params, n, args.init, ctx)[-1]
    roots = find_roots(P, ctx)
    curves = _overlay_curves(args, params, n)
    skeleton = curves[0][1]
    target = curves[-1][1]
    r = default_d_beta_radius(params)
    rows = roots_csv_rows(roots, target, skeleton, params.betaf, r, args.digits)
    head = [
        f"roots {_param_header(params, n, ctx.mantissa_bits)} curve={curves[-1][0]} kernel={roots.kernel}",
        f"residual_bound={mp.nstr(roots.residual_bound, 6)} exclude_radius={r!r}",
    ]
    _emit(args, write_csv(None, head, ["re", "im", "dist_to_curve", "side"], rows))
    svg = args.svg or (args.out + ".svg" if args.out and args.overlay else None)
    if svg:
        atomic_write(svg, render_svg([c for _, c in curves], roots.as_array()))
    return EXIT_OK


def render_svg(curves, points, size=600, margin=20):
    """Polylines for curves and small circles for points, y axis up."""
    allpts = np.concatenate([c.points for c in curves] + [np.asarray(points, dtype=complex)])
    allpts = allpts[np.isfinite(allpts)]
    x0, x1 = allpts.real.min(), allpts.real.max()
    y0, y1 = allpts.imag.min(), allpts.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-9)
    s = (size - 2 * margin) / span

    def xy(z):
        return (margin + (z.real - x0) * s, size - margin - (z.imag - y0) * s)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    colors = ["black", "green", "blue", "purple"]
    for i, c in enumerate(curves):
        pts = c.points if not c.closed else np.concatenate([c.points, c.points[:1]])
        coords = " ".join("%.3f,%.3f" % xy(p) for p in pts)
        out.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1" points="{coords}"/>')
    for p in points:
        x, y = xy(p)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2" fill="red"/>')
    out.append("</svg>\n")
    return "\n".join(out)


def _curve_text(curve, a, digits=None):
    rows = [[fmt_real(float(p.real), digits), fmt_real(float(p.imag), digits), fmt_real(float(s), digits)] for p, s in zip(curve.points, curve.cumulative_arclength)]
    return write_csv(None, [curve.header(a=fmt_real(a, 20))], ["x", "y", "arclength"], rows)


def _gammas(args):
    return [float(parse_real(g)) for g in (args.gamma or "0.1,0.05,0.02,0.01").split(",")]


def cmd_curves(args):
    from .geometry import PlanarCurve, eta_curve, hausdorff, trace_skeleton, zero_attraction_curve

    params, n = _params(args)
    kind = args.kind
    if kind == "skeleton":
        text = _curve_text(trace_skeleton(params, args.samples), params.a, args.digits)
    elif kind == "eta":
        text = _curve_text(eta_curve(params, float(parse_real(args.eta or "0.4")), args.samples), params.a, args.digits)
    elif kind == "attraction":
        text = _curve_text(zero_attraction_curve(params, n, args.samples), params.a, args.digits)
    elif kind in ("gamma", "droplet"):
        from .gammafam import droplet_boundary, solve_gamma_params, trace_S_gamma

        gp = solve_gamma_params(params.a, _gammas(args)[0])
        if kind == "gamma":
            text = _curve_text(trace_S_gamma(gp, args.step), params.a, args.digits)
        else:
            text = "".join(_curve_text(c, params.a, args.digits) for c in droplet_boundary(gp, args.samples))
    else:
        from .gammafam import droplet_boundary, solve_gamma_params, trace_S_gamma

        sk = trace_skeleton(params, args.samples)
        circle = PlanarCurve(np.exp(2j * np.pi * np.arange(args.samples) / args.samples), True)
        rows = []
        for g in _gammas(args):
            gp = solve_gamma_params(params.a, g)
            hs = hausdorff(trace_S_gamma(gp, args.step), sk)
            hd = hausdorff(droplet_boundary(gp, args.samples)[0], circle)
            rows.append([repr(g), repr(hs), repr(hd)])
        text = write_csv(None, [f"hausdorff a={fmt_real(params.a, 20)}"], ["gamma", "hausdorff_skeleton", "hausdorff_droplet"], rows)
    _emit(args, text)
    return EXIT_OK


def cmd_validate(args):
    from .asym import RegionSpec, validate

    if args.z is None:
        raise DomainError("validate needs --z")
    params, n = _params(args)
    try:
        N_list = [int(x) for x in str(args.N_list).split(",") if x.strip()]
    except ValueError:
        raise DomainError("--N-list must be comma-separated integers")
    ctx = _ctx(args)
    rec = validate(params, RegionSpec(), parse_complex(args.z), N_list, args.theorem, args.init, ctx)
    _emit(args, rec.to_json() + "\n")
    return EXIT_OK


def cmd_specialfn(args):
    from .mpnum import fhat, hankel_ck, weber_D

    ctx = _ctx(args)
    c = parse_real(args.c)
    if args.function == "D":
        v = weber_D(c, parse_complex(args.zeta), ctx)
    elif args.function == "fhat":
        v = fhat(c, parse_complex(args.zeta), ctx)
    else:
        v = hankel_ck(c, args.k, ctx)
    re, im = (v.real, v.imag) if isinstance(v, mp.mpc) else (v, 0)
    digits = args.digits or 20
    rec = {"function": args.function, "c": fmt_real(c, 20), "re": fmt_real(re, digits), "im": fmt_real(im, digits)}
    if args.function == "ck":
        rec["k"] = args.k
    else:
        rec["zeta"] = str(args.zeta)
    _emit(args, json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {"poly": cmd_poly, "zeros": cmd_zeros, "curves": cmd_curves, "validate": cmd_validate, "specialfn": cmd_specialfn}


def main(argv=None):
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"planarop: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PrecisionError as exc:
        print(f"planarop: precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except NonConvergenceError as exc:
        print(f"planarop: did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
