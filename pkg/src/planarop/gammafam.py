"""The gamma > 0 family: droplet K_gamma, skeleton S_gamma, y_gamma and
phi_gamma, which converge to the gamma = 0 objects of ``geometry``.

For a >= 1, y_gamma carries the square root sqrt((z - b)(z - conj b)),
b = beta_gamma, with its cut on the vertical segment [b, conj b] and
~ z at infinity; this is the "Ext" branch and Int = -Ext.  For a < 1,
y_gamma is rational and the two branches differ by a sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import DomainError, RoutingError, TracingError
from .geometry import PlanarCurve, to_mpf
from .mpnum import Circle, PrecisionContext, contour_quadrature

__all__ = [
    "GammaFamilyParams",
    "solve_gamma_params",
    "y_gamma",
    "y_gamma_array",
    "residues",
    "trace_S_gamma",
    "phi_gamma",
    "droplet_boundary",
    "mu_gamma_mass",
]

_BITS = 128


@dataclass(frozen=True)
class GammaFamilyParams:
    a: mp.mpf
    gamma: mp.mpf
    alpha: mp.mpf = None
    rho: mp.mpf = None
    kappa: mp.mpf = None
    beta_gamma: mp.mpc = None
    beta_gamma_conj: mp.mpc = None
    b_gamma: mp.mpf = None

    @property
    def large_a(self):
        return self.a >= 1

    @property
    def betac(self):
        return complex(self.beta_gamma)

    def cubic(self, X):
        a, g = self.a, self.gamma
        return X**3 - (a * a + 4 * g + 2) / (2 * a * a) * X**2 + 1 / (2 * a**4)


def solve_gamma_params(a, gamma):
    """Parameters of the gamma-family for charge position a.

    For a >= 1 the cubic P(X) = X^3 - ((a^2+4g+2)/(2a^2)) X^2 + 1/(2a^4)
    is solved for X = alpha^2 by bisection on (0, 1/a^2], where it changes
    sign exactly once.
    """
    with mp.workprec(_BITS):
        a = to_mpf(a)
        g = to_mpf(gamma)
        if not a > 0:
            raise DomainError("a must be positive")
        if not g > 0:
            raise DomainError("gamma must be positive")
        if a >= 1:
            P = lambda X: X**3 - (a * a + 4 * g + 2) / (2 * a * a) * X**2 + 1 / (2 * a**4)
            lo, hi = mp.mpf(0), 1 / (a * a)
            if not (P(lo) > 0 and P(hi) < 0):
                raise DomainError("cubic has no sign change on (0, 1/a^2]")
            for _ in range(_BITS + 8):
                mid = (lo + hi) / 2
                if P(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            X = (lo + hi) / 2
            alpha = mp.sqrt(X)
            rho = (1 + a * a * X) / (2 * a * alpha)
            kappa = (1 - X) * (1 - a * a * X) / (2 * a * alpha)
            beta = mp.mpc(alpha * rho - kappa / alpha, 2 * mp.sqrt(kappa * rho))
            return GammaFamilyParams(a, g, alpha, rho, kappa, beta, mp.conj(beta), rho / alpha)
        disc = (1 - a * a) ** 2 - 4 * a * a * g
        if not disc > 0:
            raise DomainError(f"gamma={mp.nstr(g, 6)} too large for a={mp.nstr(a, 6)}: need gamma < (1-a^2)^2/(4a^2)")
        beta = (a * a + 1 - mp.sqrt(disc)) / (2 * a)
        return GammaFamilyParams(a, g, beta_gamma=mp.mpc(beta), beta_gamma_conj=mp.mpc(beta))


def _side(side):
    s = str(side).capitalize()
    if s not in ("Ext", "Int"):
        raise DomainError(f"side must be Ext or Int, got {side}")
    return s


def y_gamma(params, z, side="Ext"):
    """y_gamma(z) on the requested branch (mpmath)."""
    side = _side(side)
    with mp.workprec(_BITS):
        z = mp.mpc(z)
        a, g = params.a, params.gamma
        if z == 0 or z == a:
            raise DomainError("y_gamma is singular at 0 and a")
        if params.large_a:
            b = params.beta_gamma
            w = z - b.real
            if w == 0:
                s = mp.sqrt((z - b) * (z - mp.conj(b)))
            else:
                s = w * mp.sqrt(1 + b.imag**2 / (w * w))
            v = a * (z - params.b_gamma) * s / (z * (z - a))
        else:
            v = a + g / (z - a) - (1 + g) / z
        return v if side == "Ext" else -v


def y_gamma_array(params, z):
    """Ext branch of y_gamma on a numpy array, in double precision."""
    z = np.asarray(z, dtype=complex)
    a, g = float(params.a), float(params.gamma)
    if params.large_a:
        b = params.betac
        w = z - b.real
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(w == 0, np.sqrt((z - b) * (z - b.conjugate()) + 0j), w * np.sqrt(1 + b.imag**2 / (w * w) + 0j))
        return a * (z - float(params.b_gamma)) * s / (z * (z - a))
    return a + g / (z - a) - (1 + g) / z


def residues(params, ctx=None):
    """(Res_0, Res_a, Res_inf) by small- and large-circle quadrature.

    Res_0 is taken on the Int branch.  Res_a is on Int when a < 1 (a sits
    inside S_gamma) and on Ext when a > 1.  Res_inf uses Ext.
    """
    ctx = ctx or PrecisionContext(96, 256)
    a = params.a
    bmod = abs(params.beta_gamma)
    gap = min(bmod, abs(a - params.beta_gamma), a) if params.large_a else min(a, params.beta_gamma.real - a)
    r = gap / 2
    two_pi_i = 2j * mp.pi
    r0 = contour_quadrature(lambda z: y_gamma(params, z, "Int"), Circle(mp.mpf(0), r), ctx) / two_pi_i
    side_a = "Ext" if params.large_a else "Int"
    ra = contour_quadrature(lambda z: y_gamma(params, z, side_a), Circle(a, r), ctx) / two_pi_i
    R = 2 * (a + bmod + 1)
    rinf = -contour_quadrature(lambda z: y_gamma(params, z, "Ext"), Circle(mp.mpf(0), R), ctx, max_nodes=1 << 14) / two_pi_i
    return r0, ra, rinf


def _phi_chord(params, z0, z1, nodes=8):
    # Gauss-Legendre on the straight chord; accurate to ~1e-14 for short chords
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * x
    return 0.5 * (z1 - z0) * np.sum(w * y_gamma_array(params, s))


def _start_directions(params, z0, h):
    """Directions at which Re(int_{z0} y ds) = 0 leaving the zero z0."""
    th = np.linspace(-math.pi, math.pi, 721)[:-1]
    vals = []
    for t in th:
        # integrate along the ray with a t^2 substitution (y vanishes at z0)
        e = np.exp(1j * t)
        x, w = np.polynomial.legendre.leggauss(12)
        u = 0.5 * (1 + x)
        s = z0 + h * u * u * e
        vals.append(0.5 * np.sum(w * y_gamma_array(params, s) * 2 * u * h * e))
    vals = np.array(vals)
    re = vals.real
    out = []
    for k in range(len(th)):
        k1 = (k + 1) % len(th)
        if re[k] == 0 or np.sign(re[k]) != np.sign(re[k1]):
            # linear interpolation of the zero crossing
            t0, t1 = th[k], th[k1] if k1 else th[k1] + 2 * math.pi
            f = re[k] / (re[k] - re[k1]) if re[k] != re[k1] else 0.0
            out.append(t0 + f * (t1 - t0))
    return out


def _trace_from(params, z0, theta0, target, step, max_len, min_step=1e-6, snap=1e-4, min_travel=0.0):
    """Follow y dz in iR from z0 leaving in direction theta0."""
    # refine the launch angle so the first point already sits on Re phi = 0
    f = lambda t: _phi_chord_sing(params, z0, z0 + step * np.exp(1j * t)).real
    t0, t1 = theta0, theta0 + 1e-3
    f0, f1 = f(t0), f(t1)
    for _ in range(8):
        if f1 == f0 or abs(f1) < 1e-16:
            break
        t0, t1, f0 = t1, t1 - f1 * (t1 - t0) / (f1 - f0), f1
        f1 = f(t1)
    if abs(t1 - theta0) < 0.4:
        theta0 = t1
    z = z0 + step * np.exp(1j * theta0)
    phi = _phi_chord_sing(params, z0, z)
    # orientation: keep moving away from z0
    sgn = 1.0
    yv = y_gamma_array(params, z)
    d = 1j * np.conj(yv) / abs(yv)
    if (d * np.exp(-1j * theta0)).real < 0:
        sgn = -1.0
    pts = [z0, z]
    phis = [0j, phi]
    travelled = step
    h = step

    def field(p):
        v = y_gamma_array(params, p)
        m = abs(v)
        if not np.isfinite(m) or m == 0:
            raise TracingError(f"direction field degenerate at {p}")
        return sgn * 1j * np.conj(v) / m

    while travelled < max_len:
        if abs(z - target) < max(2 * h, snap) and travelled > min_travel:
            phi += _phi_chord_sing(params, target, z, reverse=True)
            pts.append(target)
            phis.append(phi)
            return np.array(pts), np.array(phis), True
        try:
            k1 = field(z)
            k2 = field(z + 0.5 * h * k1)
            k3 = field(z + 0.5 * h * k2)
            k4 = field(z + h * k3)
        except TracingError:
            h *= 0.5
            if h < min_step:
                raise
            continue
        zn = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        dphi = _phi_chord(params, z, zn)
        # project back onto Re phi = 0 along the gradient conj(y)
        for _ in range(3):
            yv = y_gamma_array(params, zn)
            err = (phi + dphi).real
            if abs(err) < 1e-14:
                break
            dz = -err * np.conj(yv) / abs(yv) ** 2
            zn = zn + dz
            dphi = _phi_chord(params, z, zn)
        if not np.isfinite(zn):
            raise TracingError(f"tracer left the finite plane near {z}")
        travelled += abs(zn - z)
        z = zn
        phi = phi + dphi
        pts.append(z)
        phis.append(phi)
    return np.array(pts), np.array(phis), False


def _phi_chord_sing(params, zs, z, reverse=False):
    """Integral of y from a square-root-type zero zs to z (t^2 substitution)."""
    x, w = np.polynomial.legendre.leggauss(16)
    u = 0.5 * (1 + x)
    s = zs + (z - zs) * u * u
    val = 0.5 * np.sum(w * y_gamma_array(params, s) * 2 * u) * (z - zs)
    return -val if reverse else val


def trace_S_gamma(params, step=1e-3, max_len=None):
    """Trajectory of y_gamma^2 dz^2 < 0 through beta_gamma.

    a >= 1: the open arc from beta_gamma to conj(beta_gamma), travelled
    counterclockwise around the origin.  a < 1: the closed curve through
    beta_gamma around [0, a], counterclockwise.  Start directions are
    found numerically and each is tried until one reaches its target.
    """
    step = float(step)
    if step <= 0:
        raise DomainError("step must be positive")
    b = params.betac
    a = float(params.a)
    max_len = max_len or 8 * math.pi * (1 + abs(b))
    if params.large_a:
        target, min_travel = b.conjugate(), 0.0
    else:
        target, min_travel = b, 4 * step + 0.5 * (b.real - 0)
    snap = max(1e-4 * abs(b - b.conjugate()), 1e-9)
    # the wanted branch leaves towards the upper left; try that one first
    cands = sorted(_start_directions(params, b, 10 * step), key=lambda t: abs(np.angle(np.exp(1j * (t - 0.75 * math.pi)))))
    tried = []
    for th in cands:
        try:
            pts, phis, ok = _trace_from(params, b, th, target, step, max_len, snap=snap, min_travel=min_travel)
        except TracingError as exc:
            tried.append((th, str(exc)))
            continue
        if not ok:
            tried.append((th, "did not reach target"))
            continue
        curve = PlanarCurve(pts, closed=not params.large_a, kind="gamma_skeleton")
        if not params.large_a:
            pts_c = pts[:-1]
            curve = PlanarCurve(pts_c, closed=True, kind="gamma_skeleton")
            if curve.enclosed_area() <= 0:
                tried.append((th, "clockwise"))
                continue
            from .geometry import winding_number

            if winding_number(curve, 0.0) != 1 or winding_number(curve, a) != 1:
                tried.append((th, "does not enclose [0, a]"))
                continue
        else:
            # the arc around the origin carries all of mu_gamma: phi ends at -2 pi i
            if abs(phis[-1] + 2j * math.pi) > 1e-3:
                tried.append((th, f"phi increment {phis[-1]:.4g}"))
                continue
        curve.meta = {"gamma": float(params.gamma)}
        curve.phi = phis if params.large_a else phis[:-1]
        return curve
    raise TracingError(f"no start direction at beta_gamma reached the target; tried {tried}")


def mu_gamma_mass(params, curve):
    """(1/2pi) * integral of |y_gamma| over the traced curve (trapezoid)."""
    d = np.abs(y_gamma_array(params, curve.points))
    seg = curve.segment_lengths()
    if curve.closed:
        return float(np.sum(0.5 * (d + np.roll(d, -1)) * seg) / (2 * math.pi))
    return float(np.sum(0.5 * (d[:-1] + d[1:]) * seg) / (2 * math.pi))


def _route(params, z):
    """Polyline from beta_gamma to z inside C minus ([0, inf) u [b, conj b])."""
    b = params.beta_gamma
    x0, y0 = b.real, abs(b.imag)
    z = mp.mpc(z)
    if z.imag == 0 and z.real >= 0:
        if z == b and y0 == 0:
            return [b]
        if z.real == 0 or z.real == params.a:
            raise RoutingError("phi_gamma has logarithmic singularities at 0 and a")
    if z.real == x0 and abs(z.imag) < y0:
        raise RoutingError("z lies on the cut [beta_gamma, conj(beta_gamma)]")
    top = max(abs(z.imag), y0) + 1
    left = -(max(abs(z.real), abs(x0)) + 1)
    up = mp.mpc(x0, top)
    if z.imag > 0 or (z.imag == 0 and z.real > 0):
        return [b, up, mp.mpc(z.real, top), z]
    if z.imag < 0:
        bottom = -top
        return [b, up, mp.mpc(left, top), mp.mpc(left, bottom), mp.mpc(z.real, bottom), z]
    return [b, up, mp.mpc(left, top), mp.mpc(left, 0), z]


def phi_gamma(params, z, dps=25):
    """phi_gamma(z) = integral of the Ext branch of y_gamma from beta_gamma.

    The path goes up from beta_gamma and, for targets below the real axis,
    around the left of the origin, so it never meets [0, inf) or the cut.
    Points of (0, inf) get the boundary value from above.
    """
    path = _route(params, z)
    if len(path) == 1:
        return mp.mpc(0)
    with mp.workdps(dps):
        return mp.quad(lambda s: y_gamma(params, s, "Ext"), path)


def droplet_boundary(params, n_samples=2048):
    """Boundary curves of K_gamma, outermost first.

    a >= 1: one curve, the image of the unit circle under
    f(v) = rho v - kappa/(v - alpha) - kappa/alpha.  a < 1: the circle of
    radius sqrt(1 + gamma) and the circle about a of radius sqrt(gamma).
    """
    n = int(n_samples)
    if n < 16:
        raise DomainError("n_samples must be at least 16")
    t = 2 * math.pi * np.arange(n) / n
    v = np.exp(1j * t)
    g = float(params.gamma)
    meta = {"gamma": g}
    if params.large_a:
        rho, kappa, alpha = float(params.rho), float(params.kappa), float(params.alpha)
        pts = rho * v - kappa / (v - alpha) - kappa / alpha
        return [PlanarCurve(pts, True, kind="droplet", meta=meta)]
    a = float(params.a)
    outer = math.sqrt(1 + g) * v
    inner = a + math.sqrt(g) * v
    return [PlanarCurve(outer, True, kind="droplet", meta=meta), PlanarCurve(inner, True, kind="droplet", meta=dict(meta, component="inner"))]
