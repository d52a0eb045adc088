"""Limiting objects for the weight |z-a|^{2c} e^{-N|z|^2}: the skeleton S,
the measure mu on it, the phase function phi_A, the g-function, eta-curves,
zero-attraction curves and point classification.

Curves are computed in double precision.  They feed distance statistics
and plots, where 1e-12 is far more than enough.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, TracingError

__all__ = [
    "ProblemParams",
    "PlanarCurve",
    "CurveMeasure",
    "phi_A",
    "g_function",
    "trace_skeleton",
    "mu_on_skeleton",
    "classify_point",
    "classify_points",
    "eta_curve",
    "zero_attraction_curve",
    "zero_location_rhs",
    "hausdorff",
    "distance_to_curve",
    "project_to_curve",
    "winding_number",
    "default_d_beta_radius",
]

_PARSE_BITS = 2048


def to_mpf(x):
    """Convert to mpf without losing digits of decimal strings."""
    if isinstance(x, str):
        with mp.workprec(_PARSE_BITS):
            return mp.mpf(x)
    if isinstance(x, mp.mpf):
        return x
    return mp.mpf(x)


@dataclass(frozen=True)
class ProblemParams:
    """The triple (a, c, N); beta and ell are derived on demand."""

    a: mp.mpf
    c: mp.mpf
    N: mp.mpf

    def __post_init__(self):
        for name in ("a", "c", "N"):
            object.__setattr__(self, name, to_mpf(getattr(self, name)))
        if not self.a > 0:
            raise DomainError(f"a must be positive, got {self.a}")
        if not self.c > -1:
            raise DomainError(f"c must exceed -1, got {self.c}")
        if not self.N > 0:
            raise DomainError(f"N must be positive, got {self.N}")

    @property
    def beta(self):
        return min(self.a, 1 / self.a)

    @property
    def ell(self):
        b = self.beta
        return mp.log(b) - self.a * b

    @property
    def af(self):
        return float(self.a)

    @property
    def cf(self):
        return float(self.c)

    @property
    def Nf(self):
        return float(self.N)

    @property
    def betaf(self):
        return min(self.af, 1.0 / self.af)

    @property
    def ellf(self):
        b = self.betaf
        return math.log(b) - self.af * b

    def with_N(self, N):
        return ProblemParams(self.a, self.c, N)

    def with_c(self, c):
        return ProblemParams(self.a, c, self.N)

    def describe(self):
        return f"a={mp.nstr(self.a, 17)} c={mp.nstr(self.c, 17)} N={mp.nstr(self.N, 17)}"


def default_d_beta_radius(params):
    """min(|a - 1/a|, beta)/3.

    |a - 1/a| is the distance from beta to the other special point (a when
    a > 1, the critical point 1/a when a < 1).
    """
    a = params.af
    return min(abs(a - 1.0 / a), params.betaf) / 3.0


@dataclass
class PlanarCurve:
    """Ordered samples of an oriented plane curve."""

    points: np.ndarray
    closed: bool
    cumulative_arclength: np.ndarray = None
    kind: str = "curve"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if self.cumulative_arclength is None:
            seg = np.abs(np.diff(self.points))
            self.cumulative_arclength = np.concatenate([[0.0], np.cumsum(seg)])
        else:
            self.cumulative_arclength = np.asarray(self.cumulative_arclength, dtype=float)

    def __len__(self):
        return len(self.points)

    def segment_lengths(self):
        pts = self.points
        if self.closed:
            pts = np.concatenate([pts, pts[:1]])
        return np.abs(np.diff(pts))

    @property
    def length(self):
        return float(self.segment_lengths().sum())

    @property
    def max_spacing(self):
        s = self.segment_lengths()
        return float(s.max()) if len(s) else 0.0

    @property
    def mean_spacing(self):
        s = self.segment_lengths()
        return float(s.mean()) if len(s) else 0.0

    def enclosed_area(self):
        if not self.closed:
            raise DomainError("area needs a closed curve")
        x, y = self.points.real, self.points.imag
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def to_csv_rows(self):
        return [(p.real, p.imag, s) for p, s in zip(self.points, self.cumulative_arclength)]

    def header(self, a=None):
        parts = ["# curve"]
        if a is not None:
            parts.append(f"a={a}")
        parts.append(f"kind={self.kind}")
        if self.meta:
            parts.append("params=" + ",".join(f"{k}:{v}" for k, v in self.meta.items()))
        parts.append(f"closed={int(self.closed)}")
        return " ".join(parts)


@dataclass
class CurveMeasure:
    """Density per unit arclength sampled on a curve."""

    curve: PlanarCurve
    density: np.ndarray

    def total_mass(self):
        d = self.density
        seg = self.curve.segment_lengths()
        if self.curve.closed:
            return float(np.sum(0.5 * (d + np.roll(d, -1)) * seg))
        return float(np.sum(0.5 * (d[:-1] + d[1:]) * seg))

    def cdf(self):
        """Cumulative mass at each sample (closed curves start at point 0)."""
        d = self.density
        seg = self.curve.segment_lengths()
        if self.curve.closed:
            inc = 0.5 * (d + np.roll(d, -1)) * seg
        else:
            inc = 0.5 * (d[:-1] + d[1:]) * seg
        return np.concatenate([[0.0], np.cumsum(inc)])


def phi_A(params, z):
    """a(z - beta) - log(z/beta) with the principal logarithm."""
    z = mp.mpmathify(z)
    if z == 0:
        raise DomainError("phi_A is singular at z = 0")
    b = params.beta
    return params.a * (z - b) - mp.log(z / b)


def g_function(params, z, side):
    """log z on the exterior branch, a z + ell on the interior branch."""
    z = mp.mpmathify(z)
    side = _side(side)
    if side == "Ext":
        if z == 0:
            raise DomainError("the exterior g-branch is singular at z = 0")
        return mp.log(z)
    return params.a * z + params.ell


def _side(side):
    s = str(side).capitalize()
    if s not in ("Ext", "Int"):
        raise DomainError(f"side must be Ext or Int, got {side}")
    return s


def _solve_rays(theta, target_fn, dtarget_fn, a, beta, tol=1e-15, max_iter=60):
    """Solve log r - a r cos(theta) - target(r, theta) = 0 for r in (0, beta].

    Works in u = log r with a bracketed Newton iteration, vectorised over
    theta.  The left side is increasing on the bracket when target is
    constant, which makes the root unique there.
    """
    cos_t = np.cos(theta)

    def G(u):
        r = np.exp(u)
        return u - a * r * cos_t - target_fn(r, theta)

    def dG(u):
        r = np.exp(u)
        return 1.0 - a * r * cos_t - r * dtarget_fn(r, theta)

    hi = np.full_like(theta, math.log(beta))
    g_hi = G(hi)
    t0 = target_fn(np.full_like(theta, beta), theta)
    lo = np.minimum(t0 - a * beta - 1.0, hi - 1.0)
    g_lo = G(lo)
    for _ in range(80):
        bad = g_lo >= 0
        if not bad.any():
            break
        lo = np.where(bad, lo - 2.0, lo)
        g_lo = G(lo)
    if (g_lo >= 0).any() or (g_hi < -tol).any():
        idx = int(np.argmax((g_lo >= 0) | (g_hi < -tol)))
        raise TracingError(f"no bracketed root on ray theta={theta[idx]!r}")
    u = np.where(np.abs(g_hi) <= tol, hi, 0.5 * (lo + hi))
    done = np.abs(g_hi) <= tol
    for _ in range(max_iter):
        g = G(u)
        done |= np.abs(g) <= tol
        if done.all():
            break
        pos = g > 0
        hi = np.where(pos & ~done, u, hi)
        lo = np.where(~pos & ~done, u, lo)
        d = dG(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            un = u - g / d
        ok = np.isfinite(un) & (un > lo) & (un < hi)
        un = np.where(ok, un, 0.5 * (lo + hi))
        u = np.where(done, u, un)
        done |= (hi - lo) < 1e-15 * np.maximum(1.0, np.abs(u))
    g = G(u)
    return np.exp(u), g


def _theta_grid(n_samples):
    n_samples = int(n_samples)
    k = np.arange(n_samples) - n_samples // 2
    return 2.0 * math.pi * k / n_samples


def _rotate_to_start(theta, r):
    # begin on the negative real axis and run counterclockwise
    order = np.argsort(np.mod(theta + math.pi, 2 * math.pi))
    return theta[order], r[order]


def _level_curve(params, eta, n_samples, kind):
    if int(n_samples) < 64:
        raise DomainError("n_samples must be at least 64")
    a, beta = params.af, params.betaf
    target = params.ellf - eta
    theta = _theta_grid(n_samples)
    r, res = _solve_rays(theta, lambda r, t: np.full_like(r, target), lambda r, t: np.zeros_like(r), a, beta)
    if eta == 0:
        r[theta == 0] = beta
    theta, r = _rotate_to_start(theta, r)
    pts = r * np.exp(1j * theta)
    return PlanarCurve(pts, True, kind=kind, meta={"eta": eta} if kind == "eta" else {})


def trace_skeleton(params, n_samples=4096):
    """Skeleton S as a closed counterclockwise polar curve through beta.

    On each ray the equation r = beta e^{a(r cos t - beta)} has exactly one
    root in (0, beta], because log r - a r cos t is increasing there.
    """
    return _level_curve(params, 0.0, n_samples, "skeleton")


def eta_curve(params, eta, n_samples=4096):
    """Level curve Re phi_A = eta inside S (eta = 0 gives S itself)."""
    eta = float(eta)
    if eta < 0:
        raise DomainError("eta must be nonnegative")
    try:
        return _level_curve(params, eta, n_samples, "eta")
    except TracingError as exc:
        raise TracingError(f"eta curve for eta={eta}: {exc}") from exc


def mu_on_skeleton(params, curve):
    """Density |a - 1/z|/(2 pi) of mu on the sampled skeleton."""
    z = curve.points
    dens = np.abs(params.af - 1.0 / z) / (2.0 * math.pi)
    return CurveMeasure(curve, dens)


def winding_number(curve, p):
    """Winding number of a closed sampled curve about point p."""
    w = curve.points - p
    ang = np.angle(np.roll(w, -1) / w)
    return int(round(float(ang.sum()) / (2 * math.pi)))


def _point_in_polygon(poly, z):
    x, y = poly.real, poly.imag
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    zx = np.asarray(z.real)[:, None]
    zy = np.asarray(z.imag)[:, None]
    cond = (y[None, :] > zy) != (yn[None, :] > zy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x[None, :] + (zy - y[None, :]) * (xn - x)[None, :] / (yn - y)[None, :]
    cross = cond & (zx < xint)
    return (np.count_nonzero(cross, axis=1) % 2) == 1


def project_to_curve(curve, z):
    """Nearest point on the sampled polyline: (distance, arclength position).

    The nearest sample is found with a k-d tree and refined by projecting
    onto its two adjacent segments.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pts = curve.points
    n = len(pts)
    if n == 0:
        raise DomainError("empty curve")
    cum = curve.cumulative_arclength
    seglen = curve.segment_lengths()
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d0, idx = tree.query(np.column_stack([z.real, z.imag]))
    best = d0.copy()
    pos = cum[idx].astype(float)
    for shift in (-1, 0):
        i0 = idx + shift
        i1 = i0 + 1
        if curve.closed:
            i0 %= n
            i1 %= n
            valid = np.ones_like(idx, dtype=bool)
        else:
            valid = (i0 >= 0) & (i1 < n)
            i0 = np.clip(i0, 0, n - 1)
            i1 = np.clip(i1, 0, n - 1)
        p0, p1 = pts[i0], pts[i1]
        seg = p1 - p0
        L2 = np.abs(seg) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip(((z - p0) * np.conj(seg)).real / L2, 0.0, 1.0)
        t = np.where(L2 > 0, t, 0.0)
        d = np.abs(z - (p0 + t * seg))
        better = valid & (d < best)
        best = np.where(better, d, best)
        if len(seglen):
            pos = np.where(better, cum[i0] + t * seglen[np.minimum(i0, len(seglen) - 1)], pos)
    return best, pos


def distance_to_curve(curve, z):
    """Distance from each point of ``z`` to the polyline through the samples."""
    return project_to_curve(curve, z)[0]


def classify_points(skeleton, z, band=None):
    """Vectorised classify_point returning an array of 'Ext'/'Int'/'OnCurve'."""
    if not skeleton.closed:
        raise DomainError("classification needs a closed skeleton")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if band is None:
        band = 10.0 * skeleton.mean_spacing
    inside = _point_in_polygon(skeleton.points, z)
    out = np.where(inside, "Int", "Ext").astype(object)
    if band > 0:
        d = distance_to_curve(skeleton, z)
        out[d <= band] = "OnCurve"
    return out


def classify_point(params, skeleton, z, band=None):
    """Ext, Int or OnCurve relative to the sampled skeleton.

    ``band`` defaults to ten mean sample spacings; pass 0 to always get a
    side.
    """
    return str(classify_points(skeleton, [complex(z)], band)[0])


def _rhs_coefficients(params, N):
    """Constant and log|.|-coefficients of the zero-location right side.

    Returns (K0, k_beta, k_a, k_0) meaning
    RHS(z) = K0 + (k_beta log|z - beta| + k_a log|z - a| + k_0 log|z|)/N.
    """
    a, c = params.af, params.cf
    if c == 0:
        raise DomainError("zero-location equations need c != 0")
    lg = float(mp.log(abs(mp.gamma(params.c))))
    logN = math.log(N)
    if a > 1:
        K0 = (c - 0.5) * logN / N - lg / N + (0.5 * math.log(2 * math.pi) + c * math.log(a * a - 1) - math.log(a)) / N
        return K0, 2 * c - 1, -c, -c
    if a < 1:
        K0 = (c - 1) * logN / N - lg / N + (math.log(a) + (c - 1) * math.log(1 - a * a)) / N
        return K0, 0.0, -(1 - c), -c
    raise DomainError("a = 1 is the critical case and is not supported")


def zero_location_rhs(params, z, N=None):
    """Right-hand side of the zero-location equation at z (with N = n)."""
    N = params.Nf if N is None else float(N)
    K0, kb, ka, k0 = _rhs_coefficients(params, N)
    z = np.asarray(z, dtype=complex)
    beta, a = params.betaf, params.af
    return K0 + (kb * np.log(np.abs(z - beta)) + ka * np.log(np.abs(z - a)) + k0 * np.log(np.abs(z))) / N


def zero_attraction_curve(params, n, n_samples=4096, exclude_radius=None):
    """Solution set of -Re phi_A(z) = RHS(z) near S, with N = n.

    Solved along polar rays with the skeleton radius as the starting
    bracket; rays whose solution falls inside the disk of radius
    ``exclude_radius`` about beta are dropped, so the result is an open
    curve starting and ending at the edge of that disk.
    """
    N = float(n)
    if int(n_samples) < 64:
        raise DomainError("n_samples must be at least 64")
    K0, kb, ka, k0 = _rhs_coefficients(params, N)
    a, beta, ell = params.af, params.betaf, params.ellf
    if exclude_radius is None:
        exclude_radius = default_d_beta_radius(params)
    theta = _theta_grid(n_samples)

    def target(r, t):
        z = r * np.exp(1j * t)
        with np.errstate(divide="ignore"):
            return ell + K0 + (kb * np.log(np.abs(z - beta)) + ka * np.log(np.abs(z - a)) + k0 * np.log(np.abs(z))) / N

    def dtarget(r, t):
        z = r * np.exp(1j * t)
        with np.errstate(divide="ignore", invalid="ignore"):
            e = np.exp(1j * t)
            return (kb * (e / (z - beta)).real + ka * (e / (z - a)).real + k0 / r) / N

    cos_t = np.cos(theta)
    ok_rays = np.abs(np.exp(1j * theta) * beta - beta) > exclude_radius * 0.5
    theta = theta[ok_rays]
    cos_t = cos_t[ok_rays]
    # Newton from the skeleton radius; the RHS is O(log N / N)
    r_s, _ = _solve_rays(theta, lambda rr, t: np.full_like(rr, ell), lambda rr, t: np.zeros_like(rr), a, beta)
    u = np.log(r_s)

    def G(uu, t, ct):
        rr = np.exp(uu)
        return uu - a * rr * ct - target(rr, t)

    for _ in range(100):
        rr = np.exp(u)
        g = u - a * rr * cos_t - target(rr, theta)
        d = 1.0 - a * rr * cos_t - rr * dtarget(rr, theta)
        step = np.clip(g / d, -0.05, 0.05)
        u = u - step
        if np.all(np.abs(step) < 1e-15):
            break
    g = G(u, theta, cos_t)
    bad = ~(np.isfinite(g) & (np.abs(g) < 1e-10))
    if bad.any():
        # scan for the sign change nearest the skeleton radius, then bisect
        tb, cb, ub = theta[bad], cos_t[bad], np.log(r_s[bad])
        offs = np.linspace(-1.5, 0.5, 401)
        grid = ub[:, None] + offs[None, :]
        with np.errstate(invalid="ignore"):
            vals = G(grid, tb[:, None], cb[:, None])
        change = np.isfinite(vals[:, :-1]) & np.isfinite(vals[:, 1:]) & (np.sign(vals[:, :-1]) != np.sign(vals[:, 1:]))
        dist = np.where(change, np.abs(offs[:-1] + 0.0025)[None, :], np.inf)
        j = np.argmin(dist, axis=1)
        found = np.isfinite(dist[np.arange(len(j)), j])
        lo, hi = grid[np.arange(len(j)), j], grid[np.arange(len(j)), j + 1]
        glo = G(lo, tb, cb)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = G(mid, tb, cb)
            same = np.sign(gm) == np.sign(glo)
            lo = np.where(same, mid, lo)
            glo = np.where(same, gm, glo)
            hi = np.where(same, hi, mid)
        ub = np.where(found, 0.5 * (lo + hi), np.nan)
        u = u.copy()
        u[bad] = ub
        g = G(u, theta, cos_t)
    rr = np.exp(u)
    good = np.isfinite(g) & (np.abs(g) < 1e-10)
    z = rr * np.exp(1j * theta)
    keep = good & (np.abs(z - beta) >= exclude_radius)
    # rays whose skeleton point already sits near beta would be clipped anyway
    near = np.abs(r_s * np.exp(1j * theta) - beta) < 1.5 * exclude_radius
    if (~good & ~near).any():
        warnings.warn(f"zero_attraction_curve: Newton failed on {int((~good & ~near).sum())} rays; samples omitted")
    theta, z = theta[keep], z[keep]
    order = np.argsort(np.mod(theta, 2 * math.pi))
    z = z[order]
    return PlanarCurve(z, False, kind="attraction", meta={"n": int(n), "exclude_radius": exclude_radius})


def hausdorff(curve_a, curve_b):
    """Symmetric Hausdorff distance between the sample sets of two curves."""
    pa = np.column_stack([curve_a.points.real, curve_a.points.imag])
    pb = np.column_stack([curve_b.points.real, curve_b.points.imag])
    if len(pa) == 0 or len(pb) == 0:
        raise DomainError("hausdorff needs non-empty curves")
    da, _ = cKDTree(pb).query(pa)
    db, _ = cKDTree(pa).query(pb)
    return float(max(da.max(), db.max()))
