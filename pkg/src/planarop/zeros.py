"""Zeros of high-degree polynomials and their distribution statistics."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import DomainError, NonConvergenceError
from .geometry import classify_points, default_d_beta_radius, project_to_curve
from .mpnum import DEFAULT_CONTEXT
from .poly import ScaledPolynomial

__all__ = [
    "RootSet",
    "find_roots",
    "zero_curve_stats",
    "empirical_vs_mu",
    "roots_csv_rows",
    "KERNEL",
]


def _load_kernel():
    if os.environ.get("PLANAROP_KERNEL", "").lower() != "python":
        try:
            from . import _aberth

            return _aberth.aberth, _aberth.KERNEL
        except ImportError:
            pass
    from . import _aberth_py

    return _aberth_py.aberth, _aberth_py.KERNEL


_aberth_kernel, KERNEL = _load_kernel()

_GOLDEN = math.pi * (3.0 - math.sqrt(5.0))


@dataclass
class RootSet:
    roots: list
    residual_bound: mp.mpf
    clusters: list = field(default_factory=list)
    sweeps: int = 0
    converged: bool = True
    kernel: str = KERNEL
    vieta_sum_error: mp.mpf = None
    vieta_product_error: mp.mpf = None

    def __len__(self):
        return len(self.roots)

    def as_array(self):
        return np.array([complex(z) for z in self.roots])

    def multiplicities(self):
        return {i: m for i, (_, m) in enumerate(self.clusters)}


def _initial_guesses(poly, n):
    R = (1 + max(float(abs(c)) for c in poly.coeffs)) ** (1.0 / n)
    return [mp.mpc(R * math.cos(k * _GOLDEN + 0.5), R * math.sin(k * _GOLDEN + 0.5)) for k in range(n)]


def _horner2(coeffs, z):
    p = mp.mpc(coeffs[-1])
    dp = mp.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _clusters(roots, radius):
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    arr = np.array([complex(z) for z in roots])
    order = np.argsort(arr.real)
    r = float(radius)
    # sweep over real parts so only nearby pairs are compared exactly
    for ii in range(n):
        i = order[ii]
        for jj in range(ii + 1, n):
            j = order[jj]
            if arr[j].real - arr[i].real > r + 1e-12 * max(1.0, abs(arr[i].real)):
                break
            if abs(roots[i] - roots[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        centre = mp.fsum(roots[i] for i in members) / len(members)
        out.append((centre, len(members)))
    return out


def _vieta(poly, roots):
    n = poly.degree
    s = mp.fsum(roots)
    scale = max(mp.fsum(abs(z) for z in roots), mp.mpf(1))
    sum_err = abs(s + poly.coeffs[n - 1]) / scale
    c0 = mp.mpc(poly.coeffs[0])
    if c0 == 0 or any(z == 0 for z in roots):
        prod_err = abs(c0) if any(z == 0 for z in roots) else mp.inf
    else:
        logp = mp.fsum(mp.log(z) for z in roots)
        target = mp.log((-1) ** n * c0)
        d = logp - target
        # compare modulo 2 pi i
        d = mp.mpc(d.real, d.imag - 2 * mp.pi * mp.nint(d.imag / (2 * mp.pi)))
        prod_err = abs(mp.expm1(d))
    return sum_err, prod_err


def find_roots(poly, ctx=None, max_iter=500, check_vieta=True):
    """All roots of a monic polynomial by Aberth-Ehrlich iteration.

    Start points sit on the circle of radius (1 + max|coeff|)^(1/degree)
    at golden-angle spacing.  Iteration stops once every correction is
    below 2^(-bits/2) (relative to max(1, |z|)) or the root's residual is
    at rounding level.  Roots closer than 2^(-bits/4) are grouped into
    clusters with a multiplicity.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if not isinstance(poly, ScaledPolynomial):
        poly = ScaledPolynomial(list(poly))
    n = poly.degree
    if n < 1:
        raise DomainError("find_roots needs degree >= 1")
    bits = ctx.mantissa_bits
    coeffs = list(poly.coeffs)
    if n == 1:
        with ctx.workprec():
            root = -mp.mpc(coeffs[0])
        return RootSet([root], mp.mpf(0), [(root, 1)], 0, True, "direct", mp.mpf(0), mp.mpf(0))
    z0 = _initial_guesses(poly, n)
    roots, sweeps, converged, _ = _aberth_kernel(coeffs, z0, bits, -(bits // 2), int(max_iter))
    with ctx.workprec(8):
        if not converged:
            raise NonConvergenceError(
                f"Aberth iteration did not converge in {max_iter} sweeps",
                partial=RootSet(roots, mp.inf, [], sweeps, False),
            )
        corr = mp.mpf(0)
        for z in roots:
            p, dp = _horner2(coeffs, z)
            if dp != 0:
                corr = max(corr, abs(p / dp))
        clusters = _clusters(roots, mp.ldexp(1, -(bits // 4)))
        se = pe = None
        if check_vieta:
            se, pe = _vieta(poly, roots)
    return RootSet(roots, corr, clusters, sweeps, True, KERNEL, se, pe)


def zero_curve_stats(roots, curve, skeleton, exclude_near=None, exclude_radius=None, params=None):
    """Distances of the roots to ``curve`` and their side of ``skeleton``.

    Roots inside the disk |z - exclude_near| < exclude_radius are dropped;
    with ``params`` given the defaults are beta and the D_beta radius.
    Sides are taken with a zero-width on-curve band, so every root counts
    as Ext or Int.
    """
    z = roots.as_array() if isinstance(roots, RootSet) else np.asarray(roots, dtype=complex)
    if params is not None:
        if exclude_near is None:
            exclude_near = params.betaf
        if exclude_radius is None:
            exclude_radius = default_d_beta_radius(params)
    keep = np.ones(len(z), dtype=bool)
    if exclude_near is not None and exclude_radius:
        keep = np.abs(z - complex(exclude_near)) >= float(exclude_radius)
    zk = z[keep]
    if len(zk) == 0:
        raise DomainError("every root lies in the exclusion disk")
    d, _ = project_to_curve(curve, zk)
    side = classify_points(skeleton, zk, band=0)
    return {
        "max_dist": float(d.max()),
        "median_dist": float(np.median(d)),
        "frac_ext": float(np.mean(side == "Ext")),
        "frac_int": float(np.mean(side == "Int")),
        "n_used": int(keep.sum()),
        "n_excluded": int((~keep).sum()),
    }


def empirical_vs_mu(roots, measure):
    """Sup-distance between the roots' arclength CDF and the CDF of mu.

    Roots are projected to their nearest arclength position on the closed
    curve carrying ``measure``; both CDFs start at the curve's first
    sample.
    """
    curve = measure.curve
    if not curve.closed:
        raise DomainError("empirical_vs_mu needs a closed curve")
    z = roots.as_array() if isinstance(roots, RootSet) else np.asarray(roots, dtype=complex)
    _, pos = project_to_curve(curve, z)
    total_len = curve.length
    cdf = measure.cdf()
    knots = np.concatenate([curve.cumulative_arclength, [total_len]])
    cdf = cdf / cdf[-1]
    pos = np.sort(np.mod(pos, total_len))
    m = len(pos)
    F = np.interp(pos, knots, cdf)
    emp_hi = np.arange(1, m + 1) / m
    emp_lo = np.arange(0, m) / m
    return float(max(np.max(np.abs(emp_hi - F)), np.max(np.abs(F - emp_lo))))


def roots_csv_rows(roots, curve=None, skeleton=None, exclude_near=None, exclude_radius=None, digits=None):
    """Rows (re, im, dist_to_curve, side) for the roots CSV."""
    from .io import fmt_real

    z = roots.as_array()
    dist = project_to_curve(curve, z)[0] if curve is not None and len(curve) else np.full(len(z), np.nan)
    side = classify_points(skeleton, z, band=0) if skeleton is not None else np.array([""] * len(z), dtype=object)
    rows = []
    for k, r in enumerate(roots.roots):
        s = str(side[k]).lower()
        if exclude_near is not None and exclude_radius and abs(z[k] - complex(exclude_near)) < exclude_radius:
            s = "excluded"
        if not isinstance(r, mp.mpc):
            with mp.workprec(2048):
                r = mp.mpc(r)
        rows.append([fmt_real(r.real, digits), fmt_real(r.imag, digits), repr(float(dist[k])), s])
    return rows
