"""Aberth-Ehrlich iteration on gmpy2 numbers (fallback kernel).

The compiled kernel in ``_aberth`` exposes the same ``aberth`` function.
Both take and return mpmath numbers.
"""

from __future__ import annotations

import gmpy2
import mpmath as mp

KERNEL = "python"


def _raw_parts(c):
    """(re, im) as raw mpf tuples, without rounding to mpmath's precision."""
    if isinstance(c, mp.mpc):
        return c._mpc_
    if isinstance(c, mp.mpf):
        return c._mpf_, mp.mpf(0)._mpf_
    with mp.workprec(2048):
        return mp.mpc(c)._mpc_


def _to_gmpy(raw, ctx):
    sign, man, exp, _ = raw
    if not man:
        return gmpy2.mpfr(0, context=ctx)
    v = gmpy2.mpfr(-man if sign else man, context=ctx)
    return gmpy2.mul_2exp(v, int(exp))


def _to_mpf(v):
    if v == 0:
        return mp.mpf(0)
    man, exp = v.as_mantissa_exp()
    return mp.make_mpf(mp.libmp.from_man_exp(int(man), int(exp)))


def aberth(coeffs, roots, bits, tol_log2, max_iter):
    """Simultaneous (Jacobi-style) Aberth sweeps.

    ``coeffs`` are complex, lowest degree first and monic.  A root stops
    moving once its Newton-Aberth correction is below
    ``2^tol_log2 * max(1, |z|)`` or |P(z)| sits at the rounding level of
    the evaluation.  Returns ``(roots, sweeps, converged, max_correction)``.
    """
    with gmpy2.context(gmpy2.get_context(), precision=int(bits)) as ctx:
        C = [gmpy2.mpc(*(_to_gmpy(x, ctx) for x in _raw_parts(c))) for c in coeffs]
        Cabs = [abs(c) for c in C]
        n = len(C) - 1
        Z = [gmpy2.mpc(*(_to_gmpy(x, ctx) for x in _raw_parts(z))) for z in roots]
        tol = gmpy2.mul_2exp(gmpy2.mpfr(1), int(tol_log2))
        rnd = gmpy2.mul_2exp(gmpy2.mpfr(1), -int(bits) + 4 + n.bit_length())
        active = [True] * n
        one = gmpy2.mpfr(1)
        sweeps = 0
        max_corr = gmpy2.mpfr(0)
        while any(active) and sweeps < max_iter:
            sweeps += 1
            max_corr = gmpy2.mpfr(0)
            newZ = list(Z)
            for i in range(n):
                if not active[i]:
                    continue
                z = Z[i]
                p = C[n]
                dp = gmpy2.mpc(0)
                az = abs(z)
                pa = Cabs[n]
                for k in range(n - 1, -1, -1):
                    dp = dp * z + p
                    p = p * z + C[k]
                    pa = pa * az + Cabs[k]
                if abs(p) <= rnd * pa:
                    active[i] = False
                    continue
                ratio = p / dp
                s = gmpy2.mpc(0)
                for j in range(n):
                    if j != i:
                        s += 1 / (z - Z[j])
                w = ratio / (1 - ratio * s)
                newZ[i] = z - w
                aw = abs(w)
                if aw > max_corr:
                    max_corr = aw
                if aw <= tol * max(one, az):
                    active[i] = False
            Z = newZ
        converged = not any(active)
        out = [mp.make_mpc((_to_mpf(z.real)._mpf_, _to_mpf(z.imag)._mpf_)) for z in Z]
        return out, sweeps, converged, _to_mpf(max_corr)
