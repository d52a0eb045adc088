"""Extended-precision kernel: precision handling, log-magnitude complex
numbers, gamma helpers, contour quadrature and the special functions
needed by the asymptotic formulas (Weber parabolic cylinder function
and the Hankel-contour function f-hat).

All routines run inside ``mpmath.workprec`` blocks derived from a
:class:`PrecisionContext`; results are mpmath numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .errors import ContourCollisionError, DomainError, NonConvergenceError

__all__ = [
    "PrecisionContext",
    "DEFAULT_CONTEXT",
    "LogComplex",
    "log_gamma",
    "pochhammer",
    "Circle",
    "contour_quadrature",
    "weber_D",
    "weber_D_asymptotic",
    "weber_connection_residuals",
    "hankel_loop_integral",
    "fhat",
    "hankel_ck",
]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and default quadrature size."""

    mantissa_bits: int = 256
    quadrature_nodes: int = 512

    def __post_init__(self):
        if int(self.mantissa_bits) != self.mantissa_bits or self.mantissa_bits < 64:
            raise DomainError(f"mantissa_bits must be an integer >= 64, got {self.mantissa_bits}")
        if int(self.quadrature_nodes) != self.quadrature_nodes or self.quadrature_nodes < 4:
            raise DomainError(f"quadrature_nodes must be an integer >= 4, got {self.quadrature_nodes}")

    def workprec(self, extra=0):
        return mp.workprec(self.mantissa_bits + int(extra))

    def with_bits(self, bits):
        return PrecisionContext(int(bits), self.quadrature_nodes)

    @property
    def eps(self):
        """Relative rounding slack 2^(-bits+8) promised by this module."""
        return mp.ldexp(mp.mpf(1), -self.mantissa_bits + 8)


DEFAULT_CONTEXT = PrecisionContext()


def _ctx(ctx):
    return DEFAULT_CONTEXT if ctx is None else ctx


def _wrap_phase(p):
    p = mp.mpf(p)
    two_pi = 2 * mp.pi
    if -mp.pi < p <= mp.pi:
        return p
    p = p - two_pi * mp.floor(p / two_pi)
    if p > mp.pi:
        p -= two_pi
    return p


class LogComplex:
    """A nonzero complex number stored as ``exp(log_mag + i*phase)``.

    Zero is represented with ``log_mag = -inf``.  Phases live in (-pi, pi].
    """

    __slots__ = ("log_mag", "phase")

    def __init__(self, log_mag, phase=0):
        self.log_mag = mp.mpf(log_mag)
        self.phase = mp.mpf(0) if mp.isinf(self.log_mag) else _wrap_phase(phase)

    @classmethod
    def from_complex(cls, value):
        v = mp.mpc(value)
        if v == 0:
            return cls(mp.ninf, 0)
        return cls(mp.log(abs(v)), mp.arg(v))

    @classmethod
    def from_log(cls, log_value):
        """Build from a complex logarithm ``log_value``."""
        lv = mp.mpc(log_value)
        return cls(lv.real, lv.imag)

    def is_zero(self):
        return mp.isinf(self.log_mag) and self.log_mag < 0

    def to_complex(self):
        if self.is_zero():
            return mp.mpc(0)
        return mp.exp(mp.mpc(self.log_mag, self.phase))

    def log(self):
        """Principal complex logarithm."""
        return mp.mpc(self.log_mag, self.phase)

    def __mul__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if self.is_zero() or other.is_zero():
            return LogComplex(mp.ninf)
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if other.is_zero():
            raise ZeroDivisionError("division by LogComplex zero")
        if self.is_zero():
            return LogComplex(mp.ninf)
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __neg__(self):
        return LogComplex(self.log_mag, self.phase + mp.pi)

    def __add__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        ratio = mp.exp(mp.mpc(small.log_mag - big.log_mag, small.phase - big.phase))
        s = 1 + ratio
        if s == 0:
            return LogComplex(mp.ninf)
        return LogComplex(big.log_mag + mp.log(abs(s)), big.phase + mp.arg(s))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return self + (-other)

    def rel_diff(self, other):
        """|self/other - 1| computed without leaving log space."""
        q = self / other
        return abs(mp.expm1(mp.mpc(q.log_mag, q.phase)))

    def __repr__(self):
        return f"LogComplex(log_mag={mp.nstr(self.log_mag, 17)}, phase={mp.nstr(self.phase, 17)})"


def log_gamma(x, ctx=None):
    """ln Gamma(x) for real x > 0."""
    ctx = _ctx(ctx)
    with ctx.workprec(16):
        x = mp.mpf(x)
        if not x > 0:
            raise DomainError(f"log_gamma needs x > 0, got {x}")
        return +mp.loggamma(x)


def pochhammer(x, n, ctx=None):
    """Rising factorial (x)_n by direct product; (x)_0 = 1."""
    if int(n) != n or n < 0:
        raise DomainError(f"pochhammer needs a nonnegative integer n, got {n}")
    ctx = _ctx(ctx)
    with ctx.workprec(16):
        x = mp.mpmathify(x)
        p = mp.mpf(1)
        for j in range(int(n)):
            p *= x + j
        return +p


class Circle:
    """Positively oriented circle ``center + radius*e^{it}``, t in [0, 2pi)."""

    def __init__(self, center, radius):
        self.center = center
        self.radius = radius

    def __call__(self, t):
        e = mp.expj(t)
        return self.center + self.radius * e, 1j * self.radius * e


def contour_quadrature(f, contour, ctx=None, tol=None, max_nodes=1 << 16, nodes=None):
    """Trapezoidal rule for a closed contour integral of ``f``.

    ``contour(t)`` returns ``(w, dw/dt)`` for t in [0, 2pi).  The node count
    starts at ``ctx.quadrature_nodes`` and doubles until two successive
    estimates agree to ``tol`` relative to the integral's absolute scale
    (sum of |f dw|).  ``tol`` defaults to 2^(-bits+16).
    """
    ctx = _ctx(ctx)
    m = int(nodes or ctx.quadrature_nodes)
    with ctx.workprec(16):
        tol = mp.ldexp(1, -ctx.mantissa_bits + 16) if tol is None else mp.mpf(tol)

        def samples(count, offset, stride):
            s = mp.mpc(0)
            a = mp.mpf(0)
            for k in range(offset, count, stride):
                w, dw = contour(2 * mp.pi * k / count)
                v = f(w) * dw
                s += v
                a += abs(v)
            return s, a

        total, scale = samples(m, 0, 1)
        prev = total * 2 * mp.pi / m
        while True:
            odd, odd_scale = samples(2 * m, 1, 2)
            total += odd
            scale += odd_scale
            m *= 2
            cur = total * 2 * mp.pi / m
            ref = scale * 2 * mp.pi / m
            if abs(cur - prev) <= tol * max(ref, mp.mpf(10) ** -mp.mp.dps):
                return +cur
            if 2 * m > max_nodes:
                raise NonConvergenceError(
                    f"contour quadrature not converged with {m} nodes "
                    f"(change {mp.nstr(abs(cur - prev), 5)}, scale {mp.nstr(ref, 5)})",
                    partial=cur,
                )
            prev = cur


def weber_D(c, zeta, ctx=None):
    """Parabolic cylinder function D_{-c}(zeta) for real c > -1.

    Uses the integral over the vertical line Re s = eps with eps chosen at
    the saddle ``max(1, Re zeta)`` and the trapezoidal rule with step
    halving.  Cancellation for Re zeta < 1 is offset by guard bits.
    """
    ctx = _ctx(ctx)
    c_f = float(c)
    if not c_f > -1:
        raise DomainError(f"weber_D needs c > -1, got {c}")
    zc = complex(zeta)
    eps_f = max(1.0, zc.real)
    cancel_bits = int(math.ceil((zc.real - eps_f) ** 2 / 2 / math.log(2)))
    work = ctx.mantissa_bits + 24 + cancel_bits
    with mp.workprec(work):
        c = mp.mpf(c)
        zeta = mp.mpc(zeta)
        if c == 0:
            return +mp.exp(-zeta * zeta / 4)
        eps = mp.mpf(eps_f)
        y = zeta.imag
        half_width = mp.sqrt(2 * work * mp.ln2) + 2 + abs(c)

        def g(t):
            s = mp.mpc(eps, t)
            return mp.exp(-zeta * s + s * s / 2) * mp.power(s, -c)

        lo, hi = y - half_width, y + half_width
        h = mp.mpf(1) / 2
        count = int(mp.ceil((hi - lo) / h))
        h = (hi - lo) / count
        vals = [g(lo + k * h) for k in range(count + 1)]
        total = sum(vals[1:-1]) + (vals[0] + vals[-1]) / 2
        scale = sum(abs(v) for v in vals)
        est = total * h
        tol = mp.ldexp(scale * h, -(work - 12))
        for _ in range(24):
            h /= 2
            mids = mp.mpc(0)
            for k in range(count):
                v = g(lo + (2 * k + 1) * h)
                mids += v
                scale += abs(v)
            count *= 2
            total += mids
            new = total * h
            tol = mp.ldexp(scale * h, -(work - 12))
            if abs(new - est) <= tol:
                est = new
                break
            est = new
        else:
            raise NonConvergenceError("weber_D line quadrature did not converge", partial=est)
        val = mp.exp(zeta * zeta / 4) / mp.sqrt(2 * mp.pi) * est
    with ctx.workprec():
        return +val


def _chi(n):
    return mp.sqrt(mp.pi) * mp.gamma(mp.mpf(n) / 2 + 1) / mp.gamma(mp.mpf(n) / 2 + mp.mpf(1) / 2)


def weber_D_asymptotic(c, zeta, terms, ctx=None):
    """Large-argument series of D_{-c}(zeta) with a rigorous remainder bound.

    Returns ``(value, bound)`` where ``bound`` bounds |D_{-c}(zeta) - value|.
    Valid for |arg zeta| < pi/2 and |zeta^2| >= 2|1 - 2c|.  The bound is the
    larger of the simplified ``2^(terms+2)`` form and the full Olver-type
    constant of the confluent U expansion, whose sector factor grows once
    |arg zeta| exceeds pi/4.
    """
    ctx = _ctx(ctx)
    if int(terms) != terms or terms < 1:
        raise DomainError(f"terms must be a positive integer, got {terms}")
    n = int(terms)
    with ctx.workprec(24):
        c = mp.mpf(c)
        zeta = mp.mpc(zeta)
        if zeta == 0 or not abs(mp.arg(zeta)) < mp.pi / 2:
            raise DomainError("weber_D_asymptotic needs |arg zeta| < pi/2")
        z2 = zeta * zeta
        az2 = abs(z2)
        if az2 < 2 * abs(1 - 2 * c):
            raise DomainError("weber_D_asymptotic needs |zeta^2| >= 2|1-2c|")
        series = mp.mpc(0)
        term = mp.mpc(1)
        for s in range(n):
            if s > 0:
                # (c)_{2s}/(s!(2 zeta^2)^s) from the previous term
                term *= -(c + 2 * s - 2) * (c + 2 * s - 1) / (s * 2 * z2)
            series += term
        pref = mp.exp(-z2 / 4) * mp.power(zeta, -c)
        value = pref * series
        core = abs(pochhammer(c / 2, n, ctx) * pochhammer((c + 1) / 2, n, ctx)
                   / (mp.factorial(n) * mp.power(z2, n)))
        sigma = abs(1 - 2 * c) / az2
        if abs(mp.arg(zeta)) <= mp.pi / 4:
            alpha = 1 / (1 - sigma)
            c_n = mp.mpf(1)
            c_1 = mp.mpf(1)
        else:
            nu = 1 / mp.sqrt(mp.mpf(1) / 2 + mp.sqrt(1 - 4 * sigma * sigma) / 2)
            alpha = 1 / (1 - nu * sigma)
            c_n = _chi(n) + sigma * nu * nu * n
            c_1 = _chi(1) + sigma * nu * nu
        rho = abs(c * c - c + 1) / 4 + sigma * (1 + sigma / 4) / (1 - sigma) ** 2
        full = mp.ldexp(alpha * c_n, n + 1) * mp.exp(4 * alpha * rho * c_1 / az2)
        const = max(full, mp.ldexp(mp.mpf(1), n + 2))
        bound = const * core * abs(pref)
    with ctx.workprec():
        return +value, +bound


def weber_connection_residuals(c, zeta, ctx=None):
    """Absolute residuals of the three D-function connection identities.

    The first identity carries Gamma(1 - c), which has poles at positive
    integers c where its bracket vanishes; there it is checked at
    c + 2^(-bits/4) instead.
    """
    ctx = _ctx(ctx)
    with ctx.workprec(16):
        c = mp.mpf(c)
        zeta = mp.mpc(zeta)
        ipi = mp.mpc(0, mp.pi)
        s2pi = mp.sqrt(2 * mp.pi)

        def first(cc):
            d = weber_D(cc, zeta, ctx)
            br = mp.exp(-cc * ipi / 2) * weber_D(1 - cc, 1j * zeta, ctx) + mp.exp(cc * ipi / 2) * weber_D(
                1 - cc, -1j * zeta, ctx
            )
            return abs(d - mp.gamma(1 - cc) / s2pi * br)

        c1 = c + mp.ldexp(1, -ctx.mantissa_bits // 4) if (mp.isint(c) and c >= 1) else c
        r1 = first(c1)
        d = weber_D(c, zeta, ctx)
        dm = weber_D(c, -zeta, ctx)
        dp_i = weber_D(1 - c, 1j * zeta, ctx)
        dm_i = weber_D(1 - c, -1j * zeta, ctx)
        rg = mp.rgamma(c)
        r2 = d - mp.exp(-c * ipi) * dm - s2pi * rg * mp.exp((1 - c) * ipi / 2) * dm_i
        r3 = d - mp.exp(c * ipi) * dm - s2pi * rg * mp.exp((c - 1) * ipi / 2) * dp_i
        return r1, abs(r2), abs(r3)


_DEFAULT_DELTA = 0.2
_DEFAULT_INNER = 1e-3


def hankel_loop_integral(g, ctx=None, delta=_DEFAULT_DELTA, inner_radius=_DEFAULT_INNER, breakpoints=()):
    """Integral of ``g`` over the keyhole loop around (-inf, 0].

    The loop comes in from infinity along arg s = -(pi - delta), circles
    the origin counterclockwise at radius ``inner_radius`` and leaves along
    arg s = pi - delta.  ``g`` must decay like e^s on the rays.
    ``breakpoints`` are radii at which the ray integrals are split.
    """
    ctx = _ctx(ctx)
    with ctx.workprec(24):
        delta = mp.mpf(delta)
        r0 = mp.mpf(inner_radius)
        work = mp.mp.prec
        r_max = (work * mp.ln2 + 16) / mp.cos(delta) + 4
        theta = mp.pi - delta
        lo = mp.expj(-theta)
        up = mp.expj(theta)
        pts = sorted({r0, r_max, *[mp.mpf(b) for b in breakpoints if r0 < b < r_max]})
        seg = [pts[0]]
        for p in pts[1:]:
            # split long stretches so tanh-sinh sees O(1) variation per piece
            prev = seg[-1]
            k = int(mp.ceil((p - prev) / 8))
            for j in range(1, k + 1):
                seg.append(prev + (p - prev) * j / k)
        upper = mp.quad(lambda r: g(r * up) * up, seg)
        lower = mp.quad(lambda r: g(r * lo) * lo, seg)
        arc = mp.quad(lambda t: g(r0 * mp.expj(t)) * 1j * r0 * mp.expj(t), [-theta, 0, theta])
        return upper - lower + arc


def _distance_to_keyhole(zeta, delta, r0):
    theta = mp.pi - delta
    best = mp.inf
    for sgn in (1, -1):
        d = mp.expj(sgn * theta)
        t = max((zeta * mp.conj(d)).real, r0)
        best = min(best, abs(zeta - t * d))
    r = abs(zeta)
    arg = mp.arg(zeta) if zeta != 0 else mp.mpf(0)
    if abs(arg) <= theta:
        best = min(best, abs(r - r0))
    else:
        best = min(best, abs(zeta - r0 * mp.expj(mp.sign(arg) * theta)))
    return best


def _inside_keyhole(zeta, delta, r0):
    if abs(zeta) < r0:
        return True
    return abs(mp.arg(zeta)) > mp.pi - delta


def fhat(c, zeta, ctx=None, delta=_DEFAULT_DELTA, inner_radius=_DEFAULT_INNER):
    """f-hat(zeta) = -1/(2 pi i) * loop integral of e^s s^{-c}/(s - zeta) ds.

    Principal branches throughout, so the function has a jump across the
    negative real zeta axis.  When ``zeta`` falls inside the keyhole the
    pole's residue e^zeta zeta^{-c} is added, which is the same as
    deforming the loop to keep ``zeta`` outside.
    """
    ctx = _ctx(ctx)
    cf = float(c)
    if not -1 < cf < 2:
        raise DomainError(f"fhat needs c in (-1, 2), got {c}")
    with ctx.workprec(24):
        c = mp.mpf(c)
        zeta = mp.mpc(zeta)
        if zeta.imag == 0 and zeta.real <= 0:
            raise DomainError("fhat is discontinuous on the cut (-inf, 0]; zeta must be off it")
        if _distance_to_keyhole(zeta, mp.mpf(delta), mp.mpf(inner_radius)) < mp.mpf("1e-6"):
            raise ContourCollisionError(
                f"zeta={mp.nstr(zeta, 8)} within 1e-6 of the keyhole contour; rotate or resize it"
            )

        def g(s):
            return mp.exp(s) * mp.power(s, -c) / (s - zeta)

        val = -hankel_loop_integral(g, ctx, delta, inner_radius, breakpoints=[abs(zeta)]) / (2j * mp.pi)
        if _inside_keyhole(zeta, mp.mpf(delta), mp.mpf(inner_radius)):
            val += mp.exp(zeta) * mp.power(zeta, -c)
    with ctx.workprec():
        return +val


def hankel_ck(c, k, ctx=None):
    """Coefficient c_k of the large-zeta expansion f-hat ~ sum c_k zeta^{-k}.

    Evaluated as (-1)^{k-1} (1-c)_{k-1} / Gamma(c), which equals
    sin(c pi) Gamma(k-c) / (pi (-1)^{k-1}) and has no poles in c.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    ctx = _ctx(ctx)
    with ctx.workprec(16):
        c = mp.mpf(c)
        val = (-1) ** (int(k) - 1) * pochhammer(1 - c, int(k) - 1, ctx) * mp.rgamma(c)
    with ctx.workprec():
        return +val
