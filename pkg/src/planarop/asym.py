"""Strong-asymptotic formulas for P_N, region by region, and their
validation against recurrence-generated polynomials.

Every magnitude stays in log space (``LogComplex``); z^N is never formed
directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import DomainError, ProtocolError
from .geometry import ProblemParams, classify_point, default_d_beta_radius, phi_A, trace_skeleton
from .mpnum import DEFAULT_CONTEXT, LogComplex, PrecisionContext, fhat, weber_D

__all__ = [
    "RegionSpec",
    "AsymptoticPrediction",
    "ValidationRecord",
    "zeta_map",
    "classify_for_asymptotics",
    "predict",
    "validate",
    "expected_order",
    "eta_rhs_limit",
    "THEOREMS",
]

THEOREMS = ("auto", "fixed_c", "uniform_c")
REGIONS = ("Ext", "Int", "U_band", "D_beta")


@dataclass(frozen=True)
class RegionSpec:
    """Concrete stand-ins for the neighbourhoods U, V0 and D_beta.

    ``d_beta_radius=None`` means the per-parameter default
    ``geometry.default_d_beta_radius``.
    """

    d_beta_radius: float = None
    u_band: float = 0.1
    v0_margin: float = 0.05

    def __post_init__(self):
        if self.d_beta_radius is not None and not self.d_beta_radius > 0:
            raise DomainError("d_beta_radius must be positive")
        if not self.u_band > 0 or not self.v0_margin >= 0:
            raise DomainError("u_band must be positive and v0_margin nonnegative")

    def radius(self, params):
        return default_d_beta_radius(params) if self.d_beta_radius is None else float(self.d_beta_radius)

    def check_injective(self, params, n_boundary=256):
        """True when zeta is pairwise distinct on the sampled disk boundary."""
        r = self.radius(params) * (1 - 1e-9)
        b = params.beta
        pts = [b + r * mp.expjpi(2 * mp.mpf(k) / n_boundary) for k in range(n_boundary)]
        z = np.array([complex(zeta_map(params, p, radius=self.radius(params))) for p in pts])
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        return bool(d.min() > 1e-9 * np.abs(z).max())


@dataclass
class AsymptoticPrediction:
    value: LogComplex
    region: str
    dominant_terms: tuple
    theorem: str
    expected_order: object = None

    def as_complex(self):
        return self.value.to_complex()


def _check_a(params):
    if params.a == 1:
        raise DomainError("a = 1 is the critical (Painleve IV) regime and is out of scope")


def zeta_map(params, z, radius=None):
    """Local coordinate at beta: sqrt(2N phi_A) for a > 1, -N phi_A for a < 1.

    For a > 1 the square root is fixed by zeta'(beta) = a sqrt(N) > 0,
    written as a sqrt(N) (z - beta) sqrt(2 phi_A / (a (z - beta))^2) so
    the inner root stays near 1 on the disk.
    """
    _check_a(params)
    z = mp.mpmathify(z)
    b = params.beta
    r = default_d_beta_radius(params) if radius is None else radius
    if abs(z - b) >= r:
        raise DomainError(f"z={mp.nstr(z, 8)} is outside the D_beta disk of radius {r:.6g}")
    if z == b:
        return mp.mpc(0)
    N, a = params.N, params.a
    ph = phi_A(params, z)
    if a > 1:
        u = a * (z - b)
        return mp.sqrt(N) * u * mp.sqrt(2 * ph / (u * u))
    return -N * ph


def _dist_to_segment(z, lo, hi):
    x = min(max(z.real, lo), hi)
    return abs(z - x)


def classify_for_asymptotics(params, spec, skeleton, z):
    """D_beta, U_band, Ext or Int, checked in that order."""
    zc = complex(z)
    if abs(zc - params.betaf) < spec.radius(params):
        return "D_beta"
    if zc != 0 and abs(float(phi_A(params, zc).real)) < spec.u_band and _dist_to_segment(zc, 0.0, params.betaf) > spec.v0_margin:
        return "U_band"
    return classify_point(params, skeleton, zc, band=0)


def expected_order(params, region, theorem):
    """Decay exponent k of the relative error O(N^-k); inf for O(N^-inf)."""
    a, c = params.af, params.cf
    if theorem == "uniform_c":
        return c + 0.5 if a > 1 else 2.0 - c
    if a > 1:
        return {"Ext": 1.0, "Int": 0.5, "U_band": 0.5, "D_beta": 0.5}[region]
    return {"Ext": math.inf, "Int": 1.0, "U_band": 1.0, "D_beta": 1.0}[region]


def _resolve_theorem(params, theorem):
    if theorem not in THEOREMS:
        raise DomainError(f"theorem must be one of {THEOREMS}")
    c = params.c
    if theorem == "auto":
        theorem = "uniform_c" if c == 0 else "fixed_c"
    if theorem == "fixed_c" and (c == 0 or not c > -1):
        raise DomainError("the fixed-c formulas need a nonzero c > -1")
    if theorem == "uniform_c":
        if params.a > 1 and not (-mp.mpf(1) / 2 <= c <= mp.mpf(1) / 2):
            raise DomainError("the uniform-c formulas for a > 1 need c in [-1/2, 1/2]")
        if params.a < 1 and not (-1 < c < 2):
            raise DomainError("the uniform-c formulas for a < 1 need c in (-1, 2)")
    return theorem


def _L(x):
    return LogComplex.from_complex(x)


def _Llog(v):
    return LogComplex.from_log(v)


def _ext_term(params, z):
    N, c = params.N, params.c
    pole = params.beta if params.a > 1 else params.a
    return _Llog(N * mp.log(z) + c * mp.log(z / (z - pole)))


def _int_term(params, z):
    """The second (exponentially weighted) term, sign included."""
    N, c, a = params.N, params.c, params.a
    rg = mp.rgamma(c)
    if rg == 0:
        return LogComplex(mp.ninf)
    if a > 1:
        b = params.beta
        lg = (
            N * mp.log(b)
            + mp.log(2 * mp.pi) / 2
            + c * mp.log(a * a - 1)
            - (mp.mpf(1) / 2 - c) * mp.log(N)
            - mp.log(a)
            + N * a * (z - b)
            - mp.log(z - b)
            + c * mp.log((z - b) / (z - a))
        )
    else:
        lg = (1 + N) * mp.log(a) + (c - 1) * mp.log(1 - a * a) - (1 - c) * mp.log(N) + N * a * (z - a) - mp.log(z - a)
    return -(_Llog(lg) * _L(rg))


def _dbeta_value(params, z, ctx):
    N, c, a = params.N, params.c, params.a
    zeta = zeta_map(params, z, radius=mp.inf)
    if a > 1:
        D = weber_D(c, zeta, ctx)
        t = _Llog(N * mp.log(z) + c * mp.log(z * zeta / (z - params.beta)) + zeta * zeta / 4) * _L(D)
        return t, (t,)
    f = fhat(c, zeta, ctx)
    first = _Llog(N * mp.log(z) + c * mp.log(z / (z - a)))
    second = -(_Llog(N * mp.log(z) + c * mp.log(z * zeta / (z - a)) - zeta) * _L(f))
    return first + second, (first, second)


def predict(params, spec, z, theorem="auto", skeleton=None, region=None, ctx=None):
    """Leading-order P_N(z) (N = params.N) for the region containing z.

    ``region`` overrides the classification; otherwise ``skeleton``
    (traced on demand) decides Ext versus Int.
    """
    _check_a(params)
    theorem = _resolve_theorem(params, theorem)
    ctx = ctx or DEFAULT_CONTEXT
    with ctx.workprec(16):
        z = mp.mpc(z)
        if z == 0 or z == params.a:
            raise DomainError("z must avoid 0 and a")
        if region is None:
            skeleton = skeleton if skeleton is not None else trace_skeleton(params)
            region = classify_for_asymptotics(params, spec, skeleton, z)
        if region not in REGIONS:
            raise DomainError(f"unknown region {region}")
        if theorem == "uniform_c" and region == "Int":
            raise DomainError("the uniform-c statements have no interior clause; use fixed_c")
        order = expected_order(params, region, theorem)
        if region == "Ext":
            t = _ext_term(params, z)
            return AsymptoticPrediction(t, region, (t,), theorem, order)
        if region == "Int":
            t = _int_term(params, z)
            return AsymptoticPrediction(t, region, (t,), theorem, order)
        if region == "U_band":
            e, i = _ext_term(params, z), _int_term(params, z)
            return AsymptoticPrediction(e + i, region, (e, i), theorem, order)
        v, terms = _dbeta_value(params, z, ctx)
        return AsymptoticPrediction(v, region, terms, theorem, order)


@dataclass
class ValidationRecord:
    a: float
    c: float
    z: complex
    region: str
    theorem: str
    N: list
    rel_err: list
    fitted_order: float
    expected_order: float
    phase_ok: bool
    superpolynomial: object = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        fo = self.fitted_order
        eo = self.expected_order
        d = {
            "a": self.a,
            "c": self.c,
            "z": {"re": self.z.real, "im": self.z.imag},
            "region": self.region.lower(),
            "theorem": self.theorem,
            "N": list(self.N),
            "rel_err": list(self.rel_err),
            "fitted_order": fo if fo is None or math.isfinite(fo) else None,
            "expected_order": eo if math.isfinite(eo) else "inf",
            "phase_ok": self.phase_ok,
        }
        if self.superpolynomial is not None:
            d["superpolynomial"] = "yes" if self.superpolynomial else "no"
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _fit_order(N_list, errs):
    x = np.log(np.asarray(N_list, dtype=float))
    y = np.log(np.asarray(errs, dtype=float))
    if len(x) < 2 or not np.all(np.isfinite(y)):
        return None
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def validate(params, spec, z, N_list, theorem="auto", mode="auto", ctx=None):
    """Compare predict() with the recurrence polynomial P_N(z), n = N.

    Fits the decay order of |P_N(z)/prediction - 1| over ``N_list`` by
    least squares in log-log.  The region of z must not change across
    ``N_list``.  For a < 1 in Ext the error should be smaller than any
    power; the record then reports whether it stayed below the (tiny)
    relative size of the interior term.
    """
    from .lax import synthesize
    from .poly import evaluate

    _check_a(params)
    ctx = ctx or PrecisionContext(512)
    N_list = [int(n) for n in N_list]
    if len(N_list) < 2 or min(N_list) < 1:
        raise DomainError("N_list needs at least two positive integers")
    theorem = _resolve_theorem(params, theorem)
    skeleton = trace_skeleton(params)
    region = classify_for_asymptotics(params, spec, skeleton, z)
    errs, phase_ok, tiny = [], True, []
    for N in N_list:
        p = ProblemParams(params.a, params.c, N)
        if classify_for_asymptotics(p, spec, skeleton, z) != region:
            raise ProtocolError("z changes region across N_list")
        pred = predict(p, spec, z, theorem, region=region, ctx=ctx)
        poly = synthesize(p, N, mode, ctx)[-1]
        truth = evaluate(poly, z, ctx)
        with ctx.workprec(16):
            q = truth / pred.value
            err = abs(mp.expm1(q.log()))
            mag_err = abs(mp.expm1(q.log_mag))
            phase_err = abs(q.phase)
            # a branch slip shows up as a phase error far above the size error
            if phase_err > 10 * mag_err + mp.mpf(10) ** -12 and err > mp.mpf("0.5"):
                phase_ok = False
            errs.append(float(err))
            if region == "Ext" and params.a < 1:
                ratio = _int_term(p, mp.mpc(z)) / _ext_term(p, mp.mpc(z))
                tiny.append(float(mp.exp(ratio.log_mag)) if not ratio.is_zero() else 0.0)
    eo = expected_order(params, region, theorem)
    superpoly = None
    fitted = _fit_order(N_list, errs)
    if math.isinf(eo):
        floor = 2.0 ** (-ctx.mantissa_bits / 2)
        superpoly = all(e <= 10 * t + floor for e, t in zip(errs, tiny))
        fitted = None
    zc = complex(z)
    return ValidationRecord(params.af, params.cf, zc, region, theorem, N_list, errs, fitted, eo, phase_ok, superpoly, {"int_over_ext": tiny} if tiny else {})


def eta_rhs_limit(eta, N):
    """(1/N) ln Gamma(e^{-eta N}), which tends to eta as N grows."""
    with mp.workprec(128):
        c = mp.exp(-mp.mpf(eta) * N)
        return float(mp.loggamma(c) / N)
