"""Coefficient recurrence from the Lax pair, and polynomial synthesis.

The state (a_n, b_n, alpha_n, beta_n, gamma_n, eta_n, c_n) collects the
1/z-expansion coefficients of the Riemann-Hilbert solution at step n.
One step maps it to step n+1; the first row of the transfer matrix
then builds P_{n+1} from P_n and the companion polynomial Q_{n-1}.

The forward recurrence loses bits steadily (hundreds over 300 steps at
c = 1), so :func:`synthesize` measures the loss by running the scalar
recurrence at two precisions and reruns with enough guard bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import mpmath as mp

from .errors import DegenerateStateError, DomainError, PrecisionError
from .io import fmt_real
from .mpnum import DEFAULT_CONTEXT, Circle, PrecisionContext, contour_quadrature
from .poly import ScaledPolynomial, evaluate

__all__ = [
    "CoeffState",
    "ScaledPolynomial",
    "weight_omega",
    "initial_state",
    "step",
    "run_states",
    "estimate_bits_lost",
    "synthesize",
    "evaluate",
    "coeffs_csv_rows",
    "trace_csv_rows",
    "MODES",
]

MODES = ("paper", "contour", "oracle")

_FIELDS = ("a_n", "b_n", "alpha_n", "beta_n", "gamma_n", "eta_n", "c_n")


@dataclass(frozen=True)
class CoeffState:
    n: int
    a_n: mp.mpf
    b_n: mp.mpf
    alpha_n: mp.mpf
    beta_n: mp.mpf
    gamma_n: mp.mpf
    eta_n: mp.mpf
    c_n: mp.mpf

    def unimodularity_defect(self):
        return abs(self.alpha_n * self.eta_n - self.beta_n * self.gamma_n - 1)

    def values(self):
        return [getattr(self, f) for f in _FIELDS]


def _on_cut(w, a):
    return w.imag == 0 and 0 <= w.real <= a


def weight_omega(params, n, w):
    """((w-a)/w)^c e^{-N a w} / w^n, principal branch, cut on [0, a]."""
    w = mp.mpmathify(w)
    a, c, N = params.a, params.c, params.N
    if _on_cut(mp.mpc(w), a):
        raise DomainError("weight_omega: w lies on the branch cut [0, a]")
    return mp.power((w - a) / w, c) * mp.exp(-N * a * w) / w**n


def _contour_bits(params, ctx):
    # max |e^{-Naw}| on the circle is e^{0.1 N a}
    na = float(params.N * params.a)
    return max(ctx.mantissa_bits, 64 + int(math.ceil(1.5 * na * 0.1 / math.log(2)))) + int(
        math.ceil(0.1 * na / math.log(2))
    )


def initial_state(params, mode="auto", ctx=None):
    """Step-0 state.  a_0 = 0, alpha_0 = 1, gamma_0 = 0, eta_0 = 1, c_0 = 0.

    ``paper`` uses b_0 = a and beta_0 = 1 + a^2 N, valid only for c = 1.
    ``contour`` evaluates the two defining contour integrals of the weight
    on the circle |w - a/2| = a/2 + 0.1.  ``oracle`` takes the first norm
    and P_1 from the moment oracle.
    """
    ctx = ctx or DEFAULT_CONTEXT
    mode = resolve_mode(params, mode)
    with ctx.workprec(16):
        a, c, N = params.a, params.c, params.N
        if mode == "paper":
            if c != 1:
                raise DomainError(
                    "paper initial data b0 = a, beta0 = 1 + a^2 N holds only for c = 1; "
                    "use --init contour or --init oracle"
                )
            b0, beta0 = +a, 1 + a * a * N
        elif mode == "contour":
            b0, beta0 = _contour_init(params, ctx)
        else:
            b0, beta0 = _oracle_init(params, ctx)
        return CoeffState(0, mp.mpf(0), +b0, mp.mpf(1), +beta0, mp.mpf(0), mp.mpf(1), mp.mpf(0))


def resolve_mode(params, mode):
    if mode == "auto":
        if params.c == 1:
            return "paper"
        if mp.isint(params.c) and params.c >= 0:
            return "oracle"
        return "contour"
    if mode not in MODES:
        raise DomainError(f"unknown init mode {mode!r}")
    return mode


def _contour_init(params, ctx):
    bits = _contour_bits(params, ctx)
    qctx = PrecisionContext(bits, max(ctx.quadrature_nodes, 256))
    a, c, N = params.a, params.c, params.N
    with qctx.workprec(16):
        circ = Circle(a / 2, a / 2 + mp.mpf(1) / 10)

        cache = {}

        def omega(w):
            # both integrals sample the same nodes
            v = cache.get(w)
            if v is None:
                v = cache[w] = mp.power((w - a) / w, c) * mp.exp(-N * a * w)
            return v

        two_pi_i = 2j * mp.pi
        I0 = contour_quadrature(omega, circ, qctx, max_nodes=1 << 18)
        I1 = contour_quadrature(lambda w: omega(w) / w, circ, qctx, max_nodes=1 << 18)
        return mp.re(-I0 / two_pi_i), mp.re(I1 / two_pi_i)


def _oracle_init(params, ctx):
    from .oracle import gram_schmidt, perturbed_moments

    mom = perturbed_moments(params, 2, ctx=ctx)
    polys, norms = gram_schmidt(mom, 1, ctx)
    a, c, N = params.a, params.c, params.N
    beta0 = N ** (1 + c) * norms[0] / (mp.pi * mp.gamma(1 + c))
    b0 = beta0 * mp.re(polys[1].coeffs[0])
    return b0, beta0


def step(state, params):
    """One application of the coefficient recurrence."""
    n = state.n
    a, c, N = params.a, params.c, params.N
    an, bn, al, be, ga, cn = state.a_n, state.b_n, state.alpha_n, state.beta_n, state.gamma_n, state.c_n
    if al == 0 or be == 0:
        raise DegenerateStateError(f"alpha_n beta_n vanishes at n={n}", n)
    D = 1 + be * ga
    ab = al * be
    b1 = (1 + n + a * a * N) * bn / (a * N) - (c + n) * ab / N + bn * bn * D / ab
    be1 = be - (
        N * a * a * al * bn * be * D + N * a * al * al * bn * be * be * cn + N * a * bn * bn * D * D + al * bn * be * n * D
    ) / (a * al * al * be * (c + n + 1))
    a1 = an + bn * D / ab
    al1 = bn / be
    ga1 = -1 / be
    c1 = -D / ab
    if al1 == 0:
        raise DegenerateStateError(f"alpha_{n + 1} vanishes (b_n = 0) at n={n}", n)
    eta1 = (1 + be1 * ga1) / al1
    return CoeffState(n + 1, a1, b1, al1, be1, ga1, eta1, c1)


def run_states(params, n_max, mode="auto", ctx=None, init=None):
    """States 0..n_max at the precision of ``ctx`` (no loss control)."""
    ctx = ctx or DEFAULT_CONTEXT
    with ctx.workprec(16):
        if init is None:
            s = initial_state(params, mode, ctx)
        else:
            s = CoeffState(0, *[+x for x in init.values()])
        out = [s]
        for _ in range(int(n_max)):
            s = step(s, params)
            out.append(s)
        return out


def _rel(x, y):
    scale = max(abs(x), abs(y))
    return mp.mpf(0) if scale == 0 else abs(x - y) / scale


def estimate_bits_lost(params, n_max, mode="auto", ctx=None, init=None):
    """Bits lost by the recurrence through step n_max, measured by comparison.

    Runs from the same initial state at ``bits`` and ``bits + 64``; the
    disagreement tells how many of the lower run's bits survived.
    """
    ctx = ctx or DEFAULT_CONTEXT
    if init is None:
        init = initial_state(params, mode, ctx.with_bits(ctx.mantissa_bits + 64))
    lo = run_states(params, n_max, mode, ctx, init)
    hi = run_states(params, n_max, mode, ctx.with_bits(ctx.mantissa_bits + 64), init)
    worst = mp.mpf(0)
    with ctx.workprec(80):
        for s, t in zip(lo, hi):
            for x, y in zip(s.values()[:5], t.values()[:5]):
                worst = max(worst, _rel(x, y))
    if worst == 0:
        return 0
    good = -float(mp.log(worst, 2))
    return max(0, int(math.ceil(ctx.mantissa_bits + 16 - good)))


def synthesize(params, n_max, mode="auto", ctx=None, return_states=False, adaptive=True):
    """Monic P_0..P_{n_max} from the recurrence.

    P_{n+1} = (z + a_{n+1} - a_n) P_n - b_n Q_{n-1} and
    Q_n = c_{n+1} P_n + Q_{n-1}, with P_0 = 1, Q_{-1} = 0.  For c = 0 the
    weight is radial and P_n = z^n exactly.  With ``adaptive`` the working
    precision is raised by the measured recurrence loss so the output
    carries the requested mantissa bits.
    """
    ctx = ctx or DEFAULT_CONTEXT
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if params.c == 0:
        polys = [ScaledPolynomial([mp.mpf(0)] * k + [mp.mpf(1)]) for k in range(n_max + 1)]
        if return_states:
            return polys, None
        return polys
    work = ctx
    init = None
    if adaptive:
        trial = ctx
        while True:
            probe = trial.with_bits(trial.mantissa_bits + 64)
            init = initial_state(params, mode, probe)
            lost = estimate_bits_lost(params, n_max, mode, trial, init)
            # a saturated estimate only says "everything"; try wider
            if lost < trial.mantissa_bits - 32:
                break
            if trial.mantissa_bits > 1 << 16:
                raise PrecisionError("recurrence loses more than 65536 bits")
            trial = trial.with_bits(2 * trial.mantissa_bits)
        work = ctx.with_bits(ctx.mantissa_bits + lost + 32)
        if work.mantissa_bits > probe.mantissa_bits:
            init = None
    states = run_states(params, n_max, mode, work, init)
    with work.workprec(16):
        P = [mp.mpf(1)]
        Q = []
        polys = [ScaledPolynomial([mp.mpf(1)])]
        for n in range(n_max):
            s, s1 = states[n], states[n + 1]
            da = s1.a_n - s.a_n
            newP = [mp.mpf(0)] + P
            for k, p in enumerate(P):
                newP[k] += da * p
            for k, q in enumerate(Q):
                newP[k] -= s.b_n * q
            cn1 = s1.c_n
            newQ = [cn1 * p for p in P]
            for k, q in enumerate(Q):
                newQ[k] += q
            P, Q = newP, newQ
            P[-1] = mp.mpf(1)
            polys.append(ScaledPolynomial(P))
    with ctx.workprec():
        polys = [ScaledPolynomial([+x for x in p.coeffs]) for p in polys]
    if return_states:
        return polys, states
    return polys


def coeffs_csv_rows(poly, digits=None):
    rows = []
    for k, x in enumerate(poly.coeffs):
        # no mpc(): the constructor would round to the global precision
        re, im = (x.real, x.imag) if isinstance(x, mp.mpc) else (x, mp.mpf(0))
        rows.append([k, fmt_real(re, digits), fmt_real(im, digits)])
    return rows


def trace_csv_rows(states, digits=None):
    return [
        [s.n] + [fmt_real(getattr(s, f), digits) for f in ("a_n", "b_n", "alpha_n", "beta_n", "gamma_n", "c_n")]
        for s in states
    ]
