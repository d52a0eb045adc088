"""The eleven acceptance criteria, one test each.

Every test prints a single ``criterion k: PASS|FAIL`` line (also collected
in the terminal summary) and then asserts the same verdict, so a failing
criterion fails the run.  Wall time counts against each budget.

Run directly with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import mpmath as mp
import numpy as np
import pytest

from planarop.asym import RegionSpec, validate
from planarop.errors import DomainError
from planarop.gammafam import droplet_boundary, phi_gamma, residues, solve_gamma_params, trace_S_gamma
from planarop.geometry import (
    PlanarCurve,
    ProblemParams,
    default_d_beta_radius,
    distance_to_curve,
    eta_curve,
    hausdorff,
    mu_on_skeleton,
    trace_skeleton,
)
from planarop.lax import initial_state, synthesize
from planarop.mpnum import (
    PrecisionContext,
    fhat,
    hankel_ck,
    hankel_loop_integral,
    weber_connection_residuals,
    weber_D,
    weber_D_asymptotic,
)
from planarop.oracle import gram_schmidt, perturbed_moments
from planarop.zeros import find_roots, zero_curve_stats


def _max_rel(P, Q):
    scale = max(abs(x) for x in Q.coeffs)
    return max(abs(x - y) for x, y in zip(P.coeffs, Q.coeffs)) / scale


class _Clock:
    def __init__(self, budget):
        self.budget = budget
        self.t0 = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0

    def ok(self):
        return self.elapsed < self.budget

    def __str__(self):
        return f"[{self.elapsed:.1f}s / {self.budget:.0f}s]"


def _finish(report, number, ok, detail, clock):
    ok = bool(ok) and clock.ok()
    report(number, ok, f"{detail} {clock}")
    assert ok, detail


def test_criterion_01_oracle_equivalence(report, sqrt2):
    clock = _Clock(30)
    ctx, hi = PrecisionContext(256), PrecisionContext(512)
    worst = mp.mpf(0)
    for n in range(1, 21):
        p = ProblemParams(sqrt2, 1, n)
        lax = synthesize(p, n, ctx=ctx)[-1]
        gs, _ = gram_schmidt(perturbed_moments(p, n + 1, mode="closed_form", ctx=hi), n, hi)
        with mp.workprec(256):
            worst = max(worst, _max_rel(lax, gs[n]))
    _finish(report, 1, worst <= 1e-20, f"max rel err over n<=20 (N=n) = {mp.nstr(worst, 3)} (need <= 1e-20)", clock)


def test_criterion_02_initial_conditions(report, sqrt2):
    clock = _Clock(5)
    ctx = PrecisionContext(256)
    N = 20
    s1 = initial_state(ProblemParams(sqrt2, 1, N), "contour", ctx)
    s0 = initial_state(ProblemParams(sqrt2, 0, N), "contour", ctx)
    with mp.workprec(256):
        e1 = max(abs(s1.b_n - sqrt2), abs(s1.beta_n - (1 + 2 * N)))
        e0 = max(abs(s0.b_n), abs(s0.beta_n - 1))
    try:
        initial_state(ProblemParams(sqrt2, mp.mpf("0.6"), N), "paper")
        refused = False
    except DomainError:
        refused = True
    ok = e1 < 1e-12 and e0 < 1e-12 and refused
    _finish(report, 2, ok, f"c=1 err {mp.nstr(e1, 3)}, c=0 err {mp.nstr(e0, 3)}, paper refused at c=0.6: {refused}", clock)


def test_criterion_03_general_c(report, sqrt2):
    clock = _Clock(60)
    ctx = PrecisionContext(256)
    n = 8
    p = ProblemParams(sqrt2, mp.mpf("0.6"), n)
    lax = synthesize(p, n, "contour", ctx)
    gs, _ = gram_schmidt(perturbed_moments(p, n + 1, mode="quadrature", ctx=ctx), n, ctx)
    with mp.workprec(256):
        worst = max(_max_rel(lax[k], gs[k]) for k in range(1, n + 1))
    _finish(report, 3, worst <= 1e-6, f"c=0.6, N=8, max rel err over n<=8 = {mp.nstr(worst, 3)} (need <= 1e-6)", clock)


def test_criterion_04_closures(report, sqrt2):
    clock = _Clock(10)
    p = ProblemParams(sqrt2, 1, 300)
    _, states = synthesize(p, 300, ctx=PrecisionContext(256), return_states=True)
    det_worst = uni_worst = mp.mpf(0)
    with mp.workprec(1024):
        for s, t in zip(states, states[1:]):
            # det [[z + a_{n+1} - a_n, -b_n], [c_{n+1}, 1]] = z + (a_{n+1} - a_n) + b_n c_{n+1}
            da, bc = t.a_n - s.a_n, s.b_n * t.c_n
            det_worst = max(det_worst, abs(da + bc) / max(abs(da), abs(bc), 1))
        for s in states:
            uni_worst = max(uni_worst, s.unimodularity_defect() / max(1, abs(s.alpha_n * s.eta_n)))
    ok = len(states) == 301 and det_worst < 1e-20 and uni_worst < 1e-20
    _finish(report, 4, ok, f"300 steps: det M_n - z rel {mp.nstr(det_worst, 3)}, unimodularity {mp.nstr(uni_worst, 3)} (need < 1e-20)", clock)


def test_criterion_05_zero_geometry(report, sqrt2):
    clock = _Clock(600)
    ctx = PrecisionContext(512)
    med, mx = {}, {}
    for n in (80, 200):
        p = ProblemParams(sqrt2, 1, n)
        roots = find_roots(synthesize(p, n, ctx=ctx)[-1], ctx).as_array()
        d = distance_to_curve(trace_skeleton(p), roots)
        mx[n], med[n] = float(np.max(d)), float(np.median(d))
    seen = med[80] / med[200]
    rate = (math.log(80) / 80) / (math.log(200) / 200)
    ok = mx[80] < 0.2 and mx[200] < mx[80] and 0.5 <= seen / rate <= 2
    _finish(
        report,
        5,
        ok,
        f"max dist n=80 {mx[80]:.4f}, n=200 {mx[200]:.4f}; median ratio {seen:.3f} vs log N/N ratio {rate:.3f}",
        clock,
    )


def _side_fractions(a, c, n, ctx):
    p = ProblemParams(a, c, n)
    roots = find_roots(synthesize(p, n, ctx=ctx)[-1], ctx)
    sk = trace_skeleton(p)
    st = zero_curve_stats(roots, sk, sk, p.betaf, default_d_beta_radius(p))
    return st["frac_ext"], st["frac_int"]


def test_criterion_06_side_law(report, sqrt2, inv_sqrt2):
    clock = _Clock(1800)
    ctx = PrecisionContext(512)
    cases = [(sqrt2, 1, "Ext"), (sqrt2, mp.mpf("0.25"), "Int"), (inv_sqrt2, 2, "Ext"), (inv_sqrt2, mp.mpf("0.5"), "Int")]
    parts, ok = [], True
    for a, c, want in cases:
        fe, fi = _side_fractions(a, c, 200, ctx)
        frac = fe if want == "Ext" else fi
        ok &= frac >= 0.9
        parts.append(f"a={float(a):.3f} c={float(c)}: {want} {frac:.3f}")
    _finish(report, 6, ok, "; ".join(parts) + " (need >= 0.9)", clock)


def test_criterion_07_eta_scaling(report, sqrt2):
    clock = _Clock(120)
    n, eta = 60, 0.4
    ctx = PrecisionContext(256)
    with mp.workprec(256):
        c = mp.exp(-mp.mpf(eta) * n)
    p = ProblemParams(sqrt2, c, n)
    roots = find_roots(synthesize(p, n, ctx=ctx)[-1], ctx).as_array()
    d_eta = float(np.median(distance_to_curve(eta_curve(p, eta), roots)))
    d_sk = float(np.median(distance_to_curve(trace_skeleton(p), roots)))
    ok = d_eta < 0.05 and d_eta < d_sk
    _finish(report, 7, ok, f"median distance to Re phi=0.4 curve {d_eta:.4f}, to skeleton {d_sk:.4f}", clock)


def test_criterion_08_special_functions(report):
    clock = _Clock(120)
    ctx = PrecisionContext(128)
    rng = np.random.default_rng(20240611)
    inside, tried = 0, 0
    while tried < 50:
        c = float(rng.uniform(-0.5, 2.0))
        r = float(rng.uniform(3.0, 12.0))
        th = float(rng.uniform(-0.45, 0.45)) * math.pi
        zeta = mp.mpc(r * math.cos(th), r * math.sin(th))
        terms = int(rng.integers(2, 9))
        try:
            v, bound = weber_D_asymptotic(c, zeta, terms, ctx)
        except DomainError:
            continue
        tried += 1
        inside += abs(weber_D(c, zeta, ctx) - v) <= bound
    conn = max(max(weber_connection_residuals(c, z, ctx)) for c, z in ((0.3, 1 + 1j), (1, 0.7 - 0.2j), (-0.4, 2 - 1j), (1.7, -0.5 + 0.8j)))
    cq = mp.mpf("0.3")
    ck_err = mp.mpf(0)
    for k in range(1, 5):
        with ctx.workprec(16):
            q = hankel_loop_integral(lambda s: mp.exp(s) * mp.power(s, k - 1 - cq), ctx) / (2j * mp.pi)
        ref = hankel_ck(cq, k, ctx)
        ck_err = max(ck_err, abs(q - ref) / abs(ref))
    fh = abs(fhat(1, 5, ctx) - mp.mpf("0.2"))
    ok = inside == 50 and conn < 1e-12 and ck_err < 1e-10 and fh < 1e-12
    detail = f"asymptotic within bound {inside}/50; connection residual {mp.nstr(conn, 3)}; c_k rel err {mp.nstr(ck_err, 3)}; |fhat(5)-0.2| {mp.nstr(fh, 3)}"
    _finish(report, 8, ok, detail, clock)


def test_criterion_09_order_fits(report, sqrt2, inv_sqrt2):
    clock = _Clock(600)
    spec, Ns = RegionSpec(), [50, 100, 200]
    ext = validate(ProblemParams(sqrt2, 1, 1), spec, 2, Ns)
    intr = validate(ProblemParams(inv_sqrt2, 1, 1), spec, mp.mpf("0.2"), Ns)
    uni = validate(ProblemParams(sqrt2, mp.mpf("0.4"), 1), spec, 2, Ns, theorem="uniform_c")
    checks = [
        ("Ext a=sqrt2", ext, 0.7, 1.3, "Ext"),
        ("Int a=1/sqrt2", intr, 0.7, 1.3, "Int"),
        ("uniform c=0.4", uni, 0.6, 1.2, "Ext"),
    ]
    parts, ok = [], True
    for name, rec, lo, hi, region in checks:
        good = rec.region == region and rec.fitted_order is not None and lo <= rec.fitted_order <= hi and rec.phase_ok
        ok &= good
        fo = "n/a" if rec.fitted_order is None else f"{rec.fitted_order:.3f}"
        parts.append(f"{name}: order {fo} in [{lo}, {hi}] {'ok' if good else 'MISS'}")
    _finish(report, 9, ok, "; ".join(parts), clock)


def test_criterion_10_geometry_identities(report, sqrt2):
    clock = _Clock(120)
    p = ProblemParams(sqrt2, 1, 100)
    sk = trace_skeleton(p)
    m = mu_on_skeleton(p, sk)
    mass = abs(m.total_mass() - 1)
    z = sk.points
    # the density vanishes at beta = 1/a, so scale by its maximum
    exact = np.abs(p.af - 1 / z)
    dens = float(np.max(np.abs(2 * math.pi * m.density - exact)) / np.max(exact))
    level = float(np.max(np.abs(np.log(np.abs(z)) - p.af * z.real - p.ellf)))
    gp = solve_gamma_params(sqrt2, mp.mpf("0.05"))
    with mp.workdps(30):
        lem = abs(phi_gamma(gp, gp.beta_gamma_conj, dps=30) + 2j * mp.pi)
    r0, ra, rinf = residues(gp)
    with mp.workprec(128):
        res = max(abs(r0 - (1 + gp.gamma)), abs(ra + gp.gamma), abs(rinf - 1))
    ok = mass < 1e-6 and dens < 1e-12 and level < 1e-12 and lem < 1e-8 and res < 1e-10
    detail = (
        f"mass err {mass:.2e}; density err {dens:.2e}; level residual {level:.2e}; "
        f"|phi_gamma(conj beta)+2 pi i| {mp.nstr(lem, 3)}; residue err {mp.nstr(res, 3)}"
    )
    _finish(report, 10, ok, detail, clock)


def test_criterion_11_gamma_trends(report, sqrt2, inv_sqrt2):
    clock = _Clock(300)
    gammas = (0.1, 0.05, 0.02, 0.01)
    circle = PlanarCurve(np.exp(2j * np.pi * np.arange(4096) / 4096), True)
    parts, ok = [], True
    for a, name in ((sqrt2, "sqrt2"), (inv_sqrt2, "1/sqrt2")):
        sk = trace_skeleton(ProblemParams(a, 1, 1))
        hs, hd = [], []
        for g in gammas:
            gp = solve_gamma_params(a, g)
            hs.append(hausdorff(trace_S_gamma(gp), sk))
            hd.append(hausdorff(droplet_boundary(gp)[0], circle))
        dec = all(x > y for x, y in zip(hs, hs[1:])) and all(x > y for x, y in zip(hd, hd[1:]))
        ok &= dec
        parts.append(f"a={name}: skeleton " + ",".join(f"{h:.3f}" for h in hs) + " droplet " + ",".join(f"{h:.3f}" for h in hd))
    _finish(report, 11, ok, "; ".join(parts), clock)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
