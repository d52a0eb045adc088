import json
import math

import mpmath as mp
import numpy as np
import pytest

from planarop.asym import (
    RegionSpec,
    classify_for_asymptotics,
    eta_rhs_limit,
    expected_order,
    predict,
    validate,
    zeta_map,
)
from planarop.errors import DomainError
from planarop.geometry import ProblemParams, g_function, trace_skeleton, zero_attraction_curve
from planarop.mpnum import PrecisionContext


@pytest.fixture(scope="module")
def big_sk(sqrt2):
    p = ProblemParams(sqrt2, 1, 100)
    return p, trace_skeleton(p)


def test_zeta_vanishes_at_beta_and_refuses_far_points(sqrt2):
    p = ProblemParams(sqrt2, 1, 100)
    assert zeta_map(p, p.beta) == 0
    with pytest.raises(DomainError):
        zeta_map(p, 2)


@pytest.mark.parametrize("a_key", ["sqrt2", "inv_sqrt2"])
def test_zeta_derivative_at_beta(a_key, request):
    a = request.getfixturevalue(a_key)
    N = 100
    p = ProblemParams(a, 1, N)
    with mp.workprec(256):
        h = mp.mpf(10) ** -20
        d = (zeta_map(p, p.beta + h) - zeta_map(p, p.beta - h)) / (2 * h)
        want = a * mp.sqrt(N) if a > 1 else (1 - a * a) * N / a
        assert abs(d - want) < 1e-10 * abs(want)


def test_injectivity_check_passes_for_defaults(sqrt2, inv_sqrt2):
    for a in (sqrt2, inv_sqrt2):
        assert RegionSpec().check_injective(ProblemParams(a, 1, 100))
    with pytest.raises(DomainError):
        RegionSpec(d_beta_radius=-1)


def test_classify_examples(big_sk):
    p, sk = big_sk
    spec = RegionSpec()
    assert classify_for_asymptotics(p, spec, sk, p.betaf) == "D_beta"
    assert classify_for_asymptotics(p, spec, sk, 2) == "Ext"
    top = sk.points[np.argmin(np.abs(np.angle(sk.points) - math.pi / 2))]
    assert classify_for_asymptotics(p, spec, sk, top) == "U_band"


def test_ext_log_magnitude(sqrt2, big_sk):
    p, sk = big_sk
    pred = predict(p, RegionSpec(), 2, skeleton=sk)
    assert pred.region == "Ext" and pred.expected_order == 1.0
    with mp.workprec(256):
        b = 1 / sqrt2
        want = 100 * mp.log(2) + mp.log(2 / (2 - b))
        assert abs(pred.value.log_mag - want) < 1e-30


def test_u_band_terms_balance_on_attraction_curve(sqrt2):
    n = 80
    p = ProblemParams(sqrt2, 1, n)
    att = zero_attraction_curve(p, n)
    for z in att.points[::400]:
        pred = predict(p, RegionSpec(), complex(z), region="U_band")
        e, i = pred.dominant_terms
        assert abs(e.log_mag - i.log_mag) < 1e-6
        with mp.workprec(128):
            assert abs((e + i).to_complex() - pred.as_complex()) <= 1e-20 * abs(pred.as_complex())


def test_dbeta_near_zero_c_matches_ext(sqrt2):
    # zeta = 3 inside the disk for N = 100
    p = ProblemParams(sqrt2, mp.mpf("1e-6"), 100)
    with mp.workprec(256):
        z = mp.findroot(lambda w: zeta_map(p, w, radius=mp.inf) - 3, p.beta + mp.mpf(3) / (sqrt2 * 10))
        assert abs(z - p.beta) < RegionSpec().radius(p)
        d = predict(p, RegionSpec(), z, region="D_beta").value
        e = predict(p, RegionSpec(), z, region="Ext").value
        assert abs(mp.expm1((d / e).log_mag)) < 1e-4


def test_dbeta_is_continuous_across_the_segment(inv_sqrt2):
    p = ProblemParams(inv_sqrt2, mp.mpf("0.5"), 60)
    spec = RegionSpec()
    r = spec.radius(p)
    ctx = PrecisionContext(128)
    with mp.workprec(256):
        eps = mp.mpf(10) ** -30
        for t in np.linspace(0.1, 0.9, 10):
            x = p.a - mp.mpf(t) * r
            up = predict(p, spec, mp.mpc(x, eps), region="D_beta", ctx=ctx).as_complex()
            dn = predict(p, spec, mp.mpc(x, -eps), region="D_beta", ctx=ctx).as_complex()
            assert abs(up - dn) <= 1e-8 * abs(up)


def test_int_prefactor_is_g_function(sqrt2):
    p = ProblemParams(sqrt2, 1, 70)
    z = mp.mpc("0.2", "0.1")
    with mp.workprec(256):
        lhs = p.N * mp.log(p.beta) + p.N * p.a * (z - p.beta)
        rhs = p.N * g_function(p, z, "Int")
        assert abs(lhs - rhs) < 1e-20


def test_refusals(sqrt2):
    spec = RegionSpec()
    with pytest.raises(DomainError, match="critical"):
        predict(ProblemParams(1, 1, 10), spec, 2, region="Ext")
    with pytest.raises(DomainError):
        predict(ProblemParams(sqrt2, 1, 10), spec, 0.3, theorem="uniform_c", region="Int")
    with pytest.raises(DomainError):
        predict(ProblemParams(sqrt2, 0, 10), spec, 2, theorem="fixed_c", region="Ext")
    with pytest.raises(DomainError):
        predict(ProblemParams(sqrt2, 1, 10), spec, 2, theorem="bogus", region="Ext")


def test_expected_order_table(sqrt2, inv_sqrt2):
    big, small = ProblemParams(sqrt2, 0.4, 1), ProblemParams(inv_sqrt2, 0.4, 1)
    assert expected_order(big, "Ext", "fixed_c") == 1.0
    assert expected_order(big, "D_beta", "fixed_c") == 0.5
    assert expected_order(small, "Ext", "fixed_c") == math.inf
    assert expected_order(big, "Ext", "uniform_c") == pytest.approx(0.9)
    assert expected_order(small, "U_band", "uniform_c") == pytest.approx(1.6)


def test_eta_rhs_limit():
    assert abs(eta_rhs_limit(0.4, 60) - 0.4) < 0.05


def test_validate_ext_record(sqrt2):
    rec = validate(ProblemParams(sqrt2, 1, 1), RegionSpec(), 2, [30, 60], ctx=PrecisionContext(256))
    assert rec.region == "Ext" and rec.phase_ok
    assert rec.rel_err[1] < rec.rel_err[0]
    d = json.loads(rec.to_json())
    assert set(d) >= {"a", "c", "z", "region", "theorem", "N", "rel_err", "fitted_order", "expected_order", "phase_ok"}
    with pytest.raises(DomainError):
        validate(ProblemParams(sqrt2, 1, 1), RegionSpec(), 2, [30])


def test_validate_small_a_ext_is_superpolynomial(inv_sqrt2):
    rec = validate(ProblemParams(inv_sqrt2, 1, 1), RegionSpec(), 2, [30, 60], ctx=PrecisionContext(256))
    assert rec.expected_order == math.inf
    assert json.loads(rec.to_json())["superpolynomial"] == "yes"


@pytest.mark.slow
@pytest.mark.parametrize("c", [0.5, 2])
def test_small_a_interior_order_is_one(inv_sqrt2, c):
    rec = validate(ProblemParams(inv_sqrt2, c, 1), RegionSpec(), 0.2, [50, 100, 200])
    assert rec.region == "Int"
    assert 0.7 <= rec.fitted_order <= 1.3
