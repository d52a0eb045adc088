import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarop.errors import ContourCollisionError, DomainError
from planarop.mpnum import (
    Circle,
    LogComplex,
    PrecisionContext,
    contour_quadrature,
    fhat,
    hankel_ck,
    hankel_loop_integral,
    log_gamma,
    pochhammer,
    weber_D,
    weber_D_asymptotic,
    weber_connection_residuals,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
nonzero_complex = st.builds(complex, finite, finite).filter(lambda z: abs(z) > 1e-6)


@settings(max_examples=60, deadline=None)
@given(nonzero_complex, nonzero_complex)
def test_logcomplex_mul_div_match_complex(x, y):
    with mp.workprec(120):
        X, Y = LogComplex.from_complex(x), LogComplex.from_complex(y)
        assert abs((X * Y).to_complex() - mp.mpc(x) * y) <= 1e-25 * abs(x * y)
        assert abs((X / Y).to_complex() - mp.mpc(x) / y) <= 1e-25 * abs(x / y)


@settings(max_examples=60, deadline=None)
@given(nonzero_complex, nonzero_complex)
def test_logcomplex_add_matches_complex(x, y):
    with mp.workprec(120):
        s = (LogComplex.from_complex(x) + LogComplex.from_complex(y)).to_complex()
        assert abs(s - (mp.mpc(x) + y)) <= 1e-25 * (abs(x) + abs(y))


def test_logcomplex_huge_magnitudes_stay_finite():
    big = LogComplex(mp.mpf(10) ** 6, 0.3)
    assert (big * big).log_mag == 2 * mp.mpf(10) ** 6
    # cancels to rounding level, far below either operand
    assert (big - big).log_mag < big.log_mag - 30


def test_precision_context_validation():
    with pytest.raises(DomainError):
        PrecisionContext(32)
    assert PrecisionContext(128).eps == mp.ldexp(1, -120)


def test_log_gamma_and_pochhammer_against_mpmath():
    with mp.workprec(200):
        assert abs(log_gamma(mp.mpf("7.25"), PrecisionContext(200)) - mp.loggamma(mp.mpf("7.25"))) < mp.mpf(10) ** -55
        assert pochhammer(mp.mpf("0.5"), 4) == mp.rf(mp.mpf("0.5"), 4)


def test_contour_quadrature_residue():
    ctx = PrecisionContext(128, 64)
    val = contour_quadrature(lambda z: 1 / (z - mp.mpf("0.2")), Circle(0, 1), ctx)
    with mp.workprec(128):
        assert abs(val - 2j * mp.pi) < 1e-30


@pytest.mark.parametrize("c", [0.3, 1, 2.5])
@pytest.mark.parametrize("zeta", [0.5, 2 + 1j, -1 + 0.5j, 3j])
def test_weber_D_matches_mpmath_pcfd(c, zeta):
    ctx = PrecisionContext(128)
    with mp.workprec(160):
        ref = mp.pcfd(-mp.mpf(c), mp.mpc(zeta))
    got = weber_D(c, zeta, ctx)
    assert abs(got - ref) <= mp.mpf(10) ** -30 * max(1, abs(ref))


def test_weber_D_c1_is_scaled_erfc():
    with mp.workprec(128):
        z = mp.mpf(2)
        ref = mp.exp(z * z / 4) * mp.sqrt(mp.pi / 2) * mp.erfc(z / mp.sqrt(2))
    assert abs(weber_D(1, 2, PrecisionContext(128)) - ref) < 1e-30


def test_weber_D_domain():
    with pytest.raises(DomainError):
        weber_D(-1.5, 1)


def test_weber_asymptotic_within_bound():
    ctx = PrecisionContext(128)
    for zeta in (6, 5 + 3j, 8 - 5j):
        v, b = weber_D_asymptotic(0.4, zeta, 6, ctx)
        assert abs(weber_D(0.4, zeta, ctx) - v) <= b


def test_weber_asymptotic_refuses_left_half_plane():
    with pytest.raises(DomainError):
        weber_D_asymptotic(0.4, -5, 4)


def test_connection_identities():
    for c, z in ((0.3, 1 + 1j), (1, 0.7 - 0.2j)):
        assert max(weber_connection_residuals(c, z, PrecisionContext(128))) < 1e-25


def test_fhat_c1_is_reciprocal():
    v = fhat(1, 5)
    with mp.workprec(256):
        assert abs(v - mp.mpf(1) / 5) < 1e-40


def test_fhat_cut_and_collision():
    with pytest.raises(DomainError):
        fhat(0.5, -2)
    with pytest.raises(ContourCollisionError):
        fhat(0.5, mp.mpf(2) * mp.expjpi(1 - 0.2 / math.pi))


def test_fhat_large_zeta_series():
    ctx = PrecisionContext(128)
    zeta = mp.mpf(50)
    series = sum(hankel_ck(0.5, k, ctx) / zeta**k for k in range(1, 6))
    assert abs(fhat(0.5, zeta, ctx) - series) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_hankel_ck_quadrature_vs_formula(k):
    ctx = PrecisionContext(128)
    c = mp.mpf("0.3")
    with ctx.workprec(16):
        q = hankel_loop_integral(lambda s: mp.exp(s) * mp.power(s, k - 1 - c), ctx) / (2j * mp.pi)
    assert abs(q - hankel_ck(c, k, ctx)) <= 1e-25 * abs(hankel_ck(c, k, ctx))


def test_hankel_c1_is_reciprocal_gamma():
    v = hankel_ck(0.5, 1)
    with mp.workprec(256):
        assert abs(v - 1 / mp.sqrt(mp.pi)) < 1e-40
