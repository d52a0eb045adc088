import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarop.errors import DomainError
from planarop.geometry import ProblemParams
from planarop.mpnum import PrecisionContext
from planarop.oracle import MomentTable, gaussian_moment, gram_schmidt, perturbed_moments


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.integers(0, 12), st.integers(1, 50))
def test_gaussian_moments_are_diagonal(j, k, N):
    # int z^j conj(z)^k e^{-N|z|^2} dA = delta_jk pi k!/N^{k+1}
    with mp.workprec(128):
        m = gaussian_moment(j, k, N)
        if j != k:
            assert m == 0
        else:
            assert abs(m - mp.pi * mp.factorial(k) / mp.mpf(N) ** (k + 1)) <= 1e-30 * abs(m)


def test_c0_gram_schmidt_gives_monomials(ctx256):
    p = ProblemParams(2, 0, 7)
    polys, norms = gram_schmidt(perturbed_moments(p, 6, ctx=ctx256), 5, ctx256)
    for n, P in enumerate(polys):
        assert all(abs(x) < 1e-60 for x in P.coeffs[:-1])
    with mp.workprec(256):
        for n, h in enumerate(norms):
            assert abs(h - mp.pi * mp.factorial(n) / mp.mpf(7) ** (n + 1)) < 1e-60 * h


def test_moment_table_hermitian_and_json_roundtrip(sqrt2, ctx256):
    t = perturbed_moments(ProblemParams(sqrt2, 1, 20), 6, ctx=ctx256)
    assert t.max_hermitian_defect() < mp.mpf(10) ** -70
    back = MomentTable.from_json(t.to_json())
    with mp.workprec(256):
        assert max(abs(back[j, k] - t[j, k]) for j in range(6) for k in range(6)) <= mp.mpf(10) ** -70 * abs(t[0, 0])


def test_quadrature_matches_closed_form(sqrt2, ctx256):
    p = ProblemParams(sqrt2, 2, 10)
    exact = perturbed_moments(p, 5, mode="closed_form", ctx=ctx256)
    quad = perturbed_moments(p, 5, mode="quadrature", ctx=ctx256)
    scale = abs(exact[0, 0])
    assert max(abs(exact[j, k] - quad[j, k]) for j in range(5) for k in range(5)) < 1e-11 * scale


def test_c1_first_polynomial(sqrt2, ctx256):
    # P_1 = z - m[1][0]/m[0][0]; for c = 1 the moments are elementary:
    # m00 = pi(1/N^2 + a^2/N), m10 = -a pi/N^2, hence P_1(0) = a/(1 + a^2 N).
    N = 20
    p = ProblemParams(sqrt2, 1, N)
    polys, _ = gram_schmidt(perturbed_moments(p, 3, ctx=ctx256), 1, ctx256)
    with mp.workprec(256):
        assert abs(polys[1].coeffs[0] - sqrt2 / (1 + 2 * N)) < mp.mpf(10) ** -70


def test_size_limit_and_closed_form_needs_integer_c(sqrt2):
    with pytest.raises(DomainError):
        perturbed_moments(ProblemParams(sqrt2, 0.5, 10), 4, mode="closed_form")
    with pytest.raises(DomainError):
        perturbed_moments(ProblemParams(sqrt2, 1, 10), 1000)
