"""Independent ground truth for the orthogonal polynomials.

Moments m[j][k] = integral of z^j conj(z)^k |z-a|^{2c} e^{-N|z|^2} dA are
exact for integer c (binomial expansion into Gaussian moments) and come
from a polar product rule otherwise.  Gram-Schmidt runs on the moment
matrix through a Cholesky factorisation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, PrecisionError
from .io import fmt_real
from .mpnum import DEFAULT_CONTEXT
from .poly import ScaledPolynomial

__all__ = [
    "MomentTable",
    "gaussian_moment",
    "perturbed_moments",
    "gram_schmidt",
    "MAX_SIZE",
]

MAX_SIZE = 64


@dataclass
class MomentTable:
    size: int
    entries: list
    mode: str

    def __getitem__(self, jk):
        j, k = jk
        return self.entries[j][k]

    def to_json(self, digits=None):
        def num(x):
            # avoid mpc(): it would round to the global precision
            re, im = (x.real, x.imag) if isinstance(x, mp.mpc) else (mp.mpmathify(x), mp.mpf(0))
            return {"re": fmt_real(re, digits), "im": fmt_real(im, digits)}

        return json.dumps(
            {"size": self.size, "mode": self.mode, "entries": [[num(x) for x in row] for row in self.entries]},
            indent=1,
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        with mp.workprec(4096):
            ent = [[mp.mpc(mp.mpf(x["re"]), mp.mpf(x["im"])) for x in row] for row in d["entries"]]
        return cls(d["size"], ent, d["mode"])

    def max_hermitian_defect(self):
        worst = mp.mpf(0)
        for j in range(self.size):
            for k in range(j, self.size):
                x, y = self.entries[j][k], mp.conj(self.entries[k][j])
                scale = max(abs(x), abs(y), mp.mpf(10) ** (-mp.mp.dps))
                worst = max(worst, abs(x - y) / scale)
        return worst


def gaussian_moment(j, k, N):
    """pi delta_{jk} k!/N^{k+1}."""
    if j < 0 or k < 0:
        raise DomainError("moment indices must be nonnegative")
    if j != k:
        return mp.mpc(0)
    N = mp.mpf(N)
    return mp.mpc(mp.pi * mp.factorial(k) / N ** (k + 1))


def _is_integer(c):
    return mp.isint(c) and c >= 0


def _closed_form(params, size):
    a, N = params.a, params.N
    c = int(params.c)
    bin_ = [mp.binomial(c, p) * (-a) ** (c - p) for p in range(c + 1)]
    G = {}

    def g(k):
        if k not in G:
            G[k] = mp.pi * mp.factorial(k) / N ** (k + 1)
        return G[k]

    ent = [[mp.mpc(0)] * size for _ in range(size)]
    for j in range(size):
        for k in range(size):
            s = mp.mpf(0)
            # z^{j+p} conj(z)^{k+q} integrates to zero unless j+p == k+q
            for p in range(c + 1):
                q = j + p - k
                if 0 <= q <= c:
                    s += bin_[p] * bin_[q] * g(j + p)
            ent[j][k] = mp.mpc(s)
    return ent


def _quadrature_nodes(params, size, refine):
    a, c, N = params.af, params.cf, params.Nf
    # disk about a that contains the Gaussian mass of every moment
    R0 = math.sqrt(size / N) + math.sqrt((64 + size) * math.log(2) / N)
    R = a + R0
    n_rad = int(refine * max(48, 2 * size + 4 * R * math.sqrt(N) + 24))
    n_ang = int(refine * max(64, 2 * size + math.e * N * a * R + 48))
    x, w = roots_jacobi(n_rad, 0.0, 2 * c + 1)
    rho = 0.5 * R * (1 + x)
    # rho^{2c+1} d rho = (R/2)^{2c+2} (1+x)^{2c+1} dx
    wr = w * (0.5 * R) ** (2 * c + 2)
    phi = 2 * math.pi * np.arange(n_ang) / n_ang
    wphi = 2 * math.pi / n_ang
    z = a + rho[:, None] * np.exp(1j * phi)[None, :]
    wt = wr[:, None] * wphi * np.exp(-N * np.abs(z) ** 2)
    return z.ravel(), wt.ravel()


def _quadrature(params, size, refine=1):
    z, wt = _quadrature_nodes(params, size, refine)
    powers = np.empty((size, z.size), dtype=complex)
    powers[0] = 1.0
    for j in range(1, size):
        powers[j] = powers[j - 1] * z
    m = (powers * wt[None, :]) @ np.conj(powers).T
    return [[mp.mpc(complex(m[j, k])) for k in range(size)] for j in range(size)]


def perturbed_moments(params, size, mode="auto", refine=1, ctx=None):
    """Moment table of the weight |z-a|^{2c} e^{-N|z|^2} up to ``size``.

    ``mode`` is ``closed_form`` (integer c >= 0 only), ``quadrature`` or
    ``auto``.  Quadrature uses polar coordinates centred at a, with
    Gauss-Jacobi nodes carrying the rho^{2c+1} factor and the trapezoid
    rule in angle; it is carried out in double precision and targets a
    relative accuracy of 1e-10.
    """
    size = int(size)
    if size < 1 or size > MAX_SIZE:
        raise DomainError(f"size must lie in [1, {MAX_SIZE}], got {size}")
    if mode == "auto":
        mode = "closed_form" if _is_integer(params.c) else "quadrature"
    if mode == "closed_form":
        if not _is_integer(params.c):
            raise DomainError("closed-form moments need a nonnegative integer c")
        with (ctx or DEFAULT_CONTEXT).workprec(16):
            ent = _closed_form(params, size)
    elif mode == "quadrature":
        ent = _quadrature(params, size, refine)
    else:
        raise DomainError(f"unknown moment mode {mode!r}")
    return MomentTable(size, ent, mode)


def _cholesky(G, n):
    L = [[mp.mpc(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = G[i][j] - mp.fsum(L[i][k] * mp.conj(L[j][k]) for k in range(j))
            if i == j:
                d = mp.re(s)
                if not d > 0:
                    raise PrecisionError(
                        f"Gram matrix lost positive definiteness at pivot {i}; raise mantissa_bits"
                    )
                L[i][i] = mp.sqrt(d)
            else:
                L[i][j] = s / L[j][j]
    return L


def gram_schmidt(moments, n_max, ctx=None):
    """Monic orthogonal P_0..P_{n_max} and their norms h_n.

    With G = L L^* the rows of L^{-1} are orthonormal; P_n is row n scaled
    by L[n][n] and h_n = L[n][n]^2.
    """
    ctx = ctx or DEFAULT_CONTEXT
    n = int(n_max) + 1
    if n > moments.size:
        raise DomainError("n_max must be smaller than the moment table size")
    with ctx.workprec(32):
        G = [[mp.mpc(moments.entries[j][k]) for k in range(n)] for j in range(n)]
        # the Gaussian moments shrink like k!/N^k; equilibrate first
        d = [1 / mp.sqrt(mp.re(G[j][j])) for j in range(n)]
        Gs = [[G[j][k] * d[j] * d[k] for k in range(n)] for j in range(n)]
        L = _cholesky(Gs, n)
        # inverse of the lower-triangular factor, row by row
        Linv = [[mp.mpc(0)] * n for _ in range(n)]
        for i in range(n):
            Linv[i][i] = 1 / L[i][i]
            for j in range(i):
                s = mp.fsum(L[i][k] * Linv[k][j] for k in range(j, i))
                Linv[i][j] = -s / L[i][i]
        polys, norms = [], []
        for i in range(n):
            lead = Linv[i][i] * d[i]
            coeffs = [Linv[i][k] * d[k] / lead for k in range(i)] + [mp.mpc(1)]
            polys.append(ScaledPolynomial([+c for c in coeffs]))
            norms.append(+mp.re(1 / lead**2))
    return polys, norms
