"""Monic polynomials with extended-precision coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .errors import DomainError
from .mpnum import DEFAULT_CONTEXT, LogComplex

__all__ = ["ScaledPolynomial", "evaluate"]


@dataclass
class ScaledPolynomial:
    """``exp(log_scale) * sum(coeffs[k] z^k)`` with ``coeffs[degree] == 1``.

    ``coeffs`` is stored lowest degree first.
    """

    coeffs: list
    log_scale: object = 0

    def __post_init__(self):
        self.coeffs = [mp.mpmathify(c) for c in self.coeffs]
        self.log_scale = mp.mpf(self.log_scale)
        if not self.coeffs:
            raise DomainError("a polynomial needs at least one coefficient")
        if self.coeffs[-1] != 1:
            raise DomainError("ScaledPolynomial must be monic")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z, ctx=None):
        return evaluate(self, z, ctx)

    def derivative_coeffs(self):
        return [k * self.coeffs[k] for k in range(1, len(self.coeffs))]


def _horner(coeffs, z):
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def evaluate(poly, z, ctx=None):
    """Horner evaluation returned as a LogComplex (log_scale included)."""
    ctx = ctx or DEFAULT_CONTEXT
    with ctx.workprec(16):
        v = LogComplex.from_complex(_horner(poly.coeffs, mp.mpmathify(z)))
        if v.is_zero():
            return v
        return LogComplex(v.log_mag + poly.log_scale, v.phase)
