"""Univariate root finding.

Complex roots come from the companion-matrix eigenvalues (``numpy.roots``)
followed by a couple of Newton steps.  Real roots of polynomials with exact
rational coefficients are isolated on the square-free part, so that roots of
high multiplicity (e.g. ``(x - 1)^4``) are located to full precision.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

RatPoly = list[Fraction]  # lowest degree first


def trim(coeffs: Sequence[complex]) -> np.ndarray:
    """Drop exactly-zero leading (highest-degree) coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c != 0)
    if nz.size == 0:
        return c[:0]
    return c[: nz[-1] + 1]


def _horner(c: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z, dtype=complex)
    dp = np.zeros_like(z, dtype=complex)
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def complex_roots(coeffs: Sequence[complex], polish_steps: int = 2) -> np.ndarray:
    """All complex roots of ``sum_k c_k z^k`` (coefficients lowest degree first).

    Raises ``ValueError`` for a constant polynomial.
    """
    c = trim(coeffs)
    if c.size <= 1:
        raise ValueError("polynomial is constant")
    z = np.roots(c[::-1]).astype(complex)
    for _ in range(polish_steps):
        p, dp = _horner(c, z)
        ok = dp != 0
        step = np.where(ok, p / np.where(ok, dp, 1), 0)
        z_new = z - step
        # keep a step only if it does not increase the residual
        p_new, _ = _horner(c, z_new)
        z = np.where(np.abs(p_new) <= np.abs(p), z_new, z)
    return z


# exact rational polynomial helpers ------------------------------------------

def _rtrim(p: RatPoly) -> RatPoly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def rat_divmod(a: RatPoly, b: RatPoly) -> tuple[RatPoly, RatPoly]:
    a, b = _rtrim(a), _rtrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / b[-1]
        q[shift] = f
        for k, bk in enumerate(b):
            r[k + shift] -= f * bk
        r = _rtrim(r)
    return _rtrim(q), r


def rat_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    a, b = _rtrim(a), _rtrim(b)
    while b:
        _, r = rat_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [x / lead for x in a]


def rat_derivative(p: RatPoly) -> RatPoly:
    return _rtrim([k * c for k, c in enumerate(p)][1:])


def rat_eval(p: RatPoly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree(p: RatPoly) -> RatPoly:
    p = _rtrim(p)
    if len(p) <= 1:
        return p
    g = rat_gcd(p, rat_derivative(p))
    q, _ = rat_divmod(p, g)
    return q


def real_roots_exact(re_part: RatPoly, im_part: RatPoly | None = None) -> list[float]:
    """Real roots of ``re_part + i*im_part`` with rational coefficients.

    A real ``x`` is a root iff it is a common root of both parts, so the
    square-free part of their gcd is solved.  Roots that are small rationals
    are returned exactly.  A polynomial that vanishes identically raises.
    """
    g = _rtrim(re_part)
    if im_part is not None:
        g = rat_gcd(g, im_part) if _rtrim(im_part) else g
    g = _rtrim(g)
    if not g:
        raise ValueError("polynomial vanishes identically")
    s = squarefree(g)
    if len(s) <= 1:
        return []
    z = complex_roots([float(c) for c in s], polish_steps=3)
    out: list[float] = []
    for r in z:
        if abs(r.imag) > 1e-7 * (1 + abs(r)):
            continue
        x = float(r.real)
        snapped = Fraction(x).limit_denominator(10_000)
        if rat_eval(s, snapped) == 0:
            x = float(snapped)
        out.append(x)
    return sorted(set(out))
