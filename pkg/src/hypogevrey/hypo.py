"""Polyhedra of hypoellipticity, the companion operator ``Q_H`` and the
Gevrey classes they induce.

``H`` is searched on a rational grid: an exponent ``ν`` is accepted when
``|ξ|^ν / (1 + δ(ξ))`` stays bounded on the classification sweep, and ``H``
is the hull of the origin and the accepted exponents.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .classify import (
    FAILS,
    HOLDS,
    ClassificationVerdict,
    _log_delta,
    _sample,
    hypoellipticity_test,
    mq_test,
    sweep_rays,
)
from .exact import Vec, to_vec
from .polyhedron import (
    NewtonPolyhedron,
    PolyhedronError,
    formal_order,
    k_of,
    newton_polyhedron,
    scale,
    symbol_polyhedron,
    weight,
)
from .sampling import SamplingConfig, is_bounded, loglog_slope
from .symbol import PolynomialSymbol, evaluate_scaled, nonzero_derivatives

# slope tolerance for grid acceptance; grid points just outside the true H
# carry excess slopes of order 1/(2 D1 D2), so the classification tolerance
# is too coarse here
H_SLOPE_TOLERANCE = 0.006
# stand-in for log 0 that keeps 0 * log 0 == 0 in matrix products
_LOG_ZERO = -1e250
_CHUNK = 4096


class HypoPolyhedronError(ValueError):
    pass


class NotHypoelliptic(HypoPolyhedronError):
    """The symbol shows evidence of non-hypoellipticity."""


class GridExhausted(HypoPolyhedronError):
    """Some axis has no accepted positive exponent on the grid."""


class IrregularHull(HypoPolyhedronError):
    """The hull of the accepted exponents is not a regular polyhedron."""


class SigmaMismatch(HypoPolyhedronError):
    """``σ`` is not the minimal even-integralizing factor of ``H``."""


# ---------------------------------------------------------------------------
# σ

def _vertices_of(H) -> list[Vec]:
    if isinstance(H, HypoPolyhedron):
        H = H.polyhedron
    if isinstance(H, NewtonPolyhedron):
        return list(H.vertices)
    return [to_vec(v) for v in H]


def sigma_of(H) -> int:
    """Smallest ``σ >= 1`` with ``σ·v`` even non-negative integral for every vertex.

    A component ``p/q`` in lowest terms needs ``q | σ``, and ``2q | σ`` when
    ``p`` is odd; ``σ`` is the lcm of these requirements.
    """
    sigma = 1
    for v in _vertices_of(H):
        for x in v:
            if x < 0:
                raise ValueError("vertices must be non-negative")
            if x == 0:
                continue
            need = x.denominator * (2 if x.numerator % 2 else 1)
            sigma = math.lcm(sigma, need)
    return sigma


def _even_integral(vertices: Iterable[Vec], sigma: int) -> bool:
    for v in vertices:
        for x in v:
            y = sigma * x
            if y.denominator != 1 or y.numerator % 2 or y < 0:
                return False
    return True


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class HypoPolyhedron:
    polyhedron: NewtonPolyhedron
    sigma: int
    certificates: tuple[dict, ...] = ()
    accepted: tuple[Vec, ...] = ()
    denom_max: int | None = None
    exponent_cap: Fraction | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if not self.polyhedron.regular:
            raise IrregularHull("a polyhedron of hypoellipticity must be regular")
        if self.sigma != sigma_of(self.polyhedron):
            raise SigmaMismatch(f"σ = {self.sigma} is not minimal for H")

    @property
    def vertices(self) -> tuple[Vec, ...]:
        return self.polyhedron.vertices

    @property
    def mu(self) -> Fraction:
        return formal_order(self.polyhedron)

    def to_json(self) -> dict:
        return {
            "polyhedron": self.polyhedron.to_json(),
            "sigma": self.sigma,
            "denom_max": self.denom_max,
            "exponent_cap": None if self.exponent_cap is None else _rat(self.exponent_cap),
            "tolerance": self.tolerance,
            "accepted_count": len(self.accepted),
            "certificates": list(self.certificates),
        }


def _rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GevreyClass:
    """``G^{s,Γ}``: ``|D^α u| <= C^{|α|+1} k(α,Γ)^{s μ(Γ) k(α,Γ)}``."""

    s: Fraction
    polyhedron: NewtonPolyhedron
    note: str = ""

    @property
    def mu(self) -> Fraction:
        return formal_order(self.polyhedron)

    def log_bound(self, alpha: Sequence[int], C: float = 1.0) -> float:
        """``log B(α)``; the convention ``0^0 = 1`` applies at ``α = 0``."""
        k = k_of(self.polyhedron, alpha)
        order = sum(alpha)
        out = (order + 1) * math.log(C)
        if k > 0:
            out += float(self.s * self.mu * k) * math.log(float(k))
        return out

    def bound(self, alpha: Sequence[int], C: float = 1.0) -> float:
        return math.exp(self.log_bound(alpha, C))

    def to_json(self) -> dict:
        return {
            "s": _rat(self.s),
            "mu": _rat(self.mu),
            "vertices": [[_rat(x) for x in v] for v in self.polyhedron.vertices],
            "bound": "C^(|a|+1) * k(a)^(s*mu*k(a))",
            "note": self.note,
        }


@dataclass(frozen=True)
class GevreyClassReport:
    sigma: int
    mu_H: Fraction
    mu_Q: Fraction
    paper_class: GevreyClass
    sharp_class: GevreyClass
    sensitivity: dict = field(default_factory=dict)
    mq_case: GevreyClass | None = None

    def __post_init__(self):
        if self.mu_Q != self.sigma * self.mu_H:
            raise ValueError("μ_Q must equal σ μ_H")

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma,
            "mu_H": _rat(self.mu_H),
            "mu_Q": _rat(self.mu_Q),
            "paper_class": self.paper_class.to_json(),
            "sharp_class": self.sharp_class.to_json(),
            "sensitivity": self.sensitivity,
            "mq_case": None if self.mq_case is None else self.mq_case.to_json(),
        }


# ---------------------------------------------------------------------------
# construction of H

def exponent_grid(n: int, denom_max: int, cap: Fraction) -> list[Fraction]:
    """Per-axis candidate exponents ``k/D`` with ``D <= denom_max`` and value ``<= cap``."""
    if denom_max < 1:
        raise ValueError("denom_max must be at least 1")
    cap = Fraction(cap)
    if cap <= 0:
        raise ValueError("exponent cap must be positive")
    vals = {Fraction(k, D) for D in range(1, denom_max + 1) for k in range(math.floor(cap * D) + 1)}
    return sorted(vals)


def _grid_chunks(axis_vals: list[Fraction], n: int):
    it = itertools.product(axis_vals, repeat=n)
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            return
        yield chunk


def build_H(
    P: PolynomialSymbol,
    cfg: SamplingConfig | None = None,
    denom_max: int = 12,
    exponent_cap=None,
    *,
    verdict: ClassificationVerdict | None = None,
    tolerance: float | None = None,
) -> HypoPolyhedron:
    """Grid-maximal polyhedron of hypoellipticity for ``P``.

    ``ν`` is accepted when the sweep envelope of ``|ξ|^ν / (1 + δ(ξ))``
    passes the bounded-growth rule on the upper half of the radii.
    """
    cfg = cfg or SamplingConfig()
    if P.is_constant():
        raise ValueError("a polyhedron of hypoellipticity needs a non-constant symbol")
    if verdict is None:
        verdict = hypoellipticity_test(P, cfg)
    if verdict.kind == FAILS:
        raise NotHypoelliptic(f"hypoellipticity test fails: {verdict.reason}")
    cap = Fraction(P.order if exponent_cap is None else exponent_cap)
    tol = min(cfg.growth_tolerance, H_SLOPE_TOLERANCE) if tolerance is None else tolerance
    n = P.dimension

    gamma = symbol_polyhedron(P)
    radii = cfg.radii()
    rays, _ = sweep_rays(P, gamma, cfg)
    X = _sample(rays, radii)
    R, K, _ = X.shape
    flat = X.reshape(-1, n)
    log_den = np.logaddexp(0.0, _log_delta(P, flat, nonzero_derivatives(P)))
    with np.errstate(divide="ignore"):
        L = np.log(np.abs(flat))
    L = np.where(np.isneginf(L), _LOG_ZERO, L)
    upper = slice(K // 2, None)

    axis_vals = exponent_grid(n, denom_max, cap)
    accepted: list[Vec] = []
    envelopes: dict[Vec, np.ndarray] = {}
    for chunk in _grid_chunks(axis_vals, n):
        G = np.array([[float(x) for x in nu] for nu in chunk])
        env = (G @ L.T - log_den[None, :]).reshape(len(chunk), R, K).max(axis=1)
        for nu, e in zip(chunk, env):
            ok, _, _ = is_bounded(radii[upper], e[upper], tol)
            if ok:
                accepted.append(nu)
                envelopes[nu] = e

    for j in range(n):
        if not any(nu[j] > 0 for nu in accepted):
            raise GridExhausted(
                f"no positive exponent accepted on axis {j + 1} "
                f"(denom_max={denom_max}, exponent_cap={cap})"
            )
    try:
        H = newton_polyhedron(accepted, n)
    except PolyhedronError as exc:
        raise IrregularHull(str(exc)) from exc
    if not H.regular:
        raise IrregularHull("hull of the accepted exponents is not regular")

    certificates = []
    for v in H.vertices:
        e = envelopes.get(v)
        if e is None:  # the origin is always implied
            e = (np.full(R * K, 0.0) - log_den).reshape(R, K).max(axis=0)
        ok, slope_u, lom = is_bounded(radii[upper], e[upper], tol)
        certificates.append(
            {
                "vertex": [_rat(x) for x in v],
                "radii": [float(r) for r in radii],
                "ratio_envelope": [float(np.exp(x)) for x in e],
                "slope_upper_half": float(slope_u),
                "slope_full": float(loglog_slope(radii, e)),
                "last_over_median": float(lom),
                "bounded": bool(ok),
            }
        )
    return HypoPolyhedron(
        polyhedron=H,
        sigma=sigma_of(H),
        certificates=tuple(certificates),
        accepted=tuple(accepted),
        denom_max=denom_max,
        exponent_cap=cap,
        tolerance=tol,
    )


# ---------------------------------------------------------------------------
# Q_H

class QOperatorCheckError(HypoPolyhedronError):
    """A built-in postcondition on ``Q_H`` failed."""


def q_operator(
    H,
    sigma: int,
    *,
    verify: bool = True,
    cfg: SamplingConfig | None = None,
    samples: int = 64,
    seed: int = 0,
) -> PolynomialSymbol:
    """``Q_H(ξ) = Σ_{α ∈ V(H)} ξ^{σα}`` with unit coefficients.

    With ``verify`` the symbol's polyhedron, the weight identity at seeded
    sample points and multi-quasiellipticity are checked.
    """
    poly = H.polyhedron if isinstance(H, HypoPolyhedron) else H
    if sigma != sigma_of(poly):
        raise SigmaMismatch(f"σ = {sigma} is inconsistent with H (expected {sigma_of(poly)})")
    terms = {}
    for v in poly.vertices:
        alpha = tuple(int(sigma * x) for x in v)
        terms[alpha] = 1
    Q = PolynomialSymbol(poly.dimension, terms)
    if verify:
        gq = symbol_polyhedron(Q)
        target = scale(poly, sigma)
        if gq.vertices != target.vertices or gq.facets != target.facets:
            raise QOperatorCheckError("Γ(Q_H) differs from σH")
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(samples, poly.dimension)) * np.exp(rng.uniform(0, 3, size=(samples, 1)))
        m, s = evaluate_scaled(Q, pts)
        lhs = np.abs(m) * np.exp(s)
        rhs = weight(gq, pts)
        if not np.all(np.abs(lhs - rhs) <= 1e-12 * rhs):
            raise QOperatorCheckError("|Q_H| differs from the weight of Γ(Q_H)")
        verdict = mq_test(Q, cfg)
        if verdict.kind != HOLDS:
            raise QOperatorCheckError(f"Q_H failed the multi-quasiellipticity test: {verdict.reason}")
    return Q


# ---------------------------------------------------------------------------
# Gevrey classes

def gevrey_index(
    H,
    sigma: int,
    *,
    P: PolynomialSymbol | None = None,
    mq_verdict: ClassificationVerdict | None = None,
) -> GevreyClassReport:
    """The ``paper_class`` and ``sharp_class`` Gevrey classes of solutions of ``P(D)u = 0``.

    ``paper_class = (σ/μ_H, H)`` and ``sharp_class = (1/μ_H, σH)``.  When
    ``P`` is multi-quasielliptic (``mq_verdict`` holds) the class
    ``G^{s,Γ(P)}`` for every ``s > 1`` is attached as well.
    """
    poly = H.polyhedron if isinstance(H, HypoPolyhedron) else H
    if sigma != sigma_of(poly):
        raise SigmaMismatch(f"σ = {sigma} is inconsistent with H")
    mu_H = formal_order(poly)
    sigma_H = scale(poly, sigma)
    mu_Q = formal_order(sigma_H)
    paper = GevreyClass(Fraction(sigma) / mu_H, poly, "G^{σ/μ_H, H}")
    sharp = GevreyClass(Fraction(sigma) / mu_Q, sigma_H, "G^{σ/μ_Q, σH}, i.e. s = 1/μ_H")

    half = scale(poly, Fraction(1, 2))
    sigma_half = sigma_of(half)
    mu_half = formal_order(half)
    sensitivity = {
        "factor": "1/2",
        "sigma": sigma_half,
        "mu": _rat(mu_half),
        "paper_class_s": _rat(Fraction(sigma_half) / mu_half),
        "note": "the paper_class index depends on the H chosen",
    }

    mq_case = None
    if P is not None and mq_verdict is not None and mq_verdict.kind == HOLDS:
        mq_case = GevreyClass(Fraction(1), symbol_polyhedron(P), "multi-quasielliptic case: G^{s,Γ(P)} for every s > 1")
    return GevreyClassReport(
        sigma=sigma,
        mu_H=mu_H,
        mu_Q=mu_Q,
        paper_class=paper,
        sharp_class=sharp,
        sensitivity=sensitivity,
        mq_case=mq_case,
    )
