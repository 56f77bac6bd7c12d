"""Numerical checks of multi-anisotropic Gevrey bounds.

Derivative tables come from closed-form families only: exponentials
``e^{i<x,ζ>}`` with ``P(ζ) = 0`` (derivatives are powers of ``ζ``) and the
heat kernel (derivatives through the Hermite recurrence).  Sup-norms over a
box are taken on a dense grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .polyhedron import NewtonPolyhedron, formal_order, k_of, symbol_polyhedron, weight
from .roots import complex_roots
from .symbol import MultiIndex, PolynomialSymbol, evaluate, log_abs, restriction_coefficients

GRID_POINTS = 64
RESIDUAL_TOLERANCE = 1e-9

Box = tuple[tuple[float, float], ...]


def _check_box(box) -> Box:
    out = tuple((float(a), float(b)) for a, b in box)
    if not out or any(not a < b for a, b in out):
        raise ValueError("box must have a < b on every axis")
    return out


def parse_box(text: str) -> Box:
    """``"a1,b1;a2,b2"`` -> ``((a1, b1), (a2, b2))``."""
    try:
        parts = [p.split(",") for p in text.split(";")]
        return _check_box((float(a), float(b)) for a, b in parts)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"malformed box {text!r}: expected 'a1,b1;a2,b2'") from exc


@dataclass(frozen=True)
class DerivativeTable:
    """Sup-norm estimates of ``|D^α u|`` over an axis-aligned box."""

    box: Box
    entries: Mapping[MultiIndex, float]

    def __post_init__(self):
        object.__setattr__(self, "box", _check_box(self.box))
        clean = {tuple(int(a) for a in k): float(v) for k, v in self.entries.items()}
        if any(not v >= 0 for v in clean.values()):
            raise ValueError("sup-norms must be non-negative")
        if any(len(k) != len(self.box) for k in clean):
            raise ValueError("multi-index length differs from the box dimension")
        object.__setattr__(self, "entries", dict(sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0]))))

    @property
    def dimension(self) -> int:
        return len(self.box)


def multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    """All ``α`` with ``|α| <= max_order``, by order then lexicographically."""
    out: list[MultiIndex] = []
    for m in range(max_order + 1):
        out.extend(sorted(a for a in itertools.product(range(m + 1), repeat=n) if sum(a) == m))
    return out


def box_grid(box: Box, points: int = GRID_POINTS) -> np.ndarray:
    axes = [np.linspace(a, b, points) for a, b in _check_box(box)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


# ---------------------------------------------------------------------------
# Gevrey constant fits

@dataclass(frozen=True)
class GevreyFit:
    per_alpha: dict
    C: float
    trend_slope: float
    per_order_max: dict

    def to_json(self) -> dict:
        return {
            "C": self.C,
            "trend_slope": self.trend_slope,
            "per_order_max": {str(k): v for k, v in self.per_order_max.items()},
            "per_alpha": {",".join(map(str, a)): c for a, c in self.per_alpha.items()},
        }


def _log_gevrey_weight(gamma: NewtonPolyhedron, alpha, s) -> float:
    k = k_of(gamma, alpha)
    if k == 0:
        return 0.0
    return float(Fraction(s) * formal_order(gamma) * k) * math.log(float(k))


def fit_gevrey_constant(table: DerivativeTable, gamma: NewtonPolyhedron, s) -> GevreyFit:
    """Per-α ``C(α) = (‖D^α u‖ / k^{sμk})^{1/(|α|+1)}`` and their maximum."""
    s = Fraction(s)
    if s < 1:
        raise ValueError("Gevrey index s must be at least 1")
    if not table.entries:
        raise ValueError("empty derivative table")
    formal_order(gamma)  # raises for non-regular polyhedra
    per_alpha = {}
    for alpha, norm in table.entries.items():
        if norm == 0:
            per_alpha[alpha] = 0.0
            continue
        logc = (math.log(norm) - _log_gevrey_weight(gamma, alpha, s)) / (sum(alpha) + 1)
        per_alpha[alpha] = math.exp(logc)
    per_order: dict[int, float] = {}
    for alpha, c in per_alpha.items():
        per_order[sum(alpha)] = max(per_order.get(sum(alpha), 0.0), c)
    orders = sorted(per_order)
    if len(orders) >= 2:
        trend = float(np.polyfit(orders, [per_order[o] for o in orders], 1)[0])
    else:
        trend = 0.0
    return GevreyFit(per_alpha, max(per_alpha.values()), trend, per_order)


def gevrey_vector_fit(norms: Sequence[float], s, mu, mode: str = "factorial") -> float:
    """Minimal ``C`` with ``norms[l] <= C^{l+1} b_l`` for every given ``l``.

    ``b_l = (l!)^{sμ}`` in factorial mode and ``l^{slμ}`` (``0^0 = 1``) in
    power mode.
    """
    norms = [float(x) for x in norms]
    if not norms:
        raise ValueError("empty norm sequence")
    if not norms[0] > 0:
        raise ValueError("norms[0] must be positive")
    if mode not in ("factorial", "power"):
        raise ValueError("mode must be 'factorial' or 'power'")
    smu = float(Fraction(s) * Fraction(mu))
    best = 0.0
    for l, x in enumerate(norms):
        if x < 0:
            raise ValueError("norms must be non-negative")
        if x == 0:
            continue
        if l == 0:
            best = max(best, x)
            continue
        if mode == "factorial":
            logb = smu * math.lgamma(l + 1)
        else:
            logb = smu * l * math.log(l) if l > 0 else 0.0
        best = max(best, math.exp((math.log(x) - logb) / (l + 1)))
    return best


# ---------------------------------------------------------------------------
# exponential witnesses

@dataclass(frozen=True)
class WitnessSolution:
    """``u(x) = e^{i<x,ζ>}`` with ``P(ζ) = 0`` up to ``residual``."""

    zeta: tuple[complex, ...]
    residual: float
    family: str = "exponential"

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "zeta": [[z.real, z.imag] for z in self.zeta],
            "residual": self.residual,
        }


def residual_bound(P: PolynomialSymbol, zeta) -> float:
    re = np.abs(np.real(np.asarray(zeta, dtype=complex)))
    return RESIDUAL_TOLERANCE * (1.0 + weight(symbol_polyhedron(P), re))


def _check_residual(P: PolynomialSymbol, zeta) -> float:
    r = abs(evaluate(P, np.asarray(zeta, dtype=complex)))
    if r > residual_bound(P, zeta):
        raise ValueError(f"residual |P(ζ)| = {r:.3g} exceeds tolerance")
    return r


def witness_exponential(P: PolynomialSymbol, base, axis: int) -> list[WitnessSolution]:
    """All zeros of ``P`` on the complex line through ``base`` along ``axis`` (0-based)."""
    base = np.asarray(base, dtype=complex)
    if base.shape != (P.dimension,):
        raise ValueError("base has the wrong dimension")
    if not 0 <= axis < P.dimension:
        raise ValueError("axis out of range")
    coeffs = restriction_coefficients(P, base, axis)[0]
    try:
        roots = complex_roots(coeffs, polish_steps=4)
    except ValueError as exc:
        raise ValueError("restriction along the axis is constant") from exc
    out = []
    for z in sorted(roots, key=lambda c: (round(c.real, 12), round(c.imag, 12))):
        zeta = base.copy()
        zeta[axis] = z
        r = _check_residual(P, zeta)
        out.append(WitnessSolution(tuple(complex(x) for x in zeta), r))
    return out


def witness_scan(
    P: PolynomialSymbol, count: int, seed: int = 0, re_bound: float = 10.0, axis: int | None = None
) -> list[WitnessSolution]:
    """``count`` seeded witnesses with ``|Re ζ_j| <= re_bound``.

    Bases are uniform on ``[-re_bound, re_bound]^n`` and the roots along
    ``axis`` (default: last) are collected in order.
    """
    axis = P.dimension - 1 if axis is None else axis
    rng = np.random.default_rng(seed)
    out: list[WitnessSolution] = []
    for _ in range(100 * max(count, 1)):
        if len(out) >= count:
            break
        base = rng.uniform(-re_bound, re_bound, size=P.dimension)
        for w in witness_exponential(P, base, axis):
            if max(abs(z.real) for z in w.zeta) <= re_bound and len(out) < count:
                out.append(w)
    if len(out) < count:
        raise ValueError("could not collect enough witnesses inside the bound")
    return out


def exponential_table(
    witnesses: Sequence[WitnessSolution],
    coefficients: Sequence[complex] | None,
    box: Box,
    max_order: int,
    points: int = GRID_POINTS,
) -> DerivativeTable:
    """Sup-norms of ``D^α Σ c_k e^{i<x,ζ_k>}`` (``D = -i∂``) on a box grid."""
    box = _check_box(box)
    coefficients = [1.0] * len(witnesses) if coefficients is None else list(coefficients)
    X = box_grid(box, points)
    Z = np.array([w.zeta for w in witnesses], dtype=complex)
    E = np.exp(1j * X @ Z.T) * np.asarray(coefficients, dtype=complex)[None, :]
    entries = {}
    for alpha in multi_indices(len(box), max_order):
        powers = np.prod(Z ** np.array(alpha)[None, :], axis=1)
        entries[alpha] = float(np.abs(E @ powers).max())
    return DerivativeTable(box, entries)


# ---------------------------------------------------------------------------
# heat kernel

def heat_kernel(t, x):
    return np.exp(-np.asarray(x) ** 2 / (4 * np.asarray(t))) / np.sqrt(4 * np.pi * np.asarray(t))


def heat_kernel_derivative(t, x, a: int, b: int):
    """``∂_t^a ∂_x^b`` of ``(4πt)^{-1/2} e^{-x²/(4t)}``, using ``∂_t = ∂_x²``.

    With ``y = x/(2√t)``, ``∂_x^m u = (-1)^m (2√t)^{-m} H_m(y) u`` and the
    Hermite recurrence ``H_{m+1} = 2y H_m - 2m H_{m-1}``.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    m = 2 * a + b
    y = x / (2 * np.sqrt(t))
    h_prev, h = np.zeros_like(y), np.ones_like(y)
    for k in range(m):
        h_prev, h = h, 2 * y * h - 2 * k * h_prev
    return (-1) ** m * (2 * np.sqrt(t)) ** (-m) * h * heat_kernel(t, x)


def heat_kernel_table(box: Box, max_order: int, points: int = GRID_POINTS) -> DerivativeTable:
    """Sup-norms of all ``D^α u``, ``|α| <= max_order``, for the heat kernel
    in variables ``(t, x)`` over a box with ``t > 0``."""
    box = _check_box(box)
    if len(box) != 2 or box[0][0] <= 0:
        raise ValueError("heat kernel box must be 2-dimensional with t > 0")
    X = box_grid(box, points)
    entries = {}
    for a, b in multi_indices(2, max_order):
        entries[(a, b)] = float(np.abs(heat_kernel_derivative(X[:, 0], X[:, 1], a, b)).max())
    return DerivativeTable(box, entries)


# ---------------------------------------------------------------------------
# growth of Q_H^j u

def _log_exp_integral(c: float, a: float, b: float) -> float:
    """``log ∫_a^b e^{c x} dx``."""
    L = b - a
    x = c * L
    if abs(x) < 1e-8:
        # (e^x - 1)/x = 1 + x/2 + x²/6 + ...; also covers underflow of c·L
        return c * a + math.log(L) + math.log1p(x / 2 + x * x / 6)
    if x > 0:
        # log(expm1(x)) without overflow
        tail = x + math.log1p(-math.exp(-x)) if x > 30 else math.log(math.expm1(x))
        return c * a + tail - math.log(c)
    return c * a + math.log(-math.expm1(x)) - math.log(-c)


def log_l2_norm_exponential(zeta, box: Box) -> float:
    """``log ‖e^{i<x,ζ>}‖_{L²(box)}`` in closed form."""
    box = _check_box(box)
    total = 0.0
    for z, (a, b) in zip(zeta, box):
        total += _log_exp_integral(-2.0 * complex(z).imag, a, b)
    return 0.5 * total


@dataclass(frozen=True)
class IterateGrowthTable:
    rows: tuple[tuple[int, float], ...]
    log_rows: tuple[float, ...]
    fitted_C: float
    q_value: complex
    u_norm: float
    sigma: int
    witness: WitnessSolution

    def satisfied(self, C: float | None = None) -> bool:
        C = self.fitted_C if C is None else C
        logC = math.log(C)
        for j, lr in enumerate(self.log_rows):
            rhs = (j + 1) * logC + (self.sigma * j * math.log(j) if j > 0 else 0.0)
            if lr > rhs + 1e-12 * max(1.0, abs(rhs)):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "witness": self.witness.to_json(),
            "q_value": [self.q_value.real, self.q_value.imag],
            "u_norm": self.u_norm,
            "sigma": self.sigma,
            "fitted_C": self.fitted_C,
            "rows": [{"j": j, "norm": v} for j, v in self.rows],
            "satisfied": self.satisfied(),
        }


def iterate_growth_check(
    P: PolynomialSymbol, Q: PolynomialSymbol, sigma: int, witness: WitnessSolution, omega: Box, j_max: int
) -> IterateGrowthTable:
    """``‖Q^j u‖_{L²(ω)} = |Q(ζ)|^j ‖u‖_{L²(ω)}`` for ``j <= j_max`` and the
    minimal ``C`` with ``‖Q^j u‖ <= C^{j+1} j^{σj}``."""
    if witness.family != "exponential":
        raise ValueError("closed-form power norms need an exponential witness")
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    omega = _check_box(omega)
    if len(omega) != P.dimension:
        raise ValueError("box dimension differs from the symbol's")
    _check_residual(P, witness.zeta)
    zeta = np.asarray(witness.zeta, dtype=complex)
    log_u = log_l2_norm_exponential(zeta, omega)
    q_val = evaluate(Q, zeta)
    log_q = float(log_abs(Q, zeta)[0])
    log_rows = [log_u + j * log_q if j else log_u for j in range(j_max + 1)]
    logC = max(
        (lr - (sigma * j * math.log(j) if j > 0 else 0.0)) / (j + 1) for j, lr in enumerate(log_rows)
    )
    rows = tuple((j, math.exp(lr) if lr < 709 else float("inf")) for j, lr in enumerate(log_rows))
    return IterateGrowthTable(rows, tuple(log_rows), math.exp(logC), complex(q_val), math.exp(log_u), sigma, witness)


@dataclass(frozen=True)
class WitnessScanReport:
    tables: tuple[IterateGrowthTable, ...]
    sup_C: float
    all_satisfied: bool

    def to_json(self, include_rows: bool = False) -> dict:
        return {
            "count": len(self.tables),
            "sup_fitted_C": self.sup_C,
            "all_satisfied": self.all_satisfied,
            "witnesses": [
                t.to_json() if include_rows else {"zeta": t.witness.to_json()["zeta"], "fitted_C": t.fitted_C}
                for t in self.tables
            ],
        }


def iterate_growth_scan(
    P: PolynomialSymbol,
    Q: PolynomialSymbol,
    sigma: int,
    omega: Box,
    j_max: int,
    count: int = 50,
    seed: int = 0,
    re_bound: float = 10.0,
) -> WitnessScanReport:
    tables = tuple(
        iterate_growth_check(P, Q, sigma, w, omega, j_max) for w in witness_scan(P, count, seed, re_bound)
    )
    return WitnessScanReport(tables, max(t.fitted_C for t in tables), all(t.satisfied() for t in tables))
