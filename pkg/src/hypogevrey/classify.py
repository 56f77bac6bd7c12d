"""Multi-quasiellipticity and hypoellipticity as sampled evidence.

Both tests sweep geometric radii along a fixed family of curves: straight
rays through well-spread unit directions, quasi-rays ``t -> t^w ∘ z`` whose
weights come from each facet normal of ``Γ(P)``, and the quasi-rays through
real zeros of each facet's quasi-principal part (with small perturbations
around them).  Suprema over a sphere are approximated by the maximum over
all curve points at that radius.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .exact import dot, to_vec
from .polyhedron import NewtonPolyhedron, log_weight, symbol_polyhedron
from .roots import complex_roots, real_roots_exact
from .sampling import Ray, SamplingConfig, canonical_order, is_bounded, loglog_slope, unit_directions
from .symbol import PolynomialSymbol, log_abs, nonzero_derivatives, restriction_coefficients

EVIDENCE = "numerical evidence, not proof"
HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"

# |P_q| below this on the unit sphere marks a degeneracy direction
DEGENERACY_THRESHOLD = 1e-9
# dist_upper below this fraction of |ξ| counts as zero
ZERO_DISTANCE = 1e-9
# |P|/|ξ|_P below this counts as sitting on the zero variety
ZERO_RATIO = 1e-12


@dataclass(frozen=True)
class ClassificationVerdict:
    kind: str
    fitted_constant: float
    witness_direction: tuple[float, ...] | None = None
    details: dict = field(default_factory=dict)
    reason: str = ""
    exponents: dict = field(default_factory=dict)
    label: str = EVIDENCE

    def __post_init__(self):
        if self.kind not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.kind == FAILS and self.witness_direction is None:
            raise ValueError("a failing verdict needs a witness direction")
        if not self.fitted_constant >= 0:
            raise ValueError("fitted constant must be non-negative")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "reason": self.reason,
            "fitted_constant": _num(self.fitted_constant),
            "witness_direction": None
            if self.witness_direction is None
            else [float(x) for x in self.witness_direction],
            "exponents": {k: _num(v) for k, v in self.exponents.items()},
            "trace": self.details,
        }


def _num(x):
    if x is None:
        return "n/a"
    x = float(x)
    if np.isnan(x):
        return "n/a"
    if np.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


# ---------------------------------------------------------------------------

def quasi_principal_part(P: PolynomialSymbol, q: Sequence) -> PolynomialSymbol:
    """Sub-symbol of the terms attaining ``max <q, α>`` (exact comparison)."""
    if P.is_zero():
        raise ValueError("zero symbol has no quasi-principal part")
    q = to_vec(q)
    if len(q) != P.dimension or any(x <= 0 for x in q):
        raise ValueError("q must be a strictly positive vector of the symbol's dimension")
    levels = {a: dot(a, q) for a in P.terms}
    top = max(levels.values())
    return PolynomialSymbol(P.dimension, {a: c for a, c in P.terms.items() if levels[a] == top})


def _positive_facets(gamma: NewtonPolyhedron) -> list[tuple[Fraction, ...]]:
    if not gamma.full_dimensional:
        return []
    return [q for q in gamma.facets if all(x > 0 for x in q)]


def _weights(q) -> np.ndarray:
    w = np.array([float(x) for x in q])
    return w / w.max()


def _zeros_2d(Pq: PolynomialSymbol) -> list[np.ndarray]:
    found = []
    for s in (1, -1):
        deg = max(a[0] for a in Pq.terms)
        re = [Fraction(0)] * (deg + 1)
        im = [Fraction(0)] * (deg + 1)
        for (a0, a1), c in Pq.terms.items():
            sign = s ** a1
            re[a0] += sign * c.re
            im[a0] += sign * c.im
        try:
            for x in real_roots_exact(re, im):
                found.append(np.array([x, float(s)]))
        except ValueError:
            continue
    for s in (1, -1):
        val = sum((c * (s ** a[0]) for a, c in Pq.terms.items() if a[1] == 0), Fraction(0))
        if not val:
            found.append(np.array([float(s), 0.0]))
    return found


def _zeros_descent(Pq: PolynomialSymbol, starts: np.ndarray) -> list[np.ndarray]:
    def f(z):
        nz = np.linalg.norm(z)
        if nz == 0:
            return 1.0
        return float(np.exp(2 * log_abs(Pq, z / nz)[0]))

    vals = np.exp(log_abs(Pq, starts))
    order = np.argsort(vals, kind="stable")[:16]
    found = []
    for k in order:
        res = minimize(f, starts[k], method="BFGS", options={"gtol": 1e-14, "maxiter": 200})
        z = res.x / np.linalg.norm(res.x)
        if abs(np.exp(log_abs(Pq, z)[0])) < DEGENERACY_THRESHOLD:
            found.append(z)
    return found


def degeneracy_rays(P: PolynomialSymbol, gamma: NewtonPolyhedron, cfg: SamplingConfig):
    """Quasi-rays through real zeros of each facet's quasi-principal part.

    Returns ``(rays, records)``; each record names the facet normal and the
    unit direction found.
    """
    rays: list[Ray] = []
    records = []
    starts = unit_directions(P.dimension, cfg.directions_count, cfg.seed)
    for q in _positive_facets(gamma):
        Pq = quasi_principal_part(P, q)
        w = _weights(q)
        if P.dimension == 2:
            zeros = _zeros_2d(Pq)
        elif P.dimension >= 3:
            zeros = _zeros_descent(Pq, starts)
        else:
            zeros = []
        for z in zeros:
            base = Ray(z, w, "degenerate").points(np.array([1.0]))[0]
            if any(np.allclose(base, r.z, atol=1e-12) and np.array_equal(r.w, w) for r in rays):
                continue
            rays.append(Ray(base, w, "degenerate"))
            records.append({"facet": [str(x) for x in q], "direction": [float(x) for x in base]})
            for eps in (1e-2, 1e-3, 1e-4):
                for j in range(P.dimension):
                    for sgn in (1.0, -1.0):
                        zp = base.copy()
                        zp[j] += sgn * eps
                        if not zp.any():
                            continue
                        zp = Ray(zp, w, "refined").points(np.array([1.0]))[0]
                        rays.append(Ray(zp, w, "refined"))
    return rays, records


def sweep_rays(P: PolynomialSymbol, gamma: NewtonPolyhedron, cfg: SamplingConfig):
    dirs = unit_directions(P.dimension, cfg.directions_count, cfg.seed)
    ones = np.ones(P.dimension)
    rays = [Ray(d, ones, "direction") for d in dirs]
    for q in _positive_facets(gamma):
        w = _weights(q)
        if np.all(w == 1.0):
            continue
        rays.extend(Ray(d, w, "quasi") for d in dirs)
    deg_rays, records = degeneracy_rays(P, gamma, cfg)
    rays.extend(deg_rays)
    return rays, records


def _sample(rays: list[Ray], radii: np.ndarray) -> np.ndarray:
    return np.stack([r.points(radii) for r in rays])  # (R, K, n)


def _pick_witness(X: np.ndarray, rays_idx: Sequence[int], scores: np.ndarray | None = None) -> tuple[float, ...]:
    """Unit direction (at the last radius) of the best-scoring ray; near ties
    go to the lexicographically largest direction."""
    rays_idx = list(rays_idx)
    if scores is not None:
        top = np.max(scores[rays_idx])
        rays_idx = [i for i in rays_idx if scores[i] >= top - 1e-9 * max(1.0, abs(top))]
    dirs = [X[i, -1] / np.linalg.norm(X[i, -1]) for i in rays_idx]
    best = canonical_order(dirs)[0]
    return tuple(float(x) for x in dirs[best])


# ---------------------------------------------------------------------------

def mq_test(P: PolynomialSymbol, cfg: SamplingConfig | None = None) -> ClassificationVerdict:
    """Sampled test of ``|ξ|_P <= C (1 + |P(ξ)|)`` with a regular ``Γ(P)``."""
    cfg = cfg or SamplingConfig()
    gamma = symbol_polyhedron(P)
    radii = cfg.radii()
    rays, records = sweep_rays(P, gamma, cfg)
    X = _sample(rays, radii)
    R, K, n = X.shape
    flat = X.reshape(-1, n)
    logratio = (log_weight(gamma, flat) - np.logaddexp(0.0, log_abs(P, flat))).reshape(R, K)
    envelope = logratio.max(axis=0)
    bounded, slope, last_over_median = is_bounded(radii, envelope, cfg.growth_tolerance)
    per_ray_slope = np.array([loglog_slope(radii, row) for row in logratio])
    details = {
        "radii": [float(r) for r in radii],
        "ratio_envelope": [float(np.exp(v)) for v in envelope],
        "slope": _num(slope),
        "last_over_median": _num(last_over_median),
        "rays": len(rays),
        "degeneracies": records,
    }
    C = float(np.exp(logratio.max()))
    if not gamma.regular:
        witness = _pick_witness(X, range(R), logratio[:, -1])
        return ClassificationVerdict(FAILS, C, witness, details, reason="non-regular polyhedron")
    if bounded:
        return ClassificationVerdict(HOLDS, C, None, details, reason="ratio bounded on the sweep")
    growing = [i for i in range(R) if per_ray_slope[i] > cfg.growth_tolerance]
    # a growing degeneracy quasi-ray is the sharpest witness; refined neighbours
    # can carry a marginally larger raw ratio at finite radius
    degenerate = [i for i in growing if rays[i].kind == "degenerate"]
    if degenerate:
        witness = _pick_witness(X, degenerate, per_ray_slope)
    else:
        witness = _pick_witness(X, growing or list(range(R)), logratio[:, -1])
    return ClassificationVerdict(
        FAILS, C, witness, details,
        reason=f"ratio |ξ|_P/(1+|P|) grows with log-log slope {slope:.3g}",
    )


# ---------------------------------------------------------------------------

def _log_delta(P: PolynomialSymbol, X: np.ndarray, derivs=None) -> np.ndarray:
    if derivs is None:
        derivs = nonzero_derivatives(P)
    logP = log_abs(P, X)
    out = np.full(X.shape[0], np.inf)
    for alpha, D in derivs.items():
        logD = log_abs(D, X)
        with np.errstate(invalid="ignore"):
            cand = np.where(np.isneginf(logD), np.inf, (logP - logD) / sum(alpha))
        out = np.minimum(out, cand)
    return out


def dist_proxy(P: PolynomialSymbol, xi) -> float | np.ndarray:
    """``δ(ξ) = min_{α≠0, ∂^αP(ξ)≠0} (|P(ξ)| / |∂^αP(ξ)|)^{1/|α|}``.

    A stand-in for the distance from real ``ξ`` to the complex zeros of
    ``P``; ``+inf`` for a non-zero constant.
    """
    if P.is_zero():
        raise ValueError("zero symbol")
    X = np.atleast_2d(np.asarray(xi, dtype=float))
    if X.shape[1] != P.dimension:
        raise ValueError("dimension mismatch")
    out = np.exp(_log_delta(P, X))
    return float(out[0]) if np.ndim(xi) == 1 else out


class ConstantRestrictionError(ValueError):
    """Every coordinate-line restriction of ``P`` through the point is constant."""


def _dist_upper_batch(P: PolynomialSymbol, X: np.ndarray) -> np.ndarray:
    out = np.full(X.shape[0], np.inf)
    any_axis = np.zeros(X.shape[0], dtype=bool)
    for j in range(P.dimension):
        coeffs = restriction_coefficients(P, X, j)
        for k in range(X.shape[0]):
            try:
                roots = complex_roots(coeffs[k])
            except ValueError:
                continue
            any_axis[k] = True
            out[k] = min(out[k], float(np.min(np.abs(X[k, j] - roots))))
    if not any_axis.all():
        bad = int(np.flatnonzero(~any_axis)[0])
        raise ConstantRestrictionError(f"all coordinate restrictions constant at {X[bad].tolist()}")
    return out


def dist_upper(P: PolynomialSymbol, xi) -> float | np.ndarray:
    """Upper bound on the distance to the zero variety from roots along
    coordinate lines through ``ξ``."""
    X = np.atleast_2d(np.asarray(xi, dtype=float))
    if X.shape[1] != P.dimension:
        raise ValueError("dimension mismatch")
    out = _dist_upper_batch(P, X)
    return float(out[0]) if np.ndim(xi) == 1 else out


def hypoellipticity_test(P: PolynomialSymbol, cfg: SamplingConfig | None = None) -> ClassificationVerdict:
    """Sampled evidence for hypoellipticity.

    Fails when some sweep curve keeps ``|P|/|ξ|_P -> 0`` while the distance
    bound to the zero variety does not grow.  Holds when every derivative
    ratio ``|∂^αP|/|P|`` decays with a positive exponent ``ρ̂`` and the
    proxy distance grows like ``|ξ|^d̂`` with a stable ``d̂ > 0``.
    """
    if P.is_constant():
        raise ValueError("hypoellipticity test needs a non-constant symbol")
    cfg = cfg or SamplingConfig()
    tol = cfg.growth_tolerance
    gamma = symbol_polyhedron(P)
    radii = cfg.radii()
    rays, records = sweep_rays(P, gamma, cfg)
    X = _sample(rays, radii)
    R, K, n = X.shape
    flat = X.reshape(-1, n)
    logP = log_abs(P, flat).reshape(R, K)
    rel = logP - log_weight(gamma, flat).reshape(R, K)

    failing = []
    dist_traces = {}
    for i in range(R):
        zeroish = bool(np.all(rel[i] <= np.log(ZERO_RATIO)))
        decaying = loglog_slope(radii, np.maximum(rel[i], -745.0)) < -tol
        if not (zeroish or decaying):
            continue
        du = _dist_upper_batch(P, X[i])
        dist_traces[i] = du
        tiny = bool(np.all(du <= ZERO_DISTANCE * radii))
        with np.errstate(divide="ignore"):
            flat_growth = loglog_slope(radii, np.log(du)) <= tol
        if tiny or flat_growth:
            failing.append(i)

    details = {
        "radii": [float(r) for r in radii],
        "rays": len(rays),
        "degeneracies": records,
    }
    if failing:
        witness = _pick_witness(X, failing)
        w_idx = next(i for i in failing if np.allclose(X[i, -1] / np.linalg.norm(X[i, -1]), witness))
        details["witness_dist_upper"] = [float(x) for x in dist_traces[w_idx]]
        details["witness_abs_symbol_over_weight"] = [float(np.exp(v)) for v in rel[w_idx]]
        return ClassificationVerdict(
            FAILS, 0.0, witness, details,
            reason="real zeros at infinity: |P|/|ξ|_P -> 0 with non-growing distance to N(P)",
        )
    if not gamma.regular:
        witness = _pick_witness(X, range(R), -rel[:, -1])
        return ClassificationVerdict(
            FAILS, 0.0, witness, details,
            reason="non-regular Newton polyhedron (hypoelliptic symbols have regular ones)",
        )

    derivs = nonzero_derivatives(P)
    logxi = np.log(np.linalg.norm(flat, axis=1)).reshape(R, K)
    finite_P = np.isfinite(logP)
    rho_by_alpha = {}
    slopes = {}
    worst_C = 0.0
    ratio_logs = {}
    for alpha, D in derivs.items():
        logD = log_abs(D, flat).reshape(R, K)
        ratio = np.where(finite_P, logD - logP, -np.inf)
        ratio_logs[alpha] = ratio
        env = ratio.max(axis=0)
        s = loglog_slope(radii, env)
        slopes[alpha] = s
        rho_by_alpha[alpha] = -s / sum(alpha)
    rho_hat = min(rho_by_alpha.values()) if rho_by_alpha else float("nan")
    for alpha, ratio in ratio_logs.items():
        if np.isfinite(rho_hat):
            worst_C = max(worst_C, float(np.exp(np.max(ratio + rho_hat * sum(alpha) * logxi))))

    logdelta = _log_delta(P, flat, derivs).reshape(R, K)
    delta_env = np.where(finite_P, logdelta, np.inf).min(axis=0)
    d_hat = loglog_slope(radii, delta_env)
    half = K // 2
    d_low = loglog_slope(radii[: half + 1], delta_env[: half + 1])
    d_high = loglog_slope(radii[half:], delta_env[half:])
    stable = abs(d_high - d_low) <= 0.2

    details.update(
        {
            "derivative_slopes": {_alpha_key(a): _num(s) for a, s in slopes.items()},
            "delta_envelope": [float(np.exp(v)) for v in delta_env],
            "d_hat_lower_half": _num(d_low),
            "d_hat_upper_half": _num(d_high),
        }
    )
    exponents = {"d_hat": d_hat, "rho_hat": rho_hat}
    decays = all(s < 0 for s in slopes.values())
    if decays and rho_hat > tol and d_hat > tol and stable:
        return ClassificationVerdict(
            HOLDS, worst_C, None, details,
            reason="derivative ratios decay and proxy distance grows", exponents=exponents,
        )
    return ClassificationVerdict(
        INCONCLUSIVE, worst_C, None, details,
        reason="no zeros at infinity found, but decay/growth exponents are not conclusive",
        exponents=exponents,
    )


def _alpha_key(alpha) -> str:
    return ",".join(str(a) for a in alpha)
