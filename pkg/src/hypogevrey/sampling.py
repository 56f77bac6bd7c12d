"""Deterministic radius/direction sweeps and the log-log growth decision rule."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc


@dataclass(frozen=True)
class SamplingConfig:
    r_min: float = 10.0
    r_max: float = 1e6
    radii_count: int = 13
    directions_count: int = 64
    seed: int = 0
    growth_tolerance: float = 0.05

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.radii_count < 2 or self.directions_count < 2:
            raise ValueError("radii_count and directions_count must be at least 2")
        if self.growth_tolerance <= 0:
            raise ValueError("growth_tolerance must be positive")

    def radii(self) -> np.ndarray:
        k = np.arange(self.radii_count)
        return self.r_min * (self.r_max / self.r_min) ** (k / (self.radii_count - 1))

    def to_json(self) -> dict:
        return asdict(self)


class Ray(NamedTuple):
    """Curve ``t -> t^w ∘ z``; straight when all weights equal 1."""

    z: np.ndarray
    w: np.ndarray
    kind: str

    def points(self, radii: np.ndarray) -> np.ndarray:
        """Points of the curve at the given Euclidean radii, shape ``(K, n)``."""
        if np.all(self.w == 1.0):
            return radii[:, None] * self.z[None, :]
        return quasi_points(self.z, self.w, radii)


def quasi_points(z: np.ndarray, w: np.ndarray, radii: np.ndarray) -> np.ndarray:
    nz = z != 0
    logz2 = np.log(z[nz] ** 2)
    wz = w[nz]
    logr = np.log(radii)
    span = (60.0 + np.abs(logr)) / w.min()
    lo, hi = -span, span.copy()
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        e = 2 * wz[None, :] * mid[:, None] + logz2[None, :]
        top = e.max(axis=1)
        lognorm = 0.5 * (top + np.log(np.exp(e - top[:, None]).sum(axis=1)))
        big = lognorm > logr
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    s = 0.5 * (lo + hi)
    return np.exp(w[None, :] * s[:, None]) * z[None, :]


def unit_directions(n: int, count: int, seed: int) -> np.ndarray:
    """Deterministic, well-spread unit vectors plus all signed coordinate axes."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        theta = 2 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        sob = qmc.Sobol(d=n, scramble=True, seed=seed)
        m = int(np.ceil(np.log2(max(count, 2))))
        u = sob.random_base2(m)[:count]
        g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    axes = np.vstack([np.eye(n), -np.eye(n)])
    return _dedupe(np.vstack([axes, dirs]))


def _dedupe(dirs: np.ndarray) -> np.ndarray:
    keep: list[int] = []
    for i, d in enumerate(dirs):
        if not keep or np.abs(dirs[keep] - d).max(axis=1).min() > 1e-14:
            keep.append(i)
    return dirs[keep]


def canonical_order(dirs: Sequence[np.ndarray]) -> list[int]:
    """Indices sorting directions lexicographically, largest first."""
    return sorted(range(len(dirs)), key=lambda i: tuple(-x for x in np.round(dirs[i], 12)))


def loglog_slope(radii: np.ndarray, log_values: np.ndarray) -> float:
    """Least-squares slope of ``log value`` against ``log r`` over finite entries."""
    x = np.log(np.asarray(radii, dtype=float))
    y = np.asarray(log_values, dtype=float)
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(x[ok], y[ok], 1)[0])


def is_bounded(radii: np.ndarray, log_values: np.ndarray, tolerance: float) -> tuple[bool, float, float]:
    """Decision rule: slope ≤ tolerance and last value ≤ 10 × median.

    Returns ``(bounded, slope, last_over_median)``.
    """
    y = np.asarray(log_values, dtype=float)
    if np.any(y == np.inf):
        return False, float("inf"), float("inf")
    finite = np.isfinite(y)
    if finite.sum() < 2:
        return True, 0.0, 0.0
    slope = loglog_slope(radii, y)
    last = y[finite][-1]
    last_over_median = float(np.exp(last - np.median(y[finite])))
    ok = bool(slope <= tolerance and last_over_median <= 10.0)
    return ok, slope, last_over_median
