"""Exact-rational Newton polyhedra.

The hull of ``{0} ∪ points`` is computed with exact ``Fraction`` arithmetic by
gift wrapping: each facet's ridges come from a hull one dimension lower, and
the neighbouring facet across a ridge is found by rotating the supporting
hyperplane around it.  The planar case uses a monotone chain.

A full-dimensional polyhedron is described by its facet normals ``q`` with
``<q, a> <= 1``; facets lying in coordinate hyperplanes (offset 0) are kept
separately and are not part of that set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact import Vec, affine_rank, dot, null_space, primitive, rref, sub, to_vec


class PolyhedronError(ValueError):
    pass


class DegeneratePolyhedronError(PolyhedronError):
    """The polyhedron is not full-dimensional."""


class NonRegularPolyhedronError(PolyhedronError):
    """The query needs a regular polyhedron."""


# ---------------------------------------------------------------------------
# hull kernels; all work on lists of exact vectors and return index sets

Facet = tuple[Vec, Fraction, frozenset]


def _hull_1d(pts: Sequence[Vec]) -> tuple[list[Facet], set[int]]:
    xs = [p[0] for p in pts]
    lo, hi = min(xs), max(xs)
    lo_idx = frozenset(i for i, x in enumerate(xs) if x == lo)
    hi_idx = frozenset(i for i, x in enumerate(xs) if x == hi)
    facets = [((Fraction(-1),), -lo, lo_idx), ((Fraction(1),), hi, hi_idx)]
    return facets, {min(lo_idx), min(hi_idx)}


def _cross(o: Vec, a: Vec, b: Vec) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(pts: Sequence[Vec]) -> tuple[list[Facet], set[int]]:
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    # collapse duplicates
    uniq: list[int] = []
    for i in order:
        if not uniq or pts[uniq[-1]] != pts[i]:
            uniq.append(i)

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and _cross(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    ring = lower[:-1] + upper[:-1]
    facets = []
    for k, i in enumerate(ring):
        j = ring[(k + 1) % len(ring)]
        e = sub(pts[j], pts[i])
        a = primitive((e[1], -e[0]))
        b = dot(a, pts[i])
        on = frozenset(m for m, p in enumerate(pts) if dot(a, p) == b)
        facets.append((a, b, on))
    return facets, set(ring)


def _pivot(anchor: Vec, dirs: list[Vec], u: Vec, pts: Sequence[Vec]) -> tuple[Vec, Fraction]:
    """Rotate a supporting hyperplane about the flat ``anchor + span(dirs)``.

    Candidate normals are oriented to have positive component along ``u``;
    the plane reached first (smallest rotation) is returned.
    """
    d = len(anchor)
    best: tuple[Vec, Fraction] | None = None
    for p in pts:
        if best is not None and dot(best[0], p) <= best[1]:
            continue
        ns = null_space(list(dirs) + [sub(p, anchor)], d)
        if len(ns) != 1:
            continue
        a = ns[0]
        s = dot(a, u)
        if s == 0:
            continue
        if s < 0:
            a = tuple(-x for x in a)
        best = (a, dot(a, anchor))
    if best is None:
        raise PolyhedronError("pivot found no supporting hyperplane")
    return best


def _extend_within(a: Vec, dirs: list[Vec], target: int) -> list[Vec]:
    """Add projected unit vectors orthogonal to ``a`` until ``len(dirs) == target``."""
    d = len(a)
    out = list(dirs)
    aa = dot(a, a)
    for j in range(d):
        if len(out) >= target:
            break
        e = [Fraction(0)] * d
        e[j] = Fraction(1)
        proj = tuple(x - (a[j] / aa) * y for x, y in zip(e, a))
        if any(proj) and len(rref(out + [proj])[1]) > len(out):
            out.append(proj)
    return out


def _direction_basis(idx: Iterable[int], pts: Sequence[Vec]) -> tuple[Vec, list[Vec]]:
    idx = sorted(idx)
    anchor = pts[idx[0]]
    rows = [sub(pts[i], anchor) for i in idx[1:]]
    R, _ = rref(rows) if rows else ([], [])
    return anchor, [tuple(r) for r in R]


def _initial_facet(pts: Sequence[Vec]) -> tuple[Vec, Fraction]:
    d = len(pts[0])
    v0 = min(pts)
    a: Vec = tuple(Fraction(-1) if j == 0 else Fraction(0) for j in range(d))
    b = dot(a, v0)
    while True:
        on = [i for i, p in enumerate(pts) if dot(a, p) == b]
        anchor, dirs = _direction_basis(on, pts)
        if len(dirs) == d - 1:
            return a, b
        dirs = _extend_within(a, dirs, d - 2)
        u = null_space([a] + dirs, d)[0]
        a, b = _pivot(anchor, dirs, u, pts)


def _hull_nd(pts: Sequence[Vec]) -> tuple[list[Facet], set[int]]:
    d = len(pts[0])
    if d == 1:
        return _hull_1d(pts)
    if d == 2:
        return _hull_2d(pts)
    a0, b0 = _initial_facet(pts)
    facets: dict[frozenset, Facet] = {}
    seen_ridges: set[frozenset] = set()
    vertices: set[int] = set()
    first = frozenset(i for i, p in enumerate(pts) if dot(a0, p) == b0)
    facets[first] = (a0, b0, first)
    queue = [first]
    while queue:
        key = queue.pop()
        a, b, on = facets[key]
        on_list = sorted(on)
        j = next(k for k, x in enumerate(a) if x != 0)
        sub_pts = [tuple(x for k, x in enumerate(pts[i]) if k != j) for i in on_list]
        sub_facets, sub_vertices = _hull_nd(sub_pts)
        vertices.update(on_list[i] for i in sub_vertices)
        for _, _, ridge_local in sub_facets:
            ridge = frozenset(on_list[i] for i in ridge_local)
            if ridge in seen_ridges:
                continue
            seen_ridges.add(ridge)
            anchor, dirs = _direction_basis(ridge, pts)
            u_in = null_space([a] + dirs, d)[0]
            inside = next(pts[i] for i in on_list if i not in ridge)
            if dot(u_in, sub(inside, anchor)) < 0:
                u_in = tuple(-x for x in u_in)
            na, nb = _pivot(anchor, dirs, tuple(-x for x in u_in), pts)
            nkey = frozenset(i for i, p in enumerate(pts) if dot(na, p) == nb)
            if nkey not in facets:
                facets[nkey] = (na, nb, nkey)
                queue.append(nkey)
    return list(facets.values()), vertices


def hull(points: Sequence[Sequence]) -> tuple[list[Vec], list[tuple[Vec, Fraction]], int]:
    """Exact convex hull of a finite point set.

    Returns ``(vertices, inequalities, dim)`` where ``inequalities`` are pairs
    ``(a, b)`` meaning ``<a, x> <= b`` (primitive integer ``a``), present only
    when the set is full-dimensional, and ``dim`` is the affine dimension.
    Vertices are sorted lexicographically.
    """
    pts = sorted(set(to_vec(p) for p in points))
    if not pts:
        raise PolyhedronError("empty point set")
    d = len(pts[0])
    k = affine_rank(pts)
    if k == 0:
        return [pts[0]], [], 0
    if k < d:
        _, pivots = rref([sub(p, pts[0]) for p in pts[1:]])
        proj = [tuple(p[c] for c in pivots) for p in pts]
        _, vidx = _hull_nd(proj)
        return sorted(pts[i] for i in vidx), [], k
    facets, vidx = _hull_nd(pts)
    ineqs = sorted((a, b) for a, b, _ in facets)
    return sorted(pts[i] for i in vidx), ineqs, d


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolyhedron:
    """Convex hull of the origin and a finite set of non-negative points.

    ``facets`` holds the normals ``q`` (the set ``A(Γ)``) of every facet
    ``<q, a> = 1`` not through the origin.  ``coordinate_facets`` and
    ``origin_facets`` keep the remaining facet normals (offset 0), so that
    membership can be tested even for non-regular polyhedra.
    """

    dimension: int
    vertices: tuple[Vec, ...]
    facets: tuple[Vec, ...]
    full_dimensional: bool
    origin_facets: tuple[Vec, ...] = field(default=())

    @property
    def regular(self) -> bool:
        return is_regular(self)

    def contains(self, alpha: Sequence) -> bool:
        alpha = to_vec(alpha)
        if any(x < 0 for x in alpha):
            return False
        if not self.full_dimensional:
            raise DegeneratePolyhedronError("membership needs a full-dimensional polyhedron")
        return all(dot(q, alpha) <= 1 for q in self.facets) and all(
            dot(a, alpha) <= 0 for a in self.origin_facets
        )

    def vertex_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices], dtype=float)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "vertices": [[_rat(x) for x in v] for v in self.vertices],
            "facets": [[_rat(x) for x in q] for q in self.facets],
            "regular": self.regular,
            "full_dimensional": self.full_dimensional,
            "formal_order": _rat(formal_order(self)) if self.regular else None,
        }


def _rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _is_coordinate_plane(a: Vec) -> bool:
    nz = [x for x in a if x != 0]
    return len(nz) == 1 and nz[0] < 0


def _from_points(pts: list[Vec], n: int) -> NewtonPolyhedron:
    vertices, ineqs, dim = hull(pts)
    facets = []
    origin_facets = []
    for a, b in ineqs:
        if b == 0:
            origin_facets.append(a)
        else:
            facets.append(tuple(x / b for x in a))
    return NewtonPolyhedron(
        dimension=n,
        vertices=tuple(vertices),
        facets=tuple(sorted(facets)),
        full_dimensional=dim == n,
        origin_facets=tuple(sorted(origin_facets)),
    )


def newton_polyhedron(points: Iterable[Sequence], dimension: int) -> NewtonPolyhedron:
    """Newton polyhedron ``conv({0} ∪ points)`` with exact vertices and facets."""
    pts = [to_vec(p) for p in points]
    if not pts:
        raise PolyhedronError("empty point set")
    for p in pts:
        if len(p) != dimension:
            raise PolyhedronError(f"point {p} does not have {dimension} components")
        if any(x < 0 for x in p):
            raise PolyhedronError(f"point {tuple(map(str, p))} has a negative coordinate")
    pts.append(tuple(Fraction(0) for _ in range(dimension)))
    return _from_points(pts, dimension)


def symbol_polyhedron(P) -> NewtonPolyhedron:
    """``Γ(P)`` of a :class:`~hypogevrey.symbol.PolynomialSymbol`."""
    return newton_polyhedron(list(P.terms) or [(0,) * P.dimension], P.dimension)


def facet_normals(gamma: NewtonPolyhedron) -> tuple[Vec, ...]:
    if not gamma.full_dimensional:
        raise DegeneratePolyhedronError("facet normals need a full-dimensional polyhedron")
    return gamma.facets


def is_regular(gamma: NewtonPolyhedron) -> bool:
    """Full-dimensional, every offset facet normal strictly positive, and the
    only facets through the origin are coordinate hyperplanes."""
    if not gamma.full_dimensional or not gamma.facets:
        return False
    if not all(x > 0 for q in gamma.facets for x in q):
        return False
    return all(_is_coordinate_plane(a) for a in gamma.origin_facets)


def _require_regular(gamma: NewtonPolyhedron):
    if not is_regular(gamma):
        raise NonRegularPolyhedronError("polyhedron is not regular")


def k_of(gamma: NewtonPolyhedron, alpha: Sequence) -> Fraction:
    """Gauge ``k(α, Γ) = max_q <α, q>``."""
    _require_regular(gamma)
    alpha = to_vec(alpha)
    if len(alpha) != gamma.dimension:
        raise ValueError("dimension mismatch")
    return max(dot(alpha, q) for q in gamma.facets)


def formal_order(gamma: NewtonPolyhedron) -> Fraction:
    """``μ(Γ) = max_{q, j} 1/q_j``."""
    _require_regular(gamma)
    return max(1 / x for q in gamma.facets for x in q)


def log_weight(gamma: NewtonPolyhedron, xi) -> np.ndarray:
    """``log |ξ|_Γ`` for a point or an ``(N, n)`` batch, computed via log-sum-exp."""
    X = np.atleast_2d(np.asarray(xi, dtype=float))
    if X.shape[1] != gamma.dimension:
        raise ValueError("dimension mismatch")
    V = gamma.vertex_array()
    with np.errstate(divide="ignore", invalid="ignore"):
        logX = np.log(np.abs(X))
        terms = np.where(V[None, :, :] == 0, 0.0, V[None, :, :] * logX[:, None, :]).sum(axis=-1)
    top = terms.max(axis=1)
    return top + np.log(np.exp(terms - top[:, None]).sum(axis=1))


def weight(gamma: NewtonPolyhedron, xi) -> float | np.ndarray:
    """``|ξ|_Γ = Σ_{ν ∈ V(Γ)} |ξ|^ν``; scalar for a single point."""
    out = np.exp(log_weight(gamma, xi))
    return float(out[0]) if np.ndim(xi) == 1 else out


def scale(gamma: NewtonPolyhedron, c) -> NewtonPolyhedron:
    """The polyhedron ``c·Γ``; normals scale by ``1/c``."""
    c = Fraction(c)
    if c <= 0:
        raise PolyhedronError("scale factor must be positive")
    return NewtonPolyhedron(
        dimension=gamma.dimension,
        vertices=tuple(sorted(tuple(c * x for x in v) for v in gamma.vertices)),
        facets=tuple(sorted(tuple(x / c for x in q) for q in gamma.facets)),
        full_dimensional=gamma.full_dimensional,
        origin_facets=gamma.origin_facets,
    )
