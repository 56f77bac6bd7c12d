"""Independent brute-force oracles used by the test suite."""
from __future__ import annotations

from fractions import Fraction
from itertools import product


def _phase_one_feasible(A: list[list[Fraction]], b: list[Fraction]) -> bool:
    """Is ``{λ >= 0 : Aλ = b}`` non-empty?  Exact phase-one simplex, Bland's rule."""
    m, n = len(A), len(A[0])
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        rows.append([sign * x for x in A[i]] + [Fraction(int(i == k)) for k in range(m)] + [sign * b[i]])
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimize sum of artificials, written as reduced costs
    cost = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(width + 1):
            cost[j] -= r[j]
    for j in range(n, width):
        cost[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        ratios = [(rows[i][-1] / rows[i][enter], basis[i], i) for i in range(m) if rows[i][enter] > 0]
        if not ratios:
            break
        _, _, leave = min(ratios)
        piv = rows[leave][enter]
        rows[leave] = [x / piv for x in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[leave])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, rows[leave])]
        basis[leave] = enter
    return -cost[-1] == 0


def in_hull(p, others) -> bool:
    """Exact test of ``p ∈ conv(others)``."""
    if not others:
        return False
    p = [Fraction(x) for x in p]
    cols = [[Fraction(x) for x in q] for q in others]
    A = [[Fraction(1)] * len(cols)] + [[c[j] for c in cols] for j in range(len(p))]
    b = [Fraction(1)] + p
    return _phase_one_feasible(A, b)


def extreme_points(points) -> set[tuple[Fraction, ...]]:
    """Vertices of ``conv(points)``: points not in the hull of the remaining ones."""
    pts = sorted({tuple(Fraction(x) for x in p) for p in points})
    return {p for p in pts if not in_hull(p, [q for q in pts if q != p])}


def sigma_scan(vertices) -> int:
    """Smallest σ >= 1 making every σ·v even and integral, by exhaustive scan."""
    vs = [[Fraction(x) for x in v] for v in vertices]
    limit = 2
    for v in vs:
        for x in v:
            limit *= x.denominator
    for sigma in range(1, limit + 1):
        if all((sigma * x).denominator == 1 and (sigma * x).numerator % 2 == 0 for v in vs for x in v):
            return sigma
    raise AssertionError("no σ found below the scan limit")


def random_exponent_set(rng, n: int, max_points: int = 15, max_coord: int = 8):
    k = int(rng.integers(1, max_points + 1))
    return [tuple(int(x) for x in rng.integers(0, max_coord + 1, size=n)) for _ in range(k)]


def grid_points(n: int, max_coord: int):
    return list(product(range(max_coord + 1), repeat=n))


def polyhedron_vertices_from_normals(normals, n: int) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{α >= 0 : <q, α> <= 1 for all q}`` by brute-force enumeration."""
    from itertools import combinations

    from hypogevrey.exact import solve

    planes = [(tuple(Fraction(x) for x in q), Fraction(1)) for q in normals]
    for j in range(n):
        planes.append((tuple(Fraction(int(k == j)) for k in range(n)), Fraction(0)))
    out = set()
    for combo in combinations(planes, n):
        x = solve([a for a, _ in combo], [b for _, b in combo])
        if x is None or any(c < 0 for c in x):
            continue
        if all(sum(a * c for a, c in zip(q, x)) <= 1 for q, _ in planes[: len(normals)]):
            out.add(x)
    return sorted(out)
