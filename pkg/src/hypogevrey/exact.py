"""Small exact linear-algebra helpers over ``Fraction``."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Vec = tuple[Fraction, ...]


def to_vec(v: Sequence) -> Vec:
    return tuple(Fraction(x) for x in v)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    M = [list(map(Fraction, r)) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def null_space(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Basis of ``{x : rows @ x = 0}``, each vector scaled to coprime integers."""
    R, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(primitive(x))
    return basis


def primitive(v: Sequence[Fraction]) -> Vec:
    """Scale a rational vector to the coprime integer vector with the same direction."""
    v = [Fraction(x) for x in v]
    den = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = _gcd(g, abs(k))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(k // g) for k in ints)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vec | None:
    """Unique solution of the square system ``A x = b``, or ``None`` if singular."""
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if piv != list(range(n)):
        return None
    return tuple(R[i][n] for i in range(n))


def affine_rank(points: Sequence[Vec]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]])
