"""Sparse multivariate polynomial symbols with Gaussian-rational coefficients.

A symbol ``P(xi) = sum_a c_a xi^a`` is stored as an immutable map from
multi-indices (tuples of non-negative ints) to exact coefficients.  Floating
point only appears at evaluation time.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

MultiIndex = tuple[int, ...]
Number = Union[int, Fraction, "GaussianRational"]

# log-magnitude above which direct evaluation is abandoned for the scaled path
_LOG_OVERFLOW_GUARD = 600.0


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Number) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value), Fraction(0))
        raise TypeError(f"cannot treat {value!r} as an exact Gaussian rational")

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {_imag_str(abs(self.im))})"

    def __repr__(self):
        return f"GaussianRational({self})"


def _imag_str(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


I = GaussianRational(0, 1)


def _check_index(alpha: Sequence[int], dimension: int) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dimension:
        raise ValueError(f"multi-index {alpha} does not have {dimension} components")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index {alpha} has a negative component")
    return alpha


class PolynomialSymbol:
    """Immutable sparse polynomial in ``dimension`` variables.

    ``terms`` maps each multi-index to a non-zero :class:`GaussianRational`.
    """

    __slots__ = ("dimension", "terms", "order", "_exps", "_coeffs")

    def __init__(self, dimension: int, terms: Mapping[Sequence[int], Number] | None = None):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        clean: dict[MultiIndex, GaussianRational] = {}
        for alpha, c in (terms or {}).items():
            alpha = _check_index(alpha, dimension)
            c = GaussianRational.coerce(c)
            total = clean.get(alpha, GaussianRational()) + c
            if total:
                clean[alpha] = total
            else:
                clean.pop(alpha, None)
        ordered = dict(sorted(clean.items()))
        self.dimension = dimension
        self.terms: Mapping[MultiIndex, GaussianRational] = MappingProxyType(ordered)
        self.order = max((sum(a) for a in ordered), default=0)
        if ordered:
            self._exps = np.array(list(ordered), dtype=np.int64)
        else:
            self._exps = np.zeros((0, dimension), dtype=np.int64)
        self._coeffs = np.array([complex(c) for c in ordered.values()], dtype=complex)

    @classmethod
    def constant(cls, dimension: int, value: Number) -> "PolynomialSymbol":
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, dimension: int, j: int) -> "PolynomialSymbol":
        """The coordinate ``xi_j`` (0-based ``j``)."""
        alpha = [0] * dimension
        alpha[j] = 1
        return cls(dimension, {tuple(alpha): 1})

    @property
    def exponents(self) -> list[MultiIndex]:
        return list(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(a) == 0 for a in self.terms)

    # arithmetic -----------------------------------------------------------
    def _lift(self, other) -> "PolynomialSymbol":
        if isinstance(other, PolynomialSymbol):
            if other.dimension != self.dimension:
                raise ValueError("dimension mismatch")
            return other
        return PolynomialSymbol.constant(self.dimension, other)

    def __add__(self, other):
        other = self._lift(other)
        merged = dict(self.terms)
        for a, c in other.terms.items():
            merged[a] = merged.get(a, GaussianRational()) + c
        return PolynomialSymbol(self.dimension, merged)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialSymbol(self.dimension, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[MultiIndex, GaussianRational] = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, GaussianRational()) + c * d
        return PolynomialSymbol(self.dimension, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = PolynomialSymbol.constant(self.dimension, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, PolynomialSymbol):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.dimension, tuple(self.terms.items())))

    def __repr__(self):
        return f"PolynomialSymbol({self.dimension}, {format_symbol(self)!r})"

    def __str__(self):
        return format_symbol(self)


# ---------------------------------------------------------------------------
# parsing

class SymbolSyntaxError(ValueError):
    """Malformed symbol text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"(?P<rat>\d+/\d+)|(?P<dec>\d+\.\d*|\.\d+)|(?P<int>\d+)"
    r"|(?P<var>x\d+)|(?P<imag>i)|(?P<op>[-+*^()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr  := term (('+'|'-') term)*
    # term  := unary ('*' unary)*
    # unary := ('-'|'+') unary | power
    # power := atom ('^' integer)?
    # atom  := number | 'i' | variable | '(' expr ')'

    def __init__(self, text: str, dimension: int):
        self.tokens = _tokenize(text)
        self.k = 0
        self.n = dimension

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def parse(self) -> PolynomialSymbol:
        if self.peek()[0] == "end":
            raise SymbolSyntaxError("empty expression", 0)
        value = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise SymbolSyntaxError(f"unexpected {text!r}", pos)
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            value = value * self.unary()
        return value

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, text, pos = self.take()
            if kind == "int":
                return base ** int(text)
            if kind in ("rat", "dec"):
                raise SymbolSyntaxError(f"non-integer exponent {text!r}", pos)
            if kind == "op" and text == "-":
                raise SymbolSyntaxError("non-integer exponent (negative)", pos)
            raise SymbolSyntaxError(f"expected integer exponent, found {text or 'end'!r}", pos)
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind in ("int", "rat", "dec"):
            return PolynomialSymbol.constant(self.n, Fraction(text))
        if kind == "imag":
            return PolynomialSymbol.constant(self.n, I)
        if kind == "var":
            j = int(text[1:])
            if not 1 <= j <= self.n:
                raise SymbolSyntaxError(
                    f"variable {text} out of range for dimension {self.n}", pos
                )
            return PolynomialSymbol.variable(self.n, j - 1)
        if (kind, text) == ("op", "("):
            value = self.expr()
            kind2, text2, pos2 = self.take()
            if (kind2, text2) != ("op", ")"):
                raise SymbolSyntaxError(f"expected ')', found {text2 or 'end'!r}", pos2)
            return value
        raise SymbolSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse_symbol(text: str, dimension: int) -> PolynomialSymbol:
    """Parse ``text`` (variables ``x1..xN``, unit ``i``) into an expanded symbol.

    >>> parse_symbol("x1^2 - x2^2", 2).terms[(2, 0)]
    GaussianRational(1)
    """
    if dimension < 1:
        raise ValueError("dimension must be positive")
    return _Parser(text, dimension).parse()


def _monomial_str(alpha: MultiIndex) -> str:
    parts = []
    for j, a in enumerate(alpha):
        if a == 1:
            parts.append(f"x{j + 1}")
        elif a > 1:
            parts.append(f"x{j + 1}^{a}")
    return "*".join(parts)


def format_symbol(P: PolynomialSymbol) -> str:
    """Render ``P`` in the grammar accepted by :func:`parse_symbol`."""
    if P.is_zero():
        return "0"
    pieces = []
    ordered = sorted(P.terms.items(), key=lambda kv: (-sum(kv[0]), [-a for a in kv[0]]))
    for alpha, c in ordered:
        mono = _monomial_str(alpha)
        negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
        mag = -c if negative else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        pieces.append(("-" if negative else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# evaluation

class EvaluationOverflow(ArithmeticError):
    """Raised by :func:`evaluate` when the value is not representable.

    ``mantissa * exp(log_scale)`` is the value.
    """

    def __init__(self, mantissa: complex, log_scale: float):
        super().__init__(f"symbol value overflows: {mantissa} * exp({log_scale})")
        self.mantissa = mantissa
        self.log_scale = log_scale


def _as_points(P: PolynomialSymbol, points) -> np.ndarray:
    X = np.asarray(points)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[-1] != P.dimension:
        raise ValueError(
            f"point dimension {X.shape[-1]} does not match symbol dimension {P.dimension}"
        )
    return X


def _log_terms(P: PolynomialSymbol, X: np.ndarray):
    """Per-point, per-term log-magnitudes and unit phases of ``c_a x^a``."""
    absX = np.abs(X)
    with np.errstate(divide="ignore", invalid="ignore"):
        logX = np.log(absX)
        # exponent 0 times log 0 must contribute 0, not nan
        contrib = np.where(P._exps[None, :, :] == 0, 0.0, P._exps[None, :, :] * logX[:, None, :])
    logmag = contrib.sum(axis=-1) + np.log(np.abs(P._coeffs))[None, :]
    unitX = np.where(absX > 0, X / np.where(absX > 0, absX, 1.0), 1.0)
    phase = np.prod(unitX[:, None, :] ** P._exps[None, :, :], axis=-1)
    phase = phase * (P._coeffs / np.abs(P._coeffs))[None, :]
    return logmag, phase


def evaluate_scaled(P: PolynomialSymbol, points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized evaluation returning ``(mantissa, log_scale)`` arrays.

    The value at each point is ``mantissa * exp(log_scale)``.  Where the
    largest term is modest the mantissa is the plain term sum and the scale is
    zero; otherwise terms are divided by the largest ``|c_a x^a|`` in the log
    domain before summation.
    """
    X = _as_points(P, points)
    npts = X.shape[0]
    if P.is_zero():
        return np.zeros(npts, dtype=complex), np.zeros(npts)
    logmag, phase = _log_terms(P, X)
    top = logmag.max(axis=1)
    scale = np.where(np.isfinite(top) & (top > _LOG_OVERFLOW_GUARD), top, 0.0)
    mantissa = np.empty(npts, dtype=complex)
    direct = scale == 0.0
    if direct.any():
        Xd = X[direct].astype(complex)
        mono = np.prod(Xd[:, None, :] ** P._exps[None, :, :], axis=-1)
        mantissa[direct] = mono @ P._coeffs
    if (~direct).any():
        rel = np.exp(logmag[~direct] - scale[~direct, None])
        mantissa[~direct] = (rel * phase[~direct]).sum(axis=1)
    return mantissa, scale


def log_abs(P: PolynomialSymbol, points) -> np.ndarray:
    """``log|P(x)|`` at each point (``-inf`` at zeros), overflow-safe."""
    mant, scale = evaluate_scaled(P, points)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(mant)) + scale


def evaluate(P: PolynomialSymbol, point: Sequence[complex]) -> complex:
    """Value of ``P`` at a single (complex) point."""
    pt = np.asarray(point)
    if pt.ndim != 1:
        raise ValueError("evaluate expects a single point; use evaluate_scaled for batches")
    mant, scale = evaluate_scaled(P, pt)
    m, s = complex(mant[0]), float(scale[0])
    if s == 0.0:
        return m
    if m == 0:
        return 0j
    if math.log(abs(m)) + s > 709.0:
        raise EvaluationOverflow(m, s)
    return m * math.exp(s)


def derivative(P: PolynomialSymbol, alpha: Sequence[int]) -> PolynomialSymbol:
    """Plain partial derivative ``d^alpha P`` (no ``1/i`` factors)."""
    alpha = _check_index(alpha, P.dimension)
    out = {}
    for beta, c in P.terms.items():
        if any(b < a for a, b in zip(alpha, beta)):
            continue
        factor = 1
        for a, b in zip(alpha, beta):
            for k in range(b - a + 1, b + 1):
                factor *= k
        out[tuple(b - a for a, b in zip(alpha, beta))] = c * factor
    return PolynomialSymbol(P.dimension, out)


def nonzero_derivatives(P: PolynomialSymbol) -> dict[MultiIndex, PolynomialSymbol]:
    """All non-vanishing ``d^alpha P`` with ``alpha != 0``, keyed by ``alpha``."""
    bounds = [max((a[j] for a in P.terms), default=0) for j in range(P.dimension)]
    out = {}
    for alpha in np.ndindex(*[b + 1 for b in bounds]):
        if sum(alpha) == 0:
            continue
        D = derivative(P, alpha)
        if not D.is_zero():
            out[tuple(int(a) for a in alpha)] = D
    return out


def restriction_coefficients(P: PolynomialSymbol, base, axis: int) -> np.ndarray:
    """Coefficients (lowest degree first) of ``z -> P(base with slot axis = z)``.

    ``base`` may be an ``(N, n)`` array, giving an ``(N, deg+1)`` result.
    """
    X = np.atleast_2d(np.asarray(base, dtype=complex))
    if X.shape[1] != P.dimension:
        raise ValueError("dimension mismatch")
    deg = max((a[axis] for a in P.terms), default=0)
    out = np.zeros((X.shape[0], deg + 1), dtype=complex)
    if P.is_zero():
        return out
    others = P._exps.copy()
    others[:, axis] = 0
    mono = np.prod(X[:, None, :] ** others[None, :, :], axis=-1) * P._coeffs[None, :]
    for t, alpha in enumerate(P.terms):
        out[:, alpha[axis]] += mono[:, t]
    return out


def symbol_from_terms(dimension: int, items: Iterable[tuple[Sequence[int], Number]]) -> PolynomialSymbol:
    """Build a symbol from ``(alpha, coefficient)`` pairs, combining repeats."""
    acc: dict[MultiIndex, GaussianRational] = {}
    for alpha, c in items:
        alpha = _check_index(alpha, dimension)
        acc[alpha] = acc.get(alpha, GaussianRational()) + GaussianRational.coerce(c)
    return PolynomialSymbol(dimension, acc)
