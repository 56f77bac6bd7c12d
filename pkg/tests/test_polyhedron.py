from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hypogevrey.exact import dot
from hypogevrey.polyhedron import (
    DegeneratePolyhedronError,
    NonRegularPolyhedronError,
    PolyhedronError,
    facet_normals,
    formal_order,
    is_regular,
    k_of,
    newton_polyhedron,
    scale,
    symbol_polyhedron,
    weight,
)
from hypogevrey.symbol import parse_symbol

from .oracles import extreme_points, polyhedron_vertices_from_normals

NON_MQ_HYPOELLIPTIC = (
    "i*x1^5 + i*x1*x2^4 - 4*i*x1^4*x2 - 4*i*x1^2*x2^3 + 6*i*x1^3*x2^2 + i*x1^3 + i*x1*x2^2"
    " + x1^4*x2^2 + x2^6 - 4*x1^3*x2^3 - 4*x1*x2^5 + 6*x1^2*x2^4 + x2^2*x1^2 + x2^4"
)


def V(*pts):
    return tuple(sorted(tuple(F(x) for x in p) for p in pts))


@pytest.fixture(scope="module")
def box():
    return symbol_polyhedron(parse_symbol("x1^2 - x2^2", 2))


@pytest.fixture(scope="module")
def heat():
    return symbol_polyhedron(parse_symbol("i*x1 + x2^2", 2))


@pytest.fixture(scope="module")
def nonmq():
    return symbol_polyhedron(parse_symbol(NON_MQ_HYPOELLIPTIC, 2))


# strategies ---------------------------------------------------------------

def exponent_sets(n):
    return st.lists(st.tuples(*[st.integers(0, 8)] * n), min_size=1, max_size=15)


rationals = st.fractions(min_value=0, max_value=6, max_denominator=7)


positive = st.fractions(min_value=F(1, 8), max_value=2, max_denominator=8)


@st.composite
def regular_polyhedra(draw):
    """``{α >= 0 : <q, α> <= 1}`` for a few random positive normals ``q``."""
    n = draw(st.integers(2, 3))
    normals = draw(st.lists(st.tuples(*[positive] * n), min_size=1, max_size=4))
    return newton_polyhedron(polyhedron_vertices_from_normals(normals, n), n)


# construction ---------------------------------------------------------------

def test_box_vertices_and_facets(box):
    assert box.vertices == V((0, 0), (2, 0), (0, 2))
    assert facet_normals(box) == ((F(1, 2), F(1, 2)),)
    assert is_regular(box)


def test_heat(heat):
    assert facet_normals(heat) == ((F(1), F(1, 2)),)
    assert is_regular(heat)
    assert formal_order(heat) == 2


def test_non_mq_example(nonmq):
    assert nonmq.vertices == V((0, 0), (5, 0), (4, 2), (0, 6))
    assert set(facet_normals(nonmq)) == {(F(1, 5), F(1, 10)), (F(1, 6), F(1, 6))}
    assert formal_order(nonmq) == 10
    assert set(nonmq.vertices) == extreme_points(list(parse_symbol(NON_MQ_HYPOELLIPTIC, 2).terms) + [(0, 0)])


def test_segment_is_degenerate():
    seg = newton_polyhedron([(2, 2)], 2)
    assert seg.vertices == V((0, 0), (2, 2))
    assert not seg.regular and not seg.full_dimensional
    with pytest.raises(DegeneratePolyhedronError):
        facet_normals(seg)
    with pytest.raises(NonRegularPolyhedronError):
        k_of(seg, (1, 1))


def test_axis_point_is_not_regular():
    assert not is_regular(newton_polyhedron([(2, 0)], 2))


def test_origin_facet_makes_irregular():
    # every offset normal is positive, but the hull has facets through 0
    gamma = newton_polyhedron([(2, 1), (1, 2)], 2)
    assert all(x > 0 for q in gamma.facets for x in q)
    assert not gamma.regular


def test_input_validation():
    with pytest.raises(PolyhedronError):
        newton_polyhedron([], 2)
    with pytest.raises(PolyhedronError):
        newton_polyhedron([(1, -1)], 2)
    with pytest.raises(PolyhedronError):
        newton_polyhedron([(1, 1, 1)], 2)


def test_collinear_row_handled_exactly():
    # x + y = 6 row with interior collinear points
    gamma = newton_polyhedron([(k, 6 - k) for k in range(7)], 2)
    assert gamma.vertices == V((0, 0), (6, 0), (0, 6))
    assert gamma.facets == ((F(1, 6), F(1, 6)),)


def test_output_is_deterministic():
    a = newton_polyhedron([(3, 1), (0, 4), (2, 2), (5, 0)], 2)
    b = newton_polyhedron([(5, 0), (2, 2), (0, 4), (3, 1)], 2)
    assert a == b


@given(st.integers(2, 3).flatmap(exponent_sets))
def test_vertices_match_oracle(pts):
    n = len(pts[0])
    gamma = newton_polyhedron(pts, n)
    assert set(gamma.vertices) == extreme_points(pts + [(0,) * n])


@given(st.integers(2, 3).flatmap(exponent_sets))
def test_facet_invariants(pts):
    n = len(pts[0])
    gamma = newton_polyhedron(pts, n)
    assume(gamma.full_dimensional)
    for v in gamma.vertices:
        assert all(dot(q, v) <= 1 for q in gamma.facets)
        if any(v):
            assert any(dot(q, v) == 1 for q in gamma.facets) or any(
                dot(a, v) == 0 for a in gamma.origin_facets
            )


# gauge, order, weight, scaling --------------------------------------------

def test_k_examples(box):
    assert k_of(box, (0, 0)) == 0
    assert k_of(box, (1, 1)) == 1
    assert k_of(box, (4, 0)) == 2


def test_weight_examples(box, heat):
    assert weight(box, [0.0, 0.0]) == 1
    assert weight(box, [1.0, 2.0]) == pytest.approx(6)
    assert weight(heat, [3.0, 2.0]) == pytest.approx(8)
    with pytest.raises(ValueError):
        weight(box, [1.0])


def test_weight_log_domain_guard(nonmq):
    from hypogevrey.polyhedron import log_weight

    assert np.isclose(log_weight(nonmq, [1e80, 1e80])[0], 6 * 80 * np.log(10) + np.log(2), rtol=1e-12)


def test_scale_examples():
    H = newton_polyhedron([(F(1, 2), 0), (0, 1)], 2)
    assert scale(H, 4).vertices == V((0, 0), (2, 0), (0, 4))
    with pytest.raises(PolyhedronError):
        scale(H, 0)


@given(regular_polyhedra(), st.lists(rationals, min_size=3, max_size=3))
def test_membership_law(gamma, alpha):
    alpha = tuple(alpha[: gamma.dimension])
    assert (k_of(gamma, alpha) <= 1) == gamma.contains(alpha)


@given(regular_polyhedra(), st.lists(rationals, min_size=6, max_size=6), rationals)
def test_k_homogeneous_and_subadditive(gamma, ab, t):
    n = gamma.dimension
    a, b = tuple(ab[:n]), tuple(ab[3 : 3 + n])
    assert k_of(gamma, tuple(t * x for x in a)) == t * k_of(gamma, a)
    assert k_of(gamma, tuple(x + y for x, y in zip(a, b))) <= k_of(gamma, a) + k_of(gamma, b)


@given(st.integers(2, 3).flatmap(exponent_sets), st.integers(9, 20))
def test_input_points_inside(pts, M):
    n = len(pts[0])
    # long axis points keep the hull regular in most draws
    pts = pts + [tuple(M * int(k == j) for k in range(n)) for j in range(n)]
    gamma = newton_polyhedron(pts, n)
    assume(gamma.regular)
    assert all(k_of(gamma, p) <= 1 for p in pts)


@given(regular_polyhedra(), st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_weight_lower_bounds(gamma, xi):
    xi = np.array(xi[: gamma.dimension])
    w = weight(gamma, xi)
    mono = max(np.prod(np.abs(xi) ** np.array([float(x) for x in v])) for v in gamma.vertices)
    assert w >= 1
    assert w >= mono * (1 - 1e-12)


@given(regular_polyhedra(), st.fractions(min_value=F(1, 4), max_value=8, max_denominator=6), st.lists(rationals, min_size=3, max_size=3))
def test_scaling_identities(gamma, c, alpha):
    assert gamma.regular
    alpha = tuple(alpha[: gamma.dimension])
    sg = scale(gamma, c)
    assert k_of(sg, alpha) * c == k_of(gamma, alpha)
    assert formal_order(sg) == c * formal_order(gamma)
    assert sg == newton_polyhedron([tuple(c * x for x in v) for v in gamma.vertices], gamma.dimension)
