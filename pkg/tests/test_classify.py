import math
from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hypogevrey.classify import (
    EVIDENCE,
    FAILS,
    HOLDS,
    ClassificationVerdict,
    ConstantRestrictionError,
    dist_proxy,
    dist_upper,
    hypoellipticity_test,
    mq_test,
    quasi_principal_part,
)
from hypogevrey.exact import dot
from hypogevrey.roots import complex_roots
from hypogevrey.sampling import SamplingConfig, is_bounded
from hypogevrey.symbol import GaussianRational, PolynomialSymbol, parse_symbol

from .oracles import polyhedron_vertices_from_normals
from .test_polyhedron import NON_MQ_HYPOELLIPTIC

LAPLACE = "x1^2 + x2^2"
HEAT = "i*x1 + x2^2"
BOX = "x1^2 - x2^2"


def P2(text):
    return parse_symbol(text, 2)


# quasi-principal parts -------------------------------------------------------

def test_qpp_of_non_mq_example_is_degenerate_product():
    x1, x2 = sp.symbols("x1 x2")
    expected = sp.Poly(sp.expand(x2**2 * (x1 - x2) ** 4), x1, x2)
    got = quasi_principal_part(P2(NON_MQ_HYPOELLIPTIC), (1, 1))
    assert {m: GaussianRational(int(c)) for m, c in expected.terms()} == dict(got.terms)


def test_qpp_examples():
    assert quasi_principal_part(P2(BOX), (1, 1)) == P2(BOX)
    assert quasi_principal_part(P2(HEAT), (1, F(1, 2))) == P2(HEAT)


def test_qpp_errors():
    with pytest.raises(ValueError):
        quasi_principal_part(PolynomialSymbol(2), (1, 1))
    with pytest.raises(ValueError):
        quasi_principal_part(P2(BOX), (1, 0))


@given(
    st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), st.integers(-3, 3).filter(bool), min_size=1, max_size=8),
    st.tuples(st.fractions(F(1, 6), 3, max_denominator=6), st.fractions(F(1, 6), 3, max_denominator=6)),
)
def test_qpp_is_quasihomogeneous(terms, q):
    Pq = quasi_principal_part(PolynomialSymbol(2, terms), q)
    levels = {dot(a, q) for a in Pq.terms}
    assert len(levels) == 1
    assert levels.pop() == max(dot(a, q) for a in terms)


# multi-quasiellipticity --------------------------------------------------------

def test_mq_laplacian_holds():
    v = mq_test(P2(LAPLACE))
    assert v.kind == HOLDS
    assert v.fitted_constant <= 1 + 0.05
    assert v.label == EVIDENCE


def test_mq_non_mq_example_fails_on_diagonal():
    v = mq_test(P2(NON_MQ_HYPOELLIPTIC))
    assert v.kind == FAILS
    assert np.linalg.norm(np.array(v.witness_direction) - np.array([1, 1]) / math.sqrt(2)) <= 1e-6


def test_mq_box_fails_on_diagonal():
    v = mq_test(P2(BOX))
    assert v.kind == FAILS
    assert np.allclose(np.abs(v.witness_direction), [1 / math.sqrt(2)] * 2, atol=1e-6)


def test_mq_nonregular_fails():
    v = mq_test(P2("x1^2*x2^2 + 1"))
    assert v.kind == FAILS and v.reason == "non-regular polyhedron"


@st.composite
def even_unit_symbols(draw):
    n = draw(st.integers(2, 3))
    normals = draw(st.lists(st.tuples(*[st.fractions(F(1, 4), 2, max_denominator=4)] * n), min_size=1, max_size=3))
    verts = polyhedron_vertices_from_normals(normals, n)
    lcm = math.lcm(*[x.denominator for v in verts for x in v])
    return PolynomialSymbol(n, {tuple(int(2 * lcm * x) for x in v): 1 for v in verts})


@settings(max_examples=4)
@given(even_unit_symbols())
def test_mq_even_unit_symbols_hold_with_unit_constant(P):
    v = mq_test(P, SamplingConfig(directions_count=16))
    assert v.kind == HOLDS
    assert v.fitted_constant <= 1 + 1e-9


def test_mq_is_deterministic():
    cfg = SamplingConfig(seed=3)
    a = mq_test(P2(NON_MQ_HYPOELLIPTIC), cfg)
    b = mq_test(P2(NON_MQ_HYPOELLIPTIC), cfg)
    assert a == b


# distance surrogates -----------------------------------------------------------

def test_dist_proxy_examples():
    assert dist_proxy(parse_symbol("x1", 1), [3.0]) == pytest.approx(3)
    assert dist_proxy(parse_symbol("x1^2", 1), [5.0]) == pytest.approx(2.5)
    assert dist_proxy(parse_symbol("7", 1), [1.0]) == math.inf
    with pytest.raises(ValueError):
        dist_proxy(PolynomialSymbol(1), [1.0])


def test_dist_upper_examples():
    assert dist_upper(parse_symbol("x1", 1), [3.0]) == pytest.approx(3)
    assert dist_upper(P2(BOX), [1.0, 1.0]) == pytest.approx(0, abs=1e-12)
    for tau in (1.0, 4.0, 100.0):
        assert dist_upper(P2(HEAT), [tau, 0.0]) == pytest.approx(math.sqrt(tau), rel=1e-12)
    # below tau = 1 the root on the x1-line at distance tau is closer
    assert dist_upper(P2(HEAT), [0.25, 0.0]) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(ConstantRestrictionError):
        dist_upper(P2("x1*x2"), [0.0, 0.0])


univariate = st.lists(st.integers(-9, 9), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)


@given(univariate, st.floats(-5, 5))
def test_univariate_proxy_matches_root_distance(coeffs, x):
    P = PolynomialSymbol(1, {(k,): c for k, c in enumerate(coeffs) if c})
    m = P.order
    rho = float(np.min(np.abs(x - complex_roots(coeffs))))
    delta = dist_proxy(P, [x])
    if rho < 1e-6:
        return
    assert delta >= rho / m * (1 - 1e-9)
    assert delta <= 2**m * rho


@st.composite
def symbol_points(draw):
    terms = draw(
        st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-4, 4).filter(bool), min_size=2, max_size=6)
    )
    P = PolynomialSymbol(2, terms)
    x = draw(st.tuples(st.floats(-4, 4), st.floats(-4, 4)))
    return P, np.array(x)


@given(symbol_points())
def test_proxy_bounded_by_upper(Px):
    P, x = Px
    if P.is_constant():
        return
    try:
        du = dist_upper(P, x)
    except ConstantRestrictionError:
        return
    d = dist_proxy(P, x)
    assert du >= 0
    if np.isfinite(d) and du > 1e-8:
        m = P.order
        assert d <= (m + 1) * 2**m * du


# hypoellipticity ----------------------------------------------------------------

def test_hypo_laplacian():
    v = hypoellipticity_test(P2(LAPLACE))
    assert v.kind == HOLDS
    assert abs(v.exponents["rho_hat"] - 1) <= 0.1


def test_hypo_heat():
    v = hypoellipticity_test(P2(HEAT))
    assert v.kind == HOLDS
    assert abs(v.exponents["rho_hat"] - 0.5) <= 0.1
    assert v.exponents["d_hat"] > 0


def test_hypo_box_fails():
    v = hypoellipticity_test(P2(BOX))
    assert v.kind == FAILS
    assert v.witness_direction is not None


def test_hypo_non_mq_example_not_failing():
    assert hypoellipticity_test(P2(NON_MQ_HYPOELLIPTIC)).kind != FAILS


@pytest.mark.parametrize("text", ["x1 + x2^2", "x1^2 - x2^2 + 1"])
def test_hypo_classic_non_hypoelliptic(text):
    assert hypoellipticity_test(P2(text)).kind == FAILS


def test_hypo_three_dimensional_heat():
    v = hypoellipticity_test(parse_symbol("i*x1 + x2^2 + x3^2", 3), SamplingConfig(directions_count=32))
    assert v.kind == HOLDS


def test_hypo_constant_rejected():
    with pytest.raises(ValueError):
        hypoellipticity_test(P2("3"))


# verdict and sampling rules ------------------------------------------------------

def test_verdict_invariants():
    with pytest.raises(ValueError):
        ClassificationVerdict(FAILS, 1.0)
    with pytest.raises(ValueError):
        ClassificationVerdict(HOLDS, -1.0)
    with pytest.raises(ValueError):
        ClassificationVerdict("maybe", 1.0)


def test_sampling_config_validation():
    with pytest.raises(ValueError):
        SamplingConfig(r_min=10, r_max=1)
    with pytest.raises(ValueError):
        SamplingConfig(radii_count=1)
    with pytest.raises(ValueError):
        SamplingConfig(growth_tolerance=0)
    r = SamplingConfig().radii()
    assert r[0] == 10 and r[-1] == pytest.approx(1e6) and len(r) == 13


def test_bounded_rule():
    radii = SamplingConfig().radii()
    assert is_bounded(radii, np.zeros(13), 0.05)[0]
    assert not is_bounded(radii, 0.5 * np.log(radii), 0.05)[0]
    jump = np.zeros(13)
    jump[-1] = np.log(100.0)
    assert not is_bounded(radii, jump, 10.0)[0]
    assert not is_bounded(radii, np.full(13, np.inf), 0.05)[0]
