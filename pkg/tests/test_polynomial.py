from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_almgren.errors import BadExponent, ParseError
from discrete_almgren.polynomial import Polynomial, complex_power, make_polynomial, parse_polynomial


def test_linear_is_harmonic():
    p = make_polynomial(2, {(1, 0): 1})
    assert p.is_continuum_harmonic and p.laplacian().is_zero


def test_saddle_is_harmonic():
    p = make_polynomial(2, [((2, 0), 1), ((0, 2), -1)])
    assert p.is_continuum_harmonic


def test_square_is_not_harmonic():
    p = make_polynomial(2, {(2, 0): 1})
    assert not p.is_continuum_harmonic
    assert p.laplacian() == Polynomial.constant(2, 2)


def test_terms_merge_and_cancel():
    p = make_polynomial(2, [((1, 1), 2), ((1, 1), Fraction(-1, 2)), ((0, 3), 1), ((0, 3), -1)])
    assert p.terms == {(1, 1): Fraction(3, 2)}


@pytest.mark.parametrize("terms", [{(1,): 1}, {(1, -1): 1}, {(0.5, 0): 1}, {(1, 0, 0): 1}])
def test_bad_exponents(terms):
    with pytest.raises(BadExponent):
        make_polynomial(2, terms)


@pytest.mark.parametrize("text,terms", [
    ("1*x^1*y^1", {(1, 1): 1}),
    ("x^2 - y^2", {(2, 0): 1, (0, 2): -1}),
    ("-3/2*x*y + 7", {(1, 1): Fraction(-3, 2), (0, 0): 7}),
    ("x1^2*x2 - 1/3*x2^3", {(2, 1): 1, (0, 3): Fraction(-1, 3)}),
])
def test_parse(text, terms):
    assert parse_polynomial(text, 2).terms == {k: Fraction(v) for k, v in terms.items()}


def test_parse_three_dims():
    p = parse_polynomial("x*y*z", 3)
    assert p.terms == {(1, 1, 1): 1} and p.is_continuum_harmonic


@pytest.mark.parametrize("text", ["", "x^", "q*x", "x**2", "2x", "x + + y", "z"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text, 2)


def test_str_round_trips():
    for text in ["x^2 - y^2", "-x*y + 3/4", "x^3 - 3*x*y^2", "-1"]:
        p = parse_polynomial(text, 2)
        assert parse_polynomial(str(p), 2) == p


def test_discrete_laplacian_examples():
    x2 = parse_polynomial("x^2", 2)
    assert x2.discrete_laplacian() == Polynomial.constant(2, 2)
    assert parse_polynomial("x*y", 2).discrete_laplacian().is_zero
    assert parse_polynomial("x^2 - y^2", 2).discrete_laplacian().is_zero
    # cubic harmonics survive the lattice stencil: 6x from x^3, -6x from -3xy^2
    assert parse_polynomial("x^3 - 3*x*y^2", 2).discrete_laplacian().is_zero
    quartic = complex_power(4)
    assert quartic.is_continuum_harmonic
    assert quartic.discrete_laplacian() == Polynomial.constant(2, 4)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)),
                       st.integers(-5, 5), max_size=6),
       st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_discrete_laplacian_matches_stencil(terms, pt):
    p = Polynomial(2, terms)
    a, b = pt
    stencil = (p.exact((a + 1, b)) + p.exact((a - 1, b)) + p.exact((a, b + 1)) + p.exact((a, b - 1))
               - 4 * p.exact((a, b)))
    assert p.discrete_laplacian().exact(pt) == stencil


@pytest.mark.parametrize("m", range(0, 7))
def test_complex_powers_are_harmonic(m):
    for part in ("real", "imag"):
        assert complex_power(m, part).is_continuum_harmonic
    z = (0.3 + 0.7j) ** m
    pt = np.array([0.3, 0.7])
    assert complex_power(m, "real")(pt) == pytest.approx(z.real, abs=1e-14)
    assert complex_power(m, "imag")(pt) == pytest.approx(z.imag, abs=1e-14)


def test_numeric_evaluation_matches_exact():
    p = parse_polynomial("x^2*y - 1/3*y^3 + 2*x", 2)
    pts = np.array([[0.5, -1.25], [2.0, 3.0], [0.0, 0.0]])
    exact = [float(p.exact((Fraction(a), Fraction(b)))) for a, b in pts.tolist()]
    np.testing.assert_allclose(p(pts), exact, rtol=1e-15)


def test_gradient_and_homogeneity():
    p = parse_polynomial("x*y", 2)
    gx, gy = p.gradient()
    assert gx == Polynomial.variable(2, 1) and gy == Polynomial.variable(2, 0)
    assert p.is_homogeneous() and p.degree == 2
    assert not parse_polynomial("x*y + 1", 2).is_homogeneous()
