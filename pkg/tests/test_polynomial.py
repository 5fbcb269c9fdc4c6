from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pdeglab.boolfn import addressing_function, majority, or_function, parity
from pdeglab.polynomial import (Polynomial, compose, exact_degree, majority_form, majority_poly,
                                mobius_interpolate, monomials_up_to, solve_agreement_system, solve_rational)

import oracles
from strategies import functions

coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def polynomials(draw, arity=None, max_terms=6):
    n = draw(st.integers(1, 4)) if arity is None else arity
    terms = draw(st.dictionaries(st.integers(0, (1 << n) - 1), coeffs, max_size=max_terms))
    return Polynomial(n, terms)


@given(functions())
def test_interpolation_matches_sympy(f):
    p = mobius_interpolate(f)
    assert dict(p.terms) == oracles.interpolate(oracles.table_of(f), f.arity)
    assert all(p.at_cube(x) == f(x) for x in range(1 << f.arity))


@given(functions())
def test_degree_routes_agree(f):
    assert exact_degree(f) == oracles.degree_by_fourier(oracles.table_of(f), f.arity)


def test_known_polynomials():
    xor2 = mobius_interpolate(parity(2))
    assert xor2 == Polynomial(2, {1: 1, 2: 1, 3: -2})
    assert xor2 * xor2 == xor2
    assert mobius_interpolate(or_function(2)) == Polynomial(2, {1: 1, 2: 1, 3: -1})


@given(st.data())
def test_arithmetic_pointwise(data):
    n = data.draw(st.integers(1, 4))
    p = data.draw(polynomials(n))
    q = data.draw(polynomials(n))
    point = [data.draw(coeffs) for _ in range(n)]
    assert (p + q).evaluate(point) == p.evaluate(point) + q.evaluate(point)
    for x in range(1 << n):
        assert (p * q).at_cube(x) == p.at_cube(x) * q.at_cube(x)
        assert (p - q).at_cube(x) == p.at_cube(x) - q.at_cube(x)
        assert p.scale(Fraction(1, 3)).at_cube(x) == Fraction(p.at_cube(x)) / 3


@given(st.data())
def test_multilinear_extension_matches_direct(data):
    n = data.draw(st.integers(1, 4))
    p = data.draw(polynomials(n))
    point = [data.draw(coeffs) for _ in range(n)]
    # the generic route goes through cube values only
    assert super(Polynomial, p).evaluate(point) == p.evaluate(point)


@given(st.data())
def test_compose_routes_agree(data):
    k = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(1, 3))
    outer = data.draw(polynomials(k, 4))
    inners = [data.draw(polynomials(m, 3)) for _ in range(k)]
    a = compose(outer, inners, method="cube")
    b = compose(outer, inners, method="symbolic")
    assert a == b


def test_majority_forms():
    for ell in (1, 3, 5):
        explicit = majority_poly(ell)
        assert explicit == mobius_interpolate(majority(ell))
        point = [Fraction(1, 3)] * ell
        assert majority_form(ell).evaluate(point) == explicit.evaluate(point)
    assert majority_form(3).evaluate([Fraction(1, 2)] * 3) == Fraction(1, 2)
    with pytest.raises(ValueError):
        majority_poly(4)


def test_compose_majority_of_parities():
    xor = mobius_interpolate(parity(2))
    assert compose(majority_poly(3), [xor] * 3) == xor


def test_json_round_trip():
    p = Polynomial(3, {0: Fraction(1, 2), 5: -3, 7: Fraction(2, 7)})
    assert Polynomial.from_json(p.to_json()) == p


def test_solve_rational_and_agreement_system():
    assert solve_rational([[Fraction(1), Fraction(1)], [Fraction(1), Fraction(-1)]],
                          [Fraction(3), Fraction(1)]) == [2, 1]
    assert solve_rational([[Fraction(1)], [Fraction(1)]], [Fraction(0), Fraction(1)]) is None
    assert solve_agreement_system([0, 1, 2, 3], [0, 1, 1, 0], 1, 2) is None
    sol = solve_agreement_system([0, 1, 2], [0, 1, 1], 1, 2)
    assert sol is not None and sol.polynomial == Polynomial(2, {1: 1, 2: 1})
    assert monomials_up_to(3, 1) == [0, 1, 2, 4]


def test_addressing_coefficients_are_integers():
    p = mobius_interpolate(addressing_function(2))
    assert all(Fraction(c).denominator == 1 for c in p.terms.values())
    assert p.degree == 3
