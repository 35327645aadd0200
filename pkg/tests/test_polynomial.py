import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharmonic.polynomial import (
    Parity,
    Polynomial,
    PolynomialParseError,
    differentiate,
    evaluate,
    multiply,
    parity,
    parse_potential,
)

coeff = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
polys = st.lists(coeff, min_size=0, max_size=9).map(Polynomial)


def test_canonical_trailing_zeros_trimmed():
    p = Polynomial([1.0, 2.0, 0.0, 0.0])
    assert p.coefficients == (1.0, 2.0)
    assert p.degree == 1


def test_tiny_coefficients_are_kept():
    p = Polynomial([1.0, 1e-300])
    assert p.degree == 1


@pytest.mark.parametrize(
    "text, expected",
    [("x^2", True), ("x^4 - 5*x^2", True), ("0", False), ("3", False), ("x^3", False), ("-x^4", False)],
)
def test_is_confining(text, expected):
    assert parse_potential(text).is_confining() is expected


def test_zero_polynomial_sentinel_degree():
    assert Polynomial([0.0, 0.0]).degree == -1
    assert Polynomial.zero().is_zero()


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x^2+x^3+x^4", [0, 0, 1, 1, 1]),
        ("0", []),
        ("x^4 - 5*x^2", [0, 0, -5, 0, 1]),
        ("-x", [0, -1]),
        ("2x^3 + 1.5", [1.5, 0, 0, 2]),
        ("  3 * x ^ 2  -  x^2 ", [0, 0, 2]),
        ("x + x", [0, 2]),
        ("1e-3*x^2", [0, 0, 1e-3]),
        (".5x", [0, 0.5]),
    ],
)
def test_parse(text, expected):
    assert parse_potential(text).coefficients == tuple(float(c) for c in expected)


def test_parse_commutes_with_reordering():
    assert parse_potential("x^4 - 5*x^2 + 3") == parse_potential("3 - 5*x^2 + x^4")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "empty"),
        ("   ", "empty"),
        ("x^-2", "negative exponent"),
        ("x^2.5", "non-integer exponent"),
        ("x^", "expected an exponent"),
        ("x^2 +", "expected a term"),
        ("x^2 $ 3", "unexpected character"),
        ("sin(x)", "unexpected character"),
        ("(x+1)^2", "unexpected character"),
        ("2*", "expected 'x'"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(PolynomialParseError, match=fragment):
        parse_potential(text)


def test_parse_error_reports_position():
    with pytest.raises(PolynomialParseError) as info:
        parse_potential("x^2 + y")
    assert info.value.position == 6


def test_multiply_examples():
    x = Polynomial([0, 1])
    assert multiply(x, x) == Polynomial([0, 0, 1])
    assert multiply(Polynomial([1, 2, 3]), Polynomial.zero()).is_zero()
    # (2 a2 x + 4 a4 x^3)^2 at a2 = 1/2, a4 = 0
    hp = Polynomial([0, 2 * 0.5, 0, 4 * 0.0])
    assert multiply(hp, hp) == Polynomial([0, 0, 1])


def test_differentiate_examples():
    assert differentiate(Polynomial([0, 0, 1])) == Polynomial([0, 2])
    assert differentiate(Polynomial([7.0])).is_zero()
    a2, a4 = 0.3, 0.7
    assert differentiate(Polynomial([0, 0, a2, 0, a4])) == Polynomial([0, 2 * a2, 0, 4 * a4])


def test_evaluate_examples():
    assert evaluate(Polynomial([0, 0, 1]), 3.0) == 9.0
    assert evaluate(Polynomial.zero(), 2.5) == 0.0
    assert evaluate(Polynomial([0, 0, -5, 0, 1]), 1.0) == -4.0
    np.testing.assert_array_equal(evaluate(Polynomial([1, 1]), np.array([0.0, 2.0])), [1.0, 3.0])


@pytest.mark.parametrize(
    "coeffs, expected",
    [([0, 0, 0, 0, 1], Parity.EVEN), ([0, 0, 1, 1, 1], Parity.NONE), ([0, 0, 0, 1], Parity.ODD), ([], Parity.EVEN)],
)
def test_parity(coeffs, expected):
    assert parity(Polynomial(coeffs)) is expected


def test_json_round_trip():
    p = Polynomial([0.1, -2.0, 0.0, 3.25])
    assert Polynomial.from_json(p.to_json()) == p
    assert p.to_json() == "[0.1, -2.0, 0.0, 3.25]"


@given(polys, polys)
def test_multiply_commutative(p, q):
    np.testing.assert_allclose(multiply(p, q).as_array(), multiply(q, p).as_array(), rtol=1e-12, atol=0)


@given(polys, polys, polys)
def test_multiply_associative(p, q, r):
    lhs = multiply(multiply(p, q), r).as_array()
    rhs = multiply(p, multiply(q, r)).as_array()
    assert lhs.shape == rhs.shape
    scale = np.max(np.abs(lhs), initial=1.0)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * scale)


@given(polys, polys, coeff)
def test_differentiate_linear(p, q, c):
    lhs = differentiate(p + q * c)
    rhs = differentiate(p) + differentiate(q) * c
    n = max(lhs.degree, rhs.degree) + 1
    scale = max(1.0, np.max(np.abs(lhs.as_array(n)), initial=0.0))
    np.testing.assert_allclose(lhs.as_array(n), rhs.as_array(n), rtol=0, atol=1e-12 * scale)


@given(polys, polys)
def test_product_rule(p, q):
    lhs = differentiate(multiply(p, q))
    rhs = multiply(differentiate(p), q) + multiply(p, differentiate(q))
    n = max(lhs.degree, rhs.degree) + 1
    scale = max(1.0, np.max(np.abs(lhs.as_array(n)), initial=0.0))
    np.testing.assert_allclose(lhs.as_array(n), rhs.as_array(n), rtol=0, atol=1e-12 * scale)


@given(polys, polys, st.floats(min_value=-10, max_value=10))
@settings(max_examples=200)
def test_evaluate_multiplicative(p, q, x):
    prod = evaluate(multiply(p, q), x)
    direct = evaluate(p, x) * evaluate(q, x)
    # Horner rounding is relative to the size of the largest term, not the result
    bound = evaluate(Polynomial(np.abs(multiply(p, q).as_array())), abs(x)) if not (p.is_zero() or q.is_zero()) else 0.0
    assert abs(prod - direct) <= 1e-10 * max(abs(direct), bound, 1e-300)


decimal_coeff = st.decimals(min_value=-1000, max_value=1000, places=4, allow_nan=False, allow_infinity=False).map(float)


@given(st.lists(decimal_coeff, max_size=10).map(Polynomial))
def test_render_parse_round_trip(p):
    assert parse_potential(p.render()).coefficients == p.coefficients
