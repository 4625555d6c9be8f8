from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jointcyc.poly import (GaussianRational, MultiPolynomial, NotDivisible, ParseError, derivative,
                           deserialize, divide_exact, evaluate, gcd, gcd_many, parse, serialize,
                           squarefree_part, to_text)
from strategies import exact_points, gaussian, polynomials, to_sympy

I = GaussianRational(0, 1)


def P2(s):
    return parse(s, 2)


def test_gaussian_rational_normalizes():
    x = GaussianRational(Fraction(2, -4), Fraction(3, 6))
    assert x.re == Fraction(-1, 2) and x.im == Fraction(1, 2)
    assert x * x.inverse() == GaussianRational(1)
    assert I * I == GaussianRational(-1)
    assert hash(GaussianRational(Fraction(1, 2))) == hash(GaussianRational(Fraction(2, 4)))


def test_parse_examples():
    assert P2("(z1-z2)*(z1+z2)") == P2("z1^2 - z2^2")
    one_minus = P2("1 - z1*z2")
    assert one_minus.coefficient((1, 1)) == GaussianRational(-1)
    assert one_minus.constant_term() == GaussianRational(1)
    Q = parse("i*z1 + (3/2)", 1)
    assert Q.coefficient((1,)) == I and Q.constant_term() == GaussianRational(Fraction(3, 2))
    assert parse("2z^3 - z", 1) == parse("2*z1**3 - z1", 1)


@pytest.mark.parametrize("text", ["z1 +", "z3", "z1 + 0.5", "z1/(z2)", "(z1", "z1 $ 2", "z1^z2"])
def test_parse_rejects(text):
    with pytest.raises(ParseError) as err:
        parse(text, 2)
    assert err.value.position >= 0


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse("z1 + z7", 2)
    assert err.value.position == 5


def test_zero_polynomial_has_no_terms():
    Z = P2("z1 - z1")
    assert Z.is_zero() and Z.terms == {}


def test_evaluate_examples():
    assert evaluate(P2("z1^2 - z2^2"), [1, 1]).is_zero()
    assert evaluate(P2("1 - z1*z2"), [1, 1]).is_zero()
    val = evaluate(P2("z1 + 2*z2"), [I, GaussianRational(Fraction(1, 2))])
    assert val == GaussianRational(1, 1)
    assert evaluate(P2("z1 + 2*z2"), [1j, 0.5]) == pytest.approx(1 + 1j)
    with pytest.raises(ValueError):
        evaluate(P2("z1"), [1])


def test_derivative_examples():
    z = parse("z^3", 1)
    assert derivative(z, 1, 2) == parse("6z", 1)
    assert derivative(z, 1, 0) == z
    assert derivative(parse("z^2", 1), 1, 2) == parse("2", 1)
    assert derivative(z, 1, 5).is_zero()


def test_gcd_examples():
    assert gcd(P2("z1^2 - z2^2"), P2("z1 - z2")) == P2("z1 - z2")
    assert gcd(P2("z1"), P2("z2")) == P2("1")
    A = P2("(z1-1)^2*(z2+i)")
    B = P2("(z1-1)*(z2+i)^2")
    g = gcd(A, B)
    assert g == P2("(z1-1)*(z2+i)")
    divide_exact(A, g), divide_exact(B, g)


def test_divide_exact_examples():
    assert divide_exact(P2("z1^2 - z2^2"), P2("z1 - z2")) == P2("z1 + z2")
    with pytest.raises(NotDivisible):
        divide_exact(P2("1 - z1*z2"), P2("z1 - 1"))
    P = P2("3*z1*z2 - i")
    assert divide_exact(P, P2("1")) == P
    with pytest.raises(ZeroDivisionError):
        divide_exact(P, P2("0"))


def test_squarefree_part():
    P = P2("(z1 - 1)^3 * (z2 + 2)^2 * (z1 - z2)")
    assert squarefree_part(P) == P2("(z1 - 1)*(z2 + 2)*(z1 - z2)").monic()


@settings(max_examples=60, deadline=None)
@given(polynomials(dim=2), polynomials(dim=2))
def test_product_degree_is_additive(P, Q):
    if P.is_zero() or Q.is_zero():
        assert (P * Q).is_zero()
    else:
        assert (P * Q).total_degree() == P.total_degree() + Q.total_degree()


@settings(max_examples=40, deadline=None)
@given(polynomials(dim=2, nonzero=True), polynomials(dim=2, nonzero=True), polynomials(dim=2, nonzero=True))
def test_gcd_scales_by_common_factor(P, Q, R):
    assert gcd(P * R, Q * R) == (gcd(P, Q) * R).monic()


@settings(max_examples=40, deadline=None)
@given(polynomials(dim=2, nonzero=True), polynomials(dim=2, nonzero=True))
def test_gcd_matches_sympy(P, Q):
    g = gcd(P, Q)
    (p, zs), (q, _) = to_sympy(P), to_sympy(Q)
    ref = sympy.gcd(p, q, *zs, extension=sympy.I) if not (P.is_constant() or Q.is_constant()) else 1
    ratio = sympy.cancel(to_sympy(g)[0] / ref)
    assert ratio.free_symbols == set()


@settings(max_examples=60, deadline=None)
@given(polynomials(dim=3), polynomials(dim=3, nonzero=True))
def test_divide_exact_roundtrip(P, D):
    assert divide_exact(P * D, D) == P


@settings(max_examples=60, deadline=None)
@given(polynomials(dim=2), polynomials(dim=2), exact_points(dim=2))
def test_evaluate_is_multiplicative(P, Q, w):
    assert evaluate(P * Q, w) == evaluate(P, w) * evaluate(Q, w)


@settings(max_examples=60, deadline=None)
@given(polynomials(dim=2), polynomials(dim=2), gaussian, st.integers(1, 2))
def test_derivative_linear_and_leibniz(P, Q, c, j):
    assert derivative(P.scale(c) + Q, j) == derivative(P, j).scale(c) + derivative(Q, j)
    assert derivative(P * Q, j) == derivative(P, j) * Q + P * derivative(Q, j)


@settings(max_examples=60, deadline=None)
@given(polynomials(dim=3))
def test_text_and_serialized_roundtrip(P):
    assert parse(to_text(P), 3) == P
    assert deserialize(serialize(P), 3) == P


def test_serialized_order_is_graded_lex():
    terms = serialize(P2("1 + z2 + z1 + z1*z2 + (1/2)*i*z1^2"))
    assert terms[0] == "0/1/1/2:2,0"
    assert terms[-1] == "1/1/0/1:0,0"


def test_gcd_many_of_family():
    fam = [P2("z1*z2"), P2("z1"), P2("z1^3 - z1")]
    assert gcd_many(fam) == P2("z1")
