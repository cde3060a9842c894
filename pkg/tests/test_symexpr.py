import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcurv.errors import (ExprSyntaxError, InexactDivisionError, JetOrderError, NonLinearExponentError,
                          NonIntegerExponentError, NonMonomialDivisorError, UnboundAtomError, UnknownAtomError)
from zcurv.symexpr import (SQRT2, Coefficient, Expr, JetContext, arith, diff, div_exact, evaluate,
                           format_expr, parse, total_derivative)

from gen import ATOMS, exprs

CTX = JetContext(("x", "y"), ("u", "v"))


# coefficients ------------------------------------------------------------------

def test_coefficient_product_rule():
    # (a + b r)(c + d r) = (ac + 2bd) + (ad + bc) r
    p = Coefficient(1, 1) * Coefficient(2, -3)
    assert p == Coefficient(1 * 2 + 2 * 1 * -3, 1 * -3 + 1 * 2)
    assert SQRT2 * SQRT2 == Coefficient(2)


def test_coefficient_zero_and_inverse():
    assert Coefficient(0, 0).is_zero()
    assert not Coefficient(0, 1).is_zero()
    c = Coefficient(3, -2)
    assert c * c.inverse() == Coefficient(1)


def test_coefficient_reduced():
    c = Coefficient(4, 0) / Coefficient(6, 0)
    assert (c.a.numerator, c.a.denominator) == (2, 3)


# parse ----------------------------------------------------------------------------

def test_parse_literal_term():
    e = parse("l1/4")
    assert e.items() == [(((("l1", 1),), ()), Coefficient(Coefficient(1).a / 4))]


def test_parse_sqrt2_exponential():
    e = parse("sqrt2 * exp((u - v)/2)")
    [(key, c)] = e.items()
    assert c == SQRT2
    assert key[0] == ()
    assert dict(key[1]) == {"u": 0.5, "v": -0.5}


def test_parse_cancellation():
    assert parse("u^2 - u^2").is_zero()


@pytest.mark.parametrize("text,err", [
    ("u +* 2", ExprSyntaxError),
    ("u^(1/2)", NonIntegerExponentError),
    ("u^x", NonIntegerExponentError),
    ("1/(u + 1)", NonMonomialDivisorError),
    ("exp(u*v)", NonLinearExponentError),
    ("(u + 1", ExprSyntaxError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse(text)


def test_syntax_error_reports_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("u +* 2")
    assert info.value.position == 3


# arithmetic -------------------------------------------------------------------------

def test_add_negation_is_zero():
    u = parse("u")
    assert arith("add", u, -u).is_zero()


def test_sqrt2_exponential_product():
    a = parse("sqrt2*exp(u/2)")
    assert arith("mul", a, a) == parse("2*exp(u)")


def test_div_exact_by_constant():
    assert div_exact(parse("2*u_xy - 2*exp(u)"), Expr.const(2)) == parse("u_xy - exp(u)")


def test_div_exact_verified_quotient():
    assert div_exact(parse("3*u*exp(v) + 3*x*exp(v)"), parse("u + x")) == parse("3*exp(v)")


def test_div_exact_reports_remainder():
    with pytest.raises(InexactDivisionError) as info:
        div_exact(parse("u^2 - 1"), parse("u + 1"))
    assert info.value.remainder is not None


def test_pow_int():
    assert arith("pow_int", parse("u + 1"), 2) == parse("u^2 + 2*u + 1")


# diff ----------------------------------------------------------------------------------

@pytest.mark.parametrize("text,atom,expected", [
    ("exp(u/2)", "u", "1/2*exp(u/2)"),
    ("l1*l2", "l1", "l2"),
    ("x^2*u", "x", "2*x*u"),
])
def test_diff_examples(text, atom, expected):
    assert diff(parse(text), atom) == parse(expected)


def test_diff_unknown_atom():
    with pytest.raises(UnknownAtomError):
        diff(parse("u"), "q", known=["u", "x"])


# total derivative ----------------------------------------------------------------------

def test_total_derivative_examples():
    assert total_derivative(parse("u"), "x", CTX) == parse("u_x")
    assert total_derivative(parse("exp(u/2)"), "x", CTX) == parse("1/2*u_x*exp(u/2)")
    got = total_derivative(parse("sqrt2*exp((u - v)/2)"), "y", CTX)
    assert got == parse("sqrt2/2*(u_y - v_y)*exp((u - v)/2)")


def test_total_derivative_sorts_multi_index():
    assert total_derivative(parse("u_y"), "x", CTX) == CTX.canonicalize(parse("u_yx"))
    assert format_expr(CTX.canonicalize(parse("u_yx"))) == "u_xy"


def test_total_derivative_order_limit():
    with pytest.raises(JetOrderError):
        total_derivative(parse("u_xyy"), "x", CTX)


# evaluate ------------------------------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(parse("u_xy - exp(u)"), {"u_xy": 1.0, "u": 0.0}) == 0.0
    assert evaluate(parse("sqrt2*exp(u/2)"), {"u": 0.0}) == math.sqrt(2.0)
    assert evaluate(parse("exp(u)"), {"u": -2 * math.log(2)}) == pytest.approx(0.25, abs=1e-15)


def test_evaluate_unbound():
    with pytest.raises(UnboundAtomError):
        evaluate(parse("u + w"), {"u": 1.0})


# properties ----------------------------------------------------------------------------

PROPS = settings(max_examples=150, deadline=None)


@PROPS
@given(exprs(), exprs(), exprs())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@PROPS
@given(exprs(), st.sampled_from(ATOMS), st.sampled_from(ATOMS))
def test_diff_commutes(e, a, b):
    assert diff(diff(e, a), b) == diff(diff(e, b), a)


@PROPS
@given(exprs(), exprs(), st.sampled_from(ATOMS))
def test_diff_product_rule(a, b, x):
    assert diff(a * b, x) == diff(a, x) * b + a * diff(b, x)


@PROPS
@given(exprs(("x", "y", "u", "v", "u_x", "v_y", "u_xy")))
def test_total_derivatives_commute(e):
    ctx = JetContext(("x", "y"), ("u", "v"), max_order=4)
    dx = lambda f: total_derivative(f, "x", ctx)
    dy = lambda f: total_derivative(f, "y", ctx)
    assert dx(dy(e)) == dy(dx(e))


@PROPS
@given(exprs())
def test_parse_print_roundtrip(e):
    assert parse(format_expr(e)) == e
    assert format_expr(parse(format_expr(e))) == format_expr(e)


@PROPS
@given(exprs(max_terms=5), exprs(max_terms=4),
       st.lists(st.floats(0.5, 1.5), min_size=len(ATOMS), max_size=len(ATOMS)))
def test_evaluate_is_a_ring_homomorphism(a, b, vals):
    env = dict(zip(ATOMS, vals))
    ea, eb = evaluate(a, env), evaluate(b, env)
    scale = 1.0 + abs(ea) + abs(eb) + abs(ea * eb)
    assert abs(evaluate(a + b, env) - (ea + eb)) <= 1e-12 * scale
    assert abs(evaluate(a * b, env) - ea * eb) <= 1e-12 * scale
