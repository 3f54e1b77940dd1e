"""Expression parser: values, precedence, round trips, error offsets."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fpjump import DomainEvalError, ExprSyntaxError
from fpjump.exprparse import eval_expr, parse, print_expr

XS = np.linspace(-2.7, 3.1, 23)


def ev(source: str, xs=XS) -> np.ndarray:
    return eval_expr(parse(source), np.asarray(xs, dtype=float))


def test_arithmetic_and_precedence():
    assert ev("1+2*3", [0.0])[0] == 7.0
    assert ev("(1+2)*3", [0.0])[0] == 9.0
    assert ev("2-3-4", [0.0])[0] == -5.0
    assert ev("12/4/3", [0.0])[0] == 1.0
    assert ev("-x^2", [3.0])[0] == -9.0


def test_power_right_associative():
    assert ev("2^3^2", [0.0])[0] == 512.0
    assert ev("(2^3)^2", [0.0])[0] == 64.0


def test_integer_power_matches_float_power():
    vals = ev("x^7")
    np.testing.assert_allclose(vals, XS**7, rtol=1e-13)
    big = ev("x^64", [1.1])[0]
    assert big == pytest.approx(1.1**64, rel=1e-12)


def test_functions_match_numpy():
    np.testing.assert_allclose(ev("sin(x)"), np.sin(XS), rtol=1e-15)
    np.testing.assert_allclose(ev("cos(x)"), np.cos(XS), rtol=1e-15)
    np.testing.assert_allclose(ev("exp(sin(x)/2)"), np.exp(np.sin(XS) / 2), rtol=1e-15)
    np.testing.assert_allclose(ev("abs(x)"), np.abs(XS), rtol=0)
    np.testing.assert_allclose(ev("tanh(x)"), np.tanh(XS), rtol=1e-15)
    np.testing.assert_allclose(ev("sqrt(abs(x))"), np.sqrt(np.abs(XS)), rtol=1e-15)


def test_pi_constant():
    assert ev("pi", [0.0])[0] == math.pi
    assert ev("cos(pi)", [0.0])[0] == pytest.approx(-1.0, abs=1e-15)


def test_pythagorean_identity():
    np.testing.assert_allclose(ev("sin(x)^2+cos(x)^2"), np.ones_like(XS), rtol=1e-14)


@pytest.mark.parametrize(
    "source",
    [
        "-x",
        "1",
        "exp(sin(x)/2)",
        "cos(x)*exp(sin(x))",
        "0.5*cos(x)*exp(sin(x)/2)",
        "2^3^x",
        "x/(1+x^2)",
        "sqrt(abs(x)+1)-tanh(2*x)",
        "pi*x-3.25e-2",
    ],
)
def test_print_round_trip_is_value_exact(source):
    tree = parse(source)
    text = print_expr(tree)
    again = parse(text)
    assert np.array_equal(eval_expr(tree, XS), eval_expr(again, XS))
    # printing is idempotent once normalized
    assert print_expr(again) == text


@pytest.mark.parametrize(
    "source",
    ["", "sin(", "x +", "1..2", "foo(x)", "2**3", "(x", "x)y", "x 2"],
)
def test_syntax_errors_raise_with_offset(source):
    with pytest.raises(ExprSyntaxError) as err:
        ev(source)
    assert isinstance(err.value.offset, int)
    assert err.value.offset >= 0


def test_syntax_error_is_a_config_error():
    from fpjump import ConfigError

    with pytest.raises(ConfigError):
        parse("sin(")


@pytest.mark.parametrize(
    "source,xs",
    [
        ("1/x", [0.0]),
        ("sqrt(x)", [-1.0]),
        ("exp(x)", [1e4]),
        ("x/(x-1)", [1.0]),
    ],
)
def test_non_finite_evaluation_raises(source, xs):
    with pytest.raises(DomainEvalError):
        ev(source, xs)


def test_eval_vectorizes():
    xs = np.linspace(0.5, 2.0, 101)
    out = ev("x^2+1/x", xs)
    assert out.shape == xs.shape
    np.testing.assert_allclose(out, xs**2 + 1 / xs, rtol=1e-14)
