"""Radius and interval of convergence."""

from fractions import Fraction

import mpmath
import pytest

from convsum import expr as X
from convsum.bigvalue import eval_log
from convsum.oracle import cauchy_window
from convsum.power_series import radius, interval, termwise_radius_invariance


def P(s):
    return X.parse(s)


@pytest.mark.parametrize("coeff,rtext", [
    ("n/2^(n+1)", "2"),
    ("1/(n^2*3^n)", "3"),
    ("(2*n)!/(n!)^2", "1/4"),
    ("(1+1/n)^(n^2)", "1/e"),
    ("3^(sqrt(n))/n", "1/3^(1/2)"),
    ("1", "1"),
])
def test_exact_radius(coeff, rtext):
    res = radius(P(coeff))
    assert res.exact
    assert res.radius == P(rtext)


def test_extreme_radii():
    assert radius(P("1/n!")).radius == "inf"
    assert radius(P("n!")).radius == "0"


@pytest.mark.parametrize("coeff,center,text", [
    ("n/2^(n+1)", 0, "(-2, 2)"),
    ("1/(n^2*3^n)", 0, "[-3, 3]"),
    ("1/((n+2)*3^n)", 5, "(2, 8)"),
])
def test_interval(coeff, center, text):
    res = interval(P(coeff), center=Fraction(center))
    assert res.interval_text() == text


def test_interval_flags_match_endpoint_verdicts():
    res = interval(P("1/(n^2*3^n)"))
    assert res.left_closed and res.right_closed
    assert res.endpoint_left.outcome == "Converges"
    res = interval(P("n/2^(n+1)"))
    assert not res.left_closed and not res.right_closed
    assert res.endpoint_right.outcome == "Diverges"


@pytest.mark.parametrize("coeff", ["1/(n^2*3^n)", "n*(n-1)", "1"])
def test_termwise_radius_invariance(coeff):
    assert termwise_radius_invariance(P(coeff))


def test_scaling_invariance():
    base = radius(P("1/(n^2*3^n)"))
    for factor in ["7", "n^3", "1/n^2"]:
        scaled = radius(X.mul(P(factor), P("1/(n^2*3^n)")))
        assert scaled.radius == base.radius, factor


@pytest.mark.parametrize("coeff", ["n/2^(n+1)", "1/(n^2*3^n)"])
def test_numeric_behavior_at_the_radius(coeff):
    a = P(coeff)
    r = radius(a).approx
    with mpmath.workprec(128):
        x_in = Fraction(float(r) * 0.99).limit_denominator(10 ** 9)
        inside = X.mul(a, X.pow_(X.Num(x_in), X.Var("n")))
        w1 = abs(cauchy_window(inside, 8, 128))
        w2 = abs(cauchy_window(inside, 12, 128))
        assert w2 < w1  # windows decay inside the radius
        grow = 1.01 * r
        # |a_n x^n| grows outside the radius
        lo = eval_log(a, 2 ** 10, 128).log_magnitude \
            + 2 ** 10 * mpmath.log(grow)
        hi = eval_log(a, 2 ** 14, 128).log_magnitude \
            + 2 ** 14 * mpmath.log(grow)
        assert hi > lo
