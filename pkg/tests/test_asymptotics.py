"""Scale comparison, dominant-term simplification, and difference calculus."""

import itertools

import pytest

from convsum import expr as X
from convsum import tests as T
from convsum.asymptotics import (RelKind, compare, log_dominates,
                                 simplify_dominant, strip_bounded_factor,
                                 difference_derivative)
from convsum.bigvalue import compile_fn
from convsum.errors import NotBoundedAwayFromZeroError

# strictly increasing growth scale
SCALE = ["1", "ln(n)", "sqrt(n)", "n", "n^2", "2^n", "e^n", "n!", "n^n"]


def test_scale_chain_total_order():
    for i, j in itertools.combinations(range(len(SCALE)), 2):
        f, g = X.parse(SCALE[i]), X.parse(SCALE[j])
        assert compare(f, g).kind is RelKind.MUCH_LESS, (SCALE[i], SCALE[j])


def test_compare_antisymmetry_on_scale():
    for i, j in itertools.combinations(range(len(SCALE)), 2):
        f, g = X.parse(SCALE[i]), X.parse(SCALE[j])
        assert compare(g, f).kind is RelKind.MUCH_GREATER


def test_comparable_equal_keeps_the_constant():
    rel = compare(X.parse("2*n^2 + n"), X.parse("n^2"))
    assert rel.kind is RelKind.COMPARABLE_EQUAL
    assert rel.constant.equals(2)


def _family(w):
    prod = ["n"] + [f"lnk({k}, n)" for k in range(1, w + 1)]
    return X.parse("1/(" + "*".join(prod) + ")")


def test_boundary_family_strictly_decreasing():
    for w in range(4):
        rel = compare(_family(w + 1), _family(w))
        assert rel.kind is RelKind.MUCH_LESS, w


def test_log_dominance():
    assert log_dominates(X.parse("2^n"), X.parse("n^10"))
    assert not log_dominates(X.parse("n^3"), X.parse("n^2"))


@pytest.mark.parametrize("before,after", [
    ("n^2 - 3*n", "n^2"),
    ("(5*n+2)/(n^3+1)", "5/n^2"),
    ("n + ln(n) + 7", "n"),
    ("1/(n + n^(3/2))", "1/n^(3/2)"),
])
def test_simplify_dominant(before, after):
    got = simplify_dominant(X.parse(before))
    assert got == X.parse(after), X.format_expr(got)


def test_simplify_dominant_idempotent_on_corpus(verdict_entries):
    for e in verdict_entries:
        a = X.parse(e.expr_text)
        try:
            s = simplify_dominant(a)
        except Exception:
            continue
        assert simplify_dominant(s) == s, e.expr_text


def test_simplify_dominant_verdict_preserving_on_corpus(verdict_entries):
    for e in verdict_entries:
        a = X.parse(e.expr_text)
        try:
            s = simplify_dominant(a)
        except Exception:
            continue
        if s == a:
            continue
        va, vs = T.auto(a), T.auto(s)
        if va.decisive and vs.decisive:
            assert va.outcome == vs.outcome, e.expr_text


def test_strip_bounded_factor():
    got = strip_bounded_factor(X.parse("(3 + sin(n))/n^2"))
    assert got == X.parse("1/n^2")


def test_strip_refuses_vanishing_oscillation():
    with pytest.raises(NotBoundedAwayFromZeroError):
        strip_bounded_factor(X.parse("abs(sin(1/n))/n"))


@pytest.mark.parametrize("term,deriv", [
    ("n^2", "2*n"),
    ("sqrt(n)", "1/2/n^(1/2)"),
    ("lnk(2, n)", "1/(n*ln(n))"),
    ("lnk(3, n)", "1/(n*ln(n)*lnk(2,n))"),
])
def test_difference_derivative_symbolic(term, deriv):
    assert difference_derivative(X.parse(term)) == X.parse(deriv)


@pytest.mark.parametrize("term", ["1/n^2", "ln(n)/n", "sqrt(n)",
                                  "1/(n*ln(n))"])
def test_difference_derivative_matches_forward_difference(term):
    # valid only on sub-exponential scales, where the unit step is small
    # relative to the curvature
    a = X.parse(term)
    d = difference_derivative(a)
    f = compile_fn(a, "n")
    g = compile_fn(d, "n")
    N = 10 ** 6
    fd = f(N + 1) - f(N)
    sym = g(N)
    assert abs(fd - sym) / abs(sym) <= 1e-3, term
