"""Parser, formatter, and canonicalization checks."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from convsum import expr as X
from convsum.errors import ExprParseError, UnknownIdentifierError


def test_roundtrip_on_corpus(shipped_corpus):
    for e in shipped_corpus:
        var = "n" if "n" in e.expr_text else "k"
        a = X.parse(e.expr_text, var)
        b = X.parse(X.format_expr(a), var)
        assert a == b, e.expr_text


@pytest.mark.parametrize("left,right", [
    ("n*n", "n^2"),
    ("n+n", "2*n"),
    ("2*3", "6"),
    ("n^2*n^3", "n^5"),
    ("(n^2)^3", "n^6"),
    ("sqrt(n)", "n^(1/2)"),
    ("n/n", "1"),
    ("1/2^n", "2^(-n)"),
    ("ln(n) + 0", "ln(n)"),
    ("exp(n)", "e^n"),
])
def test_canonical_equalities(left, right):
    assert X.parse(left) == X.parse(right)


def test_substitution_resolves_alternating_parity():
    alt = X.parse("(-1)^n")
    even = X.substitute(alt, "n", X.parse("2*n"))
    odd = X.substitute(alt, "n", X.parse("2*n+1"))
    assert even == X.Num(Fraction(1))
    assert odd == X.Num(Fraction(-1))


def test_substitution_shift():
    a = X.parse("1/n^2")
    shifted = X.substitute(a, "n", X.parse("n+1"))
    assert shifted == X.parse("1/(n+1)^2")


def test_free_vars():
    assert X.free_vars(X.parse("1/n^2")) == {"n"}
    assert X.free_vars(X.parse("1/k^2", "k")) == {"k"}
    assert X.free_vars(X.parse("2^10")) == set()


def test_parse_error_reports_position():
    with pytest.raises(ExprParseError) as exc:
        X.parse("1/(((")
    assert "position" in str(exc.value)


def test_unknown_identifier_rejected():
    with pytest.raises(UnknownIdentifierError):
        X.parse("1/m")


def test_lnk_requires_positive_depth():
    a = X.parse("lnk(2, n)")
    assert X.parse(X.format_expr(a)) == a
    with pytest.raises(ExprParseError):
        X.parse("lnk(0, n) + (")


# -- property: formatter/parser agree on generated expressions --------------

_leaf = st.sampled_from(["n", "2", "3", "1/2", "e", "pi"])


def _combine(children):
    a, b = children
    return st.sampled_from([f"({a} + {b})", f"({a}*{b})", f"({a}/({b} + 1))",
                            f"ln({a} + 1)", f"sqrt(({a})^2 + 1)"])


_exprs = st.recursive(_leaf, lambda s: st.tuples(s, s).flatmap(_combine),
                      max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(_exprs)
def test_roundtrip_property(text):
    a = X.parse(text)
    assert X.parse(X.format_expr(a)) == a
