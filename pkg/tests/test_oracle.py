"""High-precision numeric oracle."""

import mpmath
import pytest

from convsum import expr as X
from convsum import oracle
from convsum import tests as T


def P(s, var="n"):
    return X.parse(s, var)


def test_partial_sum_geometric_exact():
    val = oracle.partial_sum(P("1/2^k", "k"), 20)
    assert abs(val - (1 - mpmath.mpf(2) ** -20)) < 1e-60


def test_partial_sum_empty_range():
    assert oracle.partial_sum(P("1/n"), 0) == 0


def test_cauchy_window_tends_to_ln2_for_harmonic():
    w = oracle.cauchy_window(P("1/k", "k"), 12)
    assert abs(w - mpmath.log(2)) < 1e-3


def test_window_precision_stability():
    lo = oracle.cauchy_window(P("1/n"), 10, precision=128)
    hi = oracle.cauchy_window(P("1/n"), 10, precision=320)
    assert abs(lo - hi) < mpmath.mpf(2) ** -100


@pytest.mark.parametrize("term,n,num,den", [
    ("1/n!", 10, 1, 11),     # plain term ratio
    ("1/2^n", 7, 1, 2),
])
def test_rate_plain_ratio(term, n, num, den):
    with mpmath.workprec(300):
        got = oracle.rate(P(term), n)
        assert abs(got - mpmath.mpf(num) / den) < mpmath.mpf(2) ** -200


def test_rate_near_one():
    r = oracle.rate(P("1/n^2"), 10 ** 6)
    assert abs(r - (1 - 2e-6)) < 1e-9


def test_rate_matches_symbolic_ratio_limit_on_corpus(verdict_entries):
    # for terms with a decisive geometric ratio the reported rate is the
    # exact limit, so the consistency bound holds with margin
    for e in verdict_entries:
        a = P(e.expr_text)
        try:
            v = T.ratio_test(a)
        except Exception:
            continue
        if not v.decisive or not hasattr(v.auxiliary.get("ratio"), "approx"):
            continue
        lim = mpmath.mpf(v.auxiliary["ratio"].approx())
        got = oracle.rate(a, 10 ** 6)
        assert abs(got - lim) <= 1e-3 * max(abs(lim), 1), e.expr_text


def test_empirical_verdict_hints():
    assert oracle.empirical_verdict(P("1/n^2")) == "Converges"
    assert oracle.empirical_verdict(P("1/n")) == "Diverges"


def test_profile_windows_trend(verdict_entries):
    conv = oracle.profile(P("1/n^2"))
    vals = [w for _, w in conv.windows]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    div = oracle.profile(P("1/n"))
    vals = [w for _, w in div.windows]
    assert min(vals) > 0.5  # bounded below for the harmonic series
