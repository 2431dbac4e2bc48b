"""Individual convergence tests and the auto pipeline."""

from fractions import Fraction

import pytest

from convsum import expr as X
from convsum import tests as T
from convsum.errors import NotMonotonicError
from convsum.tests import PreconditionFailure

C, D, I = T.CONVERGES, T.DIVERGES, T.INCONCLUSIVE


def P(s):
    return X.parse(s)


# -- nth term ----------------------------------------------------------------

def test_nth_term_divergence():
    v = T.nth_term_test(P("(n^3+n)/(5*n^3+n^2+27)"))
    assert v.outcome == D


def test_nth_term_gives_no_information_on_vanishing_terms():
    assert T.nth_term_test(P("1/n^2")).outcome == I


# -- p-series ----------------------------------------------------------------

@pytest.mark.parametrize("term,out,p", [
    ("1/n^2", C, 2), ("1/n", D, 1), ("1/sqrt(n)", D, Fraction(1, 2)),
    ("1/(n+n^(3/2))", C, Fraction(3, 2)),
])
def test_p_series(term, out, p):
    v = T.p_series_test(P(term))
    assert (v.outcome, v.auxiliary["p"]) == (out, p)


@pytest.mark.parametrize("term,out,w,p", [
    ("1/(n*ln(n))", D, 1, 1),
    ("1/(n*ln(n)^2)", C, 1, 2),
    ("1/(n*ln(n)^(1/2))", D, 1, Fraction(1, 2)),
    ("1/(n*ln(n)*lnk(2,n)^2)", C, 2, 2),
])
def test_generalized_p_series(term, out, w, p):
    v = T.generalized_p_series_test(P(term))
    assert (v.outcome, v.auxiliary["w"], v.auxiliary["p"]) == (out, w, p)


# -- ratio-type tests ---------------------------------------------------------

def test_ratio_geometric():
    v = T.ratio_test(P("n^2/2^n"))
    assert v.outcome == C and v.auxiliary["ratio"].equals(Fraction(1, 2))


def test_ratio_divergent():
    assert T.ratio_test(P("3^n/n^2")).outcome == D


def test_ratio_inconclusive_at_one():
    assert T.ratio_test(P("1/n^2")).outcome == I


def test_raabe():
    v = T.raabe_test(P("1/n^2"))
    assert v.outcome == C and v.auxiliary["raabe"].equals(2)
    v = T.raabe_test(P("1/sqrt(n)"))
    assert v.outcome == D and v.auxiliary["raabe"].equals(Fraction(1, 2))
    # at the exact Raabe boundary the test must escalate, not guess
    assert T.raabe_test(P("1/n")).outcome == I


def test_generalized_ratio_subsumes_raabe():
    v = T.generalized_ratio_test(P("1/n^2"), m=1)
    assert v.outcome == C
    v = T.generalized_ratio_test(P("1/(n*ln(n)^2)"), m=1)
    assert v.outcome == C
    v = T.generalized_ratio_test(P("1/(n*ln(n))"), m=1)
    assert v.outcome == D


def test_ratio_and_generalized_ratio_agree_when_decisive(verdict_entries):
    for e in verdict_entries:
        a = P(e.expr_text)
        try:
            r = T.ratio_test(a)
            g = T.generalized_ratio_test(a)
        except Exception:
            continue
        if r.decisive and g.decisive:
            assert r.outcome == g.outcome, e.expr_text


def test_nth_root():
    assert T.nth_root_test(P("n/2^n")).outcome == C
    assert T.nth_root_test(P("3^n/n^2")).outcome == D


# -- boundary and condensation -------------------------------------------------

@pytest.mark.parametrize("term,out,w", [
    ("1/n^2", C, 0), ("1/n", D, 0),
    ("1/(n*ln(n))", D, 1), ("1/(n*ln(n)^2)", C, 1),
    ("1/n!", C, 0),
])
def test_boundary(term, out, w):
    v = T.boundary_test(P(term))
    assert (v.outcome, v.auxiliary["w"]) == (out, w)


def test_condensation():
    assert T.condensation_test(P("1/(n*ln(n))")).outcome == D
    assert T.condensation_test(P("1/n^2")).outcome == C


def test_condensation_requires_monotone_terms():
    with pytest.raises(NotMonotonicError):
        T.condensation_test(P("(2+(-1)^n)/n^2"))


# -- alternating ----------------------------------------------------------------

def test_alternating_convergence():
    v = T.alternating_test(P("(-1)^n/n"))
    assert (v.outcome, v.deciding_test) == (C, "alternating")


def test_alternating_divergence_nonvanishing():
    assert T.alternating_test(P("(-1)^n")).outcome == D


def test_alternating_sign_coupled_denominator():
    assert T.auto(P("(-1)^n/(sqrt(n)-(-1)^n)")).outcome == D


# -- exp and lhopital -------------------------------------------------------------

def test_exp_test():
    assert T.exp_test(P("e^(-sqrt(n))")).outcome == C
    assert T.exp_test(P("e^(-ln(n))")).outcome == I


def test_lhopital_quotients():
    assert T.lhopital_test(P("ln(n)/n^2")).outcome == C
    assert T.lhopital_test(P("n^2/2^n")).outcome == C


def test_lhopital_guard_forces_divergence():
    v = T.lhopital_test(P("lnk(2,n)/(n*ln(n))"))
    assert v.outcome == D
    assert v.deciding_test == "lhopital_guard"


# -- comparisons and slower-series constructions -----------------------------------

def test_limit_comparison():
    assert T.limit_comparison(P("1/(n^2+1)"), P("1/n^2")).outcome == C
    assert T.limit_comparison(P("(n+1)/n^2"), P("1/n")).outcome == D


@pytest.mark.parametrize("term,factor", [
    ("1/n", "1/ln(n)"),
    ("1/(n*ln(n))", "1/lnk(2,n)"),
    ("1", "1/ln(n)"),
])
def test_slower_divergent(term, factor):
    b = T.slower_divergent(P(term))
    assert b == P(factor)
    assert T.boundary_test(X.mul(P(term), b)).outcome == D


@pytest.mark.parametrize("term,factor", [
    ("1/n^2", "ln(n)"),
    ("1/(n*ln(n)^2)", "lnk(2,n)"),
    ("1/2^n", "ln(n)"),
])
def test_slower_convergent(term, factor):
    b = T.slower_convergent(P(term))
    assert b == P(factor)
    assert T.boundary_test(X.mul(P(term), b)).outcome == C


def test_slower_divergent_rejects_convergent_input():
    with pytest.raises(PreconditionFailure):
        T.slower_divergent(P("1/n^2"))


def test_slower_convergent_rejects_divergent_input():
    with pytest.raises(PreconditionFailure):
        T.slower_convergent(P("1/n"))


# -- auto pipeline -----------------------------------------------------------------

def test_auto_matches_corpus(verdict_entries):
    from convsum.corpus import check_entry
    for e in verdict_entries:
        r = check_entry(e)
        assert r.status == "pass", (e.id, e.expr_text, r.got)


def test_auto_traces_are_nonempty():
    v = T.auto(P("1/n^2"))
    assert v.trace.steps
    assert all(s.rule and s.before for s in v.trace.steps)


def test_auto_inconclusive_reports_advisory():
    v = T.auto(P("sin(n)/n"))
    assert v.outcome == I
    assert "advisory" in v.auxiliary
