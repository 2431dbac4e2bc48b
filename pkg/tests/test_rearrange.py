"""Blocking, deduplication, and rearrangement of conditionally
convergent series."""

import mpmath
import pytest

from convsum import expr as X
from convsum import tests as T
from convsum.errors import PreconditionError
from convsum.rearrange import (block, BlockSpec, deduplicate_strict,
                               riemann_rearrange,
                               divergent_rearrangement_demo)


def P(s):
    return X.parse(s)


def test_block_pairs_alternating_harmonic():
    # a(2n) + a(2n+1) for (-1)^n/n collapses to a positive 1/n^2-scale term
    b = block(P("(-1)^n/n"), 2)
    assert b == P("(1/4)/n^2")
    assert T.auto(b).outcome == T.CONVERGES


def test_block_pairs_sign_coupled_term():
    b = block(P("(-1)^n/(sqrt(n)-(-1)^n)"), 2)
    assert b == P("1/n")
    assert T.auto(b).outcome == T.DIVERGES


def test_block_preserves_the_verdict():
    for s in ["(-1)^n/n", "(-1)^n/(sqrt(n)-(-1)^n)"]:
        assert T.auto(block(P(s), 2)).outcome == T.auto(P(s)).outcome


def test_block_spec_validation():
    with pytest.raises(ValueError):
        BlockSpec("fixed", 1)
    with pytest.raises(ValueError):
        BlockSpec("fixed", 9)


def test_deduplicate_strict():
    assert deduplicate_strict([1, 3, 3, 5, 7, 7, 9]) == [1, 3, 5, 7, 9]
    assert deduplicate_strict([]) == []


def test_riemann_rearrange_hits_the_target():
    s, bound = riemann_rearrange(P("(-1)^(n+1)/n"), mpmath.mpf("0.25"),
                                 max_steps=20000)
    assert abs(s - mpmath.mpf("0.25")) <= bound
    assert bound < 1e-3


def test_riemann_rearrange_rejects_absolutely_convergent_input():
    with pytest.raises(PreconditionError):
        riemann_rearrange(P("(-1)^n/n^2"), mpmath.mpf("0.5"))


def test_riemann_rearrange_rejects_divergent_input():
    with pytest.raises(PreconditionError):
        riemann_rearrange(P("(-1)^n"), mpmath.mpf("0.5"))


def test_divergent_rearrangement_grows():
    sums = divergent_rearrangement_demo(P("(-1)^(n+1)/n"), block_budget=20)
    assert len(sums) == 20
    assert sums[-1] > sums[0]
    assert sums[-1] > 2  # each block contributes at least ~1/4 net
