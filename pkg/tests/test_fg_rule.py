import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gjmslab.catalog import builtin
from gjmslab.conformal import conformal_at
from gjmslab.errors import UnsupportedRewriteError, ValidationError, WeightRangeError
from gjmslab.fg_rule import (ConformalExpr, ConformalName as CN, InvariantExpr, RicciInvolving, a_tilde,
                             eval_conformal_expr, eval_invariant_expr, fg_rewrite, fg_transform, heat_expr)
from gjmslab.invariants import InvariantName as IN

W4 = [p for p in IN if p.weight == 4]
W6 = [p for p in IN if p.weight == 6]
fracs = st.fractions(min_value=-10, max_value=10, max_denominator=50)


def test_a_tilde_table():
    assert a_tilde(0) == ConformalExpr(((1, CN.One),), 0)
    assert a_tilde(1).is_zero()
    assert a_tilde(2) == ConformalExpr(((F(1, 180), CN.WeylSq),), 4)
    d = 9 * math.factorial(7)
    assert a_tilde(3).coefficient(CN.Phi) == F(81, d)
    assert a_tilde(3).coefficient(CN.CubicW1) == F(64, d)
    assert a_tilde(3).coefficient(CN.CubicW2) == F(352, d)
    assert str(a_tilde(2)) == "1/180 * |W|^2"
    assert str(a_tilde(1)) == "0"


def test_rewrite_rules():
    assert fg_rewrite(IN.RiemSq) is CN.WeylSq
    assert fg_rewrite(IN.GradRiemSq) is CN.Phi
    for p in (IN.Kappa, IN.KappaSq, IN.RicSq, IN.LapKappa, RicciInvolving(6)):
        assert fg_rewrite(p) is None
    with pytest.raises(UnsupportedRewriteError):
        fg_rewrite("not a primitive")


def test_weight_limits_and_validation():
    with pytest.raises(WeightRangeError):
        fg_transform(InvariantExpr(((1, RicciInvolving(8)),), 8))
    with pytest.raises(WeightRangeError):
        heat_expr(4)
    with pytest.raises(ValidationError):
        InvariantExpr(((1, IN.Kappa),), 4)
    with pytest.raises(ValidationError):
        InvariantExpr(((1, CN.WeylSq),), 4)
    with pytest.raises(ValidationError):
        heat_expr(1) + heat_expr(2)


@given(st.lists(st.tuples(fracs, st.sampled_from(W6)), max_size=6),
       st.lists(st.tuples(fracs, st.sampled_from(W6)), max_size=6), fracs)
def test_transform_is_linear(t1, t2, c):
    a, b = InvariantExpr(tuple(t1), 6), InvariantExpr(tuple(t2), 6)
    assert fg_transform(a + b) == fg_transform(a) + fg_transform(b)
    assert fg_transform(a * c) == fg_transform(a) * c
    assert (a - a).is_zero()


@given(st.lists(st.tuples(fracs, st.sampled_from(W4)), max_size=6))
def test_terms_are_merged_canonically(terms):
    e = InvariantExpr(tuple(terms), 4)
    for p in W4:
        assert e.coefficient(p) == sum((c for c, q in terms if q is p), F(0))
    assert len({p for _, p in e.terms}) == len(e.terms)


def test_numeric_identity_on_ricci_flat():
    e = builtin("schwarzschild_tangherlini", 6, points=1)
    cb = conformal_at(e.field, e.safe_points[0], 6)
    for j in range(4):
        a = eval_invariant_expr(heat_expr(j), cb.curvature, ricci_flat=True)
        at = eval_conformal_expr(a_tilde(j), cb)
        assert a == pytest.approx(at, rel=1e-8, abs=1e-14)
    with pytest.raises(UnsupportedRewriteError):
        eval_invariant_expr(heat_expr(3), cb.curvature)
