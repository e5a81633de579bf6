import math

import pytest
from hypothesis import given, strategies as st

from gjmslab.catalog import builtin
from gjmslab.errors import DimensionError, NotEinsteinError
from gjmslab.gjms import (covariance_residual, einstein_factor_constants, einstein_gjms_apply, einstein_lambda,
                          laplacian_power_apply, paneitz_apply, yamabe_apply)

c = st.floats(-0.3, 0.3, allow_nan=False)


@given(c, c, st.integers(1, 2))
def test_covariance_on_generic_conformal_factor(a, b, k):
    e = builtin("hyperbolic_ball", 4, points=1)
    ups = f"{a}*x1*x3 + {b}*cos(x2)"
    r, lhs, _ = covariance_residual(k, e.field, e.safe_points[0], ups, "1 + x1*x4 + x2^2")
    assert r <= 1e-8 * max(1.0, abs(lhs))


@pytest.mark.parametrize("name,n", [("round_sphere_stereographic", 4), ("round_sphere_stereographic", 5),
                                    ("hyperbolic_ball", 5), ("product_sphere_sphere", 4)])
def test_einstein_product_matches_yamabe_and_paneitz(name, n):
    e = builtin(name, n, points=2)
    u = "x1*x2 + sin(x3) + x1^3"
    for p in e.safe_points:
        assert einstein_gjms_apply(1, None, e.field, p, u) == pytest.approx(yamabe_apply(e.field, p, u), rel=1e-10)
        assert einstein_gjms_apply(2, None, e.field, p, u) == pytest.approx(paneitz_apply(e.field, p, u), rel=1e-9)


def test_factor_order_is_irrelevant():
    e = builtin("round_sphere_stereographic", 6, points=1)
    p, u = e.safe_points[0], "x1^2*x2 + exp(0.3*x3)"
    a = einstein_gjms_apply(3, 1.0, e.field, p, u)
    b = einstein_gjms_apply(3, 1.0, e.field, p, u, order_of_factors=[2, 0, 1])
    assert a == pytest.approx(b, rel=1e-11)


def test_constants_kill_constants_in_critical_dimension():
    # P_{n/2} annihilates constants on the round sphere (last factor is Delta)
    assert einstein_factor_constants(2, 1.0, 4)[-1] == 0.0
    e = builtin("round_sphere_stereographic", 4, points=1)
    assert abs(einstein_gjms_apply(2, 1.0, e.field, e.safe_points[0], "1")) < 1e-10


def test_flat_reduces_to_laplacian_powers():
    e = builtin("flat", 5, points=1)
    p, u = e.safe_points[0], "x1^4 + x2^2*x3^2"
    assert paneitz_apply(e.field, p, u) == pytest.approx(laplacian_power_apply(2, e.field, p, u), rel=1e-12)
    assert laplacian_power_apply(1, e.field, p, "x1^2 + x2^2") == pytest.approx(-4.0)


def test_einstein_detection():
    e = builtin("round_sphere_stereographic", 5, points=1)
    assert einstein_lambda(e.field, e.safe_points[0]) == pytest.approx(1.0)
    cf = builtin("conformally_flat", 4, {"upsilon": "0.3*x1*x2"}, points=1)
    with pytest.raises(NotEinsteinError):
        einstein_lambda(cf.field, cf.safe_points[0])
    with pytest.raises(NotEinsteinError):
        einstein_gjms_apply(1, 2.0, e.field, e.safe_points[0], "x1")
    with pytest.raises(ValueError):
        einstein_gjms_apply(0, 1.0, e.field, e.safe_points[0], "x1")
    with pytest.raises(DimensionError):
        yamabe_apply(builtin("flat", 2).field, [0.0, 0.0], "x1")


def test_yamabe_on_sphere_constant():
    n = 4
    e = builtin("round_sphere_stereographic", n, points=1)
    want = (n - 2) / (4 * (n - 1)) * n * (n - 1)
    assert yamabe_apply(e.field, e.safe_points[0], "1") == pytest.approx(want)
    assert math.isfinite(paneitz_apply(e.field, e.safe_points[0], "1"))
