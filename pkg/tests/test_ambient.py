import numpy as np
import pytest
from hypothesis import given, strategies as st

from gjmslab.ambient import (ambient_laplacian_power, build_ambient, extension_independence_check,
                             homogeneity_residual, poincare_einstein_metric)
from gjmslab.catalog import builtin
from gjmslab.curvature import curvature_at
from gjmslab.errors import DimensionError, NotEinsteinError, ValidationError
from gjmslab.gjms import einstein_gjms_apply, yamabe_apply


@pytest.fixture(scope="module")
def s5():
    e = builtin("round_sphere_stereographic", 5, points=1)
    return e, build_ambient(e.field, 0.5, check_point=e.safe_points[0])


@given(st.floats(0.3, 4.0))
def test_t_independence(t):
    e = builtin("round_sphere_stereographic", 3, points=1)
    af = build_ambient(e.field, 0.5)
    p = e.safe_points[0]
    u = "x1*x2 + x3"
    assert ambient_laplacian_power(af, 1, u, p, t=t) == pytest.approx(ambient_laplacian_power(af, 1, u, p), rel=1e-9)


def test_matches_operators(s5):
    e, af = s5
    p, u = e.safe_points[0], "x1^2 + sin(x2)*x3"
    assert ambient_laplacian_power(af, 1, u, p) == pytest.approx(yamabe_apply(e.field, p, u), rel=1e-8)
    assert ambient_laplacian_power(af, 2, u, p) == pytest.approx(einstein_gjms_apply(2, 1.0, e.field, p, u), rel=1e-7)


def test_extension_independence(s5):
    e, af = s5
    p = e.safe_points[0]
    assert extension_independence_check(af, 2, "x1*x2", p, "x1").passed
    assert extension_independence_check(af, 1, "x1*x2", p, "rho*x4", raw=True).passed
    with pytest.raises(ValidationError):
        extension_independence_check(af, 1, "x1*x2", p, "1", raw=True)
    with pytest.raises(ValidationError):
        extension_independence_check(af, 1, "x1*x2", p, "zz")


def test_ambient_is_ricci_flat_and_homogeneous(s5):
    e, af = s5
    p = e.safe_points[0]
    b = curvature_at(af.ambient, af.lift(p, 1.3, 0.05), 2)
    assert np.max(np.abs(b.Ric.data)) < 1e-9
    assert homogeneity_residual(af, p, 2.5) < 1e-12


def test_refusals(s5):
    e, af = s5
    with pytest.raises(NotEinsteinError):
        build_ambient(e.field, 1.0, check_point=e.safe_points[0])
    s4 = builtin("round_sphere_stereographic", 4, points=1)
    af4 = build_ambient(s4.field, 0.5)
    with pytest.raises(DimensionError):
        ambient_laplacian_power(af4, 3, "x1", s4.safe_points[0])
    with pytest.raises(ValueError):
        ambient_laplacian_power(af, 1, "x1", e.safe_points[0], t=-1.0)


def test_poincare_einstein_metric():
    e = builtin("round_sphere_stereographic", 3, points=1)
    pe = poincare_einstein_metric(e.field, 0.5)  # ambient normalization of the unit sphere
    pt = np.concatenate([[0.4], e.safe_points[0]])
    b = curvature_at(pe, pt, 2)
    assert np.allclose(b.Ric.data, -3 * b.frame.g0, atol=1e-9)
