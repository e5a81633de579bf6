import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gjmslab.dsl import (FUNCTIONS, Bin, Call, MetricField, Neg, Num, Var, load_metric, names, parse_expr,
                         parse_metric_text, substitute, to_str)
from gjmslab.errors import ParseError, SingularPointError, ValidationError

VARS = ("x", "y", "z")


def exprs():
    leaf = st.one_of(st.sampled_from(VARS).map(Var),
                     st.floats(-5, 5, allow_nan=False).map(lambda v: Num(round(v, 3))))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.tuples(st.sampled_from("+-*/^"), sub, sub).map(lambda t: Bin(*t)),
            st.tuples(st.sampled_from(FUNCTIONS), sub).map(lambda t: Call(*t)),
            sub.map(Neg),
        ),
        max_leaves=8,
    )


@given(exprs())
def test_print_parse_round_trip(e):
    # parsing canonicalizes negative literals to Neg(Num); after one pass the tree is a fixed point
    c = parse_expr(to_str(e))
    assert parse_expr(to_str(c)) == c
    assert to_str(parse_expr(to_str(c))) == to_str(c)
    f = MetricField.from_strings(list(VARS), {(0, 0): "1", (1, 1): "1", (2, 2): "1"})
    pt = [0.7, -0.4, 1.3]
    try:
        want = f.eval_float(e, pt)
    except (SingularPointError, OverflowError, ZeroDivisionError):
        return
    got = f.eval_float(c, pt)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12) or (math.isnan(got) and math.isnan(want))


def test_precedence_and_associativity():
    assert parse_expr("2^3^2") == Bin("^", Num(2.0), Bin("^", Num(3.0), Num(2.0)))
    assert parse_expr("-x^2") == Neg(Bin("^", Var("x"), Num(2.0)))
    assert parse_expr("a - b - c") == Bin("-", Bin("-", Var("a"), Var("b")), Var("c"))
    assert parse_expr("1e-3 * x") == Bin("*", Num(1e-3), Var("x"))


@pytest.mark.parametrize("src,pos", [("1 + * 2", 4), ("sin(x", 5), ("x $ y", 2), ("(x + y))", 7), ("foo(x)", 0)])
def test_parse_errors_carry_offsets(src, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(src)
    assert info.value.pos == pos


def test_names_and_substitute():
    e = parse_expr("a*x + sin(y)/b")
    assert names(e) == {"a", "b", "x", "y"}
    s = substitute(e, {"a": 2.0, "b": Var("x")})
    assert names(s) == {"x", "y"}


def test_metric_text_round_trip(tmp_path):
    f = MetricField.from_strings(["r", "t"], {(0, 0): "1", (1, 1): "r^2 * k", (0, 1): "0.1*r"}, {"k": 2.0})
    g = parse_metric_text(f.to_text())
    assert g.coords == f.coords and g.params == f.params
    pt = [1.3, 0.4]
    assert np.allclose(g.metric_value(pt), f.metric_value(pt))
    p = tmp_path / "m.metric"
    p.write_text(f.to_text())
    h = load_metric(p)
    assert h.name.startswith("sha256:")
    assert load_metric(p).name == h.name


def test_shipped_metric_files():
    import pathlib
    root = pathlib.Path(__file__).resolve().parents[1] / "metrics"
    s2 = load_metric(root / "sphere2_polar.metric")
    assert s2.dim == 2 and s2.params == {"a": 1.0}
    assert s2.metric_value([1.0, 0.0])[1, 1] == pytest.approx(math.sin(1.0) ** 2)
    w = load_metric(root / "warped_product4.metric")
    assert w.dim == 4


@pytest.mark.parametrize("text,exc", [
    ("coords = x\ng[1][1] = 1 +\n", ParseError),
    ("coords = x\nbogus line\n", ParseError),
    ("coords = x,y\ng[2][1] = 1\n", ParseError),
    ("dim = 3\ncoords = x,y\n", ValidationError),
    ("coords = x\ng[1][1] = q*x\n", ValidationError),
    ("coords = x\ng[2][2] = 1\n", ValidationError),
    ("g[1][1] = 1\n", ParseError),
])
def test_metric_file_errors(text, exc):
    with pytest.raises(exc):
        parse_metric_text(text)


def test_metric_parse_error_offset_points_into_line():
    text = "coords = x\ng[1][1] = 1 + * x\n"
    with pytest.raises(ParseError) as info:
        parse_metric_text(text)
    assert text[info.value.pos] == "*"


def test_singular_points():
    f = MetricField.from_strings(["x"], {(0, 0): "1/x"})
    with pytest.raises(SingularPointError):
        f.metric_jets([0.0], 2)
    with pytest.raises(SingularPointError):
        f.eval_float("log(x - 1)", [0.5])


@given(st.floats(0.2, 2.0), st.floats(-1, 1))
def test_jet_matches_float_evaluation(x, y):
    f = MetricField.from_strings(["x", "y"], {(0, 0): "1", (1, 1): "1"})
    e = "exp(x*y) * sqrt(x) + tan(y/3) - log(x)"
    jet = f.eval_jet(e, [x, y], 3)
    assert jet.value == pytest.approx(f.eval_float(e, [x, y]), rel=1e-12)
    h = 1e-6
    fd = (f.eval_float(e, [x + h, y]) - f.eval_float(e, [x - h, y])) / (2 * h)
    assert jet.partial((1, 0)) == pytest.approx(fd, rel=1e-6, abs=1e-8)
