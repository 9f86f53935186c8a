import math
import pickle

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from concircular.expr import (
    MASS,
    ONE,
    ZERO,
    Expression,
    ExpressionSyntaxError,
    JetOrderError,
    JetVariable,
    MissingAssignment,
    NegativeRadicand,
    U,
    UnknownIdentifier,
    X,
    compile_many,
    is_zero,
    parse,
    partial,
    probe_points,
    probe_seed,
    sqrt,
    var,
)
from concircular.variational import euclid
from concircular.variational.mechanics import zeta2

# ---------------------------------------------------------------------------
# parser


def test_parse_counts_leaves():
    e = parse("u1*du2 - u2*du1")
    assert e.leaves() == 4
    assert e.jet_variables() == {JetVariable(0, 1), JetVariable(0, 2), JetVariable(1, 1), JetVariable(1, 2)}


def test_parse_sqrt():
    e = parse("sqrt(u1^2+u2^2)")
    assert e.evaluate({"u1": 3, "u2": 4}) == 5.0


def test_parse_unknown_index():
    with pytest.raises(UnknownIdentifier):
        parse("u3*du1")


@pytest.mark.parametrize("text,pos", [("u1 +", 4), ("(u1", 3), ("u1 ** 2", 4), ("2 $ u1", 2), ("u1^x1", 3)])
def test_parse_error_position(text, pos):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(text)
    assert info.value.position == pos


def test_parse_numbers_exact():
    assert parse("0.1 + 0.2") == parse("3/10")
    assert parse("2^-2") == parse("1/4")


def test_parse_accepts_higher_jets_and_mass():
    e = parse("dddu2 + m*x1")
    assert JetVariable(3, 2) in e.jet_variables()
    assert e.jet_order() == 3


def test_jet_cap():
    with pytest.raises(JetOrderError):
        JetVariable(9, 1)
    with pytest.raises(UnknownIdentifier):
        parse("d" * 9 + "u1")


# ---------------------------------------------------------------------------
# partial derivatives and evaluation


def test_partial_polynomial():
    assert partial(parse("u1*du2 - u2*du1"), "du1") == -var("u2")


def test_partial_no_x_dependence():
    assert partial(parse("sqrt(u1^2+u2^2)"), "x1") == ZERO


def test_evaluate_examples():
    assert parse("u1*du2 - u2*du1").evaluate({"u1": 1, "u2": 0, "du1": 0, "du2": 1}) == 1.0
    assert (sqrt(parse("u1^2+u2^2")) ** 3).evaluate({"u1": 3, "u2": 4}) == pytest.approx(125.0, rel=1e-15)


def test_evaluate_eq1_lagrangian():
    # (u1 du2 - u2 du1)/|u|^3 - m|u| at u=(1,0), du=(0,1), m=2
    text = "(u1*du2-u2*du1)/sqrt(u1^2+u2^2)^3 - m*sqrt(u1^2+u2^2)"
    assert parse(text).evaluate({"u1": 1, "u2": 0, "du1": 0, "du2": 1, "m": 2}) == -1.0


def test_evaluate_errors():
    with pytest.raises(MissingAssignment):
        parse("u1 + u2").evaluate({"u1": 1.0})
    with pytest.raises(NegativeRadicand):
        sqrt(var("x1")).evaluate({"x1": -1.0})


def test_evaluate_vectorized():
    e = parse("u1*du2 - u2*du1")
    vals = e.evaluate({"u1": np.array([1.0, 2.0]), "u2": 0.0, "du1": 0.0, "du2": np.array([1.0, 3.0])})
    np.testing.assert_array_equal(vals, [1.0, 6.0])


def test_compile_many_matches_evaluate():
    exprs = [parse("u1*sqrt(u1^2+u2^2)"), parse("m/u2"), ONE]
    f = compile_many(exprs, ["u1", "u2", "m"])
    pt = {"u1": 0.3, "u2": -1.7, "m": 2.5}
    assert f(0.3, -1.7, 2.5) == pytest.approx(tuple(e.evaluate(pt) for e in exprs), rel=1e-15)


def test_mass_is_not_folded():
    e = MASS * 2 + 1
    assert "m" in e.to_text()
    assert e.subs({"m": 3}) == Expression.constant(7)


# ---------------------------------------------------------------------------
# zero decisions


def test_zero_simple():
    a, b = var("u1"), var("du2")
    d = is_zero(a + b - b - a)
    assert d and d.path == "symbolic"


def test_zero_antisymmetric_contraction():
    assert is_zero(euclid.cross(euclid.u(), euclid.u()))


def test_zero_zeta2_of_curvature():
    assert is_zero(zeta2(euclid.curvature()))


def test_zero_radical_identity():
    a, b = parse("u1^2 + 1"), parse("u2^2 + 2")
    assert is_zero(sqrt(a) * sqrt(b) - sqrt(a * b))


def test_nonzero_is_detected():
    d = is_zero(parse("u1 - u2"))
    assert not d and d.path == "symbolic"
    d = is_zero(sqrt(parse("u1^2+1")) - parse("u1") - 1e-3)
    assert not d


def test_probe_seed_is_context_local():
    vs = {JetVariable(0, 1), JetVariable(2, 2)}
    a = probe_points(vs, 10)
    with probe_seed(7):
        b = probe_points(vs, 10)
    c = probe_points(vs, 10)
    assert not np.array_equal(a[JetVariable(2, 2)], b[JetVariable(2, 2)])
    np.testing.assert_array_equal(a[JetVariable(2, 2)], c[JetVariable(2, 2)])
    assert np.all((np.hypot(a[JetVariable(0, 1)], 1) > 0))


def test_projection_of_velocity_derivative_of_k():
    """u^j dk/ddu^j = 0, compared with central differences at 100 points."""
    k = euclid.curvature()
    contraction = sum((U(j) * k.diff(JetVariable(1, j)) for j in (1, 2)), ZERO)
    assert is_zero(contraction)
    rng = np.random.default_rng(3)
    kf = k.lambdify(["u1", "u2", "du1", "du2"])
    for _ in range(100):
        u = rng.normal(size=2)
        du = rng.normal(size=2)
        h = 1e-6
        fd = sum(u[j] * (kf(*u, *(du + h * np.eye(2)[j])) - kf(*u, *(du - h * np.eye(2)[j]))) / (2 * h)
                 for j in range(2))
        assert abs(fd) < 1e-7 * max(1.0, kf(*u, *du))


def test_expressions_are_immutable_and_picklable():
    e = parse("u1 + sqrt(u2^2+1)")
    with pytest.raises((AttributeError, TypeError)):
        e.num = None
    assert pickle.loads(pickle.dumps(e)) == e
    assert hash(e) == hash(parse("sqrt(u2^2+1) + u1"))


# ---------------------------------------------------------------------------
# property tests

LEAVES = ["u1", "u2", "du1", "du2", "x1", "x2", "m"]


def _leaf():
    return st.one_of(st.sampled_from(LEAVES).map(var), st.integers(-3, 3).map(Expression.constant))


def _node(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda t: t[0] + t[1]),
        pair.map(lambda t: t[0] - t[1]),
        pair.map(lambda t: t[0] * t[1]),
        pair.map(lambda t: t[0] / (t[1] * t[1] + 1)),
        children.map(lambda e: sqrt(e * e + 1)),
        children.map(lambda e: e ** 2),
    )


expressions = st.recursive(_leaf(), _node, max_leaves=6)
points = st.fixed_dictionaries({n: st.floats(0.3, 1.7) for n in LEAVES})
prop = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@prop
@given(expressions)
def test_roundtrip(e):
    assert parse(e.to_text()) == e


@prop
@given(expressions)
def test_canonical_idempotent(e):
    again = Expression._from_terms(dict(e.num.terms), dict(e.den.terms))
    assert again == e
    assert (e + ZERO) * ONE == e


@prop
@given(expressions, expressions, st.integers(-4, 4), st.integers(-4, 4), st.sampled_from(LEAVES))
def test_derivative_linearity(e1, e2, a, b, v):
    lhs = partial(a * e1 + b * e2, v)
    rhs = a * partial(e1, v) + b * partial(e2, v)
    assert is_zero(lhs - rhs)


@prop
@given(expressions, points, st.sampled_from(LEAVES))
def test_derivative_matches_finite_difference(e, pt, v):
    h = 1e-5
    up, dn = dict(pt), dict(pt)
    up[v] += h
    dn[v] -= h
    fd = (e.evaluate(up) - e.evaluate(dn)) / (2 * h)
    exact = partial(e, v).evaluate(pt)
    scale = max(1.0, abs(exact), abs(e.evaluate(pt)))
    assert math.isclose(fd, exact, rel_tol=1e-6, abs_tol=1e-6 * scale)


@prop
@given(expressions)
def test_deterministic_text(e):
    assert parse(e.to_text()).to_text() == e.to_text()


def test_position_variables():
    assert X(1).jet_variables() == {JetVariable(-1, 1)}
    assert JetVariable(-1, 2).kind == "position"
