import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from beltrami import expr, jets
from beltrami.errors import ArityError, ExprSyntaxError, JetError, UnknownIdentifier
from beltrami.expr import BinOp, Call, Const, Neg, Num, Var
from oracles import mp_evaluate


def test_precedence_and_associativity():
    assert expr.evaluate(expr.parse("2^3^2")) == 512
    assert expr.evaluate(expr.parse("-2^2")) == -4
    assert expr.evaluate(expr.parse("2*3+4")) == 10
    assert expr.evaluate(expr.parse("2*(3+4)")) == 14
    assert expr.evaluate(expr.parse("8/4/2")) == 1
    assert expr.evaluate(expr.parse("1 - 2 - 3")) == -4
    assert expr.evaluate(expr.parse("2^-1")) == 0.5


def test_functions_constants_variables():
    node = expr.parse("sin(u)*cos(v) + e^0 + pi")
    assert expr.variables(node) == {"u", "v"}
    assert expr.evaluate(node, 0.5, 0.25) == pytest.approx(math.sin(0.5) * math.cos(0.25) + 1 + math.pi)
    assert expr.evaluate(expr.parse("sqrt(abs(-4)) + ln(e)")) == pytest.approx(3.0)
    assert expr.evaluate(expr.parse("1.5e2 + .5")) == 150.5


@pytest.mark.parametrize(
    "src, exc, offset",
    [
        ("sin(u", ExprSyntaxError, 6),
        ("u +", ExprSyntaxError, 4),
        ("u $ v", ExprSyntaxError, 3),
        ("foo(u)", UnknownIdentifier, 1),
        ("u + w", UnknownIdentifier, 5),
        ("sin(u, v)", ArityError, 1),
        ("(u", ExprSyntaxError, 3),
        ("u)", ExprSyntaxError, 2),
    ],
)
def test_errors_carry_one_based_offsets(src, exc, offset):
    with pytest.raises(exc) as info:
        expr.parse(src)
    assert info.value.offset == offset


def test_profile_fields_reject_v():
    with pytest.raises(UnknownIdentifier):
        expr.compile_field("sin(u) + v", allowed=("u",))


def test_jet_domain_error_reports_span():
    node = expr.parse("1 + ln(u - 2)")
    with pytest.raises(JetError) as info:
        expr.eval_jet(node, jets.seed(0.5, "u", 3), jets.seed(0.0, "v", 3))
    assert info.value.span == (5, 14)


def test_eval_jet_batched_derivatives():
    node = expr.parse("u^2*v + sin(v)")
    u = np.array([0.1, 0.2])
    J = expr.eval_jet(node, jets.seed(u, "u", 3), jets.seed(0.3, "v", 3) + 0 * jets.seed(u, "u", 3))
    np.testing.assert_allclose(J.partial(1, 1), 2 * u, atol=1e-15)


# -- random trees -------------------------------------------------------------

leaves = st.one_of(
    st.floats(min_value=0.0, max_value=5.0, allow_nan=False).map(lambda x: Num(round(x, 6))),
    st.sampled_from([Var("u"), Var("v"), Const("pi"), Const("e")]),
)


def _extend(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/"]), children, children),
        st.builds(lambda a: BinOp("^", a, Num(2.0)), children),
        st.builds(Neg, children),
        st.builds(Call, st.sampled_from(["sin", "cos", "exp", "sinh", "cosh", "tan", "sqrt", "ln", "abs"]),
                  children),
    )


trees = st.recursive(leaves, _extend, max_leaves=24)


def _depth(node):
    kids = expr._children(node)
    return 1 + max((_depth(k) for k in kids), default=0)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_unparse_round_trip(tree):
    assert expr.parse(expr.unparse(tree)) == tree


def _subtree_scale(node, u, v):
    """Largest magnitude of any intermediate value in the tree."""
    here = abs(expr.evaluate(node, u, v))
    return max([here] + [_subtree_scale(k, u, v) for k in expr._children(node)])


@settings(max_examples=300, deadline=None)
@given(trees, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_scalar_and_jet_evaluation_agree(tree, u, v):
    assume(_depth(tree) <= 6)
    try:
        want = expr.evaluate(tree, u, v)
        scale = _subtree_scale(tree, u, v)
    except (ValueError, ZeroDivisionError, OverflowError):
        assume(False)
    # huge intermediates (sin(exp(sinh(pi))) feeds 1e5 to sin) turn one-ulp libm
    # differences between numpy and math into large output differences
    assume(math.isfinite(scale) and scale <= 1e3)
    try:
        # overflowing derivative coefficients are filtered out just below
        with np.errstate(all="ignore"):
            J = expr.eval_jet(tree, jets.seed(u, "u", 2), jets.seed(v, "v", 2))
    except JetError:
        # jets also need derivatives to exist (sqrt/abs at 0 and the like)
        assume(False)
    assume(np.all(np.isfinite(J.c)))
    got = float(J.value)
    if abs(got - want) <= 1e-14 * max(1.0, abs(want)):
        return
    # cancellation or a near-pole tan can still amplify rounding: then the jet
    # value must be as close to a 50-digit reference as the scalar path is
    ref = mp_evaluate(tree, u, v)
    assert abs(got - ref) <= 2 * abs(want - ref) + 1e-14 * max(1.0, abs(ref))


def test_random_expression_is_finite_and_round_trips():
    rng = np.random.default_rng(7)
    for _ in range(50):
        node = expr.random_expression(rng, 6)
        assert expr.parse(expr.unparse(node)) == node
        u, v = rng.uniform(-3, 3, size=2)
        assert math.isfinite(expr.evaluate(node, u, v))
