"""Hypothesis strategies for expressions that are smooth on the sampled box."""

import hypothesis.strategies as st

from flowforms import expr as ex

coordinates = st.sampled_from(ex.COORDINATES)
small_ints = st.integers(min_value=-3, max_value=3)


def _leaf():
    return st.one_of(
        coordinates.map(ex.var),
        small_ints.map(ex.const),
    )


def _grow(children):
    # every wrapper keeps the value finite and the derivative bounded on [-2, 2]^4
    return st.one_of(
        st.tuples(st.sampled_from(["add", "sub", "mul"]), children, children)
        .map(lambda a: ex.node(a[0], a[1], a[2])),
        children.map(lambda a: ex.node("neg", a)),
        children.map(lambda a: ex.node("sin", a)),
        children.map(lambda a: ex.node("cos", a)),
        children.map(lambda a: ex.node("exp", ex.node("sin", a))),
        children.map(lambda a: ex.node("ln", ex.node("add", ex.const(2), ex.node("cos", a)))),
        children.map(lambda a: ex.node("sqrt", ex.node("add", ex.const(2), ex.node("sin", a)))),
        st.tuples(children, children).map(
            lambda a: ex.node("div", a[0], ex.node("add", ex.const(3), ex.node("sin", a[1])))),
        st.tuples(children, st.integers(2, 3)).map(lambda a: ex.node("pow", a[0], value=a[1])),
    )


expressions = st.recursive(_leaf(), _grow, max_leaves=8)

points = st.tuples(*(st.floats(-1.5, 1.5, allow_nan=False) for _ in range(4))).map(
    lambda p: ex.Point4(*p))
