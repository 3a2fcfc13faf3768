import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixsum import constraints as cons
from fixsum.constraints import ConstraintSet, LinearConstraint, PolynomialConstraint
from fixsum.errors import DimensionError, PreconditionError


def pairs(rows):
    return [(list(np.asarray(a, dtype=float)), b) for a, b in rows]


@pytest.mark.parametrize(
    "cs, expected",
    [
        (
            ConstraintSet(3, (LinearConstraint((1, 1, 0), 0.6, "=="),), eps_eq=1e-2),
            [([1, 1, 0], 0.61), ([-1, -1, 0], -0.59)],
        ),
        (ConstraintSet(3, (LinearConstraint((1, 0, 0), 0.3),), eps_ineq=0.0), [([1, 0, 0], 0.3)]),
        (ConstraintSet(3, (LinearConstraint((1, 0.5, 0), 0.6),), eps_ineq=1e-3), [([1, 0.5, 0], 0.601)]),
        (ConstraintSet(3, (LinearConstraint((1, 1, 0), 0.6, ">="),), eps_ineq=1e-3), [([-1, -1, 0], -0.599)]),
    ],
)
def test_expand_linear(cs, expected):
    got = pairs(cons.expand_linear(cs))
    assert len(got) == len(expected)
    for (a, b), (ea, eb) in zip(got, expected):
        assert a == ea
        assert b == pytest.approx(eb, abs=1e-15)


def test_equality_expands_in_place():
    cs = ConstraintSet(
        3,
        (LinearConstraint((1, 0, 0), 0.5), LinearConstraint((0, 1, 1), 0.4, "=="), LinearConstraint((0, 0, 1), 0.9)),
    )
    rows = pairs(cons.expand_linear(cs))
    assert [a for a, _ in rows] == [[1, 0, 0], [0, 1, 1], [0, -1, -1], [0, 0, 1]]


@pytest.mark.parametrize(
    "cs, x, linear, nonlinear",
    [
        (ConstraintSet(3, (LinearConstraint((1, 0, 0), 0.3),)), [0.5, 0.4, 0.1], [0], []),
        (ConstraintSet(3, (), (PolynomialConstraint(((1.0, (1, 1, 0)),), 0.1),)), [0.5, 0.5, 0.0], [], [0]),
        (ConstraintSet(3, (LinearConstraint((1, 1, 0), 0.6, ">="),)), [0.3, 0.3, 0.4], [], []),
    ],
)
def test_check_examples(cs, x, linear, nonlinear):
    rep = cons.check(cs, x)
    assert rep.linear == linear
    assert rep.nonlinear == nonlinear
    assert rep.satisfied == (not linear and not nonlinear)


def test_check_reports_each_constraint_once():
    cs = ConstraintSet(3, (LinearConstraint((1, 1, 0), 0.6, "=="), LinearConstraint((1, 0, 0), 0.1)))
    assert cons.check(cs, [0.9, 0.1, 0.0]).linear == [0, 1]
    assert cons.check(cs, [0.05, 0.05, 0.9]).linear == [0]


def test_predicate_hook():
    cs = ConstraintSet(3, predicates=(lambda X: X[:, 2] < 0.5,))
    assert cons.check(cs, [0.2, 0.2, 0.6]).nonlinear == [0]
    X = np.array([[0.2, 0.2, 0.6], [0.4, 0.4, 0.2]])
    assert list(cons.satisfied_batch(cs, X)) == [False, True]


def test_polynomial_evaluate_batch():
    p = PolynomialConstraint(((2.0, (2, 0, 1)), (-1.0, (0, 1, 0))), 0.0)
    X = np.array([[0.5, 0.25, 0.25], [0.1, 0.1, 0.8]])
    np.testing.assert_allclose(p.evaluate(X), [2 * 0.25 * 0.25 - 0.25, 2 * 0.01 * 0.8 - 0.1])


@pytest.mark.parametrize(
    "make",
    [
        lambda: LinearConstraint((0, 0, 0), 1.0),
        lambda: LinearConstraint((1, 0, 0), 1.0, "<"),
        lambda: PolynomialConstraint((), 1.0),
        lambda: PolynomialConstraint(((1.0, (-1, 0)),), 1.0),
        lambda: ConstraintSet(3, eps_ineq=-1.0),
    ],
)
def test_invalid_constraints(make):
    with pytest.raises(PreconditionError):
        make()


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        ConstraintSet(3, (LinearConstraint((1, 0), 0.5),))
    with pytest.raises(DimensionError):
        cons.check(ConstraintSet(3), [0.5, 0.5])


def test_json_round_trip(tmp_path):
    cs = ConstraintSet(
        3,
        (LinearConstraint((1, 1, 0), 0.6, "=="), LinearConstraint((1, 0.5, 0), 0.6)),
        (PolynomialConstraint(((1.0, (1, 1, 0)),), 0.1),),
        eps_ineq=2e-3,
        eps_eq=5e-3,
    )
    path = tmp_path / "c.json"
    cons.dump(cs, path)
    assert cons.load(path) == cs
    assert json.loads(path.read_text())["n"] == 3


def test_json_nonlinear_ge():
    data = {"n": 3, "nonlinear": [{"terms": [{"coef": 1.0, "exp": [1, 1, 0]}], "b": 0.1, "rel": ">="}]}
    cs = cons.from_dict(data)
    assert cons.check(cs, [0.5, 0.5, 0.0]).satisfied
    assert not cons.check(cs, [0.1, 0.1, 0.8]).satisfied


def test_bounds_constraints():
    cs = cons.bounds_constraints([0.1, 0.0, 0.0], [0.5, 0.25, 1.0])
    assert len(cs.linear) == 3
    assert cons.check(cs, [0.3, 0.2, 0.5]).satisfied
    # rows per coordinate: upper then lower
    assert cons.check(cs, [0.05, 0.2, 0.75]).linear == [1]


linear_rows = st.lists(
    st.tuples(
        st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3).filter(lambda a: any(abs(v) > 1e-3 for v in a)),
        st.floats(-1, 1),
        st.sampled_from(["<=", ">=", "=="]),
    ),
    min_size=1,
    max_size=4,
)
points = st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3).filter(lambda v: sum(v) > 0.01)


@settings(max_examples=300, deadline=None)
@given(linear_rows, points, st.floats(0, 0.1), st.floats(0, 0.1))
def test_expanded_check_matches_direct(rows, x, e_in, e_eq):
    cs = ConstraintSet(3, tuple(LinearConstraint(tuple(a), b, r) for a, b, r in rows), eps_ineq=e_in, eps_eq=e_eq)
    x = np.array(x) / sum(x)
    direct = True
    for a, b, r in rows:
        v = float(np.dot(a, x))
        if r == "<=":
            direct &= v <= b + e_in
        elif r == ">=":
            direct &= -v <= -b + e_in
        else:
            direct &= v <= b + e_eq and -v <= -b + e_eq
    assert cons.check(cs, x).satisfied == direct
    assert bool(cons.linear_ok(cs, x[None, :])[0]) == direct


@settings(max_examples=200, deadline=None)
@given(linear_rows, points, st.floats(0, 0.05), st.floats(0, 0.05))
def test_feasible_set_grows_with_eps(rows, x, e1, extra):
    cs = ConstraintSet(3, tuple(LinearConstraint(tuple(a), b, r) for a, b, r in rows), eps_ineq=e1, eps_eq=e1)
    x = np.array(x) / sum(x)
    if cons.check(cs, x).satisfied:
        assert cons.check(cs.with_eps(e1 + extra, e1 + extra), x).satisfied
