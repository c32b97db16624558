from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import node_graphs, small
from gpd.errors import EmptyIntersection, NotInDomain
from gpd.pl_base import (
    Affine,
    OpenSet1D,
    PLFunction,
    as_rational,
    format_rational,
    germ_at,
    is_cr_at,
    nonpositive_witness,
    pl_add,
    positive_set,
)


def probes(lo, hi, n=9):
    return [lo + (hi - lo) * Fraction(k, n + 1) for k in range(1, n + 1)]


@given(node_graphs())
def test_evaluation_matches_interpolation(g):
    f = g.build()
    for x in probes(g.lo, g.hi) + g.xs[1:-1]:
        assert f(x) == g.at(x)
    assert f.domain() == OpenSet1D.interval(g.lo, g.hi)
    assert f.is_continuous()


@given(node_graphs(), node_graphs())
def test_sum_is_pointwise(g, h):
    f1, f2 = g.build(), h.build()
    lo, hi = max(g.lo, h.lo), min(g.hi, h.hi)
    if lo >= hi:
        with pytest.raises(EmptyIntersection):
            pl_add(f1, f2)
        return
    s = pl_add(f1, f2)
    for x in probes(lo, hi):
        assert s(x) == g.at(x) + h.at(x)
    assert s.domain() == OpenSet1D.interval(lo, hi)


@given(node_graphs(), node_graphs())
@settings(max_examples=150)
def test_composition_is_pointwise(g, h):
    inner, outer = g.build(), h.build()
    comp = inner.then(outer)
    for x in probes(g.lo, g.hi, 15) + g.xs:
        y = g.at(x)
        expected = None if y is None else h.at(y)
        if expected is None:
            assert not comp.defined_at(x)
        else:
            assert comp(x) == expected


@given(node_graphs(injective=True))
def test_inverse_round_trip(g):
    f = g.build()
    inv = f.inverse()
    for x in probes(g.lo, g.hi):
        assert inv(f(x)) == x
    assert f.then(inv) == PLFunction.identity(f.domain())


@given(node_graphs())
def test_json_round_trip(g):
    f = g.build()
    assert PLFunction.from_json(f.to_json()) == f


@given(node_graphs(), small)
def test_restrict_agrees(g, c):
    f = g.build()
    r = f.restrict(OpenSet1D.interval(c, c + 1))
    for x in probes(c, c + 1):
        assert r.defined_at(x) == (g.at(x) is not None)
        if r.defined_at(x):
            assert r(x) == g.at(x)


@given(node_graphs())
def test_positive_set_and_witness(g):
    f = g.build()
    pos = positive_set(f)
    for x in probes(g.lo, g.hi, 20):
        assert (x in pos) == (g.at(x) > 0)
    w = nonpositive_witness(f)
    if w is not None:
        assert f(w) <= 0


def test_representation_is_canonical():
    a = PLFunction.from_pieces([(0, 1, 2, 0), (1, 3, 2, 0)])
    b = PLFunction.affine(2, 0, OpenSet1D.interval(0, 3))
    assert a == b and hash(a) == hash(b)


def test_jump_keeps_joint_value():
    f = PLFunction.from_pieces([(-1, 0, 0, 0), (0, 1, 0, 1)], points={0: 0})
    assert f(0) == 0
    assert f.discontinuities() == [0]
    with pytest.raises(ValueError):
        f.inverse()


def test_germs_and_smoothness():
    kink = PLFunction.from_pieces([("-inf", 0, 0, 0), (0, "inf", 1, 0)])
    g = germ_at(kink, 0)
    assert g.value == 0 and g.left == Affine(0, 0) and g.right == Affine(1, 0)
    assert is_cr_at(g, 0) and not is_cr_at(g, 1)
    assert is_cr_at(germ_at(kink, 1), 1)
    with pytest.raises(NotInDomain):
        germ_at(PLFunction.constant(1, OpenSet1D.interval(0, 1)), 5)


def test_open_set_operations():
    u = OpenSet1D([(0, 2), (1, 3), (5, 6)])
    assert u.intervals == ((0, 3), (5, 6))
    v = u.intersect(OpenSet1D.interval(2, Fraction(11, 2)))
    assert v.intervals == ((2, 3), (5, Fraction(11, 2)))
    assert OpenSet1D([(0, 1), (1, 2)]).join_at(1) == OpenSet1D.interval(0, 2)
    assert OpenSet1D.from_json(u.to_json()) == u


@given(st.fractions(max_denominator=50))
def test_rational_text_round_trip(q):
    assert as_rational(format_rational(q)) == q


def test_floats_are_rejected():
    with pytest.raises((TypeError, ValueError)):
        as_rational(0.5)
