import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpd.errors import InvalidModel
from gpd.models import (
    EXAMPLES,
    MUTATIONS,
    ChartPoint,
    EdgePoint,
    PairArrow,
    build_mobius,
    build_pradines_1,
    build_pradines_2,
    check_axioms,
    fingerprint,
    generation_factors,
    model_from_json,
    mutation,
    w_representative,
)
from gpd.pl_base import PLFunction

Q = Fraction
QUARTER = Q(1, 4)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=24)


def near_lattice(t, n):
    """Some t - k n lies strictly inside (-1/4, 1/4)."""
    if n == 0:
        return abs(t) < QUARTER
    k = round(t / n)
    return any(abs(t - j * n) < QUARTER for j in (k - 1, k, k + 1))


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_examples_pass_all_axioms(name):
    rep = check_axioms(EXAMPLES[name]())
    assert rep.ok, rep.to_json()
    assert set(rep.verdicts) == {"G1", "G2", "G3", "G4", "G5"}


@pytest.mark.parametrize("kind", MUTATIONS)
def test_each_mutation_breaks_one_axiom(kind):
    model, axiom = mutation(kind)
    rep = check_axioms(model)
    assert rep.failed() == [axiom]
    assert rep.verdicts[axiom].witness is not None


def test_wide_window_fails_openness():
    assert check_axioms(build_pradines_1(width=Q(1, 2))).failed() == ["G3"]


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_json_round_trip_preserves_fingerprint(name):
    m = EXAMPLES[name]()
    again = model_from_json(m.to_json())
    assert again == m
    assert fingerprint(again) == fingerprint(m)


def test_profile_must_not_be_negative():
    base = build_pradines_1()
    with pytest.raises(InvalidModel):
        type(base)(PLFunction.constant(-1), base.lower, base.upper)


def test_lattice_narrower_than_window_rejected():
    base = build_pradines_1()
    with pytest.raises(InvalidModel):
        type(base)(PLFunction.constant(Q(1, 3)), base.lower, base.upper)


@given(rationals, rationals)
def test_arrow_identification_in_pradines_1(x, t):
    m = build_pradines_1()
    a, b = m.arrow(x, t), m.arrow(x, t + 1)
    assert (a == b) == (x >= 0)
    assert m.compose(a, m.inverse(a)) == m.identity(x)


@given(rationals, rationals)
def test_constant_section_representative_pradines_1(x0, c):
    m = build_pradines_1()
    rep = w_representative(m, PLFunction.constant(c), x0)
    # near 0 the left side has fibre R, so only the unshifted value can work
    expected = abs(c) < QUARTER if x0 <= 0 else near_lattice(c, Q(1))
    assert bool(rep) == expected
    if rep:
        assert rep.germ.value == c - rep.k * m.n(x0)


@given(rationals, rationals, st.sampled_from([0, 1]))
def test_constant_section_representative_pradines_2(x0, c, r):
    m = build_pradines_2(smoothness=r)
    rep = w_representative(m, PLFunction.constant(c), x0)
    n0 = 1 + abs(x0)
    if x0 == 0 and r == 1:
        # any nonzero shift produces slopes -k and +k on the two sides
        expected = abs(c) < QUARTER
    else:
        expected = near_lattice(c, n0)
    assert bool(rep) == expected


def test_kink_is_reported_as_slope():
    m = build_pradines_2(smoothness=1)
    rep = w_representative(m, PLFunction.constant(1), 0)
    assert not rep and rep.reason == "slope"


@given(rationals, st.fractions(min_value=-6, max_value=6, max_denominator=16))
def test_generation_factors_multiply_back(x, t):
    m = build_pradines_1()
    factors = generation_factors(m, x, t)
    target = m.arrow(x, t)
    if m.is_identity(target):
        assert factors == []
        return
    assert all(m.in_w(f) for f in factors)
    prod = m.identity(x)
    for f in factors:
        prod = m.compose(prod, f)
    assert prod == target
    # one factor fewer cannot stay inside the open window
    u = abs(target.t if m.n(x) == 0 or target.t <= m.n(x) / 2 else target.t - m.n(x))
    assert len(factors) == math.floor(u / QUARTER) + 1


def test_mobius_w_points():
    m = build_mobius()
    shared = PairArrow(ChartPoint("A", Q(0)), ChartPoint("B", Q(0)))
    assert m.in_w(shared)
    with pytest.raises(InvalidModel):
        m.w_point(shared)
    w = m.w_point(PairArrow(ChartPoint("A", Q(1, 2)), ChartPoint("B", Q(-1, 2))))
    assert w == EdgePoint("t1", Q(1, 2))
    assert m.w_arrow(w).tgt == ChartPoint("B", Q(-1, 2))
    assert m.w_point(PairArrow(ChartPoint("A", Q(1, 2)), ChartPoint("B", Q(1, 3)))) is None


def test_mobius_orbit_of_core_point():
    m = build_mobius()
    orbit = m.orbit(ChartPoint("A", Q(1, 2)), 4)
    assert set(orbit) == {ChartPoint(c, s * Q(1, 2)) for c in "AB" for s in (1, -1)}
