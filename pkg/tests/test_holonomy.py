import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpd.errors import NotComposable, OutOfOverlap, RelationViolation, SourceMismatch
from gpd.groupoid_core import FiniteGroupoid, GroupoidMorphism
from gpd.holonomy import (
    chart_map,
    chart_transition,
    generates,
    germ,
    germ_equal,
    hol_class,
    hol_equal,
    identity_germ,
    in_j0,
    in_jcw,
    is_extendible,
    kernel_at,
    left_translate,
    lift_morphism,
    loop_words,
    normality_audit,
    obstruction_integer,
)
from gpd.models import ChartPoint, EdgePoint, build_mobius, build_pradines_1, build_pradines_2, mutation
from gpd.pl_base import OpenSet1D, PLFunction
from gpd.sampling import random_word
from gpd.sections import bundle_section, constant_section, edge_section, section_inverse
from oracles import mobius_loop_sign

Q = Fraction
A0 = ChartPoint("A", Q(0))


# kernels ------------------------------------------------------------------


def test_pradines_1_kernel_at_zero_is_z():
    kd = kernel_at(build_pradines_1(), 0)
    assert kd.kind == "Z" and kd.order is None
    assert len(kd.generator.germ.word) == 8
    assert {e.cache(0) for e in kd.generator.germ.word.entries} == {Q(1, 8)}
    assert kd.certificate["obstruction"] == 1


@pytest.mark.parametrize("x", [Q(-2), Q(-1, 2), Q(1, 3), Q(5)])
def test_pradines_1_kernel_trivial_elsewhere(x):
    assert kernel_at(build_pradines_1(), x).trivial


@pytest.mark.parametrize("r, kind", [(0, "trivial"), (1, "Z")])
def test_pradines_2_kernel_depends_on_smoothness(r, kind):
    assert kernel_at(build_pradines_2(smoothness=r), 0).kind == kind
    assert kernel_at(build_pradines_2(smoothness=r), Q(1, 2)).trivial


def test_mobius_kernel_is_z2():
    kd = kernel_at(build_mobius(), A0)
    assert kd.kind == "Z/2" and kd.order == 2
    gen = kd.generator
    assert not in_j0(gen.germ)
    assert in_j0(gen.power(2).germ)
    assert kernel_at(build_mobius(), ChartPoint("A", Q(1, 2))).trivial


def test_mobius_kernel_against_sign_oracle():
    mo = build_mobius()
    ident = hol_class(edge_section(mo, "1A"), A0)
    classes = set()
    for w in loop_words(mo, A0, 4):
        word = edge_section(mo, w[0])
        for e in w[1:]:
            word = word * edge_section(mo, e)
        s = mobius_loop_sign(w)
        assert hol_equal(hol_class(word, A0), ident) == (s == 1), w
        classes.add(s)
    assert classes == {1, -1}


@given(st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=49, deadline=None)
def test_obstruction_integer_is_an_isomorphism(j, k):
    gen = kernel_at(build_pradines_1(), 0).generator
    a, b = gen.power(j), gen.power(k)
    assert obstruction_integer(a) == j
    assert hol_equal(a, b) == (j == k)
    if j and k and j + k:
        assert hol_equal(a * b, gen.power(j + k))


def test_generator_word_does_not_depend_on_factorisation():
    m = build_pradines_1()
    quarter_steps = constant_section(m, Q(1, 5)).power(5)
    eight = kernel_at(m, 0).generator
    assert hol_equal(hol_class(quarter_steps, 0), eight)


# germs ------------------------------------------------------------------


def test_germ_equality_is_local():
    m = build_pradines_1()
    a = bundle_section(m, PLFunction.from_pieces([("-inf", 1, 0, 0), (1, "inf", 1, -1)]))
    b = constant_section(m, 0)
    assert germ_equal(germ(a, 0), germ(b, 0))
    assert not germ_equal(germ(a, 1), germ(b, 1))


def test_germ_equality_mod_lattice():
    m = build_pradines_1()
    assert germ_equal(germ(constant_section(m, 1), 1), germ(constant_section(m, 0), 1))
    assert not germ_equal(germ(constant_section(m, 1), 0), germ(constant_section(m, 0), 0))


def test_germ_composition_requires_matching_points():
    mo = build_mobius()
    g = germ(edge_section(mo, "t1"), ChartPoint("A", Q(1, 2)))
    with pytest.raises(NotComposable):
        g * g
    back = g * germ(edge_section(mo, "t1~"), ChartPoint("B", Q(-1, 2)))
    assert back == identity_germ(mo, ChartPoint("A", Q(1, 2)))


def test_germ_outside_domain():
    m = build_pradines_1()
    with pytest.raises(OutOfOverlap):
        germ(constant_section(m, 0, OpenSet1D.interval(0, 1)), 2)


def test_j0_and_jcw_membership():
    m = build_pradines_1()
    nine = constant_section(m, Q(1, 8)).power(9)
    assert not in_jcw(germ(nine, 0))
    assert in_jcw(germ(nine, Q(1, 2)))
    assert not in_j0(germ(nine, Q(1, 2)))
    assert in_j0(germ(constant_section(m, 1), 1))


def test_hol_equal_needs_common_source():
    m = build_pradines_1()
    with pytest.raises(SourceMismatch):
        hol_equal(hol_class(constant_section(m, 0), 0), hol_class(constant_section(m, 0), 1))


# criteria -----------------------------------------------------------------


def test_extendibility_verdicts():
    no = is_extendible(build_pradines_1())
    assert not no and no.witness["germ"]["point"] == "0"
    assert is_extendible(build_pradines_2(smoothness=0))
    kink = is_extendible(build_pradines_2(smoothness=1))
    assert not kink and kink.witness["reason"]["no_representative"] == "slope"
    mob = is_extendible(build_mobius())
    assert not mob and mob.witness["loop"] == ["t0", "t1~"]


def test_generation():
    assert generates(build_pradines_1())
    assert generates(build_mobius())
    model, _ = mutation("non-generating")
    assert not generates(model)


@pytest.mark.parametrize("build", [build_pradines_1, build_pradines_2, build_mobius])
def test_normality_audit_small(build):
    out = normality_audit(build(), samples=30, seed=11)
    assert out["failures"] == 0, out["failed"][:3]


# transitions --------------------------------------------------------------


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_bundle_transition_is_left_translation(seed):
    m = build_pradines_1()
    rng = random.Random(seed)
    f, g = random_word(m, rng, 2), random_word(m, rng, 2)
    x = Q(rng.randint(-30, 30), 16)
    w = m.arrow(x, Q(rng.randint(-3, 3), 16))
    try:
        got = chart_transition(f, g, w)
    except OutOfOverlap:
        return
    h = section_inverse(f) * g
    assert got == m.compose(m.arrow(x, h.cache(x)), w)
    assert got == left_translate(h, w)


def test_mobius_transition_flips_edge():
    mo = build_mobius()
    f, g = edge_section(mo, "t1~"), edge_section(mo, "t0~")
    got = chart_transition(f, g, EdgePoint("t0", Q(1, 4)))
    # f^-1 g is y -> -y on A, so the translate starts at A:-1/4 and still ends at B:1/4
    assert got == EdgePoint("t1", Q(-1, 4))
    assert mo.w_arrow(got) == (ChartPoint("A", Q(-1, 4)), ChartPoint("B", Q(1, 4)))


def test_chart_map_is_independent_of_section_choice():
    m = build_pradines_1()
    f = constant_section(m, Q(1, 16))
    w = m.arrow(Q(1, 2), Q(1, 8))
    assert hol_equal(chart_map(f, w, 0), chart_map(f, w, 1))


# lifting ------------------------------------------------------------------


def lift_setup(order_a):
    A, G, H = (FiniteGroupoid.cyclic_group(k) for k in (order_a, 5, 10))
    xi = GroupoidMorphism(A, G, {"*": "*"}, {g: str(int(g) % 5) for g in A.arrows})
    phi = GroupoidMorphism(H, G, {"*": "*"}, {g: str(int(g) % 5) for g in H.arrows})
    i_map = {"0": "0", "1": "1", "4": "9"}
    return A, xi, ["0", "1", str(order_a - 1)], H, phi, i_map


def brute_force_lifts(A, xi, gens, H, phi, i_map):
    """Every homomorphism Z/a -> Z/10 (fixed by the image of 1) that covers
    xi and agrees with i on the generators."""
    out = []
    for h in range(10):
        f = GroupoidMorphism(A, H, {"*": "*"}, {g: str(int(g) * h % 10) for g in A.arrows})
        if f.is_morphism() and all(phi(f(g)) == xi(g) for g in A.arrows) and all(f(a) == i_map[xi(a)] for a in gens):
            out.append(f.arrow_map)
    return out


def test_lift_matches_brute_force():
    setup = lift_setup(20)
    lifted = lift_morphism(*setup)
    assert brute_force_lifts(*setup) == [lifted.arrow_map]
    assert lifted("7") == "7" and lifted("19") == "9"


def test_lift_fails_when_none_exists():
    setup = lift_setup(15)
    assert brute_force_lifts(*setup) == []
    with pytest.raises(RelationViolation) as info:
        lift_morphism(*setup)
    assert info.value.witness is not None
