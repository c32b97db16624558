"""Germs of section words, the final map, J_0, holonomy classes and kernels.

A :class:`GermClass` is a section word together with a base point; equality
is equality of the G-valued germs.  ``J_0`` consists of germs sending the
base point to an identity and admitting a W-valued representative of the
right smoothness; holonomy classes are germs modulo ``J_0``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    DepthExceeded,
    EmptyDomain,
    NotComposable,
    OutOfOverlap,
    RelationViolation,
    SourceMismatch,
)
from .groupoid_core import FiniteGroupoid, GroupoidMorphism
from .models import (
    ChartPoint,
    EdgePoint,
    check_axioms,
    generation_factors,
    w_representative,
)
from .pl_base import OpenSet1D, PLFunction, format_rational, germ_at, positive_set
from .sections import (
    SectionWord,
    as_point,
    bundle_section,
    constant_section,
    edge_section,
    ehresmann_product,
    identity_section,
    local_section_through,
    section_inverse,
)


def _is_bundle(model) -> bool:
    return model.family == "quotient_bundle"


# --------------------------------------------------------------------------
# germs


@dataclass(frozen=True)
class GermClass:
    word: SectionWord
    point: object

    def __post_init__(self):
        p = as_point(self.word.model, self.point)
        object.__setattr__(self, "point", p)
        if not self.word.defined_at(p):
            raise OutOfOverlap(f"{p} is outside the domain of the word")

    @property
    def model(self):
        return self.word.model

    @property
    def target(self):
        return self.word.target(self.point)

    def datum(self):
        """Germ of the cached product at the base point."""
        cache = self.word.cache
        if _is_bundle(self.model):
            return germ_at(cache, self.point)
        return (cache.tgt, germ_at(cache.fn, self.point.y))

    def __mul__(self, other: "GermClass") -> "GermClass":
        return germ_compose(self, other)

    def inverse(self) -> "GermClass":
        return germ_inverse(self)

    def __eq__(self, other):
        return isinstance(other, GermClass) and germ_equal(self, other)

    def __hash__(self):
        return hash(str(self.point))

    def to_json(self) -> dict:
        return {
            "point": _point_json(self.point),
            "word": self.word.to_json(),
            "value": final_map(self).to_json(),
        }


def _point_json(p):
    return p.to_json() if isinstance(p, ChartPoint) else format_rational(p)


def germ(word: SectionWord, point) -> GermClass:
    return GermClass(word, point)


def identity_germ(model, point) -> GermClass:
    p = as_point(model, point)
    word = identity_section(model) if _is_bundle(model) else identity_section(model, p.chart)
    return GermClass(word, p)


def germ_compose(a: GermClass, b: GermClass) -> GermClass:
    """``[s]_x [t]_y = [s t]_x``, defined iff ``y = beta s (x)``."""
    if b.point != a.target:
        raise NotComposable(f"germ at {b.point} cannot follow a germ ending at {a.target}")
    return GermClass(ehresmann_product(a.word, b.word), a.point)


def germ_inverse(a: GermClass) -> GermClass:
    return GermClass(section_inverse(a.word), a.target)


def final_map(a: GermClass):
    """``psi([s]_x) = s(x)``."""
    return a.word(a.point)


def _bundle_shift_equal(m, d, x0) -> bool:
    """Is the germ ``d`` at ``x0`` a section of integer multiples of ``n``?"""
    ng = germ_at(m.profile, x0)
    for side in ("left", "right"):
        dS, nS = getattr(d, side), getattr(ng, side)
        if nS.is_zero():
            if not dS.is_zero():
                return False
            continue
        if dS.slope * nS.intercept != dS.intercept * nS.slope:
            return False
        k = dS.slope / nS.slope if nS.slope != 0 else dS.intercept / nS.intercept
        if k.denominator != 1:
            return False
    n0 = ng.value
    if n0 == 0:
        return d.value == 0
    return (d.value / n0).denominator == 1


def germ_equal(a: GermClass, b: GermClass) -> bool:
    """Equality of the G-valued germs of the two products."""
    if a.point != b.point:
        return False
    if _is_bundle(a.model):
        return _bundle_shift_equal(a.model, a.datum() - b.datum(), a.point)
    return a.datum() == b.datum()


# --------------------------------------------------------------------------
# J_0 and holonomy classes


@dataclass(frozen=True)
class Membership:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        w = self.witness
        return {"member": self.ok, "witness": w.to_json() if hasattr(w, "to_json") else w}


def _w_valued(a: GermClass):
    """W-valued representative of the germ of ``a`` (of the model's
    smoothness class), or a reason why none exists."""
    if _is_bundle(a.model):
        return w_representative(a.model, a.word.cache, a.point)
    cache = a.word.cache
    g = germ_at(cache.fn, a.point.y)
    for e in a.model.edges:
        if e.src == cache.src and e.tgt == cache.tgt and e.map.defined_at(a.point.y):
            if germ_at(e.map, a.point.y) == g:
                return e.id
    return None


def in_jcw(a: GermClass) -> Membership:
    """Is the germ of ``a`` the germ of a single local procedure?"""
    rep = _w_valued(a)
    return Membership(bool(rep), rep if rep else (rep or "no edge has this germ"))


def in_j0(a: GermClass) -> Membership:
    value = final_map(a)
    if not a.model.is_identity(value):
        return Membership(False, {"psi": value.to_json(), "reason": "final value is not an identity"})
    rep = _w_valued(a)
    if rep:
        return Membership(True, rep)
    if rep is None:
        rep = "no edge has this germ"
    return Membership(False, rep)


@dataclass(frozen=True)
class HolClass:
    germ: GermClass

    @property
    def point(self):
        return self.germ.point

    @property
    def target(self):
        return self.germ.target

    @property
    def value(self):
        return final_map(self.germ)

    def __mul__(self, other: "HolClass") -> "HolClass":
        return HolClass(germ_compose(self.germ, other.germ))

    def inverse(self) -> "HolClass":
        return HolClass(germ_inverse(self.germ))

    def power(self, k: int) -> "HolClass":
        if k == 0:
            return HolClass(identity_germ(self.germ.model, self.point))
        return HolClass(GermClass(self.germ.word.power(k), self.point))

    def to_json(self):
        return self.germ.to_json()


def hol_class(word: SectionWord, point) -> HolClass:
    return HolClass(GermClass(word, point))


def hol_equal(a: HolClass, b: HolClass) -> bool:
    if a.point != b.point:
        raise SourceMismatch(f"classes based at {a.point} and {b.point}")
    if a.target != b.target:
        return False
    return bool(in_j0(germ_compose(a.germ, germ_inverse(b.germ))))


# --------------------------------------------------------------------------
# the bundle obstruction integer


def obstruction_integer(a: HolClass):
    """For a kernel element of the bundle family: ``U(x0)/n(x0)`` where ``U``
    is the sum of the W-representatives of the factors.  ``None`` if some
    factor has no representative at the base point."""
    m = a.germ.model
    x0 = a.point
    total = Fraction(0)
    for e in a.germ.word.entries:
        rep = w_representative(m, e.cache, x0)
        if not rep:
            return None
        total += rep.germ.value
    n0 = m.n(x0)
    if n0 == 0:
        return 0 if total == 0 else None
    q = total / n0
    return int(q) if q.denominator == 1 else None


def _bundle_kernel_order(m, x0):
    """``(kind, order, reason)``: the kernel is Z/order (order 1 = trivial) or
    Z (order None)."""
    ng = germ_at(m.profile, x0)
    n0 = ng.value
    if n0 == 0:
        return "trivial", 1, "modulus vanishes at the point"
    if ng.left.is_zero() or ng.right.is_zero():
        side = "left" if ng.left.is_zero() else "right"
        return "Z", None, f"modulus vanishes identically on the {side}; the branch u = t is forced there"
    nl, nr = ng.left(x0), ng.right(x0)
    if m.smoothness == 1 and ng.left.slope * nr != ng.right.slope * nl:
        return "Z", None, "one-sided logarithmic derivatives of the modulus differ"
    order = math.lcm((n0 / nl).denominator, (n0 / nr).denominator)
    kind = "trivial" if order == 1 else f"Z/{order}"
    return kind, order, "shifts must match the one-sided moduli"


def _bundle_generator(m, x0, total) -> HolClass:
    lo, hi = m.window(x0)
    radius = min(hi, -lo)
    count = 1
    while abs(total) / count > radius / 2:
        count += 1
    step = total / count
    f = PLFunction.constant(step)
    inside = positive_set(m.upper - f).intersect(positive_set(f - m.lower))
    comp = inside.component(x0)
    word = constant_section(m, step, OpenSet1D([comp]))
    return HolClass(GermClass(word.power(count), x0))


@dataclass(frozen=True)
class KernelDescriptor:
    point: object
    kind: str
    generator: Optional[HolClass]
    order: Optional[int] = None
    certificate: dict = field(default_factory=dict)
    elements: tuple = ()

    @property
    def trivial(self) -> bool:
        return self.kind == "trivial"

    def to_json(self) -> dict:
        return {
            "point": _point_json(self.point),
            "kind": self.kind,
            "order": self.order,
            "generator": None if self.generator is None else self.generator.to_json(),
            "certificate": self.certificate,
        }


def kernel_at(model, x0, depth: int = 4) -> KernelDescriptor:
    """Kernel of ``Hol(G,W) -> G`` at ``x0``."""
    x0 = as_point(model, x0)
    if _is_bundle(model):
        return _bundle_kernel(model, x0)
    return _chart_kernel(model, x0, depth)


def _bundle_kernel(m, x0) -> KernelDescriptor:
    kind, order, reason = _bundle_kernel_order(m, x0)
    cert = {"reason": reason, "smoothness": m.smoothness}
    if order == 1:
        return KernelDescriptor(x0, "trivial", None, 1, cert)
    gen = _bundle_generator(m, x0, m.n(x0))
    ident = gen.power(0)
    checks = []
    bound = order if order is not None else 3
    for j in range(1, bound + 1):
        eq = hol_equal(gen.power(j), ident)
        checks.append({"power": j, "identity": eq})
        expected = order is not None and j == order
        if eq != expected:
            raise AssertionError(f"kernel relation check failed at power {j}")
    cert["relations"] = checks
    cert["generator_factors"] = len(gen.germ.word)
    cert["obstruction"] = obstruction_integer(gen)
    cert["in_j0"] = in_j0(gen.germ).to_json()
    return KernelDescriptor(x0, kind, gen, order, cert)


def loop_words(model, p: ChartPoint, depth: int):
    """Edge sequences of length 1..depth leading from ``p`` back to ``p``."""
    out = []

    def walk(q, path):
        if path and q == p:
            out.append(tuple(path))
        if len(path) == depth:
            return
        for e in model.edges_from(q.chart):
            if e.map.defined_at(q.y):
                walk(ChartPoint(e.tgt, e.map(q.y)), path + [e.id])

    walk(p, [])
    return sorted(out, key=lambda w: (len(w), w))


def _word_from_edges(model, edges) -> SectionWord:
    out = edge_section(model, edges[0])
    for eid in edges[1:]:
        out = ehresmann_product(out, edge_section(model, eid))
    return out


def _classify(reps, h):
    for i, r in enumerate(reps):
        if hol_equal(h, r):
            return i
    return None


def _chart_kernel(model, p: ChartPoint, depth: int) -> KernelDescriptor:
    ident = HolClass(identity_germ(model, p))
    reps, words = [ident], [()]
    for path in loop_words(model, p, depth):
        h = hol_class(_word_from_edges(model, path), p)
        if _classify(reps, h) is None:
            reps.append(h)
            words.append(path)
    for i, j in itertools.product(range(len(reps)), repeat=2):
        if _classify(reps, reps[i] * reps[j]) is None:
            raise DepthExceeded(f"product of {words[i]} and {words[j]} is new; raise the loop depth")
    for i, r in enumerate(reps):
        if _classify(reps, r.inverse()) is None:
            raise DepthExceeded(f"inverse of {words[i]} is new; raise the loop depth")
    size = len(reps)
    cert = {"loop_depth": depth, "classes": [list(w) for w in words]}
    if size == 1:
        return KernelDescriptor(p, "trivial", None, 1, cert, tuple(reps))
    for i in range(1, size):
        k, acc = 1, reps[i]
        while not hol_equal(acc, ident):
            acc = acc * reps[i]
            k += 1
        if k == size:
            cert["generator_word"] = list(words[i])
            cert["relations"] = [{"power": size, "identity": True}]
            return KernelDescriptor(p, f"Z/{size}", reps[i], size, cert, tuple(reps))
    return KernelDescriptor(p, "finite-listed", reps[1], size, cert, tuple(reps))


# --------------------------------------------------------------------------
# charts and transitions


def underlying_arrow(model, w):
    """The G-arrow of a W-element (an EdgePoint for chart complexes)."""
    if _is_bundle(model) or not isinstance(w, EdgePoint):
        return w
    return model.w_arrow(w)


def chart_map(f: SectionWord, w, variant: int = 0) -> HolClass:
    """``chi_f(w) = <f>_x <s_w>_x`` where ``beta f (x) = alpha w``."""
    model = f.model
    alpha = model.src(underlying_arrow(model, w))
    x = _preimage(f, alpha)
    s_w = local_section_through(model, w, variant)
    return HolClass(germ_compose(GermClass(f, x), GermClass(s_w, alpha)))


def _preimage(f: SectionWord, y):
    """``(beta f)^{-1}(y)``."""
    model = f.model
    if _is_bundle(model):
        if not f.defined_at(y):
            raise OutOfOverlap(f"{format_rational(y)} is not in the domain of the section")
        return y
    inv = f.cache.inverse()
    if not inv.defined_at(y):
        raise OutOfOverlap(f"{y} is not in the image of the section")
    return inv(y)


def chart_transition(f: SectionWord, g: SectionWord, w):
    """``chi_f^{-1} chi_g (w)``.

    The result is read off from holonomy classes and cross-checked against
    left translation by the section ``f^{-1} g``; the two must agree exactly.
    """
    model = f.model
    h = chart_map(g, w)
    k = germ_compose(germ_inverse(GermClass(f, h.point)), h.germ)
    if _is_bundle(model):
        result = final_map(k)
        if not model.in_w(result):
            raise OutOfOverlap(f"{result} lies outside W")
    else:
        edge = _w_valued(k)
        if edge is None:
            raise OutOfOverlap(f"the germ at {k.point} is not the germ of an edge")
        result = EdgePoint(edge, k.point.y)
    if not hol_equal(chart_map(f, result), h):
        raise AssertionError("chart transition is inconsistent with the holonomy classes")
    direct = left_translate(ehresmann_product(section_inverse(f), g), w)
    if direct != underlying_arrow(model, result):
        raise AssertionError(f"transition routes disagree: {direct} vs {result}")
    return result


def left_translate(h: SectionWord, w):
    """``L_h(w) = h(y) w`` with ``beta h (y) = alpha w``."""
    model = h.model
    arrow = underlying_arrow(model, w)
    y = _preimage(h, model.src(arrow))
    return model.compose(h(y), arrow)


# --------------------------------------------------------------------------
# criteria


@dataclass(frozen=True)
class CriterionResult:
    ok: bool
    witness: object = None
    certificate: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_json(self):
        w = self.witness
        return {
            "verdict": self.ok,
            "witness": w.to_json() if hasattr(w, "to_json") else w,
            "certificate": self.certificate,
        }


def generates(model, bound: int = 8) -> CriterionResult:
    """Does W generate G?"""
    if _is_bundle(model):
        factors = generation_factors(model, Fraction(-1), Fraction(1))
        cert = {
            "rule": "q(x,t) = q(x, t/m)^m with m = floor(|t|/r) + 1, r the window radius",
            "sample": {"x": "-1", "t": "1", "factors": [format_rational(v.t) for v in factors]},
        }
        verdict = check_axioms(model).verdicts["G5"]
        return CriterionResult(verdict.ok, verdict.witness, cert)
    verdict = check_axioms(model, depth=bound).verdicts["G5"]
    return CriterionResult(verdict.ok, verdict.witness, {"orbit_depth": bound, "note": verdict.note})


def is_extendible(model, depth: int = 4) -> CriterionResult:
    """Is Ker psi contained in J^c(W)?  Equivalently: is the holonomy kernel
    trivial at every point?"""
    if _is_bundle(model):
        checked = []
        for b in model.profile.breakpoints():
            kd = _bundle_kernel(model, b)
            checked.append({"point": format_rational(b), "kernel": kd.kind})
            if not kd.trivial:
                reason = in_j0(kd.generator.germ).witness
                return CriterionResult(
                    False,
                    {"germ": kd.generator.to_json(), "reason": reason.to_json() if hasattr(reason, "to_json") else reason},
                    {"checked": checked, "kernel": kd.kind},
                )
        return CriterionResult(True, None, {"checked": checked, "note": "kernel is trivial off the breakpoints of n"})
    return _chart_extendible(model, depth)


def _fixed_points(fn: PLFunction):
    pts = []
    for p in fn.pieces:
        a = p.f
        if a.slope == 1 and a.intercept == 0:
            pts.append(_inner(p.lo, p.hi))
        elif a.slope != 1:
            y = a.intercept / (1 - a.slope)
            if p.lo < y < p.hi:
                pts.append(y)
    for b, v in fn.points:
        if v == b:
            pts.append(b)
    return sorted(set(pts))


def _inner(lo, hi):
    if lo == -math.inf and hi == math.inf:
        return Fraction(0)
    if lo == -math.inf:
        return Fraction(hi) - 1
    if hi == math.inf:
        return Fraction(lo) + 1
    return (Fraction(lo) + Fraction(hi)) / 2


def _chart_loops(model, depth):
    """Chart-level edge loops in order of length, skipping empty composites."""
    frontier = [(c.id, c.id, ()) for c in model.charts]
    for _ in range(depth):
        nxt = []
        for start, chart, path in frontier:
            for e in model.edges_from(chart):
                p = path + (e.id,)
                try:
                    word = _word_from_edges(model, p)
                except EmptyDomain:
                    continue
                if e.tgt == start:
                    yield start, p, word
                nxt.append((start, e.tgt, p))
        frontier = nxt


def _chart_extendible(model, depth) -> CriterionResult:
    checked = 0
    for start, path, word in _chart_loops(model, depth):
        for y in _fixed_points(word.cache.fn):
            checked += 1
            g = GermClass(word, ChartPoint(start, y))
            if not in_j0(g):
                return CriterionResult(False, {"germ": g.to_json(), "loop": list(path)}, {"loop_depth": depth})
    return CriterionResult(True, None, {"loop_depth": depth, "fixed_points_checked": checked})


# --------------------------------------------------------------------------
# normality of J_0


def _random_rational(rng, lo, hi, denom=16):
    a = math.ceil(lo * denom) + 1
    b = math.floor(hi * denom) - 1
    return Fraction(rng.randint(a, b), denom)


def _random_bundle_j0(m, x0, rng) -> GermClass:
    """Random word in J_0 at x0: a small local procedure with value 0 at x0,
    optionally multiplied by a generator-power that dies in the kernel."""
    lo, hi = m.window(x0)
    radius = min(hi, -lo)
    slope = Fraction(rng.randint(-4, 4), 8)
    half = radius / (2 * (abs(slope) + 1))
    dom = OpenSet1D.interval(x0 - half, x0 + half)
    f = PLFunction.affine(slope, -slope * x0, dom)
    word = bundle_section(m, f)
    if rng.random() < 0.5:
        word = ehresmann_product(word, section_inverse(word))
    n0 = m.n(x0)
    if n0 > 0 and rng.random() < 0.5:
        loop = _bundle_generator(m, x0, n0).germ
        if in_j0(loop):
            word = ehresmann_product(word, loop.word)
    return GermClass(word, x0)


def _random_bundle_w(m, x0, rng) -> GermClass:
    lo, hi = m.window(x0)
    radius = min(hi, -lo)
    c = _random_rational(rng, -radius, radius)
    word = constant_section(m, c)
    for _ in range(rng.randint(0, 3)):
        word = ehresmann_product(word, constant_section(m, _random_rational(rng, -radius, radius)))
    return GermClass(word, x0)


def _chart_sample(model, rng, depth):
    """``(rho1, rho2, tau, sigma)`` with rho's in J_0 at a random point p, tau a
    W-germ at p and sigma in J_0 at the target of tau."""
    c = rng.choice(model.charts)
    p = ChartPoint(c.id, _random_rational(rng, max(c.lo, -4), min(c.hi, 4)))
    taus = [GermClass(edge_section(model, e.id), p) for e in model.edges_from(p.chart) if e.map.defined_at(p.y)]
    tau = rng.choice(taus)
    return _chart_j0(model, p, rng, depth), _chart_j0(model, p, rng, depth), tau, _chart_j0(model, tau.target, rng, depth)


def _chart_j0(model, p, rng, depth):
    found = [GermClass(_word_from_edges(model, w), p) for w in loop_words(model, p, depth)]
    found = [g for g in found if in_j0(g)]
    return rng.choice(found) if found else identity_germ(model, p)


def normality_audit(model, samples: int = 200, seed: int = 0) -> dict:
    """Random checks that ``rho sigma^-1`` and ``tau sigma tau^-1`` stay in J_0."""
    rng = random.Random(seed)
    failures = []
    for i in range(samples):
        if _is_bundle(model):
            x0 = Fraction(rng.randint(-16, 16), 8)
            rho, sigma = _random_bundle_j0(model, x0, rng), _random_bundle_j0(model, x0, rng)
            tau = _random_bundle_w(model, x0, rng)
            conj_sigma = sigma
        else:
            rho, sigma, tau, conj_sigma = _chart_sample(model, rng, 4)
        if not in_j0(germ_compose(rho, germ_inverse(sigma))):
            failures.append({"sample": i, "check": "rho sigma^-1", "point": _point_json(rho.point)})
        conj = germ_compose(germ_compose(tau, conj_sigma), germ_inverse(tau))
        if not in_j0(conj):
            failures.append({"sample": i, "check": "tau sigma tau^-1", "point": _point_json(tau.point)})
    return {"samples": samples, "seed": seed, "failures": len(failures), "failed": failures}


# --------------------------------------------------------------------------
# lifting morphisms (finite instances)


def lift_morphism(A: FiniteGroupoid, xi: GroupoidMorphism, generators, H: FiniteGroupoid, phi: GroupoidMorphism, i_map: dict) -> GroupoidMorphism:
    """The unique ``xi'`` with ``phi xi' = xi`` and ``xi' a = i(xi a)`` on the
    generators ``a`` (the preimage of W under ``xi``).

    ``i_map`` sends W (arrows of the target of ``xi``) into ``H``.
    """
    gens = [a for a in generators if not A.is_identity(a)]
    if not gens and len(A.arrows) > len(A.objects):
        raise RelationViolation("no generators supplied", witness=None)
    obj = {x: xi.object_map[x] for x in A.objects}
    image = {A.identity(x): H.identity(obj[x]) for x in A.objects}
    for a in gens:
        val = i_map[xi(a)]
        for arrow, v in ((a, val), (A.inverse(a), H.inverse(val))):
            if arrow in image and image[arrow] != v:
                raise RelationViolation(f"{arrow} is assigned twice", witness={"arrow": arrow, "values": [image[arrow], v]})
            image[arrow] = v
    frontier = list(image)
    while frontier:
        nxt = []
        for g in frontier:
            for a in gens + [A.inverse(a) for a in gens]:
                if not A.composable(g, a):
                    continue
                ga = A.compose(g, a)
                v = H.compose(image[g], image[a])
                if ga in image:
                    if image[ga] != v:
                        raise RelationViolation(
                            f"{ga} receives two images",
                            witness={"arrow": ga, "values": [image[ga], v], "via": [g, a]},
                        )
                else:
                    image[ga] = v
                    nxt.append(ga)
        frontier = nxt
    missing = [g for g in A.arrows if g not in image]
    if missing:
        raise RelationViolation("generators do not generate A", witness={"unreached": missing[:5]})
    lifted = GroupoidMorphism(A, H, obj, image)
    bad = lifted.violations()
    if bad:
        raise RelationViolation("assignment is not multiplicative", witness=bad[0])
    for g in A.arrows:
        if phi(image[g]) != xi(g):
            raise RelationViolation("lift does not cover xi", witness={"arrow": g})
    return lifted
