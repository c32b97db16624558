"""Admissible local sections, their Ehresmann products and inverses.

A section of the bundle family is ``x -> q(x, f(x))`` for a PL function
``f``; its target map is the identity.  A section of the chart family is an
edge map restricted to an open set, i.e. a :class:`ChartMap`; since ``G`` is
an equivalence relation the section is determined by its target map.

Words keep every factor.  The cached product is what pointwise questions
are answered from, the factor list is the certificate that the product lies
in the inverse monoid generated by local procedures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import EmptyDomain, NoSectionThroughW, NotInDomain
from .models import (
    ChartComplex,
    ChartPoint,
    PairArrow,
    QuotientBundleModel,
    section_local_procedure_check,
)
from .pl_base import (
    INF,
    NEG_INF,
    OpenSet1D,
    PLFunction,
    as_rational,
    germ_at,
    positive_set,
)


@dataclass(frozen=True)
class ChartMap:
    """PL partial map from the transversal of ``src`` to that of ``tgt``."""

    src: str
    tgt: str
    fn: PLFunction

    def then(self, other: "ChartMap") -> "ChartMap":
        if self.tgt != other.src:
            return ChartMap(self.src, other.tgt, PLFunction([]))
        return ChartMap(self.src, other.tgt, self.fn.then(other.fn))

    def inverse(self) -> "ChartMap":
        return ChartMap(self.tgt, self.src, self.fn.inverse())

    def restrict(self, dom: OpenSet1D) -> "ChartMap":
        return ChartMap(self.src, self.tgt, self.fn.restrict(dom))

    def domain(self) -> OpenSet1D:
        return self.fn.domain()

    def defined_at(self, p: ChartPoint) -> bool:
        return p.chart == self.src and self.fn.defined_at(p.y)

    def __call__(self, p: ChartPoint) -> ChartPoint:
        if p.chart != self.src:
            raise NotInDomain(f"{p} is not in chart {self.src}")
        return ChartPoint(self.tgt, self.fn(p.y))


# --------------------------------------------------------------------------
# family dispatch on caches


def _is_bundle(model) -> bool:
    return model.family == "quotient_bundle"


def cache_product(model, a, b):
    if _is_bundle(model):
        return a + b
    return a.then(b)


def cache_inverse(model, a):
    if _is_bundle(model):
        return -a
    return a.inverse()


def cache_is_empty(model, a) -> bool:
    return a.is_empty() if _is_bundle(model) else a.fn.is_empty()


def cache_defined_at(model, a, x) -> bool:
    return a.defined_at(x)


def cache_target(model, a, x):
    """``beta sigma (x)``."""
    if not cache_defined_at(model, a, x):
        raise NotInDomain(f"{x} not in the section domain")
    if _is_bundle(model):
        return x
    return a(x)


def cache_value(model, a, x):
    """``sigma(x)`` as an arrow of ``G``."""
    if _is_bundle(model):
        return model.arrow(x, a(x))
    return PairArrow(x, a(x))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleSection:
    model: object = field(repr=False)
    cache: object
    edge: Optional[str] = None
    local_procedure: bool = False

    def to_json(self) -> dict:
        if _is_bundle(self.model):
            return {"domain": self.cache.domain().to_json(), "f": self.cache.to_json()}
        doc = {"chart_edge": self.edge, "restrict": self.cache.domain().to_json()}
        if self.edge is None:
            doc = {"src": self.cache.src, "tgt": self.cache.tgt, "map": self.cache.fn.to_json()}
        return doc


def _flag(model, cache, edge=None) -> AdmissibleSection:
    ok, _ = _procedure_check(model, cache)
    return AdmissibleSection(model, cache, edge, ok)


def bundle_section(model: QuotientBundleModel, f: PLFunction) -> "SectionWord":
    if f.is_empty():
        raise EmptyDomain("section with empty domain")
    return SectionWord.of(_flag(model, f))


def constant_section(model: QuotientBundleModel, c, domain: Optional[OpenSet1D] = None) -> "SectionWord":
    return bundle_section(model, PLFunction.constant(as_rational(c), domain))


def edge_section(model: ChartComplex, edge_id: str, restrict: Optional[OpenSet1D] = None) -> "SectionWord":
    e = model.edge(edge_id)
    cache = ChartMap(e.src, e.tgt, e.map)
    if restrict is not None:
        cache = cache.restrict(restrict)
    if cache.fn.is_empty():
        raise EmptyDomain(f"edge {edge_id} restricted to an empty set")
    return SectionWord.of(_flag(model, cache, edge_id))


def identity_section(model, chart: Optional[str] = None) -> "SectionWord":
    """The identity section ``x -> 1_x`` (on one chart's transversal for the
    chart family)."""
    if _is_bundle(model):
        return constant_section(model, 0)
    c = model.chart(chart) if chart else model.charts[0]
    cache = ChartMap(c.id, c.id, PLFunction.identity(c.transversal))
    ident = [e.id for e in model.edges if e.src == c.id and e.tgt == c.id and e.map == cache.fn]
    return SectionWord.of(_flag(model, cache, ident[0] if ident else None))


@dataclass(frozen=True)
class SectionWord:
    model: object = field(repr=False)
    entries: tuple
    cache: object

    @classmethod
    def of(cls, section: AdmissibleSection) -> "SectionWord":
        return cls(section.model, (section,), section.cache)

    def __len__(self):
        return len(self.entries)

    @property
    def domain(self):
        return self.cache.domain()

    def defined_at(self, x) -> bool:
        return cache_defined_at(self.model, self.cache, x)

    def target(self, x):
        return cache_target(self.model, self.cache, x)

    def __call__(self, x):
        x = as_point(self.model, x)
        if not self.defined_at(x):
            raise NotInDomain(f"{x} not in the section domain")
        return cache_value(self.model, self.cache, x)

    def all_local_procedures(self) -> bool:
        return all(e.local_procedure for e in self.entries)

    def __mul__(self, other: "SectionWord") -> "SectionWord":
        return ehresmann_product(self, other)

    def power(self, k: int) -> "SectionWord":
        if k == 0:
            raise ValueError("use identity_section for the empty product")
        base = self if k > 0 else section_inverse(self)
        out = base
        for _ in range(abs(k) - 1):
            out = ehresmann_product(out, base)
        return out

    def to_json(self) -> dict:
        docs = [e.to_json() for e in self.entries]
        if len(docs) > 1 and all(d == docs[0] for d in docs):
            return {"sections": docs[:1], "times": len(docs)}
        return {"sections": docs}


def as_point(model, x):
    if _is_bundle(model):
        return as_rational(x)
    if isinstance(x, ChartPoint):
        return x
    if isinstance(x, dict):
        return ChartPoint(x["chart"], as_rational(x["y"]))
    chart, y = x
    return ChartPoint(chart, as_rational(y))


def ehresmann_product(s: SectionWord, t: SectionWord) -> SectionWord:
    """``(s t)(x) = s(x) t(beta s x)`` on ``{x in U_s : beta s x in U_t}``."""
    cache = cache_product(s.model, s.cache, t.cache)
    if cache_is_empty(s.model, cache):
        raise EmptyDomain("the product has empty domain")
    return SectionWord(s.model, s.entries + t.entries, cache)


def _inverse_entry(e: AdmissibleSection) -> AdmissibleSection:
    cache = cache_inverse(e.model, e.cache)
    edge = e.model.edge(e.edge).inverse if e.edge is not None else None
    return _flag(e.model, cache, edge)


def section_inverse(s: SectionWord) -> SectionWord:
    """Generalised inverse ``s'(x) = (s((beta s)^{-1} x))^{-1}``."""
    entries = tuple(_inverse_entry(e) for e in reversed(s.entries))
    return SectionWord(s.model, entries, cache_inverse(s.model, s.cache))


# --------------------------------------------------------------------------
# admissibility and local procedures


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: object = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_admissible(model, raw) -> Verdict:
    """Check the three clauses for raw section data.

    ``raw`` is a PLFunction for the bundle family (the target map is then
    the identity, so only openness of the domain matters) and a ChartMap for
    the chart family.
    """
    if _is_bundle(model):
        if raw.is_empty():
            return Verdict(False, None, "empty domain")
        return Verdict(True, None, "target map is the identity")
    src_t = model.chart(raw.src).transversal
    tgt_t = model.chart(raw.tgt).transversal
    dom = raw.fn.domain()
    if dom.is_empty() or dom.intersect(src_t) != dom:
        return Verdict(False, None, "domain is not an open subset of the source transversal")
    if not raw.fn.is_continuous():
        return Verdict(False, raw.fn.discontinuities()[0], "target map is not continuous")
    if not raw.fn.is_injective():
        return Verdict(False, _fold(raw.fn), "target map is not injective")
    img = raw.fn.image()
    if img.intersect(tgt_t) != img:
        return Verdict(False, None, "image leaves the target transversal")
    return Verdict(True, None, "PL homeomorphism onto an open set")


def _fold(f: PLFunction):
    for p, q in zip(f.pieces, f.pieces[1:]):
        if p.f.slope == 0 or p.f.slope * q.f.slope < 0:
            return p.hi
    for p in f.pieces:
        if p.f.slope == 0:
            return (p.lo + p.hi) / 2 if p.lo != NEG_INF and p.hi != INF else None
    return None


def _procedure_check(model, cache, at=None):
    if _is_bundle(model):
        return section_local_procedure_check(model, cache, at)
    return _chart_procedure_check(model, cache, at)


def _edge_germ_match(model: ChartComplex, cache: ChartMap, y):
    g = germ_at(cache.fn, y)
    for e in model.edges:
        if e.src == cache.src and e.tgt == cache.tgt and e.map.defined_at(y) and germ_at(e.map, y) == g:
            return e.id
    return None


def _chart_procedure_check(model: ChartComplex, cache: ChartMap, at=None):
    if at is not None:
        y = at.y if isinstance(at, ChartPoint) else as_rational(at)
        if not cache.fn.defined_at(y):
            raise NotInDomain(f"{y} outside the section domain")
        e = _edge_germ_match(model, cache, y)
        return (True, None) if e else (False, (ChartPoint(cache.src, y), "no edge has this germ"))
    cuts = set(cache.fn.breakpoints())
    for e in model.edges:
        if e.src == cache.src:
            cuts |= set(e.map.breakpoints())
    for lo, hi in cache.fn.domain().intervals:
        inner = sorted(c for c in cuts if lo < c < hi)
        bounds = [lo] + inner + [hi]
        probes = inner + [_mid(a, b) for a, b in zip(bounds, bounds[1:])]
        for y in probes:
            if not _edge_germ_match(model, cache, y):
                return False, (ChartPoint(cache.src, y), "no edge has this germ")
    return True, None


def _mid(a, b):
    if a == NEG_INF and b == INF:
        return Fraction(0)
    if a == NEG_INF:
        return Fraction(b) - 1
    if b == INF:
        return Fraction(a) + 1
    return (Fraction(a) + Fraction(b)) / 2


def is_local_procedure(s: SectionWord, at=None) -> Verdict:
    """Does the product of ``s`` take values in W and is it smooth into W
    (at every point of its domain, or near ``at``)?"""
    if at is not None:
        at = as_point(s.model, at)
    ok, wit = _procedure_check(s.model, s.cache, at)
    if ok:
        return Verdict(True)
    point, detail = wit
    return Verdict(False, point, detail.to_json() if hasattr(detail, "to_json") else detail)


def centered_representative(model, a) -> Fraction:
    """Real lift of a bundle arrow in ``(-n/2, n/2]`` (the arrow itself when
    ``n = 0``)."""
    n = model.n(a.x)
    t = a.t
    if n > 0 and t > n / 2:
        t -= n
    return t


def is_continuous_at(s: SectionWord, at) -> Verdict:
    """Is the product continuous at ``at`` for the topology whose
    neighbourhoods of an arrow ``g`` are ``g``-translates of W?

    For the bundle family this asks for a W-representative (of the model's
    smoothness class) of ``cache - u0`` near the point, where ``u0`` is the
    centred lift of the value there.  Chart maps are PL, so only a jump can
    break continuity.
    """
    model = s.model
    x0 = as_point(model, at)
    if not s.defined_at(x0):
        raise NotInDomain(f"{x0} not in the section domain")
    if _is_bundle(model):
        u0 = centered_representative(model, s(x0))
        diff = s.cache - PLFunction.constant(u0)
        rep = section_local_procedure_check(model, diff, x0)
        ok, wit = rep
        if ok:
            return Verdict(True, None, f"translate of W by the lift {u0}")
        return Verdict(False, x0, wit[1].to_json())
    g = germ_at(s.cache.fn, x0.y)
    if g.left_limit not in (None, g.value) or g.right_limit not in (None, g.value):
        return Verdict(False, x0, "target map jumps")
    return Verdict(True)


# --------------------------------------------------------------------------
# sections through a point of W


def local_section_through(model, w, variant: int = 0) -> SectionWord:
    """An admissible W-valued section through ``w``; ``variant`` selects one
    of two different constructions (used to check independence of choices)."""
    if _is_bundle(model):
        u = model.representative(w)
        if u is None:
            raise NoSectionThroughW(f"{w} is not in W")
        x = w.x
        if variant == 0:
            f = PLFunction.constant(u)
        else:
            f = PLFunction.affine(Fraction(1, 3), u - x / 3)
        inside = positive_set(model.upper - f).intersect(positive_set(f - model.lower))
        comp = inside.component(x)
        if comp is None:
            raise NoSectionThroughW(f"{w} has no W-valued section")
        dom = OpenSet1D([comp])
        if variant == 1:
            dom = dom.intersect(OpenSet1D.interval(x - Fraction(1, 8), x + Fraction(1, 8)))
        return bundle_section(model, f.restrict(dom))
    wp = model.w_point(w)
    if wp is None:
        raise NoSectionThroughW(f"{w} is not in W")
    if variant == 0:
        return edge_section(model, wp.edge)
    y = wp.y
    return edge_section(model, wp.edge, OpenSet1D.interval(y - Fraction(1, 8), y + Fraction(1, 8)))


# --------------------------------------------------------------------------
# interchange


def section_from_json(model, doc) -> SectionWord:
    """``{"sections": [...]}``, a single section document, or a list."""
    if isinstance(doc, dict) and "sections" in doc:
        items = doc["sections"]
    elif isinstance(doc, list):
        items = doc
    else:
        items = [doc]
    words = []
    for item in items:
        if "f" in item:
            f = PLFunction.from_json(item["f"])
            if "domain" in item:
                f = f.restrict(OpenSet1D.from_json(item["domain"]))
            words.append(bundle_section(model, f))
        elif "chart_edge" in item:
            r = item.get("restrict")
            dom = None
            if r is not None:
                dom = OpenSet1D.from_json(r if isinstance(r[0], list) else [r])
            words.append(edge_section(model, item["chart_edge"], dom))
        elif "map" in item:
            cache = ChartMap(item["src"], item["tgt"], PLFunction.from_json(item["map"]))
            words.append(SectionWord.of(_flag(model, cache)))
        else:
            raise ValueError(f"unrecognised section document: {item}")
    times = doc.get("times", 1) if isinstance(doc, dict) else 1
    out = words[0]
    for w in words[1:]:
        out = ehresmann_product(out, w)
    return out.power(times) if times != 1 else out


def raw_from_json(model, item):
    if _is_bundle(model):
        f = PLFunction.from_json(item["f"])
        if "domain" in item:
            f = f.restrict(OpenSet1D.from_json(item["domain"]))
        return f
    if "chart_edge" in item:
        e = model.edge(item["chart_edge"])
        return ChartMap(e.src, e.tgt, e.map)
    return ChartMap(item["src"], item["tgt"], PLFunction.from_json(item["map"]))
