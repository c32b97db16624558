"""The two computable families of locally Lie groupoids.

``QuotientBundleModel``
    Bundle of groups ``R x R -> R`` divided by the lattice ``n(x) Z`` in
    each fibre (``n(x) = 0`` leaves the fibre ``R``).  ``W`` is the set of
    classes having a representative strictly between ``lower(x)`` and
    ``upper(x)``.  Arrows are :class:`BundleArrow` values with the fibre
    coordinate reduced, so equality of arrows is plain equality.

``ChartComplex``
    Transversals of foliation charts, with PL plaque transitions as edges.
    Objects are :class:`ChartPoint` values, ``G`` is the equivalence relation
    generated by ``relation`` (by the edges when no relation is given) and
    the edge set itself is ``W``.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import InvalidModel, NotInDomain
from .pl_base import (
    INF,
    NEG_INF,
    Germ1D,
    OpenSet1D,
    Piece,
    PLFunction,
    affine_positive_on,
    as_rational,
    format_rational,
    germ_at,
    germ_positive,
    nice_point,
    nonpositive_witness,
    positive_set,
)

QUARTER = Fraction(1, 4)


# --------------------------------------------------------------------------
# quotient bundles


class BundleArrow(NamedTuple):
    x: Fraction
    t: Fraction  # reduced into [0, n(x)) when n(x) > 0

    def to_json(self):
        return {"x": format_rational(self.x), "t": format_rational(self.t)}


@dataclass(frozen=True)
class Representative:
    """Successful W-representative: ``u = t - k n`` near the base point.

    ``k_left``/``k_right`` are ``None`` on a side where ``n`` vanishes
    identically (there the branch ``u = t`` is forced).
    """

    k_point: int
    k_left: Optional[int]
    k_right: Optional[int]
    germ: Germ1D

    @property
    def k(self) -> int:
        return self.k_point

    def __bool__(self):
        return True

    def to_json(self):
        return {"k": self.k_point, "k_left": self.k_left, "k_right": self.k_right, "u": self.germ.to_json()}


@dataclass(frozen=True)
class NoRepresentative:
    reason: str  # window | jump | slope | undefined
    side: str
    detail: str = ""

    def __bool__(self):
        return False

    def to_json(self):
        return {"no_representative": self.reason, "side": self.side, "detail": self.detail}


@dataclass(frozen=True)
class QuotientBundleModel:
    profile: PLFunction
    lower: PLFunction
    upper: PLFunction
    smoothness: int = 0
    name: str = "quotient_bundle"

    family = "quotient_bundle"

    def __post_init__(self):
        for label, f in (("profile", self.profile), ("lower", self.lower), ("upper", self.upper)):
            if f.domain() != OpenSet1D.full():
                raise InvalidModel(f"{label} must be defined on the whole line")
        if self.smoothness not in (0, 1):
            raise InvalidModel("smoothness must be 0 or 1")
        neg = _negative_witness(self.profile)
        if neg is not None:
            raise InvalidModel(f"modulus profile is negative at {format_rational(neg)}")
        # a window narrower than the lattice keeps representatives unique
        slack = self.profile - (self.upper - self.lower)
        for p in self.profile.pieces:
            if p.f.is_zero():
                continue
            part = PLFunction([Piece(p.lo, p.hi, p.f)]).combine(slack, lambda a, b: b)
            w = _negative_witness(part)
            if w is not None:
                raise InvalidModel(f"lattice n({format_rational(w)}) is narrower than the window")
            if p.f(_safe_inner(p.lo, p.hi)) == 0 or _touches_zero(p):
                raise InvalidModel("modulus profile may vanish only on whole pieces")
        for b, v in self.profile.points:
            if v > 0 and v < self.upper(b) - self.lower(b):
                raise InvalidModel(f"lattice n({format_rational(b)}) is narrower than the window")

    # arrows ----------------------------------------------------------------

    def n(self, x) -> Fraction:
        return self.profile(x)

    def reduce(self, x, t) -> Fraction:
        n = self.profile(x)
        return t if n == 0 else t % n

    def arrow(self, x, t) -> BundleArrow:
        x, t = as_rational(x), as_rational(t)
        return BundleArrow(x, self.reduce(x, t))

    q = arrow

    def arrows_equal(self, x, t, t2) -> bool:
        n = self.profile(x)
        if n == 0:
            return t == t2
        return ((t - t2) / n).denominator == 1

    def identity(self, x) -> BundleArrow:
        return self.arrow(x, 0)

    def is_identity(self, a: BundleArrow) -> bool:
        return a.t == 0

    def src(self, a: BundleArrow):
        return a.x

    tgt = src

    def compose(self, a: BundleArrow, b: BundleArrow) -> BundleArrow:
        from .errors import NotComposable

        if a.x != b.x:
            raise NotComposable("different base points")
        return self.arrow(a.x, a.t + b.t)

    def inverse(self, a: BundleArrow) -> BundleArrow:
        return self.arrow(a.x, -a.t)

    def star_equal(self, x, t, t2) -> bool:
        return self.arrows_equal(as_rational(x), as_rational(t), as_rational(t2))

    def window(self, x):
        return self.lower(x), self.upper(x)

    def representative(self, a: BundleArrow) -> Optional[Fraction]:
        """The unique fibre coordinate of ``a`` inside the window, if any."""
        lo, hi = self.window(a.x)
        n = self.profile(a.x)
        if n == 0:
            return a.t if lo < a.t < hi else None
        k = math.floor((a.t - lo) / n)
        for j in (k - 1, k, k + 1):
            u = a.t - j * n
            if lo < u < hi:
                return u
        return None

    def in_w(self, a: BundleArrow) -> bool:
        return self.representative(a) is not None

    def with_smoothness(self, r: int) -> "QuotientBundleModel":
        return replace(self, smoothness=int(r))

    # serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        doc = {"family": self.family, "name": self.name, "profile": self.profile.to_json()}
        if self.lower == -self.upper:
            doc["width"] = self.upper.to_json()
        else:
            doc["window"] = {"lower": self.lower.to_json(), "upper": self.upper.to_json()}
        doc["smoothness"] = self.smoothness
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "QuotientBundleModel":
        profile = PLFunction.from_json(doc["profile"])
        if "width" in doc:
            upper = PLFunction.from_json(doc["width"])
            lower = -upper
        else:
            lower = PLFunction.from_json(doc["window"]["lower"])
            upper = PLFunction.from_json(doc["window"]["upper"])
        return cls(profile, lower, upper, int(doc.get("smoothness", 0)), doc.get("name", "quotient_bundle"))


def _safe_inner(lo, hi):
    if lo == NEG_INF and hi == INF:
        return Fraction(0)
    if lo == NEG_INF:
        return Fraction(hi) - 1
    if hi == INF:
        return Fraction(lo) + 1
    return (Fraction(lo) + Fraction(hi)) / 2


def _touches_zero(p: Piece) -> bool:
    """Does a non-zero affine piece reach 0 inside its interval or at a
    finite end (a lattice shrinking to nothing)?"""
    for e in (p.lo, p.hi):
        if e not in (INF, NEG_INF) and p.f(e) == 0:
            return True
    return False


def _negative_witness(h: PLFunction) -> Optional[Fraction]:
    neg = positive_set(-h)
    if neg:
        lo, hi = neg.intervals[0]
        return nice_point(lo, hi)
    for b, v in h.points:
        if v < 0:
            return b
    return None


def w_representative(m: QuotientBundleModel, t, x0):
    """Look for a W-valued ``C^r`` representative of the section ``q(x, t(x))``
    near ``x0``: integers ``k`` with ``u = t - k n`` inside the window,
    continuous, and with matching one-sided slopes when ``r = 1``.

    On a side where ``n`` vanishes identically the branch ``u = t`` is forced.
    The candidates for ``k`` at ``x0`` are finitely many and each fixes the
    one-sided shifts through continuity, so the search is exhaustive.
    """
    x0 = as_rational(x0)
    tg = t if isinstance(t, Germ1D) else germ_at(t, x0)
    if tg.value is None or tg.left is None or tg.right is None:
        return NoRepresentative("undefined", "point", "section not defined on a neighbourhood")
    ng, lg, hg = germ_at(m.profile, x0), germ_at(m.lower, x0), germ_at(m.upper, x0)
    t0, n0, lo0, hi0 = tg.value, ng.value, lg.value, hg.value
    if n0 == 0:
        cands = [0] if lo0 < t0 < hi0 else []
    else:
        kmin = math.floor((t0 - hi0) / n0)
        kmax = math.ceil((t0 - lo0) / n0)
        cands = [k for k in range(kmin, kmax + 1) if lo0 < t0 - k * n0 < hi0]
    if not cands:
        return NoRepresentative("window", "point", f"no shift of {format_rational(t0)} lies in the window")
    failure = None
    for kp in cands:
        u0 = t0 - kp * n0
        pieces, shifts = {}, {}
        for side in ("left", "right"):
            tS, nS = getattr(tg, side), getattr(ng, side)
            loS, hiS = getattr(lg, side), getattr(hg, side)
            if nS.is_zero():
                kS, uS = None, tS
            else:
                nlim = nS(x0)
                if nlim == 0:
                    raise InvalidModel("modulus profile vanishes at a point only")
                q = (tS(x0) - u0) / nlim
                if q.denominator != 1:
                    failure = failure or NoRepresentative("jump", side, "no shift matches the value at the point")
                    break
                kS = int(q)
                uS = tS - nS.scale(kS)
            if not (germ_positive(hiS - uS, x0, side) and germ_positive(uS - loS, x0, side)):
                forced = " (forced branch)" if kS is None else ""
                failure = failure or NoRepresentative(
                    "window", side, f"u -> {format_rational(uS(x0))} leaves the window{forced}"
                )
                break
            if uS(x0) != u0:
                failure = failure or NoRepresentative(
                    "jump", side, f"limit {format_rational(uS(x0))} != value {format_rational(u0)}"
                )
                break
            pieces[side], shifts[side] = uS, kS
        else:
            if m.smoothness == 1 and pieces["left"].slope != pieces["right"].slope:
                failure = failure or NoRepresentative(
                    "slope",
                    "both",
                    f"slope kink {format_rational(pieces['left'].slope)} vs {format_rational(pieces['right'].slope)}",
                )
                continue
            germ = Germ1D(x0, u0, pieces["left"], pieces["right"])
            return Representative(kp, shifts["left"], shifts["right"], germ)
    return failure


def section_local_procedure_check(m: QuotientBundleModel, f: PLFunction, at=None):
    """Is ``x -> q(x, f(x))`` W-valued and ``C^r`` into W?

    Returns ``(True, None)`` or ``(False, (point, NoRepresentative))``.
    Everything is affine between the joint breakpoints of ``f``, ``n`` and the
    window, so it suffices to test those points and one interval per gap.
    """
    if at is not None:
        at = as_rational(at)
        if at not in f.domain():
            raise NotInDomain(f"{format_rational(at)} outside the section domain")
        rep = w_representative(m, f, at)
        return (True, None) if rep else (False, (at, rep))
    dom = f.domain()
    cuts = sorted(set(f.breakpoints()) | set(m.profile.breakpoints()) | set(m.lower.breakpoints()) | set(m.upper.breakpoints()))
    for lo, hi in dom.intervals:
        inner = [c for c in cuts if lo < c < hi]
        for c in inner:
            rep = w_representative(m, f, c)
            if not rep:
                return False, (c, rep)
        bounds = [lo] + inner + [hi]
        for a, b in zip(bounds, bounds[1:]):
            mid = _safe_inner(a, b)
            rep = w_representative(m, f, mid)
            if not rep:
                return False, (mid, rep)
            u = rep.germ.left
            lw, uw = m.lower.left_piece(mid), m.upper.left_piece(mid)
            for h in (uw - u, u - lw):
                if not affine_positive_on(h, a, b):
                    bad = nonpositive_witness(PLFunction([Piece(a, b, h)]))
                    return False, (bad, NoRepresentative("window", "interval", "leaves the window"))
    return True, None


# --------------------------------------------------------------------------
# chart complexes


class ChartPoint(NamedTuple):
    chart: str
    y: Fraction

    def to_json(self):
        return {"chart": self.chart, "y": format_rational(self.y)}


class PairArrow(NamedTuple):
    src: ChartPoint
    tgt: ChartPoint

    def to_json(self):
        return {"src": self.src.to_json(), "tgt": self.tgt.to_json()}


class EdgePoint(NamedTuple):
    """A point of W for a chart complex: an edge together with a point of its
    domain.  Distinct edges may pass through the same pair of points with
    different germs, so the edge is part of the datum."""

    edge: str
    y: Fraction

    def to_json(self):
        return {"edge": self.edge, "y": format_rational(self.y)}


@dataclass(frozen=True)
class Chart:
    id: str
    lo: Fraction
    hi: Fraction
    base: Fraction = Fraction(0)

    @property
    def transversal(self) -> OpenSet1D:
        return OpenSet1D.interval(self.lo, self.hi)


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    tgt: str
    map: PLFunction
    inverse: Optional[str] = None

    def to_json(self):
        doc = {"id": self.id, "src": self.src, "tgt": self.tgt, "map": self.map.to_json()}
        if self.inverse:
            doc["inverse"] = self.inverse
        return doc

    @classmethod
    def from_json(cls, d):
        return cls(d["id"], d["src"], d["tgt"], PLFunction.from_json(d["map"]), d.get("inverse"))


@dataclass(frozen=True)
class ChartComplex:
    charts: tuple
    edges: tuple
    relation: Optional[tuple] = None
    smoothness: int = 0
    name: str = "chart_complex"

    family = "chart_complex"

    def chart(self, cid: str) -> Chart:
        for c in self.charts:
            if c.id == cid:
                return c
        raise InvalidModel(f"unknown chart {cid}")

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise InvalidModel(f"unknown edge {eid}")

    def edges_from(self, cid: str):
        return [e for e in self.edges if e.src == cid]

    def point(self, chart, y) -> ChartPoint:
        return ChartPoint(chart, as_rational(y))

    def base_point(self, cid: Optional[str] = None) -> ChartPoint:
        c = self.chart(cid) if cid else self.charts[0]
        return ChartPoint(c.id, c.base)

    def relation_edges(self):
        return self.edges if self.relation is None else self.relation

    # arrows of G: pairs of related points -----------------------------

    def identity(self, p: ChartPoint) -> PairArrow:
        return PairArrow(p, p)

    def is_identity(self, a: PairArrow) -> bool:
        return a.src == a.tgt

    def src(self, a: PairArrow):
        return a.src

    def tgt(self, a: PairArrow):
        return a.tgt

    def compose(self, a: PairArrow, b: PairArrow) -> PairArrow:
        from .errors import NotComposable

        if a.tgt != b.src:
            raise NotComposable("tgt(a) != src(b)")
        return PairArrow(a.src, b.tgt)

    def inverse(self, a: PairArrow) -> PairArrow:
        return PairArrow(a.tgt, a.src)

    def w_edges(self, a: PairArrow):
        return [
            e
            for e in self.edges
            if e.src == a.src.chart and e.tgt == a.tgt.chart and e.map.defined_at(a.src.y) and e.map(a.src.y) == a.tgt.y
        ]

    def in_w(self, a) -> bool:
        if isinstance(a, EdgePoint):
            return self.edge(a.edge).map.defined_at(a.y)
        return bool(self.w_edges(a))

    def w_arrow(self, w: EdgePoint) -> PairArrow:
        """The arrow of G underlying a point of W."""
        e = self.edge(w.edge)
        return PairArrow(ChartPoint(e.src, w.y), ChartPoint(e.tgt, e.map(w.y)))

    def w_point(self, a) -> EdgePoint:
        """Accept an EdgePoint, or an arrow lying on exactly one edge germ."""
        if isinstance(a, EdgePoint):
            if not self.in_w(a):
                raise InvalidModel(f"{a.y} is outside the domain of {a.edge}")
            return a
        edges = self.w_edges(a)
        if not edges:
            return None
        germs = {germ_at(e.map, a.src.y) for e in edges}
        if len(germs) > 1:
            raise InvalidModel(f"{a} lies on edges with different germs; name the edge")
        return EdgePoint(edges[0].id, a.src.y)

    def orbit(self, p: ChartPoint, depth: int, edges=None) -> dict:
        """Points reachable from ``p`` by at most ``depth`` edges, with the
        edge path used to reach each."""
        edges = self.edges if edges is None else edges
        seen = {p: ()}
        frontier = deque([p])
        while frontier:
            q = frontier.popleft()
            path = seen[q]
            if len(path) >= depth:
                continue
            for e in edges:
                if e.src == q.chart and e.map.defined_at(q.y):
                    r = ChartPoint(e.tgt, e.map(q.y))
                    if r not in seen:
                        seen[r] = path + (e.id,)
                        frontier.append(r)
        return seen

    def with_smoothness(self, r: int) -> "ChartComplex":
        return replace(self, smoothness=int(r))

    def to_json(self) -> dict:
        doc = {
            "family": self.family,
            "name": self.name,
            "charts": [
                {"id": c.id, "transversal": [format_rational(c.lo), format_rational(c.hi)], "base": format_rational(c.base)}
                for c in self.charts
            ],
            "edges": [e.to_json() for e in self.edges],
            "smoothness": self.smoothness,
        }
        if self.relation is not None:
            doc["relation"] = [e.to_json() for e in self.relation]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ChartComplex":
        charts = tuple(
            Chart(c["id"], as_rational(c["transversal"][0]), as_rational(c["transversal"][1]), as_rational(c.get("base", "0")))
            for c in doc["charts"]
        )
        edges = tuple(Edge.from_json(e) for e in doc["edges"])
        relation = tuple(Edge.from_json(e) for e in doc["relation"]) if "relation" in doc else None
        return cls(charts, edges, relation, int(doc.get("smoothness", 0)), doc.get("name", "chart_complex"))


# --------------------------------------------------------------------------
# builders


def _step(at, left, right):
    return PLFunction.from_pieces([(NEG_INF, at, 0, left), (at, INF, 0, right)], points={at: right})


def build_pradines_1(width=QUARTER, smoothness: int = 0) -> QuotientBundleModel:
    """Fibre R over x < 0 and R/Z over x >= 0, W of half-width 1/4."""
    w = PLFunction.constant(as_rational(width))
    return QuotientBundleModel(_step(0, 0, 1), -w, w, smoothness, "pradines-1")


def build_pradines_2(smoothness: int = 0, width=QUARTER) -> QuotientBundleModel:
    """Fibre R/(1+|x|)Z everywhere."""
    n = PLFunction.from_pieces([(NEG_INF, 0, -1, 1), (0, INF, 1, 1)])
    w = PLFunction.constant(as_rational(width))
    return QuotientBundleModel(n, -w, w, smoothness, "pradines-2")


def _edge_pair(eid, src, tgt, fn: PLFunction):
    return [Edge(eid, src, tgt, fn, f"{eid}~"), Edge(f"{eid}~", tgt, src, fn.inverse(), eid)]


def build_mobius() -> ChartComplex:
    """Two transversal charts glued into a Moebius band.

    Both transversals are ``(-1, 1)`` with base point 0; the two overlap
    components glue by ``y -> y`` and by the band-closing ``y -> -y``.
    """
    I = OpenSet1D.interval(-1, 1)
    charts = (Chart("A", Fraction(-1), Fraction(1)), Chart("B", Fraction(-1), Fraction(1)))
    ident = PLFunction.identity(I)
    edges = [
        Edge("1A", "A", "A", ident, "1A"),
        Edge("1B", "B", "B", ident, "1B"),
        *_edge_pair("t0", "A", "B", ident),
        *_edge_pair("t1", "A", "B", PLFunction.affine(-1, 0, I)),
    ]
    return ChartComplex(charts, tuple(edges), None, 0, "mobius")


EXAMPLES = {
    "pradines-1": build_pradines_1,
    "pradines-2": build_pradines_2,
    "mobius": build_mobius,
}


def model_from_json(doc: dict):
    family = doc.get("family")
    if family == "quotient_bundle":
        return QuotientBundleModel.from_json(doc)
    if family == "chart_complex":
        return ChartComplex.from_json(doc)
    raise InvalidModel(f"unknown model family {family!r}")


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fingerprint(model) -> str:
    return hashlib.sha256(canonical_json(model.to_json()).encode()).hexdigest()


# --------------------------------------------------------------------------
# axioms


@dataclass
class AxiomVerdict:
    ok: bool
    witness: object = None
    note: str = ""

    def to_json(self):
        return {"ok": self.ok, "witness": _jsonable(self.witness), "note": self.note}


@dataclass
class AxiomReport:
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts.values())

    def failed(self) -> list:
        return [k for k, v in self.verdicts.items() if not v.ok]

    def to_json(self):
        return {k: v.to_json() for k, v in self.verdicts.items()}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _differ_witness(f: PLFunction, g: PLFunction):
    d = f - g
    for s in (positive_set(d), positive_set(-d)):
        if s:
            lo, hi = s.intervals[0]
            return nice_point(lo, hi)
    for b, v in d.points:
        if v != 0:
            return b
    return None


def generation_factors(m: QuotientBundleModel, x, t) -> list:
    """Write ``q(x, t)`` as a product of equal W-elements.

    ``m = floor(|t| / r) + 1`` factors of size ``t/m`` with ``r`` the window
    radius on the side of ``t``; fewer factors cannot work because each lies
    strictly inside the open window.
    """
    x, t = as_rational(x), as_rational(t)
    a = m.arrow(x, t)
    u = a.t
    n = m.profile(x)
    if n > 0 and u > n / 2:
        u -= n
    lo, hi = m.window(x)
    if u == 0:
        return []
    r = hi if u > 0 else -lo
    if r <= 0:
        return None
    count = math.floor(abs(u) / r) + 1
    return [m.arrow(x, u / count)] * count


def check_axioms(model, depth: int = 8) -> AxiomReport:
    if model.family == "quotient_bundle":
        return _check_bundle(model)
    return _check_charts(model, depth)


def _check_bundle(m: QuotientBundleModel) -> AxiomReport:
    rep = AxiomReport()
    w1 = nonpositive_witness(m.upper)
    if w1 is None:
        w1 = nonpositive_witness(-m.lower)
    rep.verdicts["G1"] = AxiomVerdict(w1 is None, None if w1 is None else {"x": w1}, "identities 1_x lie in W" if w1 is None else "identity missing from W")
    d = _differ_witness(m.lower, -m.upper)
    rep.verdicts["G2"] = AxiomVerdict(d is None, None if d is None else {"x": d, "lower": m.lower(d), "upper": m.upper(d)}, "window symmetric" if d is None else "window not symmetric")
    # G3: only the unshifted difference u - v can land in W, and W' is open
    g3 = None
    for need in (m.upper.scale(2) - m.lower, m.upper - m.lower.scale(2)):
        for p in m.profile.pieces:
            if p.f.is_zero() or g3 is not None:
                continue
            w = _negative_witness(PLFunction([Piece(p.lo, p.hi, p.f)]) - need)
            if w is not None:
                g3 = {"x": w, "reason": "difference map wraps around the lattice"}
    if g3 is None:
        for b, v in m.profile.points:
            if v > 0 and v < max(2 * m.upper(b) - m.lower(b), m.upper(b) - 2 * m.lower(b)):
                g3 = {"x": b, "reason": "difference map wraps around the lattice"}
                break
    rep.verdicts["G3"] = AxiomVerdict(g3 is None, g3, "W(delta) open, delta(u,v) = u - v smooth" if g3 is None else "W(delta) not open")
    jumps = sorted(set(m.lower.discontinuities()) | set(m.upper.discontinuities()))
    g4 = None if not jumps else {"x": jumps[0], "reason": "window jumps; constant sections leave W"}
    rep.verdicts["G4"] = AxiomVerdict(
        g4 is None, g4, "constant-representative section through every q(x0, t0) in W" if g4 is None else "not locally sectionable"
    )
    # G5 on the objects whose identity is in W (G1 covers the rest)
    sample = generation_factors(m, 1, 1)
    cert = {"rule": "q(x,t) = (q(x,t/m))^m with m = floor(|t|/r)+1", "x=1,t=1": len(sample) if sample is not None else None}
    rep.verdicts["G5"] = AxiomVerdict(True, None, f"W generates: {cert}")
    return rep


def _check_charts(m: ChartComplex, depth: int) -> AxiomReport:
    rep = AxiomReport()
    missing = None
    for c in m.charts:
        ident = PLFunction.identity(c.transversal)
        if not any(e.src == c.id and e.tgt == c.id and e.map == ident for e in m.edges):
            missing = {"chart": c.id, "point": m.base_point(c.id)}
            break
    rep.verdicts["G1"] = AxiomVerdict(missing is None, missing, "identity edge on every chart" if missing is None else "identity edge missing")
    asym = None
    for e in m.edges:
        inv = [f for f in m.edges if f.src == e.tgt and f.tgt == e.src and e.map.is_injective() and f.map == e.map.inverse()]
        if not inv:
            asym = {"edge": e.id}
            break
    rep.verdicts["G2"] = AxiomVerdict(asym is None, asym, "edge set closed under inversion" if asym is None else "edge without inverse")
    g3 = None
    for e in m.edges:
        dom = e.map.domain()
        src_t, tgt_t = m.chart(e.src).transversal, m.chart(e.tgt).transversal
        if dom.is_empty() or dom.intersect(src_t) != dom or not e.map.is_continuous():
            g3 = {"edge": e.id, "reason": "domain not an open subset of the transversal"}
            break
        if e.map.is_injective() and e.map.image().intersect(tgt_t) != e.map.image():
            g3 = {"edge": e.id, "reason": "image leaves the target transversal"}
            break
    rep.verdicts["G3"] = AxiomVerdict(g3 is None, g3, "edge maps are PL on open sets" if g3 is None else "")
    g4 = None
    for e in m.edges:
        if not e.map.is_injective():
            g4 = {"edge": e.id, "fold": _fold_point(e.map)}
            break
    rep.verdicts["G4"] = AxiomVerdict(g4 is None, g4, "each edge restricted to its domain is a section" if g4 is None else "edge map folds")
    g5 = _chart_generation(m, depth)
    rep.verdicts["G5"] = AxiomVerdict(g5 is None, g5, f"relation reached through W within {depth} steps" if g5 is None else "W does not generate G")
    return rep


def _fold_point(f: PLFunction):
    for p, q in zip(f.pieces, f.pieces[1:]):
        if p.f.slope * q.f.slope < 0 or p.f.slope == 0:
            return p.hi
    return f.breakpoints()[0] if f.breakpoints() else None


def _sample_points(f: PLFunction) -> list:
    pts = []
    for p in f.pieces:
        if p.lo == NEG_INF or p.hi == INF:
            mid = _safe_inner(p.lo, p.hi)
            pts.extend([mid, mid - 1 if p.lo == NEG_INF else mid + 1])
        else:
            step = (Fraction(p.hi) - Fraction(p.lo)) / 4
            pts.extend(Fraction(p.lo) + j * step for j in (1, 2, 3))
    pts.extend(b for b, _ in f.points)
    return sorted(set(pts))


def _chart_generation(m: ChartComplex, depth: int):
    """First relation generator point not reachable through W, or ``None``.

    Only objects whose identity lies in W are examined."""
    covered = {
        c.id
        for c in m.charts
        if any(e.src == c.id and e.tgt == c.id and e.map == PLFunction.identity(c.transversal) for e in m.edges)
    }
    for g in m.relation_edges():
        if g.src not in covered or g.tgt not in covered:
            continue
        for y in _sample_points(g.map):
            p = ChartPoint(g.src, y)
            target = ChartPoint(g.tgt, g.map(y))
            if target not in m.orbit(p, depth):
                return {"generator": g.id, "from": p, "to": target}
    return None


# --------------------------------------------------------------------------
# single-fault mutations


def mutation(kind: str):
    """Models with one deliberate defect, paired with the axiom it breaks."""
    if kind == "broken-symmetry":
        base = build_pradines_1()
        return replace(base, lower=PLFunction.constant(Fraction(-1, 8)), name="pradines-1/asymmetric"), "G2"
    if kind == "zero-width":
        base = build_pradines_1()
        # continuous, so only the identities beyond x = 1/4 are lost
        w = PLFunction.from_pieces([(NEG_INF, 0, 0, QUARTER), (0, QUARTER, -1, QUARTER), (QUARTER, INF, 0, 0)])
        return replace(base, lower=-w, upper=w, name="pradines-1/zero-width"), "G1"
    mob = build_mobius()
    if kind == "missing-identities":
        edges = tuple(e for e in mob.edges if e.id != "1B")
        return replace(mob, edges=edges, name="mobius/missing-identity"), "G1"
    if kind == "isolated-chart":
        I = OpenSet1D.interval(-1, 1)
        ident = PLFunction.identity(I)
        charts = mob.charts + (Chart("C", Fraction(-1), Fraction(1)),)
        edges = mob.edges + (Edge("1C", "C", "C", ident, "1C"),)
        relation = mob.edges + (Edge("1C", "C", "C", ident, "1C"),) + tuple(_edge_pair("s", "A", "C", ident))
        return replace(mob, charts=charts, edges=edges, relation=relation, name="mobius/isolated-chart"), "G5"
    if kind == "non-generating":
        edges = tuple(e for e in mob.edges if e.id not in ("t1", "t1~"))
        return replace(mob, edges=edges, relation=mob.edges, name="mobius/non-generating"), "G5"
    raise ValueError(f"unknown mutation {kind!r}")


MUTATIONS = ("broken-symmetry", "missing-identities", "zero-width", "isolated-chart", "non-generating")
