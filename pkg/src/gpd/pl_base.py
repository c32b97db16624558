"""Exact piecewise-linear functions on open subsets of the rational line.

Everything here is built on :class:`fractions.Fraction`; infinite interval
endpoints are ``math.inf`` / ``-math.inf`` and only ever take part in
comparisons, never in arithmetic.

A :class:`PLFunction` is a finite set of affine pieces on pairwise disjoint
open intervals together with explicit values at the joints where two pieces
meet and the joint belongs to the domain.  A joint value need not agree with
the neighbouring limits, which is how discontinuous functions (a modulus
profile jumping at 0, or the cache of a product section) are represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .errors import EmptyIntersection, NotInDomain

INF = math.inf
NEG_INF = -math.inf


def as_rational(value) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            raise ValueError(f"decimal literal not allowed, use p/q: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_endpoint(value):
    if value in ("inf", "+inf", "oo"):
        return INF
    if value in ("-inf", "-oo"):
        return NEG_INF
    return as_rational(value)


def format_endpoint(e) -> str:
    if e == INF:
        return "inf"
    if e == NEG_INF:
        return "-inf"
    return format_rational(e)


def _is_finite(e) -> bool:
    return e != INF and e != NEG_INF


def nice_point(lo, hi, lo_closed=False, hi_closed=False) -> Fraction:
    """A short rational inside the interval between ``lo`` and ``hi``."""

    def inside(x):
        left = x >= lo if lo_closed else x > lo
        right = x <= hi if hi_closed else x < hi
        return left and right

    if inside(Fraction(0)):
        return Fraction(0)
    if lo == NEG_INF:
        start = Fraction(math.floor(hi))
        for cand in (start, start - 1):
            if inside(cand):
                return cand
    elif hi == INF:
        start = Fraction(math.ceil(lo))
        for cand in (start, start + 1):
            if inside(cand):
                return cand
    else:
        for cand in (Fraction(math.ceil(lo)), Fraction(math.ceil(lo)) + 1):
            if inside(cand):
                return cand
        if lo_closed and inside(lo):
            return Fraction(lo)
        if hi_closed and inside(hi):
            return Fraction(hi)
        return (Fraction(lo) + Fraction(hi)) / 2
    raise ValueError("empty interval")


def _midpoint(a, b) -> Fraction:
    if a == NEG_INF and b == INF:
        return Fraction(0)
    if a == NEG_INF:
        return Fraction(b) - 1
    if b == INF:
        return Fraction(a) + 1
    return (Fraction(a) + Fraction(b)) / 2


@dataclass(frozen=True)
class Affine:
    slope: Fraction
    intercept: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", Fraction(self.slope))
        object.__setattr__(self, "intercept", Fraction(self.intercept))

    @classmethod
    def constant(cls, c) -> "Affine":
        return cls(Fraction(0), as_rational(c))

    def __call__(self, x) -> Fraction:
        return self.slope * x + self.intercept

    def __add__(self, other: "Affine") -> "Affine":
        return Affine(self.slope + other.slope, self.intercept + other.intercept)

    def __sub__(self, other: "Affine") -> "Affine":
        return Affine(self.slope - other.slope, self.intercept - other.intercept)

    def __neg__(self) -> "Affine":
        return Affine(-self.slope, -self.intercept)

    def scale(self, c) -> "Affine":
        return Affine(self.slope * c, self.intercept * c)

    def after(self, inner: "Affine") -> "Affine":
        """``self(inner(x))``."""
        return Affine(self.slope * inner.slope, self.slope * inner.intercept + self.intercept)

    def inverse(self) -> "Affine":
        if self.slope == 0:
            raise ValueError("constant affine map has no inverse")
        return Affine(1 / self.slope, -self.intercept / self.slope)

    def is_zero(self) -> bool:
        return self.slope == 0 and self.intercept == 0

    def image_of_end(self, e):
        if _is_finite(e):
            return self(e)
        if self.slope == 0:
            return self.intercept
        return e if self.slope > 0 else -e


class OpenSet1D:
    """Finite union of disjoint open intervals, sorted."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable = ()):
        items = sorted(
            ((lo, hi) for lo, hi in intervals if lo < hi), key=lambda iv: (iv[0], iv[1])
        )
        merged: list = []
        for lo, hi in items:
            if merged and lo < merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)

    @classmethod
    def full(cls) -> "OpenSet1D":
        return cls([(NEG_INF, INF)])

    @classmethod
    def interval(cls, lo, hi) -> "OpenSet1D":
        return cls([(lo, hi)])

    def __eq__(self, other):
        return isinstance(other, OpenSet1D) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        body = ", ".join(f"({format_endpoint(a)}, {format_endpoint(b)})" for a, b in self.intervals)
        return f"OpenSet1D[{body}]"

    def __contains__(self, x) -> bool:
        return any(lo < x < hi for lo, hi in self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def component(self, x):
        for lo, hi in self.intervals:
            if lo < x < hi:
                return (lo, hi)
        return None

    def intersect(self, other: "OpenSet1D") -> "OpenSet1D":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return OpenSet1D(out)

    def join_at(self, b) -> "OpenSet1D":
        """Add the point ``b`` when it separates two adjacent intervals."""
        left = [iv for iv in self.intervals if iv[1] == b]
        right = [iv for iv in self.intervals if iv[0] == b]
        if not (left and right):
            return self
        rest = [iv for iv in self.intervals if iv[1] != b and iv[0] != b]
        return OpenSet1D(rest + [(left[0][0], right[0][1])])

    def to_json(self):
        return [[format_endpoint(a), format_endpoint(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "OpenSet1D":
        return cls((parse_endpoint(a), parse_endpoint(b)) for a, b in data)


@dataclass(frozen=True)
class Piece:
    lo: object
    hi: object
    f: Affine

    def __contains__(self, x):
        return self.lo < x < self.hi


class PLFunction:
    """Exact piecewise-affine partial function with open domain.

    ``pieces`` are affine maps on disjoint open intervals; ``points`` maps a
    joint (the common endpoint of two adjacent pieces) to its value when the
    joint is in the domain.  The representation is normalised on
    construction, so structural equality is functional equality.
    """

    __slots__ = ("pieces", "points", "_hash")

    def __init__(self, pieces: Iterable[Piece], points: Optional[dict] = None):
        items = sorted((p for p in pieces if p.lo < p.hi), key=lambda p: p.lo)
        for left, right in zip(items, items[1:]):
            if right.lo < left.hi:
                raise ValueError(f"overlapping pieces at {left.hi}")
        pts = {Fraction(b): Fraction(v) for b, v in (points or {}).items()}
        ends = {p.hi for p in items}
        starts = {p.lo for p in items}
        pts = {b: v for b, v in pts.items() if b in ends and b in starts}
        merged: list = []
        for p in items:
            if merged:
                prev = merged[-1]
                b = prev.hi
                if (
                    b == p.lo
                    and b in pts
                    and prev.f == p.f
                    and pts[b] == p.f(b)
                ):
                    merged[-1] = Piece(prev.lo, p.hi, p.f)
                    del pts[b]
                    continue
            merged.append(p)
        self.pieces = tuple(merged)
        self.points = tuple(sorted(pts.items()))
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def from_pieces(cls, rows, points=None, fill_continuous=True) -> "PLFunction":
        """Build from ``(lo, hi, slope, intercept)`` tuples.

        Joints whose two one-sided limits agree are added to the domain
        unless ``fill_continuous`` is false; ``points`` overrides joint values.
        """
        pieces = [
            Piece(
                lo if not isinstance(lo, str) else parse_endpoint(lo),
                hi if not isinstance(hi, str) else parse_endpoint(hi),
                Affine(as_rational(s), as_rational(c)),
            )
            for lo, hi, s, c in rows
        ]
        pts = {}
        if fill_continuous:
            ordered = sorted(pieces, key=lambda p: p.lo)
            for left, right in zip(ordered, ordered[1:]):
                if left.hi == right.lo and _is_finite(left.hi):
                    b = left.hi
                    if left.f(b) == right.f(b):
                        pts[b] = left.f(b)
        for b, v in (points or {}).items():
            pts[as_rational(b)] = as_rational(v)
        return cls(pieces, pts)

    @classmethod
    def constant(cls, c, domain: Optional[OpenSet1D] = None) -> "PLFunction":
        domain = domain or OpenSet1D.full()
        return cls([Piece(lo, hi, Affine.constant(c)) for lo, hi in domain.intervals])

    @classmethod
    def affine(cls, slope, intercept, domain: Optional[OpenSet1D] = None) -> "PLFunction":
        domain = domain or OpenSet1D.full()
        f = Affine(as_rational(slope), as_rational(intercept))
        return cls([Piece(lo, hi, f) for lo, hi in domain.intervals])

    @classmethod
    def identity(cls, domain: Optional[OpenSet1D] = None) -> "PLFunction":
        return cls.affine(1, 0, domain)

    # basic protocol -------------------------------------------------------

    def _key(self):
        return (self.pieces, self.points)

    def __eq__(self, other):
        return isinstance(other, PLFunction) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        parts = [
            f"({format_endpoint(p.lo)},{format_endpoint(p.hi)}): "
            f"{format_rational(p.f.slope)}x+{format_rational(p.f.intercept)}"
            for p in self.pieces
        ]
        pts = [f"{format_rational(b)}->{format_rational(v)}" for b, v in self.points]
        return f"PLFunction<{'; '.join(parts)}{' | ' + ', '.join(pts) if pts else ''}>"

    def point_value(self, b):
        for c, v in self.points:
            if c == b:
                return v
        return None

    def domain(self) -> OpenSet1D:
        dom = OpenSet1D((p.lo, p.hi) for p in self.pieces)
        for b, _ in self.points:
            dom = dom.join_at(b)
        return dom

    def is_empty(self) -> bool:
        return not self.pieces

    def breakpoints(self) -> list:
        out = set()
        for p in self.pieces:
            for e in (p.lo, p.hi):
                if _is_finite(e):
                    out.add(Fraction(e))
        return sorted(out)

    def defined_at(self, x) -> bool:
        return self.point_value(x) is not None or any(x in p for p in self.pieces)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        for p in self.pieces:
            if x in p:
                return p.f(x)
        v = self.point_value(x)
        if v is None:
            raise NotInDomain(f"{format_rational(x)} is not in the domain")
        return v

    def left_piece(self, x) -> Optional[Affine]:
        for p in self.pieces:
            if p.lo < x <= p.hi:
                return p.f
        return None

    def right_piece(self, x) -> Optional[Affine]:
        for p in self.pieces:
            if p.lo <= x < p.hi:
                return p.f
        return None

    def discontinuities(self) -> list:
        """Joints in the domain where the function jumps."""
        out = []
        for b, v in self.points:
            left, right = self.left_piece(b), self.right_piece(b)
            if left(b) != v or right(b) != v:
                out.append(b)
        return out

    def is_continuous(self) -> bool:
        return not self.discontinuities()

    # algebra --------------------------------------------------------------

    def combine(self, other: "PLFunction", op: Callable) -> "PLFunction":
        """Apply ``op`` pointwise (to Affine pieces and to values) on the common domain."""
        ends = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        cuts = [NEG_INF] + ends + [INF]
        pieces = []
        for a, b in zip(cuts, cuts[1:]):
            m = _midpoint(a, b)
            fa, ga = self._piece_containing(m), other._piece_containing(m)
            if fa is not None and ga is not None:
                pieces.append(Piece(a, b, op(fa, ga)))
        pts = {}
        for e in ends:
            if self.defined_at(e) and other.defined_at(e):
                pts[e] = op(self(e), other(e))
        return PLFunction(pieces, pts)

    def _piece_containing(self, x) -> Optional[Affine]:
        for p in self.pieces:
            if x in p:
                return p.f
        return None

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return self.combine(other, lambda a, b: a + b)

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return self.combine(other, lambda a, b: a - b)

    def __neg__(self) -> "PLFunction":
        return self.map_values(lambda a: -a)

    def scale(self, c) -> "PLFunction":
        c = as_rational(c)
        return self.map_values(lambda a: a.scale(c) if isinstance(a, Affine) else a * c)

    def map_values(self, op) -> "PLFunction":
        return PLFunction(
            [Piece(p.lo, p.hi, op(p.f)) for p in self.pieces],
            {b: op(v) for b, v in self.points},
        )

    def restrict(self, domain: OpenSet1D) -> "PLFunction":
        pieces = []
        for p in self.pieces:
            for lo, hi in domain.intervals:
                a, b = max(p.lo, lo), min(p.hi, hi)
                if a < b:
                    pieces.append(Piece(a, b, p.f))
        pts = {b: v for b, v in self.points if b in domain}
        return PLFunction(pieces, pts)

    def then(self, outer: "PLFunction") -> "PLFunction":
        """The composite ``outer(self(x))`` on its natural (open) domain."""
        outer_ends = outer.breakpoints()
        pieces, pts = [], {}
        for p in self.pieces:
            A = p.f
            if A.slope == 0:
                c = A.intercept
                if outer.defined_at(c):
                    pieces.append(Piece(p.lo, p.hi, Affine.constant(outer(c))))
                continue
            cuts = sorted({(v - A.intercept) / A.slope for v in outer_ends} - {None})
            cuts = [x for x in cuts if p.lo < x < p.hi]
            bounds = [p.lo] + cuts + [p.hi]
            for a, b in zip(bounds, bounds[1:]):
                g = outer._piece_containing(A(_midpoint(a, b)))
                if g is not None:
                    pieces.append(Piece(a, b, g.after(A)))
            for x in cuts:
                y = A(x)
                if outer.defined_at(y):
                    pts[x] = outer(y)
        for b, v in self.points:
            if outer.defined_at(v):
                pts[b] = outer(v)
        return PLFunction(pieces, pts)

    def inverse(self) -> "PLFunction":
        """Inverse of an injective continuous PL map with nonzero slopes."""
        if not self.is_continuous():
            raise ValueError("only continuous PL maps are inverted")
        pieces, pts = [], {}
        for p in self.pieces:
            if p.f.slope == 0:
                raise ValueError("map is constant on a piece and not injective")
            a, b = p.f.image_of_end(p.lo), p.f.image_of_end(p.hi)
            lo, hi = (a, b) if a < b else (b, a)
            pieces.append(Piece(lo, hi, p.f.inverse()))
        for b, v in self.points:
            pts[v] = b
        try:
            inv = PLFunction(pieces, pts)
        except ValueError as exc:
            raise ValueError("map is not injective") from exc
        return inv

    def image(self) -> OpenSet1D:
        """Image of an injective continuous map (an open set)."""
        return self.inverse().domain()

    def is_injective(self) -> bool:
        try:
            self.inverse()
        except ValueError:
            return False
        return True

    # serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "domain": self.domain().to_json(),
            "pieces": [
                {
                    "from": format_endpoint(p.lo),
                    "to": format_endpoint(p.hi),
                    "slope": format_rational(p.f.slope),
                    "intercept": format_rational(p.f.intercept),
                }
                for p in self.pieces
            ],
            "points": [{"at": format_rational(b), "value": format_rational(v)} for b, v in self.points],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PLFunction":
        rows = [(parse_endpoint(p["from"]), parse_endpoint(p["to"]), p["slope"], p["intercept"]) for p in data["pieces"]]
        if "points" in data:
            pts = {q["at"]: q["value"] for q in data["points"]}
            return cls.from_pieces(rows, pts, fill_continuous=False)
        return cls.from_pieces(rows)


@dataclass(frozen=True)
class Germ1D:
    """Germ of a PL function at ``base``: the value there and the affine
    pieces immediately to the left and right (``None`` when absent)."""

    base: Fraction
    value: Optional[Fraction]
    left: Optional[Affine]
    right: Optional[Affine]

    @property
    def left_limit(self):
        return None if self.left is None else self.left(self.base)

    @property
    def right_limit(self):
        return None if self.right is None else self.right(self.base)

    def _zip(self, other, op):
        if self.base != other.base:
            raise ValueError("germs at different points")

        def pick(a, b):
            return None if a is None or b is None else op(a, b)

        return Germ1D(self.base, pick(self.value, other.value), pick(self.left, other.left), pick(self.right, other.right))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return Germ1D(
            self.base,
            None if self.value is None else -self.value,
            None if self.left is None else -self.left,
            None if self.right is None else -self.right,
        )

    def to_json(self) -> dict:
        def aff(a):
            return None if a is None else {"slope": format_rational(a.slope), "intercept": format_rational(a.intercept)}

        return {
            "base": format_rational(self.base),
            "value": None if self.value is None else format_rational(self.value),
            "left": aff(self.left),
            "right": aff(self.right),
        }


def pl_add(f: PLFunction, g: PLFunction) -> PLFunction:
    """Exact pointwise sum on the intersection of the two domains."""
    if f.domain().intersect(g.domain()).is_empty():
        raise EmptyIntersection("domains do not overlap")
    return f + g


def germ_at(f: PLFunction, x0) -> Germ1D:
    x0 = as_rational(x0)
    left, right = f.left_piece(x0), f.right_piece(x0)
    value = f(x0) if f.defined_at(x0) else None
    if left is None and right is None:
        raise NotInDomain(f"{format_rational(x0)} is not in the closure of the domain")
    return Germ1D(x0, value, left, right)


def is_cr_at(g: Germ1D, r: int) -> bool:
    """C^0 / C^1 test at the base point.

    Only the sides that are present are examined, so a germ defined on one
    side only is decided on that side alone.
    """
    if r not in (0, 1):
        raise ValueError("smoothness class must be 0 or 1")
    if g.value is None:
        return False
    for lim in (g.left_limit, g.right_limit):
        if lim is not None and lim != g.value:
            return False
    if r == 1 and g.left is not None and g.right is not None:
        return g.left.slope == g.right.slope
    return True


def positive_set(h: PLFunction) -> OpenSet1D:
    """``{x : h(x) > 0}`` as an open set."""
    out = []
    for p in h.pieces:
        s, c = p.f.slope, p.f.intercept
        if s == 0:
            if c > 0:
                out.append((p.lo, p.hi))
            continue
        root = -c / s
        if s > 0:
            lo, hi = max(p.lo, root), p.hi
        else:
            lo, hi = p.lo, min(p.hi, root)
        if lo < hi:
            out.append((lo, hi))
    dom = OpenSet1D(out)
    for b, v in h.points:
        if v > 0:
            dom = dom.join_at(b)
    return dom


def nonpositive_witness(h: PLFunction) -> Optional[Fraction]:
    """A short rational where ``h <= 0``, or ``None`` when ``h > 0`` throughout."""
    best = None
    for p in h.pieces:
        s, c = p.f.slope, p.f.intercept
        if s == 0:
            if c <= 0:
                cand = nice_point(p.lo, p.hi)
            else:
                continue
        else:
            root = -c / s
            if s > 0:
                lo, hi, lo_c, hi_c = p.lo, min(p.hi, root), False, root < p.hi
            else:
                lo, hi, lo_c, hi_c = max(p.lo, root), p.hi, root > p.lo, False
            if lo > hi or (lo == hi and not (lo_c and hi_c)):
                continue
            cand = nice_point(lo, hi, lo_c, hi_c)
        if best is None or (abs(cand), cand) < (abs(best), best):
            best = cand
    for b, v in h.points:
        if v <= 0 and (best is None or (abs(b), b) < (abs(best), best)):
            best = b
    return best


def germ_positive(a: Affine, x0, side: str) -> bool:
    """Is ``a > 0`` on a one-sided neighbourhood ``(x0-e, x0)`` or ``(x0, x0+e)``?"""
    v = a(x0)
    if v != 0:
        return v > 0
    return a.slope < 0 if side == "left" else a.slope > 0


def affine_positive_on(a: Affine, lo, hi) -> bool:
    """Is ``a > 0`` at every point of the open interval ``(lo, hi)``?"""
    if a.slope == 0:
        return a.intercept > 0
    for e, outward in ((lo, -1), (hi, 1)):
        if _is_finite(e):
            if a(e) < 0:
                return False
        elif a.slope * outward < 0:
            return False
    return True
