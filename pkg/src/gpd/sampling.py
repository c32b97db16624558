"""Seeded random generators of rationals, PL functions, sections and words."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import EmptyDomain
from .pl_base import INF, NEG_INF, OpenSet1D, Piece, Affine, PLFunction
from .sections import (
    SectionWord,
    bundle_section,
    edge_section,
    ehresmann_product,
)

DENOM = 16
SPAN = Fraction(2)


def random_rational(rng: random.Random, lo, hi, denom: int = DENOM) -> Fraction:
    """Uniform on the grid ``Z/denom`` strictly inside ``(lo, hi)``."""
    lo = max(lo, -SPAN * 4) if lo == NEG_INF else lo
    hi = min(hi, SPAN * 4) if hi == INF else hi
    a = math.floor(Fraction(lo) * denom) + 1
    b = math.ceil(Fraction(hi) * denom) - 1
    if a > b:
        return (Fraction(lo) + Fraction(hi)) / 2
    return Fraction(rng.randint(a, b), denom)


def random_interval(rng: random.Random, lo=-SPAN, hi=SPAN):
    a = random_rational(rng, lo, hi)
    b = random_rational(rng, lo, hi)
    while a == b:
        b = random_rational(rng, lo, hi)
    return min(a, b), max(a, b)


def random_pl(rng: random.Random, lo, hi, vlo, vhi, max_pieces: int = 3) -> PLFunction:
    """Continuous PL function on ``(lo, hi)`` with node values in ``(vlo, vhi)``."""
    k = rng.randint(1, max_pieces)
    cuts = sorted({random_rational(rng, lo, hi, 64) for _ in range(k - 1)})
    nodes = [Fraction(lo)] + cuts + [Fraction(hi)]
    values = [random_rational(rng, vlo, vhi, 64) for _ in nodes]
    pieces, points = [], {}
    for (a, fa), (b, fb) in zip(zip(nodes, values), zip(nodes[1:], values[1:])):
        slope = (fb - fa) / (b - a)
        pieces.append(Piece(a, b, Affine(slope, fa - slope * a)))
    for c, v in zip(cuts, values[1:-1]):
        points[c] = v
    return PLFunction(pieces, points)


def _window_radius(m, lo, hi) -> Fraction:
    probes = [lo, hi] + [b for b in m.lower.breakpoints() + m.upper.breakpoints() if lo < b < hi]
    r = min(min(m.upper(x), -m.lower(x)) for x in probes)
    return r


def random_bundle_section(m, rng: random.Random, procedure: bool = False) -> SectionWord:
    lo, hi = random_interval(rng)
    if procedure:
        r = _window_radius(m, lo, hi) / 2
        f = random_pl(rng, lo, hi, -r, r)
    else:
        f = random_pl(rng, lo, hi, -2, 2)
    return bundle_section(m, f)


def random_chart_section(model, rng: random.Random, chart=None) -> SectionWord:
    edges = model.edges if chart is None else model.edges_from(chart)
    e = rng.choice(list(edges))
    dom = e.map.domain()
    lo, hi = dom.intervals[0]
    a, b = random_interval(rng, max(lo, -SPAN), min(hi, SPAN))
    return edge_section(model, e.id, OpenSet1D.interval(a, b))


def random_word(model, rng: random.Random, length: int, procedure: bool = False, tries: int = 50) -> SectionWord:
    """Random product of ``length`` sections with nonempty domain."""
    bundle = model.family == "quotient_bundle"
    for _ in range(tries):
        try:
            if bundle:
                out = random_bundle_section(model, rng, procedure)
                for _ in range(length - 1):
                    out = ehresmann_product(out, random_bundle_section(model, rng, procedure))
            else:
                out = random_chart_section(model, rng)
                for _ in range(length - 1):
                    out = ehresmann_product(out, random_chart_section(model, rng, out.cache.tgt))
            return out
        except EmptyDomain:
            continue
    raise EmptyDomain("could not draw a composable word")
