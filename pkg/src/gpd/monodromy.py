"""Pregroupoids, words in their universal groupoid M(W), and extensions.

The universal groupoid of a pregroupoid ``W`` is the free groupoid on the
letters of ``W`` modulo ``(u, v) = (uv)`` whenever ``uv`` is defined in ``W``.
Words are manipulated by contractions ``(u, v) -> (uv)`` and expansions
``(w) -> (u, v)``; identity letters may be deleted.

Two carriers are supported: a finite inverse-closed subset of a
:class:`FiniteGroupoid`, and the symbolic W of a quotient bundle model, whose
letters at a base point ``x`` are the window representatives ``u`` of
``q(x, u)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BaseMismatch, InvalidModel, NotComposable, NotPregroupoidMorphism
from .groupoid_core import FiniteGroupoid
from .pl_base import PLFunction, as_rational, format_rational


class Pregroupoid:
    """Finite carrier inside an ambient finite groupoid."""

    family = "finite"

    def __init__(self, ambient: FiniteGroupoid, carrier):
        self.ambient = ambient
        self.carrier = frozenset(carrier)
        G = ambient
        for x in G.objects:
            if G.identity(x) not in self.carrier:
                raise ValueError(f"carrier misses the identity at {x}")
        for u in self.carrier:
            if G.inverse(u) not in self.carrier:
                raise ValueError(f"carrier is not closed under inverse at {u}")

    @classmethod
    def whole(cls, G: FiniteGroupoid) -> "Pregroupoid":
        return cls(G, G.arrows)

    def letters(self):
        return sorted(self.carrier)

    def src(self, u):
        return self.ambient.src(u)

    def tgt(self, u):
        return self.ambient.tgt(u)

    def is_identity(self, u) -> bool:
        return self.ambient.is_identity(u)

    def inverse(self, u):
        return self.ambient.inverse(u)

    def product(self, u, v):
        """``uv`` if it is defined in the carrier, else ``None``."""
        G = self.ambient
        if not G.composable(u, v):
            return None
        uv = G.compose(u, v)
        return uv if uv in self.carrier else None

    def splittings(self, w):
        """Pairs ``(u, v)`` of non-identity letters with ``uv = w``."""
        out = []
        for u in self.letters():
            if self.src(u) != self.src(w) or self.is_identity(u):
                continue
            for v in self.letters():
                if not self.is_identity(v) and self.product(u, v) == w:
                    out.append((u, v))
        return out

    def ambient_product(self, word, base):
        return self.ambient.compose_word(list(word), base)


class BundlePregroupoid:
    """W of a quotient bundle model.  At a base point ``x`` the letters are
    the window representatives; under the model axioms ``q(x,u) q(x,v)`` lies
    in W exactly when ``u + v`` lies in the window."""

    family = "quotient_bundle"

    def __init__(self, model):
        self.model = model

    def in_carrier(self, x, u) -> bool:
        lo, hi = self.model.window(x)
        return lo < u < hi

    def is_identity(self, u) -> bool:
        return u == 0

    def inverse(self, u):
        return -u

    def product_at(self, x, u, v):
        s = u + v
        if not self.in_carrier(x, s):
            return None
        if self.model.representative(self.model.arrow(x, s)) != s:
            raise InvalidModel("window arithmetic disagrees with the ambient product")
        return s

    def ambient_product(self, word, base):
        return self.model.arrow(base, sum(word, Fraction(0)))

    def radius(self, x):
        lo, hi = self.model.window(x)
        return min(hi, -lo)


def pregroupoid_of(source):
    if isinstance(source, (Pregroupoid, BundlePregroupoid)):
        return source
    if isinstance(source, FiniteGroupoid):
        return Pregroupoid.whole(source)
    if getattr(source, "family", None) == "quotient_bundle":
        return BundlePregroupoid(source)
    raise TypeError(f"no pregroupoid for {type(source).__name__}")


@dataclass(frozen=True)
class MonodromyWord:
    base: object
    letters: tuple = ()
    reduced: bool = False

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self):
        return len(self.letters)

    def to_json(self) -> dict:
        def enc(v):
            return format_rational(v) if isinstance(v, Fraction) else v

        return {"base": enc(self.base), "letters": [enc(v) for v in self.letters]}


def word(P, base, letters) -> MonodromyWord:
    """Build a word and check that consecutive letters are composable."""
    P = pregroupoid_of(P)
    if P.family == "quotient_bundle":
        base = as_rational(base)
        letters = [as_rational(u) for u in letters]
        for u in letters:
            if not P.in_carrier(base, u):
                raise ValueError(f"{format_rational(u)} is not a letter of W at {format_rational(base)}")
        return MonodromyWord(base, letters)
    at = base
    for u in letters:
        if u not in P.carrier:
            raise ValueError(f"{u} is not in the carrier")
        if P.src(u) != at:
            raise NotComposable(f"{u} does not start at {at}")
        at = P.tgt(u)
    return MonodromyWord(base, letters)


def word_from_json(P, doc) -> MonodromyWord:
    return word(P, doc["base"], doc.get("letters", []))


def _product(P, base, u, v):
    if P.family == "quotient_bundle":
        return P.product_at(base, u, v)
    return P.product(u, v)


def mon_reduce(P, w: MonodromyWord) -> MonodromyWord:
    """Delete identities and contract the leftmost definable pair until no
    rule applies."""
    P = pregroupoid_of(P)
    letters = [u for u in w.letters if not P.is_identity(u)]
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            uv = _product(P, w.base, letters[i], letters[i + 1])
            if uv is not None:
                letters[i : i + 2] = [] if P.is_identity(uv) else [uv]
                changed = True
                break
    return MonodromyWord(w.base, letters, True)


# --------------------------------------------------------------------------
# equality


@dataclass(frozen=True)
class EqualityVerdict:
    verdict: str  # equal | distinct | unknown
    reason: str = ""
    certificate: dict = field(default_factory=dict)

    def to_json(self):
        return {"verdict": self.verdict, "reason": self.reason, "certificate": self.certificate}


def germ_sum(w: MonodromyWord) -> Fraction:
    """Sum of the window representatives of a bundle word."""
    return sum(w.letters, Fraction(0))


def bundle_normal_form(P: BundlePregroupoid, w: MonodromyWord):
    """Rewrite ``w`` into ``(c, ..., c)`` with ``c = S/m`` depending only on
    the germ sum ``S``.  Every step is a single contraction or expansion
    checked against the carrier; returns the normal form and the step count.
    """
    x = w.base
    eps = P.radius(x) / 4
    steps = 0

    def contract(a, b):
        nonlocal steps
        ab = P.product_at(x, a, b)
        if ab is None:
            raise AssertionError("contraction left the carrier")
        steps += 1
        return ab

    def expand(a, first):
        nonlocal steps
        rest = a - first
        if not (P.in_carrier(x, first) and P.in_carrier(x, rest)) or P.product_at(x, first, rest) != a:
            raise AssertionError("expansion left the carrier")
        steps += 1
        return first, rest

    # split into letters of size at most eps
    tiny = []
    for u in w.letters:
        k = max(1, math.ceil(abs(u) / eps))
        piece, rest = u / k, u
        for _ in range(k - 1):
            first, rest = expand(rest, piece)
            tiny.append(first)
        tiny.append(rest)
    tiny = [u for u in tiny if u != 0]
    # cancel neighbours of opposite sign
    i = 0
    while i < len(tiny) - 1:
        a, b = tiny[i], tiny[i + 1]
        if a * b < 0:
            tiny[i : i + 2] = [s for s in [contract(a, b)] if s != 0]
            i = max(i - 1, 0)
        else:
            i += 1
    total = sum(tiny, Fraction(0))
    if total == 0:
        return MonodromyWord(x, (), True), steps
    m = math.ceil(abs(total) / eps)
    c = total / m
    out, acc = [], None
    for u in tiny:
        acc = u if acc is None else contract(acc, u)
        while acc is not None and abs(acc) >= abs(c):
            if acc == c:
                out.append(c)
                acc = None
            else:
                first, acc = expand(acc, c)
                out.append(first)
    if acc is not None or len(out) != m:
        raise AssertionError("normal form did not close up")
    return MonodromyWord(x, tuple(out), True), steps


def _rewrites(P, w: MonodromyWord, max_len: int):
    letters = w.letters
    for i in range(len(letters) - 1):
        uv = P.product(letters[i], letters[i + 1])
        if uv is not None:
            yield letters[:i] + (() if P.is_identity(uv) else (uv,)) + letters[i + 2 :]
    if len(letters) < max_len:
        for i, u in enumerate(letters):
            for a, b in P.splittings(u):
                yield letters[:i] + (a, b) + letters[i + 1 :]
        # insert a cancelling pair (v, v^-1)
        if len(letters) + 2 <= max_len:
            at_obj = [w.base] + [P.tgt(u) for u in letters]
            for i, obj in enumerate(at_obj):
                for v in P.letters():
                    if P.src(v) == obj and not P.is_identity(v):
                        yield letters[:i] + (v, P.inverse(v)) + letters[i:]


def mon_equal(P, a: MonodromyWord, b: MonodromyWord, depth: int = 4) -> EqualityVerdict:
    P = pregroupoid_of(P)
    if a.base != b.base:
        raise BaseMismatch(f"words based at {a.base} and {b.base}")
    pa, pb = P.ambient_product(a.letters, a.base), P.ambient_product(b.letters, b.base)
    if pa != pb:
        return EqualityVerdict("distinct", "ambient products differ", {"left": _enc(pa), "right": _enc(pb)})
    if P.family == "quotient_bundle":
        sa, sb = germ_sum(a), germ_sum(b)
        if sa != sb:
            return EqualityVerdict(
                "distinct", "germ sums differ", {"left": format_rational(sa), "right": format_rational(sb)}
            )
        na, ka = bundle_normal_form(P, a)
        nb, kb = bundle_normal_form(P, b)
        if na != nb:
            raise AssertionError("equal germ sums gave different normal forms")
        return EqualityVerdict(
            "equal",
            "common normal form",
            {"normal_form": na.to_json(), "steps": ka + kb, "germ_sum": format_rational(sa)},
        )
    ra, rb = mon_reduce(P, a).letters, mon_reduce(P, b).letters
    if ra == rb:
        return EqualityVerdict("equal", "common reduced form", {"reduced": list(ra)})
    max_len = max(len(ra), len(rb)) + 2
    seen = [{ra: 0}, {rb: 0}]
    frontiers = [deque([ra]), deque([rb])]
    for step in range(depth):
        side = step % 2
        nxt = deque()
        for cur in frontiers[side]:
            for nw in _rewrites(P, MonodromyWord(a.base, cur), max_len):
                if nw in seen[1 - side]:
                    return EqualityVerdict("equal", "rewrite search met", {"meeting_word": list(nw), "depth": step + 1})
                if nw not in seen[side]:
                    seen[side][nw] = step + 1
                    nxt.append(nw)
        frontiers[side] = nxt
    return EqualityVerdict(
        "unknown", "search exhausted", {"depth": depth, "explored": len(seen[0]) + len(seen[1])}
    )


def _enc(v):
    return v.to_json() if hasattr(v, "to_json") else v


# --------------------------------------------------------------------------
# extension of pregroupoid morphisms


@dataclass
class MonodromyExtension:
    """The extension ``M(W) -> K`` of a pregroupoid morphism."""

    P: object
    letter_map: object
    target: object = None

    def letter(self, u):
        if callable(self.letter_map):
            return self.letter_map(u)
        return self.letter_map[u]

    def __call__(self, w: MonodromyWord):
        if self.P.family == "quotient_bundle":
            return sum((self.letter(u) for u in w.letters), Fraction(0))
        K = self.target
        if not w.letters:
            return K.identity(self.object_of(w.base))
        return K.compose_word([self.letter(u) for u in w.letters])

    def object_of(self, x):
        K, P = self.target, self.P
        return K.src(self.letter(P.ambient.identity(x)))


def mon_extend(P, f, K=None) -> MonodromyExtension:
    """Extend a pregroupoid morphism ``f: W -> K`` to ``M(W) -> K``.

    Finite carriers: ``f`` maps carrier ids to arrow ids of the finite
    groupoid ``K`` and is verified on every defined product.  Bundle W:
    ``f`` is a PL function of the window coordinate with values in the
    additive fibre of the trivial bundle; it is a morphism iff it is linear.
    """
    P = pregroupoid_of(P)
    if P.family == "quotient_bundle":
        return _extend_bundle(P, f)
    G = P.ambient
    for u in P.letters():
        if u not in f:
            raise NotPregroupoidMorphism(f"{u} has no image", witness={"letter": u})
    obj = {}
    for x in G.objects:
        e = f[G.identity(x)]
        if not K.is_identity(e):
            raise NotPregroupoidMorphism(f"identity at {x} is not sent to an identity", witness={"object": x})
        obj[x] = K.src(e)
    for u in P.letters():
        if K.src(f[u]) != obj[P.src(u)] or K.tgt(f[u]) != obj[P.tgt(u)]:
            raise NotPregroupoidMorphism(f"{u} is sent to a misanchored arrow", witness={"letter": u})
    for u in P.letters():
        for v in P.letters():
            uv = P.product(u, v)
            if uv is not None and f[uv] != K.compose(f[u], f[v]):
                raise NotPregroupoidMorphism(
                    f"f({u}*{v}) = f({uv}) differs from f({u})*f({v})", witness={"pair": [u, v], "product": uv}
                )
    return MonodromyExtension(P, dict(f), K)


def _extend_bundle(P: BundlePregroupoid, f) -> MonodromyExtension:
    if f == "lift":
        f = PLFunction.identity()
    if not isinstance(f, PLFunction):
        raise TypeError("bundle letter maps are PL functions of the window coordinate")
    pieces = f.pieces
    slopes = {p.f.slope for p in pieces}
    if f.breakpoints() or len(slopes) != 1 or any(p.f.intercept != 0 for p in pieces):
        # locate a violating pair u, v with u + v in the window
        x = Fraction(0)
        r = P.radius(x)
        grid = [Fraction(k, 16) * r for k in range(-15, 16)]
        for u in grid:
            for v in grid:
                s = P.product_at(x, u, v)
                if s is not None and f.defined_at(u) and f.defined_at(v) and f.defined_at(s):
                    if f(s) != f(u) + f(v):
                        raise NotPregroupoidMorphism(
                            "letter map is not additive",
                            witness={"pair": [format_rational(u), format_rational(v)]},
                        )
        raise NotPregroupoidMorphism("letter map is not linear", witness={"breakpoints": [format_rational(b) for b in f.breakpoints()]})
    return MonodromyExtension(P, f, "F")


# --------------------------------------------------------------------------
# stars


def winding_word(P: BundlePregroupoid, x, k: int) -> MonodromyWord:
    """``k`` turns around the fibre circle at ``x`` spelled with letters of
    size at most half the window radius."""
    x = as_rational(x)
    n = P.model.n(x)
    if n == 0 or k == 0:
        return MonodromyWord(x, ())
    count = 1
    while n / count > P.radius(x) / 2:
        count += 1
    step = n / count if k > 0 else -n / count
    return MonodromyWord(x, (step,) * (count * abs(k)))


def star_projection_check(source, x, depth: int = 3) -> dict:
    """Evidence that ``M -> G`` is a covering on the star at ``x``."""
    P = pregroupoid_of(source)
    if P.family == "quotient_bundle":
        return _bundle_star(P, as_rational(x))
    return _finite_star(P, x, depth)


def _bundle_star(P: BundlePregroupoid, x) -> dict:
    from .models import generation_factors

    m = P.model
    n = m.n(x)
    targets = [Fraction(k, 8) for k in range(-12, 13)]
    hit = 0
    for t in targets:
        factors = generation_factors(m, x, t) or []
        letters = [m.representative(a) for a in factors]
        w = MonodromyWord(x, letters)
        if P.ambient_product(w.letters, x) == m.arrow(x, t):
            hit += 1
    words = {k: winding_word(P, x, k) for k in range(-3, 4)}
    ident = m.identity(x)
    over_identity = all(P.ambient_product(w.letters, x) == ident for w in words.values())
    verdicts = {}
    for i in range(-3, 4):
        for j in range(i + 1, 4):
            verdicts[(i, j)] = mon_equal(P, words[i], words[j]).verdict
    distinct = all(v == "distinct" for v in verdicts.values())
    report = {
        "base": format_rational(x),
        "surjective_on_samples": hit == len(targets),
        "samples": len(targets),
        "winding_letters": {str(k): len(w) for k, w in words.items()},
        "winding_over_identity": over_identity,
    }
    if n == 0:
        report.update({"fiber_over_identity": "trivial", "bijective": hit == len(targets), "pairwise_distinct": None})
    else:
        report.update(
            {
                "fiber_over_identity": "Z",
                "bijective": False,
                "pairwise_distinct": distinct,
                "germ_sums": {str(k): format_rational(germ_sum(w)) for k, w in words.items()},
            }
        )
    return report


def _finite_star(P: Pregroupoid, x, depth: int) -> dict:
    G = P.ambient
    words = {(): None}
    frontier = [((), x)]
    for _ in range(depth):
        nxt = []
        for letters, at in frontier:
            for u in P.letters():
                if P.src(u) == at and not P.is_identity(u):
                    nw = letters + (u,)
                    if nw not in words:
                        words[nw] = None
                        nxt.append((nw, P.tgt(u)))
        frontier = nxt
    fibers = {}
    for letters in words:
        g = P.ambient_product(letters, x)
        fibers.setdefault(g, []).append(MonodromyWord(x, letters))
    star = G.star(x)
    surjective = set(fibers) == set(star)
    collapsed, unknown = True, 0
    for g, ws in fibers.items():
        head = ws[0]
        for other in ws[1:]:
            v = mon_equal(P, head, other, depth=6).verdict
            if v != "equal":
                collapsed = False
                unknown += v == "unknown"
    return {
        "base": x,
        "surjective": surjective,
        "star_size": len(star),
        "words_checked": len(words),
        "bijective": surjective and collapsed,
        "unresolved_pairs": unknown,
    }
