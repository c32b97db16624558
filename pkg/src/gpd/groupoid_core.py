"""Finite groupoids given by explicit tables.

Composition follows the diagrammatic convention: ``compose(g, h)`` is defined
iff ``tgt(g) == src(h)`` and then runs from ``src(g)`` to ``tgt(h)``.
Identities are ordinary arrows flagged as identities; objects and arrows are
opaque strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import NotComposable, NotNormal, UnknownArrow, UnknownObject


@dataclass(frozen=True)
class Arrow:
    id: str
    src: str
    tgt: str


class FiniteGroupoid:
    def __init__(self, objects, arrows, compose, identity, inverse):
        self.objects = tuple(objects)
        self._arrows = {a.id: a for a in arrows}
        self._compose = dict(compose)
        self._identity = dict(identity)
        self._inverse = dict(inverse)
        self._identity_ids = frozenset(self._identity.values())

    # --- construction --------------------------------------------------

    @classmethod
    def from_multiplication(cls, objects, arrows: Iterable[Arrow], mult) -> "FiniteGroupoid":
        """Tabulate ``mult(g, h)`` over every composable pair; identities and
        inverses are found by search."""
        arrows = list(arrows)
        table = {}
        for g in arrows:
            for h in arrows:
                if g.tgt == h.src:
                    table[(g.id, h.id)] = mult(g.id, h.id)
        identity = {}
        for x in objects:
            for a in arrows:
                if a.src == x and a.tgt == x and all(
                    table[(a.id, h.id)] == h.id for h in arrows if h.src == x
                ):
                    identity[x] = a.id
                    break
            else:
                raise ValueError(f"no identity at {x}")
        inverse = {}
        for g in arrows:
            for h in arrows:
                if g.tgt == h.src and h.tgt == g.src and table[(g.id, h.id)] == identity[g.src]:
                    inverse[g.id] = h.id
                    break
            else:
                raise ValueError(f"{g.id} has no inverse")
        return cls(objects, arrows, table, identity, inverse)

    @classmethod
    def cyclic_group(cls, m: int, obj: str = "*") -> "FiniteGroupoid":
        """The group Z/m as a one-object groupoid; arrow ids are residues."""
        arrows = [Arrow(str(k), obj, obj) for k in range(m)]
        return cls.from_multiplication([obj], arrows, lambda g, h: str((int(g) + int(h)) % m))

    @classmethod
    def pair_groupoid(cls, objects) -> "FiniteGroupoid":
        objects = list(objects)
        arrows = [Arrow(f"{a}>{b}", a, b) for a in objects for b in objects]
        src = {a.id: a.src for a in arrows}

        def mult(g, h):
            return f"{src[g]}>{h.split('>', 1)[1]}"

        return cls.from_multiplication(objects, arrows, mult)

    @classmethod
    def transitive(cls, objects, m: int) -> "FiniteGroupoid":
        """Pair groupoid on ``objects`` times the group Z/m.

        Arrow ``a>b:k`` composes as ``(a>b:k)(b>c:l) = a>c:(k+l)``.
        """
        objects = list(objects)
        arrows = [Arrow(f"{a}>{b}:{k}", a, b) for a in objects for b in objects for k in range(m)]
        parts = {a.id: (a.src, a.tgt, int(a.id.rsplit(":", 1)[1])) for a in arrows}

        def mult(g, h):
            a, _, k = parts[g]
            _, c, l = parts[h]
            return f"{a}>{c}:{(k + l) % m}"

        return cls.from_multiplication(objects, arrows, mult)

    # --- accessors -----------------------------------------------------

    @property
    def arrows(self) -> tuple:
        return tuple(sorted(self._arrows))

    def arrow(self, g: str) -> Arrow:
        try:
            return self._arrows[g]
        except KeyError:
            raise UnknownArrow(g) from None

    def src(self, g: str) -> str:
        return self.arrow(g).src

    def tgt(self, g: str) -> str:
        return self.arrow(g).tgt

    def identity(self, x: str) -> str:
        try:
            return self._identity[x]
        except KeyError:
            raise UnknownObject(x) from None

    def is_identity(self, g: str) -> bool:
        return g in self._identity_ids

    def inverse(self, g: str) -> str:
        self.arrow(g)
        return self._inverse[g]

    def compose(self, g: str, h: str) -> str:
        if self.tgt(g) != self.src(h):
            raise NotComposable(f"tgt({g}) != src({h})")
        return self._compose[(g, h)]

    def composable(self, g: str, h: str) -> bool:
        return self.tgt(g) == self.src(h)

    def compose_word(self, word, base=None) -> str:
        """Product of a (possibly empty) composable word; ``base`` gives the
        identity for the empty word."""
        if not word:
            return self.identity(base)
        out = word[0]
        for g in word[1:]:
            out = self.compose(out, g)
        return out

    def star(self, x: str) -> frozenset:
        if x not in self.objects:
            raise UnknownObject(x)
        return frozenset(a.id for a in self._arrows.values() if a.src == x)

    def vertex_group(self, x: str) -> frozenset:
        return frozenset(g for g in self.star(x) if self.tgt(g) == x)

    def hom(self, x: str, y: str) -> list:
        return sorted(a.id for a in self._arrows.values() if a.src == x and a.tgt == y)

    def is_equivalence_relation(self) -> bool:
        anchors = [(a.src, a.tgt) for a in self._arrows.values()]
        return len(anchors) == len(set(anchors))

    def audit(self) -> list:
        """Exhaustive groupoid-axiom audit; returns violations (empty if none)."""
        bad = []
        ids = list(self._arrows)
        for g in ids:
            x, y = self.src(g), self.tgt(g)
            if self.compose(self.identity(x), g) != g or self.compose(g, self.identity(y)) != g:
                bad.append(("identity", g))
            gi = self.inverse(g)
            if self.compose(g, gi) != self.identity(x) or self.compose(gi, g) != self.identity(y):
                bad.append(("inverse", g))
        for (g, h), gh in self._compose.items():
            if self.src(gh) != self.src(g) or self.tgt(gh) != self.tgt(h):
                bad.append(("anchor", g, h))
        for g, h, k in itertools.product(ids, repeat=3):
            if self.composable(g, h) and self.composable(h, k):
                if self.compose(self.compose(g, h), k) != self.compose(g, self.compose(h, k)):
                    bad.append(("associativity", g, h, k))
        return bad

    # --- interchange ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "arrows": [
                dict({"id": a.id, "src": a.src, "tgt": a.tgt}, **({"identity": True} if a.id in self._identity_ids else {}))
                for a in sorted(self._arrows.values(), key=lambda a: a.id)
            ],
            "compose": [[g, h, gh] for (g, h), gh in sorted(self._compose.items())],
            "inverses": [[g, gi] for g, gi in sorted(self._inverse.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteGroupoid":
        arrows = [Arrow(a["id"], a["src"], a["tgt"]) for a in data["arrows"]]
        identity = {a["src"]: a["id"] for a in data["arrows"] if a.get("identity")}
        compose = {(g, h): gh for g, h, gh in data["compose"]}
        inverse = {g: gi for g, gi in data["inverses"]}
        return cls(data["objects"], arrows, compose, identity, inverse)

    def __eq__(self, other):
        return isinstance(other, FiniteGroupoid) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"FiniteGroupoid({len(self.objects)} objects, {len(self._arrows)} arrows)"


@dataclass(frozen=True)
class NormalSubgroupoid:
    parent: FiniteGroupoid
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))

    def check(self):
        """Raise :class:`NotNormal` with a witness unless normal, wide and
        contained in the vertex groups."""
        G, N = self.parent, self.members
        for x in G.objects:
            if G.identity(x) not in N:
                raise NotNormal(f"identity of {x} missing", witness=("identity", x))
        for n in N:
            if G.src(n) != G.tgt(n):
                raise NotNormal(f"{n} is not a loop", witness=("loop", n))
            if G.inverse(n) not in N:
                raise NotNormal(f"inverse of {n} missing", witness=("inverse", n))
        for n, m in itertools.product(N, repeat=2):
            if G.composable(n, m) and G.compose(n, m) not in N:
                raise NotNormal(f"{n}{m} escapes", witness=("product", n, m))
        for n in N:
            for g in G.arrows:
                if G.tgt(g) == G.src(n):
                    conj = G.compose(G.compose(g, n), G.inverse(g))
                    if conj not in N:
                        raise NotNormal(f"conjugate of {n} by {g} escapes", witness=("conjugate", g, n, conj))
        return self


@dataclass
class GroupoidMorphism:
    domain: FiniteGroupoid
    codomain: FiniteGroupoid
    object_map: dict
    arrow_map: dict = field(default_factory=dict)

    def __call__(self, g: str) -> str:
        return self.arrow_map[g]

    def violations(self) -> list:
        A, B, f = self.domain, self.codomain, self.arrow_map
        bad = []
        for g in A.arrows:
            if B.src(f[g]) != self.object_map[A.src(g)] or B.tgt(f[g]) != self.object_map[A.tgt(g)]:
                bad.append(("anchor", g))
        for x in A.objects:
            if f[A.identity(x)] != B.identity(self.object_map[x]):
                bad.append(("identity", x))
        for g in A.arrows:
            for h in A.arrows:
                if A.composable(g, h) and f[A.compose(g, h)] != B.compose(f[g], f[h]):
                    bad.append(("composition", g, h))
        return bad

    def is_morphism(self) -> bool:
        return not self.violations()


def compose(G: FiniteGroupoid, g: str, h: str) -> str:
    return G.compose(g, h)


def star(G: FiniteGroupoid, x: str) -> frozenset:
    return G.star(x)


def is_equivalence_relation(G: FiniteGroupoid) -> bool:
    return G.is_equivalence_relation()


def quotient(G: FiniteGroupoid, N: NormalSubgroupoid):
    """``G/N`` together with the projection, which is the identity on objects.

    Classes are cosets ``gN``; each is named by its least member.
    """
    if N.parent is not G:
        raise ValueError("subgroupoid of a different groupoid")
    N.check()
    rep = {}
    for g in G.arrows:
        y = G.tgt(g)
        coset = sorted(G.compose(g, n) for n in N.members if G.src(n) == y)
        rep[g] = coset[0]
    classes = sorted(set(rep.values()))
    arrows = [Arrow(f"[{c}]", G.src(c), G.tgt(c)) for c in classes]

    def mult(a, b):
        return f"[{rep[G.compose(a[1:-1], b[1:-1])]}]"

    Q = FiniteGroupoid.from_multiplication(G.objects, arrows, mult)
    proj = GroupoidMorphism(G, Q, {x: x for x in G.objects}, {g: f"[{rep[g]}]" for g in G.arrows})
    return Q, proj
