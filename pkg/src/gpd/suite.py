"""Reproduction harness: every acceptance check as a function returning a row."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .errors import OutOfOverlap
from .groupoid_core import FiniteGroupoid
from .holonomy import (
    HolClass,
    GermClass,
    chart_transition,
    hol_equal,
    in_j0,
    is_extendible,
    kernel_at,
    left_translate,
    underlying_arrow,
    normality_audit,
)
from .models import (
    MUTATIONS,
    ChartPoint,
    EdgePoint,
    build_mobius,
    build_pradines_1,
    build_pradines_2,
    check_axioms,
    mutation,
)
from .monodromy import (
    MonodromyWord,
    Pregroupoid,
    mon_equal,
    mon_extend,
    star_projection_check,
)
from .pl_base import format_rational
from .sampling import random_rational, random_word
from .sections import (
    constant_section,
    ehresmann_product,
    is_continuous_at,
    is_local_procedure,
    section_inverse,
)

EIGHTH = Fraction(1, 8)


@dataclass
class Row:
    id: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"id": self.id, "title": self.title, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    rows: list
    seed: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self):
        return {
            "verdict": self.passed,
            "seed": self.seed,
            "engine": __version__,
            "criteria": [r.to_json() for r in self.rows],
        }

    def table(self) -> str:
        lines = [f"{'#':>2}  {'result':6}  criterion"]
        for r in self.rows:
            lines.append(f"{r.id:>2}  {'PASS' if r.passed else 'FAIL':6}  {r.title}")
        return "\n".join(lines)


# --------------------------------------------------------------------------


def eightfold_s(model, x0=0) -> HolClass:
    return HolClass(GermClass(constant_section(model, EIGHTH).power(8), x0))


def check_kernel_example(width=None) -> Row:
    m = build_pradines_1() if width is None else build_pradines_1(width=Fraction(width))
    axioms = check_axioms(m)
    kd = kernel_at(m, 0)
    gen_ok = False
    if kd.generator is not None:
        word = kd.generator.germ.word
        letters = {e.cache for e in word.entries}
        gen_ok = (
            len(word) == 8
            and len(letters) == 1
            and all(v == EIGHTH for v in (e.cache(0) for e in word.entries))
            and hol_equal(kd.generator, eightfold_s(m))
        )
    trivial = {format_rational(Fraction(x)): kernel_at(m, x).kind for x in ("-2", "-1/2", "1/3", "5")}
    ok = axioms.ok and kd.kind == "Z" and gen_ok and all(k == "trivial" for k in trivial.values())
    return Row(
        1,
        "kernel of pradines-1 is Z at 0 (8-fold s) and trivial elsewhere",
        ok,
        {"axioms": axioms.ok, "at_0": kd.kind, "generator_is_8s": gen_ok, "elsewhere": trivial},
    )


def check_non_extendible() -> Row:
    m = build_pradines_1()
    ext = is_extendible(m)
    at_zero = ext.witness is not None and ext.witness["germ"]["point"] == "0"
    s9 = constant_section(m, EIGHTH).power(9)
    proc0 = is_local_procedure(s9, 0)
    cont0 = is_continuous_at(s9, 0)
    samples = [Fraction(k, 4) for k in range(-12, 13) if k != 0]
    off_zero = {format_rational(x): is_continuous_at(s9, x).ok for x in samples}
    positive = all(is_local_procedure(s9, x).ok for x in samples if x > 0)
    ok = (not ext.ok) and at_zero and not proc0.ok and not cont0.ok and all(off_zero.values()) and positive
    return Row(
        2,
        "pradines-1 is not extendible; 9s fails only at 0",
        ok,
        {
            "extendible": ext.ok,
            "witness_at_0": at_zero,
            "9s_procedure_at_0": proc0.ok,
            "9s_continuous_at_0": cont0.ok,
            "9s_continuous_off_0": all(off_zero.values()),
            "9s_procedure_for_x_gt_0": positive,
        },
    )


def check_smoothness_dichotomy() -> Row:
    m0 = build_pradines_2(smoothness=0)
    m1 = build_pradines_2(smoothness=1)
    e0, e1 = is_extendible(m0), is_extendible(m1)
    reason = e1.witness["reason"] if e1.witness else {}
    kink = isinstance(reason, dict) and reason.get("no_representative") == "slope"
    at_zero = e1.witness is not None and e1.witness["germ"]["point"] == "0"
    k1 = kernel_at(m1, 0)
    ok = e0.ok and not e1.ok and kink and at_zero and k1.kind == "Z"
    return Row(
        3,
        "pradines-2 extends at r=0, not at r=1 (slope kink), kernel Z at r=1",
        ok,
        {"r0": e0.ok, "r1": e1.ok, "slope_kink": kink, "kernel_r1": k1.kind},
    )


def check_stars() -> Row:
    m = build_pradines_1()
    ts = [Fraction(k, 8) for k in range(-16, 17)]
    left = all(m.star_equal(-1, t, u) == (t == u) for t in ts for u in ts)
    right = all(m.star_equal(1, t, t + 1) and not m.star_equal(1, t, t + Fraction(1, 2)) for t in ts)
    return Row(4, "stars of pradines-1: R at -1, R/Z at 1", left and right, {"star_-1": left, "star_1": right})


def check_mobius_kernel() -> Row:
    mo = build_mobius()
    p = ChartPoint("A", Fraction(0))
    kd = kernel_at(mo, p, depth=4)
    square = kd.generator * kd.generator if kd.generator else None
    sq_in_j0 = bool(square is not None and in_j0(square.germ))
    ok = kd.kind == "Z/2" and sq_in_j0
    return Row(5, "Moebius kernel at the core point is Z/2 within loop depth 4", ok, {"kind": kd.kind, "square_in_J0": sq_in_j0})


def _laws_hold(word, rng) -> bool:
    inv = section_inverse(word)
    a = ehresmann_product(ehresmann_product(word, inv), word)
    b = ehresmann_product(ehresmann_product(inv, word), inv)
    if a.cache != word.cache or b.cache != inv.cache:
        return False
    model = word.model
    for _ in range(3):
        lo, hi = word.domain.intervals[0]
        y = random_rational(rng, lo, hi, 256)
        x = y if model.family == "quotient_bundle" else ChartPoint(word.cache.src, y)
        if word.defined_at(x) and a(x) != word(x):
            return False
    return True


def check_inverse_monoid(seed: int, count: int = 500) -> Row:
    rng = random.Random(seed)
    failures = {}
    for name, m in (("pradines-1", build_pradines_1()), ("pradines-2", build_pradines_2()), ("mobius", build_mobius())):
        bad = 0
        for _ in range(count):
            w = random_word(m, rng, rng.randint(1, 4))
            bad += not _laws_hold(w, rng)
        failures[name] = bad
    return Row(6, f"inverse-monoid laws on {count} random words per model", sum(failures.values()) == 0, {"failures": failures})


def check_normality(seed: int, samples: int = 200) -> Row:
    out = {}
    for name, m in (("pradines-1", build_pradines_1()), ("pradines-2", build_pradines_2()), ("mobius", build_mobius())):
        out[name] = normality_audit(m, samples, seed)["failures"]
    return Row(7, f"J_0 normality audit, {samples} samples per model", sum(out.values()) == 0, {"failures": out})


def _bundle_candidate(m, f, g, rng):
    dom = f.domain.intersect(g.domain)
    lo, hi = dom.intervals[rng.randrange(len(dom.intervals))]
    x = random_rational(rng, lo, hi, 256)
    lo_w, hi_w = m.window(x)
    d = g.cache(x) - f.cache(x)
    a, b = max(lo_w, lo_w - d), min(hi_w, hi_w - d)
    if a >= b:
        return None
    return m.arrow(x, random_rational(rng, a, b, 256))


def _chart_candidate(mo, f, g, rng):
    lo, hi = g.domain.intervals[0]
    y = random_rational(rng, lo, hi, 256)
    p = g.target(ChartPoint(g.cache.src, y))
    edges = [e for e in mo.edges_from(p.chart) if e.map.defined_at(p.y)]
    return EdgePoint(rng.choice(edges).id, p.y)


def _draw_pair(m, rng):
    f = random_word(m, rng, rng.randint(1, 2), procedure=True)
    if m.family == "quotient_bundle":
        g = random_word(m, rng, rng.randint(1, 2), procedure=True)
        return (f, g) if not f.domain.intersect(g.domain).is_empty() else None
    g = random_word(m, rng, rng.randint(1, 2), procedure=True)
    return (f, g) if g.cache.src == f.cache.src else None


def check_transitions(seed: int, pairs: int = 50, points: int = 10) -> Row:
    """Points outside the overlap of the two charts are redrawn; a pair
    without ``points`` usable points within the attempt budget is replaced."""
    rng = random.Random(seed)
    stats = {}
    for name, m in (("pradines-1", build_pradines_1()), ("mobius", build_mobius())):
        agree = mismatch = redrawn = 0
        done = 0
        candidate = _bundle_candidate if m.family == "quotient_bundle" else _chart_candidate
        while done < pairs:
            fg = _draw_pair(m, rng)
            if fg is None:
                continue
            f, g = fg
            results = []
            for _ in range(40 * points):
                if len(results) == points:
                    break
                w = candidate(m, f, g, rng)
                if w is None:
                    continue
                try:
                    via_charts = chart_transition(f, g, w)
                except OutOfOverlap:
                    redrawn += 1
                    continue
                direct = left_translate(ehresmann_product(section_inverse(f), g), w)
                results.append(direct == underlying_arrow(m, via_charts))
            if len(results) < points:
                continue
            done += 1
            agree += sum(results)
            mismatch += len(results) - sum(results)
        stats[name] = {"agree": agree, "mismatch": mismatch, "redrawn_outside_overlap": redrawn}
    ok = all(s["mismatch"] == 0 and s["agree"] == pairs * points for s in stats.values())
    return Row(8, f"chart transitions equal left translation ({pairs} pairs x {points} points)", ok, stats)


# --------------------------------------------------------------------------
# monodromy oracle


def random_pregroupoid(rng: random.Random):
    shape = rng.choice("123")
    if shape == "1":
        objs, m = ["a"], rng.randint(2, 12)
    elif shape == "2":
        objs, m = ["a", "b"], rng.randint(1, 3)
    else:
        objs, m = ["a", "b", "c"], 1
    G = FiniteGroupoid.transitive(objs, m)
    carrier = {G.identity(x) for x in objs}
    for g in G.arrows:
        if not G.is_identity(g) and rng.random() < 0.5:
            carrier |= {g, G.inverse(g)}
    divisors = [d for d in range(1, m + 1) if m % d == 0]
    d = rng.choice(divisors)
    K = FiniteGroupoid.transitive(objs, d)
    f = {}
    for g in carrier:
        head, k = g.rsplit(":", 1)
        f[g] = f"{head}:{int(k) % d}"
    return Pregroupoid(G, carrier), K, f


def words_up_to(P: Pregroupoid, length: int):
    out = []
    for x in P.ambient.objects:
        frontier = [((), x)]
        out.append(MonodromyWord(x, ()))
        for _ in range(length):
            nxt = []
            for letters, at in frontier:
                for u in P.letters():
                    if P.src(u) == at:
                        nw = letters + (u,)
                        out.append(MonodromyWord(x, nw))
                        nxt.append((nw, P.tgt(u)))
            frontier = nxt
    return out


def congruence_classes(P: Pregroupoid, length: int) -> dict:
    """Union-find closure of the defining relations on words up to
    ``length``; returns word -> class root."""
    words = words_up_to(P, length)
    parent = {(w.base, w.letters): (w.base, w.letters) for w in words}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=str)] = min(ra, rb, key=str)

    for w in words:
        key = (w.base, w.letters)
        for i, u in enumerate(w.letters):
            if P.is_identity(u):
                union(key, (w.base, w.letters[:i] + w.letters[i + 1 :]))
        for i in range(len(w.letters) - 1):
            uv = P.product(w.letters[i], w.letters[i + 1])
            if uv is not None:
                union(key, (w.base, w.letters[:i] + (uv,) + w.letters[i + 2 :]))
    return {k: find(k) for k in parent}


def monodromy_trial(rng: random.Random, length: int = 3) -> dict:
    P, K, f = random_pregroupoid(rng)
    ext = mon_extend(P, f, K)
    classes = congruence_classes(P, length)
    value = {}
    well_defined = True
    for (base, letters), root in classes.items():
        v = ext(MonodromyWord(base, letters))
        if root in value and value[root] != v:
            well_defined = False
        value.setdefault(root, v)
    letters_ok = all(ext(MonodromyWord(P.src(u), (u,))) == f[u] for u in P.letters())
    by_class = {}
    for key, root in classes.items():
        by_class.setdefault(root, []).append(key)
    agree, disagree = 0, 0
    keys = sorted(classes, key=str)
    for members in by_class.values():
        head = members[0]
        for other in members[1:4]:
            v = mon_equal(P, MonodromyWord(*head), MonodromyWord(*other), depth=6).verdict
            if v == "equal":
                agree += 1
            else:
                disagree += 1
    for a, b in zip(keys, keys[1:]):
        if a[0] == b[0] and classes[a] != classes[b]:
            v = mon_equal(P, MonodromyWord(*a), MonodromyWord(*b), depth=2).verdict
            if v == "distinct" and P.ambient_product(a[1], a[0]) == P.ambient_product(b[1], b[0]):
                disagree += 1
    return {
        "size": len(P.carrier),
        "classes": len(by_class),
        "well_defined": well_defined,
        "letters": letters_ok,
        "agree": agree,
        "disagree": disagree,
    }


def check_monodromy(seed: int, trials: int = 20) -> Row:
    rng = random.Random(seed)
    results = [monodromy_trial(rng) for _ in range(trials)]
    finite_ok = all(r["well_defined"] and r["letters"] and r["disagree"] == 0 and r["size"] <= 12 for r in results)
    star = star_projection_check(build_pradines_1(), 1)
    star_ok = star["fiber_over_identity"] == "Z" and star["pairwise_distinct"] and star["winding_over_identity"]
    return Row(
        9,
        "monodromy extension matches congruence closure; fiber Z over 1_1",
        finite_ok and star_ok,
        {"trials": results, "star_at_1": star},
    )


def check_axiom_checker() -> Row:
    clean = {n: check_axioms(m).ok for n, m in (("pradines-1", build_pradines_1()), ("pradines-2", build_pradines_2()), ("mobius", build_mobius()))}
    faults = {}
    for kind in MUTATIONS:
        model, intended = mutation(kind)
        report = check_axioms(model)
        failed = report.failed()
        witness = report.verdicts[intended].witness if intended in report.verdicts else None
        faults[kind] = {"failed": failed, "intended": intended, "has_witness": witness is not None}
    ok = all(clean.values()) and all(v["failed"] == [v["intended"]] and v["has_witness"] for v in faults.values())
    return Row(10, "axiom checker: examples pass, each mutation fails its axiom", ok, {"clean": clean, "mutations": faults})


def paper_suite(seed: int = 0, mutate_width=None) -> SuiteReport:
    rows = [
        check_kernel_example(mutate_width),
        check_non_extendible(),
        check_smoothness_dichotomy(),
        check_stars(),
        check_mobius_kernel(),
        check_inverse_monoid(seed),
        check_normality(seed),
        check_transitions(seed),
        check_monodromy(seed),
        check_axiom_checker(),
    ]
    return SuiteReport(rows, seed)


__all__ = ["paper_suite", "SuiteReport", "Row", "congruence_classes", "random_pregroupoid", "monodromy_trial"]
