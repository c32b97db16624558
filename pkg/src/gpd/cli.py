"""Command-line interface: ``gpd <command> [options]``.

Models are read from ``--model`` (a file, ``-`` for stdin, or a built-in
example name) or from stdin when the option is omitted.  Every command
prints a report; negative verdicts are successful computations (exit 0),
input errors exit with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import GpdError
from .groupoid_core import FiniteGroupoid, GroupoidMorphism
from .holonomy import (
    GermClass,
    HolClass,
    chart_map,
    chart_transition,
    final_map,
    generates,
    germ_compose,
    germ_equal,
    hol_equal,
    in_j0,
    is_extendible,
    kernel_at,
    left_translate,
    lift_morphism,
    normality_audit,
    underlying_arrow,
)
from .models import (
    EXAMPLES,
    MUTATIONS,
    ChartPoint,
    EdgePoint,
    PairArrow,
    _jsonable,
    canonical_json,
    check_axioms,
    model_from_json,
    mutation,
)
from .monodromy import (
    Pregroupoid,
    mon_equal,
    mon_extend,
    mon_reduce,
    pregroupoid_of,
    star_projection_check,
    word_from_json,
)
from .pl_base import PLFunction, as_rational
from .sections import (
    ehresmann_product,
    is_admissible,
    is_continuous_at,
    is_local_procedure,
    raw_from_json,
    section_from_json,
    section_inverse,
)
from .suite import paper_suite

PREGROUPOID_EXAMPLES = {
    # Z/6 with the letters 0, 1, 5: no product of two non-identity letters
    # stays in the carrier, so M is infinite cyclic
    "pregroupoid-z6": lambda: {
        "family": "pregroupoid",
        "groupoid": FiniteGroupoid.cyclic_group(6).to_json(),
        "carrier": ["0", "1", "5"],
    },
    "pregroupoid-z6-full": lambda: {
        "family": "pregroupoid",
        "groupoid": FiniteGroupoid.cyclic_group(6).to_json(),
        "carrier": [str(k) for k in range(6)],
    },
}


def lift_instance(order_a: int, order_g: int = 5, order_h: int = 10) -> dict:
    """``A = Z/order_a -> G = Z/order_g`` lifted through ``H = Z/order_h``
    with W = {0, 1, -1} in G."""
    return {
        "family": "lift",
        "A": FiniteGroupoid.cyclic_group(order_a).to_json(),
        "G": FiniteGroupoid.cyclic_group(order_g).to_json(),
        "H": FiniteGroupoid.cyclic_group(order_h).to_json(),
        "xi": {str(k): str(k % order_g) for k in range(order_a)},
        "phi": {str(k): str(k % order_g) for k in range(order_h)},
        "generators": ["0", "1", str(order_a - 1)],
        "i": {"0": "0", "1": "1", str(order_g - 1): str(order_h - 1)},
    }


LIFT_EXAMPLES = {"lift-z20": lambda: lift_instance(20), "lift-z15": lambda: lift_instance(15)}


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# input helpers


def _load_json_text(text: str, origin: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{origin}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_document(arg: str | None, stdin=None):
    """``arg`` is inline JSON, a file path, ``-`` (stdin), or a built-in name."""
    stdin = stdin or sys.stdin
    if arg is None or arg == "-":
        return _load_json_text(stdin.read(), "stdin")
    if arg in EXAMPLES:
        return EXAMPLES[arg]().to_json()
    if arg in PREGROUPOID_EXAMPLES:
        return PREGROUPOID_EXAMPLES[arg]()
    if arg in LIFT_EXAMPLES:
        return LIFT_EXAMPLES[arg]()
    if arg.lstrip().startswith(("{", "[")):
        return _load_json_text(arg, "argument")
    try:
        with open(arg, encoding="utf-8") as fh:
            return _load_json_text(fh.read(), arg)
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror}") from None


def load_model(args, stdin=None):
    doc = load_document(getattr(args, "model", None), stdin)
    if doc.get("family") == "pregroupoid":
        G = FiniteGroupoid.from_json(doc["groupoid"])
        return Pregroupoid(G, doc["carrier"]), doc
    model = model_from_json(doc)
    r = getattr(args, "smoothness", None)
    if r is not None:
        model = model.with_smoothness(r)
    return model, model.to_json()


def parse_point(model, text: str):
    if model.family == "quotient_bundle":
        return as_rational(text)
    if ":" in text:
        chart, y = text.split(":", 1)
        return ChartPoint(chart, as_rational(y))
    return ChartPoint(model.charts[0].id, as_rational(text))


def parse_w(model, doc):
    """W-element: ``{"x", "t"}`` for bundles, ``{"edge", "y"}`` or an arrow
    ``{"src", "tgt"}`` for chart complexes."""
    if model.family == "quotient_bundle":
        return model.arrow(as_rational(doc["x"]), as_rational(doc["t"]))
    if "edge" in doc:
        return EdgePoint(doc["edge"], as_rational(doc["y"]))
    pt = lambda d: ChartPoint(d["chart"], as_rational(d["y"]))  # noqa: E731
    return PairArrow(pt(doc["src"]), pt(doc["tgt"]))


# --------------------------------------------------------------------------
# reports


def make_report(args, model_doc, verdict, witness=None, certificate=None, seed=None, **extra) -> dict:
    report = {
        "command": args.command_line,
        "model": None if model_doc is None else fingerprint_doc(model_doc),
        "verdict": verdict,
        "witness": witness,
        "certificate": certificate,
    }
    report.update(extra)
    report["seed"] = seed
    report["engine"] = __version__
    return _jsonable(report)


def fingerprint_doc(doc) -> str:
    import hashlib

    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def _check_no_floats(obj):
    if isinstance(obj, float):
        raise AssertionError("float in report")
    if isinstance(obj, dict):
        for v in obj.values():
            _check_no_floats(v)
    elif isinstance(obj, list):
        for v in obj:
            _check_no_floats(v)


def render(report, fmt: str) -> str:
    _check_no_floats(report)
    if fmt == "json":
        return json.dumps(report, indent=2)
    lines = []
    width = max(len(k) for k in report)
    for k, v in report.items():
        text = v if isinstance(v, str) else json.dumps(v)
        lines.append(f"{k:<{width}}  {text}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# commands


def cmd_example(args):
    if args.list:
        names = sorted(EXAMPLES) + sorted(PREGROUPOID_EXAMPLES) + sorted(LIFT_EXAMPLES)
        return {"examples": names, "mutations": list(MUTATIONS)}, True
    if args.mutation:
        model, axiom = mutation(args.mutation)
        doc = model.to_json()
        doc["intended_failure"] = axiom
        return doc, True
    if args.name is None:
        raise InputError("example name required (see --list)")
    if args.name in EXAMPLES:
        builder = EXAMPLES[args.name]
        model = builder()
        if args.smoothness is not None:
            model = model.with_smoothness(args.smoothness)
        return model.to_json(), True
    if args.name in PREGROUPOID_EXAMPLES:
        return PREGROUPOID_EXAMPLES[args.name](), True
    if args.name in LIFT_EXAMPLES:
        return LIFT_EXAMPLES[args.name](), True
    raise InputError(f"unknown example {args.name!r}")


def cmd_check_axioms(args):
    model, doc = load_model(args)
    rep = check_axioms(model, depth=args.depth or 8)
    failed = rep.failed()
    return make_report(args, doc, rep.ok, {a: rep.verdicts[a].witness for a in failed} or None, rep.to_json())


def _section(model, arg):
    return section_from_json(model, load_document(arg))


def cmd_section(args):
    model, doc = load_model(args)
    op = args.op
    if op == "admissible":
        raw = raw_from_json(model, load_document(args.inputs[0]))
        v = is_admissible(model, raw)
        return make_report(args, doc, v.ok, v.witness, {"reason": v.reason})
    s = _section(model, args.inputs[0])
    if op == "procedure":
        v = is_local_procedure(s, args.at and parse_point(model, args.at))
        extra = {}
        if args.at is not None:
            c = is_continuous_at(s, parse_point(model, args.at))
            extra["continuous"] = {"verdict": c.ok, "witness": c.witness, "reason": c.reason}
        return make_report(
            args, doc, v.ok, v.witness, {"reason": v.reason, "entries_local": [e.local_procedure for e in s.entries]}, **extra
        )
    if op == "product":
        t = _section(model, args.inputs[1])
        p = ehresmann_product(s, t)
        return make_report(args, doc, True, None, {"word": p.to_json(), "product": _cache_json(p)})
    if op == "inverse":
        p = section_inverse(s)
        return make_report(args, doc, True, None, {"word": p.to_json(), "product": _cache_json(p)})
    if op == "eval":
        x = parse_point(model, _require(args.at, "--at"))
        return make_report(args, doc, s(x), None, {"target": s.target(x)})
    raise InputError(op)


def _cache_json(word):
    c = word.cache
    return c.to_json() if isinstance(c, PLFunction) else {"src": c.src, "tgt": c.tgt, "map": c.fn.to_json()}


def _require(value, flag):
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def _germ(model, arg, at):
    return GermClass(_section(model, arg), at)


def cmd_germ(args):
    model, doc = load_model(args)
    x = parse_point(model, _require(args.at, "--at"))
    a = _germ(model, args.inputs[0], x)
    if args.op == "in-j0":
        m = in_j0(a)
        return make_report(args, doc, m.ok, m.witness, {"psi": final_map(a)})
    if args.op == "eq":
        b = _germ(model, args.inputs[1], x)
        return make_report(args, doc, germ_equal(a, b), None, {"psi": [final_map(a), final_map(b)]})
    if args.op == "compose":
        b = GermClass(_section(model, args.inputs[1]), a.target)
        c = germ_compose(a, b)
        return make_report(args, doc, True, None, {"germ": c.to_json()})
    raise InputError(args.op)


def cmd_hol(args):
    if args.op == "lift":
        return _cmd_lift(args)
    model, doc = load_model(args)
    op = args.op
    if op == "kernel":
        x = parse_point(model, _require(args.at, "--at"))
        kd = kernel_at(model, x, depth=args.depth or 4)
        return make_report(args, doc, kd.kind, kd.generator, kd.to_json())
    if op == "extendible":
        r = is_extendible(model, depth=args.depth or 4)
        return make_report(args, doc, r.ok, r.witness, r.certificate)
    if op == "generates":
        r = generates(model, args.depth or 8)
        return make_report(args, doc, r.ok, r.witness, r.certificate)
    if op == "equal":
        x = parse_point(model, _require(args.at, "--at"))
        a = HolClass(_germ(model, args.inputs[0], x))
        b = HolClass(_germ(model, args.inputs[1], x))
        return make_report(args, doc, hol_equal(a, b), None, {"psi": [a.value, b.value]})
    if op == "chart":
        f = _section(model, args.inputs[0])
        w = parse_w(model, load_document(_require(args.w, "--w")))
        h0, h1 = chart_map(f, w, 0), chart_map(f, w, 1)
        same = hol_equal(h0, h1)
        return make_report(args, doc, h0.to_json(), None, {"independent_of_section_choice": same})
    if op == "transition":
        f = _section(model, args.inputs[0])
        g = _section(model, args.inputs[1])
        w = parse_w(model, load_document(_require(args.w, "--w")))
        out = chart_transition(f, g, w)
        direct = left_translate(ehresmann_product(section_inverse(f), g), w)
        return make_report(
            args, doc, out, None, {"left_translation": direct, "agree": direct == underlying_arrow(model, out)}
        )
    if op == "audit-normality":
        r = normality_audit(model, args.samples or 200, args.seed)
        return make_report(args, doc, r["failures"] == 0, r["failed"] or None, {"samples": r["samples"], "failures": r["failures"]}, seed=args.seed)
    raise InputError(op)


def _cmd_lift(args):
    doc = load_document(args.model)
    if doc.get("family") != "lift":
        raise InputError("hol lift expects a lift instance (see `gpd example lift-z20`)")
    A, G, H = (FiniteGroupoid.from_json(doc[k]) for k in ("A", "G", "H"))
    obj = lambda src, dst: {x: dst.objects[0] if len(dst.objects) == 1 else x for x in src.objects}  # noqa: E731
    xi = GroupoidMorphism(A, G, doc.get("xi_objects", obj(A, G)), doc["xi"])
    phi = GroupoidMorphism(H, G, doc.get("phi_objects", obj(H, G)), doc["phi"])
    from .errors import RelationViolation

    try:
        lifted = lift_morphism(A, xi, doc["generators"], H, phi, doc["i"])
    except RelationViolation as exc:
        return make_report(args, doc, False, exc.witness, {"error": str(exc)})
    return make_report(args, doc, True, None, {"lift": lifted.arrow_map})


def cmd_mono(args):
    model, doc = load_model(args)
    P = pregroupoid_of(model)
    op = args.op
    if op == "reduce":
        w = word_from_json(P, load_document(args.inputs[0]))
        r = mon_reduce(P, w)
        return make_report(args, doc, r.to_json(), None, {"input_length": len(w), "length": len(r)})
    if op == "equal":
        a = word_from_json(P, load_document(args.inputs[0]))
        b = word_from_json(P, load_document(args.inputs[1]))
        v = mon_equal(P, a, b, depth=args.depth or 4)
        return make_report(args, doc, v.verdict, None, {"reason": v.reason, **v.certificate})
    if op == "extend":
        docs = [load_document(a) for a in args.inputs]
        # a leading document without "base" describes the letter map
        letter_doc = docs.pop(0) if docs and "base" not in docs[0] else {"lift": True}
        if P.family == "quotient_bundle":
            f = "lift" if letter_doc.get("lift") else PLFunction.from_json(letter_doc["map"])
            ext = mon_extend(P, f)
            words = [word_from_json(P, d) for d in docs]
            return make_report(args, doc, True, None, {"images": [ext(w) for w in words], "target": "F"})
        K = FiniteGroupoid.from_json(letter_doc["target"]) if "target" in letter_doc else P.ambient
        letters = letter_doc.get("letters") or {u: u for u in P.letters()}
        from .errors import NotPregroupoidMorphism

        try:
            ext = mon_extend(P, letters, K)
        except NotPregroupoidMorphism as exc:
            return make_report(args, doc, False, exc.witness, {"error": str(exc)})
        words = [word_from_json(P, d) for d in docs]
        return make_report(args, doc, True, None, {"images": [ext(w) for w in words], "letters": letters})
    if op == "star":
        at = _require(args.at, "--at")
        x = as_rational(at) if P.family == "quotient_bundle" else at
        r = star_projection_check(P, x, depth=args.depth or 3)
        verdict = r.get("fiber_over_identity") or ("bijective" if r.get("bijective") else "not bijective")
        return make_report(args, doc, verdict, None, r)
    raise InputError(op)


def cmd_paper_suite(args):
    rep = paper_suite(seed=args.seed, mutate_width=args.mutate_width)
    if args.format == "text":
        return rep.table(), rep.passed
    return make_report(args, None, rep.passed, None, rep.to_json(), seed=args.seed), rep.passed


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model file, '-' for stdin, or a built-in example name")
    common.add_argument("--at", help="base point (rational; 'C:y' for chart complexes)")
    common.add_argument("--smoothness", type=int, choices=(0, 1))
    common.add_argument("--depth", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="gpd", description="Exact holonomy and monodromy groupoid engine")
    p.add_argument("--version", action="version", version=f"gpd {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", parents=[common], help="emit a built-in model as JSON")
    ex.add_argument("name", nargs="?")
    ex.add_argument("--list", action="store_true")
    ex.add_argument("--mutation", choices=MUTATIONS)
    ex.set_defaults(func=cmd_example)

    ca = sub.add_parser("check-axioms", parents=[common], help="check G1-G5")
    ca.set_defaults(func=cmd_check_axioms)

    for name, ops, func, help_text in (
        ("section", ("admissible", "procedure", "product", "inverse", "eval"), cmd_section, "local sections"),
        ("germ", ("eq", "in-j0", "compose"), cmd_germ, "germs of section words"),
        (
            "hol",
            ("kernel", "extendible", "generates", "equal", "chart", "transition", "audit-normality", "lift"),
            cmd_hol,
            "holonomy groupoid",
        ),
        ("mono", ("reduce", "equal", "extend", "star"), cmd_mono, "monodromy groupoid"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("op", choices=ops)
        sp.add_argument("inputs", nargs="*", help="JSON documents (files or inline)")
        if name == "hol":
            sp.add_argument("--w", help="element of W as JSON")
        sp.set_defaults(func=func)

    ps = sub.add_parser("paper-suite", parents=[common], help="run every acceptance check")
    ps.add_argument("--mutate-width", help="rebuild pradines-1 with this window half-width")
    ps.set_defaults(func=cmd_paper_suite)
    return p


VALUE_OPTIONS = ("--at", "--w", "--mutate-width", "--model")


def _fuse_values(argv):
    """Write ``--at -1/2`` as ``--at=-1/2``; argparse would otherwise read a
    negative rational as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] != "-":
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(_fuse_values(argv))
        # documents given after options land here rather than in ``inputs``
        stray = [x for x in extra if x.startswith("-") and x != "-"]
        if stray or (extra and not hasattr(args, "inputs")):
            parser.error("unrecognized arguments: " + " ".join(stray or extra))
        if extra:
            args.inputs = list(args.inputs) + extra
    except SystemExit as exc:
        return int(exc.code or 0)
    args.command_line = ["gpd"] + argv
    try:
        result = args.func(args)
    except (InputError, GpdError, ValueError, KeyError, TypeError) as exc:
        err = {"error": str(exc), "type": type(exc).__name__}
        if getattr(exc, "witness", None) is not None:
            err["witness"] = _jsonable(exc.witness)
        stderr.write(json.dumps(err) + "\n")
        return 1
    if isinstance(result, tuple):
        body, _ = result
    else:
        body = result
    if isinstance(body, str):
        stdout.write(body + "\n")
    else:
        if args.command == "example":
            stdout.write(json.dumps(_jsonable(body), indent=2) + "\n")
        else:
            stdout.write(render(body, args.format) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
