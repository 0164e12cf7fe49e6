"""Command-line front end: generate fixtures, fold, unfold, flatten, check,
compare and export.  JSON documents carry a ``kind`` field."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import musicgen
from .action import CategoryAction, check_action, is_foldable, is_semiregular, is_translative
from .category import Category, to_dot, validate_category
from .errors import OrbifoldError
from .flat import FlatCategoryRepresentation, check_flat_rep, flat_rep_from_representation
from .iso import find_isomorphism
from .orbitfold import Representation, build_representation, choose_transversal, orbit_category
from .partialcat import FlatRepresentation, PartialSubcategory, property_catalogue
from .unfold import check_annotation, induced_action, unfold, verify_roundtrips

FIXTURES = ("fix_k", "chain_bundle", "zn_cover", "zn_fold", "ntet", "shepard", "diatonic", "tonnetz", "lattice_window")


class UsageError(Exception):
    pass


# documents


def dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def write(doc: dict, out: str | None) -> None:
    text = dump(doc)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def action_doc(A: CategoryAction) -> dict:
    return {"kind": "action", "category": A.category.to_json(), "action": A.to_json()}


def category_doc(C: Category) -> dict:
    return {"kind": "category", "category": C.to_json()}


def representation_doc(R: Representation) -> dict:
    return {"kind": "representation", **R.to_json()}


def flat_doc(F: FlatCategoryRepresentation, partial: PartialSubcategory | None = None) -> dict:
    doc = {"kind": "flat", "flat": F.to_json()}
    if partial is not None:
        doc["partial"] = sorted(partial.arrows)
    return doc


def load(path: str) -> tuple[str, Any]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e
    kind = doc.get("kind")
    if kind == "action":
        C = Category.from_json(doc["category"])
        return kind, CategoryAction.from_json(doc["action"], C)
    if kind == "category":
        return kind, Category.from_json(doc["category"])
    if kind == "representation":
        return kind, Representation.from_json(doc)
    if kind == "flat":
        F = FlatCategoryRepresentation.from_json(doc["flat"])
        if "partial" in doc:
            return "flat-partial", FlatRepresentation(PartialSubcategory.from_arrows(F.K, doc["partial"]), F)
        return kind, F
    raise UsageError(f"{path}: unknown document kind {kind!r}")


def category_of(kind: str, obj) -> Category:
    if kind == "action":
        return obj.category
    if kind == "category":
        return obj
    if kind == "representation":
        return obj.category
    if kind == "flat":
        return obj.K
    if kind == "flat-partial":
        return obj.partial.category()
    raise UsageError(f"no category in a {kind} document")


# verbs


def cmd_gen(args) -> int:
    f = args.fixture
    if f == "fix_k":
        _, cyclic, both = musicgen.gen_fix_k()
        stem = Path(args.output or "fix_k.json")
        base = stem.with_suffix("")
        for tag, A in (("cyclic", cyclic), ("both", both)):
            p = f"{base}.{tag}.json"
            write(action_doc(A), p)
            print(p)
        return 0
    if f == "chain_bundle":
        doc = action_doc(musicgen.gen_chain_bundle(args.k, args.h))
    elif f == "zn_cover":
        doc = action_doc(musicgen.zn_cover(args.n, args.dmax or 2 * args.n))
    elif f == "zn_fold":
        _, R = musicgen.gen_zn_fold(args.n, args.dmax or 2 * args.n)
        doc = representation_doc(R)
    elif f == "ntet":
        doc = flat_doc(musicgen.gen_ntet(args.n, args.window))
    elif f == "shepard":
        S = musicgen.gen_shepard(args.n, args.window)
        doc = flat_doc(S.rep, S.partial)
    elif f == "diatonic":
        D = musicgen.gen_diatonic(window=args.window)
        doc = {
            "kind": "embedding",
            "scale": flat_doc(D.scale),
            "chromatic": flat_doc(D.chromatic),
            "vertex_map": D.vertex_map,
            "arrow_map": D.arrow_map,
        }
    elif f == "tonnetz":
        T = musicgen.gen_tonnetz(args.window, args.third_period)
        doc = flat_doc(T.rep, T.partial)
    elif f == "lattice_window":
        doc = representation_doc(musicgen.gen_lattice_window(tuple(args.periods), args.bound))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown fixture {f}")
    write(doc, args.output)
    return 0


def _transversal(A: CategoryAction, spec: str | None):
    return choose_transversal(A) if spec is None else choose_transversal(A, spec.split(","))


def cmd_fold(args) -> int:
    kind, A = load(args.input)
    if kind != "action":
        raise UsageError("fold needs an action document")
    if args.orbit_only:
        write(category_doc(orbit_category(A).category), args.output)
    else:
        write(representation_doc(build_representation(A, _transversal(A, args.transversal))), args.output)
    return 0


def cmd_unfold(args) -> int:
    kind, R = load(args.input)
    if kind != "representation":
        raise UsageError("unfold needs a representation document")
    write(action_doc(induced_action(unfold(R))), args.output)
    return 0


def cmd_flatten(args) -> int:
    kind, R = load(args.input)
    if kind != "representation":
        raise UsageError("flatten needs a representation document")
    write(flat_doc(flat_rep_from_representation(R)), args.output)
    return 0


def _fail(message: str, witness: Any) -> int:
    print(f"FAIL: {message}")
    print("WITNESS: " + json.dumps(witness, default=str))
    return 1


def cmd_check(args) -> int:
    kind, obj = load(args.input)
    status = 0
    if args.foldable or args.semiregular or args.translative:
        if kind != "action":
            raise UsageError("action predicates need an action document")
        for flag, pred in (("foldable", is_foldable), ("semiregular", is_semiregular), ("translative", is_translative)):
            if getattr(args, flag):
                v = pred(obj)
                if v:
                    print(f"{flag}: true")
                else:
                    status = _fail(f"not {flag}", v.witness)
    if args.valid:
        rep = validate_category(category_of(kind, obj))
        if kind == "action":
            rep.extend(check_action(obj))
        elif kind == "representation":
            rep.extend(check_annotation(obj))
        elif kind == "flat":
            rep.extend(check_flat_rep(obj))
        if rep.ok:
            print("valid: true")
        else:
            status = _fail("validation failed", [str(v) for v in rep])
    if args.flags:
        S = None
        if args.group:
            gk, S = load(args.group)
            if gk != "action":
                raise UsageError("--group needs an action document")
        elif args.rotation:
            base = obj.rep.K if kind == "flat-partial" else obj.K if kind == "flat" else None
            if base is None:
                raise UsageError("--rotation needs a flat document")
            S = musicgen.rotation_action(base, [int(p) for p in args.rotation.split(",")])
        if kind not in ("flat", "flat-partial", "representation"):
            raise UsageError("--flags needs a flat or representation document")
        print(property_catalogue(obj, S, budget=args.budget).table())
    if not (args.foldable or args.semiregular or args.translative or args.valid or args.flags):
        raise UsageError("check needs at least one of --foldable --semiregular --translative --valid --flags")
    return status


def cmd_iso(args) -> int:
    k1, a = load(args.first)
    k2, b = load(args.second)
    iso = find_isomorphism(category_of(k1, a), category_of(k2, b), args.budget)
    if iso is None:
        return _fail("not isomorphic", [args.first, args.second])
    print("isomorphic: true")
    print("WITNESS: " + json.dumps(iso.vertex_map, sort_keys=True))
    return 0


def cmd_export(args) -> int:
    kind, obj = load(args.input)
    C = orbit_category(obj).category if args.orbit else category_of(kind, obj)
    text = to_dot(C, include_identities=args.include_identities)
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_demo(args) -> int:
    if args.name != "roundtrip":
        raise UsageError(f"unknown demo {args.name}")
    if args.fixture == "chain_bundle":
        A = musicgen.gen_chain_bundle(args.k, args.h)
    elif args.fixture == "zn_cover":
        A = musicgen.zn_cover(args.n, args.dmax or 2 * args.n)
    else:
        raise UsageError("demo roundtrip supports chain_bundle and zn_cover")
    rt = verify_roundtrips(A, choose_transversal(A), args.budget)
    for key in ("unfold", "refold"):
        iso = rt.witnesses[key]
        ok = iso is not None
        print(f"{key}: {'true' if ok else 'false'}")
        if ok:
            print("WITNESS: " + json.dumps(iso.vertex_map, sort_keys=True))
    print(f"explicit reconstruction is an isomorphism: {'true' if rt.witnesses['explicit_ok'] else 'false'}")
    return 0 if rt else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbifold", description=__doc__)
    p.add_argument("--budget", type=int, default=None, help="search budget (overrides ORBIFOLD_BUDGET)")
    sub = p.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="write a fixture as JSON")
    g.add_argument("--fixture", required=True, choices=FIXTURES)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--h", type=int, default=4)
    g.add_argument("--n", type=int, default=12)
    g.add_argument("--dmax", type=int, default=None)
    g.add_argument("--window", type=int, default=2)
    g.add_argument("--third-period", type=int, default=3, choices=(2, 3))
    g.add_argument("--periods", type=int, nargs=2, default=(4, 3))
    g.add_argument("--bound", type=int, default=7)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fold", help="action -> representation (or orbit category)")
    f.add_argument("input")
    f.add_argument("--transversal", help="comma-separated representatives")
    f.add_argument("--orbit-only", action="store_true")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_fold)

    u = sub.add_parser("unfold", help="representation -> unfolded category with its action")
    u.add_argument("input")
    u.add_argument("-o", "--output")
    u.set_defaults(func=cmd_unfold)

    fl = sub.add_parser("flatten", help="representation -> flat representation")
    fl.add_argument("input")
    fl.add_argument("-o", "--output")
    fl.set_defaults(func=cmd_flatten)

    c = sub.add_parser("check", help="predicates and property flags")
    c.add_argument("input")
    c.add_argument("--foldable", action="store_true")
    c.add_argument("--semiregular", action="store_true")
    c.add_argument("--translative", action="store_true")
    c.add_argument("--valid", action="store_true")
    c.add_argument("--flags", choices=("all",))
    c.add_argument("--group", help="action document for the symmetry group")
    c.add_argument("--rotation", help="lattice periods for a rotation group, e.g. 12")
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("iso", help="decide isomorphism of two categories")
    i.add_argument("first")
    i.add_argument("second")
    i.set_defaults(func=cmd_iso)

    e = sub.add_parser("export", help="DOT export")
    e.add_argument("input")
    e.add_argument("--dot", action="store_true", help="DOT output (the only format)")
    e.add_argument("--include-identities", action="store_true")
    e.add_argument("--orbit", action="store_true", help="export the orbit category of an action")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)

    d = sub.add_parser("demo", help="end-to-end demonstrations")
    d.add_argument("name", choices=("roundtrip",))
    d.add_argument("--fixture", default="chain_bundle", choices=("chain_bundle", "zn_cover"))
    d.add_argument("--k", type=int, default=3)
    d.add_argument("--h", type=int, default=4)
    d.add_argument("--n", type=int, default=4)
    d.add_argument("--dmax", type=int, default=None)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    previous = os.environ.get("ORBIFOLD_BUDGET")
    if args.budget is not None:
        os.environ["ORBIFOLD_BUDGET"] = str(args.budget)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"orbifold: error: {e}", file=sys.stderr)
        return 2
    except OrbifoldError as e:
        return _fail(str(e), e.witness)
    finally:
        # callers embedding main() should not inherit the budget
        if previous is None:
            os.environ.pop("ORBIFOLD_BUDGET", None)
        else:
            os.environ["ORBIFOLD_BUDGET"] = previous


if __name__ == "__main__":
    sys.exit(main())
