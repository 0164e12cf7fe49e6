"""Finite small categories as directed multigraphs with a composition table.

Composition is written left-to-right: ``compose(a, b)`` is defined when
``dst(a) == src(b)`` and goes from ``src(a)`` to ``dst(b)``.  A category may be
flagged ``partial``; then compose may be undefined on some composable pairs
and every law is only required where the terms are defined.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import NonComposable
from .report import ValidationReport


class Category:
    __slots__ = ("vertices", "arrows", "identities", "table", "partial", "_out", "_in", "_hom", "_idset")

    def __init__(
        self,
        vertices: Iterable[str],
        arrows: Mapping[str, tuple[str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
        partial: bool = False,
    ):
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.arrows: dict[str, tuple[str, str]] = {a: (s, t) for a, (s, t) in arrows.items()}
        self.identities: dict[str, str] = dict(identities)
        self.table: dict[tuple[str, str], str] = dict(compose)
        self.partial = partial
        self._out: dict[str, list[str]] = defaultdict(list)
        self._in: dict[str, list[str]] = defaultdict(list)
        self._hom: dict[tuple[str, str], list[str]] = defaultdict(list)
        for a, (s, t) in self.arrows.items():
            self._out[s].append(a)
            self._in[t].append(a)
            self._hom[(s, t)].append(a)
        self._idset = frozenset(self.identities.values())

    # basic structure

    def src(self, a: str) -> str:
        return self.arrows[a][0]

    def dst(self, a: str) -> str:
        return self.arrows[a][1]

    def identity(self, x: str) -> str:
        return self.identities[x]

    def is_identity(self, a: str) -> bool:
        return a in self._idset

    def compose(self, a: str, b: str) -> str | None:
        return self.table.get((a, b))

    def out_arrows(self, x: str) -> list[str]:
        return self._out.get(x, [])

    def in_arrows(self, x: str) -> list[str]:
        return self._in.get(x, [])

    def hom(self, x: str, y: str) -> list[str]:
        return self._hom.get((x, y), [])

    def loops(self, x: str, include_identity: bool = False) -> list[str]:
        return [a for a in self.hom(x, x) if include_identity or not self.is_identity(a)]

    def composable_pairs(self) -> Iterator[tuple[str, str]]:
        for a, (_, t) in self.arrows.items():
            for b in self._out.get(t, []):
                yield a, b

    def non_identity_arrows(self) -> list[str]:
        return [a for a in self.arrows if a not in self._idset]

    def __len__(self) -> int:
        return len(self.arrows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Category):
            return NotImplemented
        return (
            set(self.vertices) == set(other.vertices)
            and self.arrows == other.arrows
            and self.identities == other.identities
            and self.table == other.table
            and self.partial == other.partial
        )

    def __repr__(self) -> str:
        kind = "PartialCategory" if self.partial else "Category"
        return f"<{kind} |V|={len(self.vertices)} |A|={len(self.arrows)}>"

    # derived categories

    def full_subcategory(self, vertices: Iterable[str]) -> "Category":
        vs = [v for v in self.vertices if v in set(vertices)]
        keep = set(vs)
        arrows = {a: st for a, st in self.arrows.items() if st[0] in keep and st[1] in keep}
        table = {(a, b): c for (a, b), c in self.table.items() if a in arrows and b in arrows}
        return Category(vs, arrows, {v: self.identities[v] for v in vs}, table, self.partial)

    def relabel(self, vmap: Mapping[str, str], amap: Mapping[str, str]) -> "Category":
        return Category(
            [vmap[v] for v in self.vertices],
            {amap[a]: (vmap[s], vmap[t]) for a, (s, t) in self.arrows.items()},
            {vmap[v]: amap[a] for v, a in self.identities.items()},
            {(amap[a], amap[b]): amap[c] for (a, b), c in self.table.items()},
            self.partial,
        )

    def as_partial(self) -> "Category":
        return Category(self.vertices, self.arrows, self.identities, self.table, True)

    # serialization

    def to_json(self) -> dict:
        doc = {
            "vertices": sorted(self.vertices),
            "arrows": [{"id": a, "src": s, "dst": t} for a, (s, t) in sorted(self.arrows.items())],
            "identities": dict(sorted(self.identities.items())),
            "compose": sorted([a, b, c] for (a, b), c in self.table.items()),
        }
        if self.partial:
            doc["partial"] = True
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "Category":
        return cls(
            doc["vertices"],
            {e["id"]: (e["src"], e["dst"]) for e in doc["arrows"]},
            doc["identities"],
            {(a, b): c for a, b, c in doc["compose"]},
            bool(doc.get("partial", False)),
        )

    # constructors

    @classmethod
    def from_relation(cls, vertices: Sequence[str], pairs: Iterable[tuple[str, str]], sep: str = "<") -> "Category":
        """Thin category of a preorder given by (reflexive-)transitive ``pairs``.

        Arrow ids are ``"x<y"``; identities are ``"x<x"``.  The relation is
        closed reflexively and transitively first.
        """
        rel = {(x, x) for x in vertices} | set(pairs)
        changed = True
        while changed:
            changed = False
            for (x, y), (y2, z) in itertools.product(list(rel), list(rel)):
                if y == y2 and (x, z) not in rel:
                    rel.add((x, z))
                    changed = True
        name = {p: f"{p[0]}{sep}{p[1]}" for p in rel}
        arrows = {name[p]: p for p in rel}
        table = {}
        for (x, y) in rel:
            for (y2, z) in rel:
                if y == y2:
                    table[(name[(x, y)], name[(y, z)])] = name[(x, z)]
        return cls(list(vertices), arrows, {x: name[(x, x)] for x in vertices}, table)


def validate_category(C: Category, limit: int | None = 50) -> ValidationReport:
    """Check identities, closure, totality (unless partial) and associativity."""
    rep = ValidationReport(limit=limit)
    vset = set(C.vertices)
    if len(vset) != len(C.vertices):
        rep.add("structure", "duplicate vertices")
    for a, (s, t) in C.arrows.items():
        if s not in vset or t not in vset:
            rep.add("structure", a, s, t, message="arrow endpoint is not a vertex")
    for x in C.vertices:
        i = C.identities.get(x)
        if i is None or i not in C.arrows:
            rep.add("identity", x, message="missing identity")
        elif C.arrows[i] != (x, x):
            rep.add("identity", x, i, message="identity is not a loop at its vertex")
    if not rep.ok:
        return rep
    if len(set(C.identities.values())) != len(C.identities):
        rep.add("identity", "shared identity arrow")
    for (a, b), c in C.table.items():
        if a not in C.arrows or b not in C.arrows:
            rep.add("closure", a, b, c, message="compose on unknown arrow")
        elif C.dst(a) != C.src(b):
            rep.add("closure", a, b, c, message="compose defined on non-composable pair")
        elif c not in C.arrows:
            rep.add("closure", a, b, c, message="composite is not a listed arrow")
        elif C.arrows[c] != (C.src(a), C.dst(b)):
            rep.add("closure", a, b, c, message="composite has wrong endpoints")
    if not rep.ok:
        return rep
    for a, (s, t) in C.arrows.items():
        if C.compose(C.identities[s], a) != a:
            rep.add("identity-law", C.identities[s], a)
        if C.compose(a, C.identities[t]) != a:
            rep.add("identity-law", a, C.identities[t])
    if not C.partial:
        for a, b in C.composable_pairs():
            if (a, b) not in C.table:
                rep.add("totality", a, b)
    out = C._out
    for (a, b), ab in C.table.items():
        for c in out.get(C.dst(b), ()):
            bc = C.table.get((b, c))
            if bc is None:
                continue
            left = C.table.get((ab, c))
            right = C.table.get((a, bc))
            if left is None or right is None:
                if not C.partial and left != right:
                    rep.add("associativity", a, b, c, message="one parenthesization undefined")
                continue
            if left != right:
                rep.add("associativity", a, b, c, message=f"{left} != {right}")
    return rep


def compose_path(C: Category, arrows: Sequence[str]) -> str:
    """Left fold of compose; raises NonComposable at the first bad junction."""
    if not arrows:
        raise ValueError("empty path has no canonical vertex; pass an identity")
    acc = arrows[0]
    for i, b in enumerate(arrows[1:]):
        if C.dst(arrows[i]) != C.src(b):
            raise NonComposable(i, f"dst({arrows[i]}) != src({b})")
        nxt = C.compose(acc, b)
        if nxt is None:
            raise NonComposable(i, f"composite of {acc} and {b} is undefined")
        acc = nxt
    return acc


def is_simple(C: Category) -> bool:
    return all(len(v) <= 1 for v in C._hom.values())


@dataclass(frozen=True)
class CatMorphism:
    source: Category
    target: Category
    vertex_map: Mapping[str, str]
    arrow_map: Mapping[str, str]

    def __call__(self, a: str) -> str:
        return self.arrow_map[a]

    def inverse(self) -> "CatMorphism":
        return CatMorphism(
            self.target,
            self.source,
            {w: v for v, w in self.vertex_map.items()},
            {b: a for a, b in self.arrow_map.items()},
        )

    def then(self, other: "CatMorphism") -> "CatMorphism":
        return CatMorphism(
            self.source,
            other.target,
            {v: other.vertex_map[w] for v, w in self.vertex_map.items()},
            {a: other.arrow_map[b] for a, b in self.arrow_map.items()},
        )

    def kernel(self) -> list[frozenset[str]]:
        """Arrow partition induced by equal images."""
        classes: dict[str, set[str]] = defaultdict(set)
        for a, b in self.arrow_map.items():
            classes[b].add(a)
        return sorted((frozenset(c) for c in classes.values()), key=min)

    @classmethod
    def identity(cls, C: Category) -> "CatMorphism":
        return cls(C, C, {v: v for v in C.vertices}, {a: a for a in C.arrows})


@dataclass(frozen=True)
class MorphismFlags:
    valid: bool
    full: bool
    faithful: bool
    hom_full: bool
    bijective: bool
    report: ValidationReport

    def __iter__(self):
        return iter((self.valid, self.full, self.faithful))


def morphism_report(F: CatMorphism, limit: int | None = 20) -> ValidationReport:
    """Structure preservation: endpoints, identities, composition where defined.

    For partial sources a defined composite must map to a defined composite;
    for partial targets that is all we ask.
    """
    S, T = F.source, F.target
    rep = ValidationReport(limit=limit)
    for v in S.vertices:
        if F.vertex_map.get(v) not in set(T.vertices):
            rep.add("vertex-map", v)
    for a in S.arrows:
        if F.arrow_map.get(a) not in T.arrows:
            rep.add("arrow-map", a)
    if not rep.ok:
        return rep
    for a, (s, t) in S.arrows.items():
        if T.arrows[F.arrow_map[a]] != (F.vertex_map[s], F.vertex_map[t]):
            rep.add("endpoints", a)
    for v, i in S.identities.items():
        if F.arrow_map[i] != T.identities[F.vertex_map[v]]:
            rep.add("identity", v)
    for (a, b), c in S.table.items():
        if T.compose(F.arrow_map[a], F.arrow_map[b]) != F.arrow_map[c]:
            rep.add("composition", a, b, c)
    return rep


def check_morphism(F: CatMorphism) -> MorphismFlags:
    """valid / full / faithful flags.

    ``full`` is surjectivity on vertices and arrows, the sense used for the
    projection of an unfolding; ``hom_full`` is the per-hom-set surjectivity
    of textbook category theory.  ``faithful`` is injectivity on every
    hom-set.
    """
    rep = morphism_report(F)
    S, T = F.source, F.target
    if any(v not in F.vertex_map for v in S.vertices) or any(a not in F.arrow_map for a in S.arrows):
        return MorphismFlags(False, False, False, False, False, rep)
    images = set(F.arrow_map.values())
    full = images >= set(T.arrows) and set(F.vertex_map.values()) >= set(T.vertices)
    faithful = True
    hom_full = True
    for (x, y), arrows in S._hom.items():
        if len({F.arrow_map[a] for a in arrows}) != len(arrows):
            faithful = False
    for x in S.vertices:
        for y in S.vertices:
            src = S.hom(x, y)
            tgt = T.hom(F.vertex_map[x], F.vertex_map[y])
            if {F.arrow_map[a] for a in src} != set(tgt):
                hom_full = False
                break
        if not hom_full:
            break
    bijective = (
        len(images) == len(S.arrows) == len(T.arrows)
        and len(set(F.vertex_map.values())) == len(S.vertices) == len(T.vertices)
    )
    return MorphismFlags(rep.ok, full, faithful, hom_full, bijective, rep)


def is_isomorphism(F: CatMorphism) -> bool:
    """Bijective, structure preserving, and composition defined exactly in step."""
    flags = check_morphism(F)
    if not (flags.valid and flags.bijective):
        return False
    return morphism_report(F.inverse()).ok


def single_vertex_category(arrows: Sequence[str], identity: str, compose: Mapping[tuple[str, str], str], partial: bool = False, vertex: str = "*") -> Category:
    return Category([vertex], {a: (vertex, vertex) for a in arrows}, {vertex: identity}, compose, partial)


def to_dot(C: Category, include_identities: bool = False, name: str = "K") -> str:
    lines = [f"digraph {_dot_id(name)} {{"]
    for v in sorted(C.vertices):
        lines.append(f"  {_dot_id(v)};")
    for a, (s, t) in sorted(C.arrows.items()):
        if C.is_identity(a) and not include_identities:
            continue
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label={_dot_id(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'
