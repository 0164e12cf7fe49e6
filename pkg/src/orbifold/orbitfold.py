"""Orbit categories, transversals, natural annotations and representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .action import CategoryAction, is_foldable, is_semiregular, is_translative
from .category import CatMorphism, Category
from .errors import GivenSetNotTransversal, NotFoldable, NotSemiRegular, NotTranslative, OrbifoldError
from .groups import AbelianGroup, FiniteGroup, Group, group_from_json


@dataclass(frozen=True)
class OrbitCategory:
    category: Category
    vertex_classes: Mapping[str, frozenset[str]]
    arrow_classes: Mapping[str, frozenset[str]]
    projection: CatMorphism

    def vertex_class(self, v: str) -> str:
        return self.projection.vertex_map[v]

    def arrow_class(self, a: str) -> str:
        return self.projection.arrow_map[a]


def _require_semiregular(A: CategoryAction) -> None:
    v = is_semiregular(A)
    if not v:
        raise NotSemiRegular(f"element {v.witness[0]} fixes {v.witness[1]}", v.witness)


def orbit_category(A: CategoryAction, require_semiregular: bool = False) -> OrbitCategory:
    """Fold a foldable action; classes are named by least member.

    Foldability alone makes the class composition well defined.  Annotations
    and unfoldings additionally need semi-regularity, which callers can
    demand here with ``require_semiregular``.
    """
    if require_semiregular:
        _require_semiregular(A)
    f = is_foldable(A)
    if not f:
        a, b, c, d = f.witness
        raise NotFoldable(f"{a}*{b} and {c}*{d} have equal factor orbits but different composite orbits", f.witness)
    C = A.category
    vorb, aorb = A.vertex_orbit_of(), A.arrow_orbit_of()
    vmap = {x: min(vorb[x]) for x in C.vertices}
    amap = {a: min(aorb[a]) for a in C.arrows}
    arrows = {amap[a]: (vmap[s], vmap[t]) for a, (s, t) in C.arrows.items()}
    identities = {vmap[x]: amap[i] for x, i in C.identities.items()}
    table = {(amap[a], amap[b]): amap[c] for (a, b), c in C.table.items()}
    vertices = sorted(set(vmap.values()))
    K = Category(vertices, arrows, identities, table, C.partial)
    vclasses = {vmap[x]: vorb[x] for x in C.vertices}
    aclasses = {amap[a]: aorb[a] for a in C.arrows}
    return OrbitCategory(K, vclasses, aclasses, CatMorphism(C, K, vmap, amap))


@dataclass(frozen=True)
class Transversal:
    chosen: frozenset[str]
    strategy: str = "first"

    def __contains__(self, x: str) -> bool:
        return x in self.chosen

    def __iter__(self):
        return iter(sorted(self.chosen))

    def __len__(self) -> int:
        return len(self.chosen)


def choose_transversal(A: CategoryAction, strategy: str | Sequence[str] = "first") -> Transversal:
    """One vertex per orbit: ``"first"`` takes least ids, a list is checked."""
    vorbs = {o for o in A.vertex_orbit_of().values()}
    if isinstance(strategy, str):
        if strategy != "first":
            raise ValueError(f"unknown strategy {strategy!r}")
        return Transversal(frozenset(min(o) for o in vorbs), "first")
    given = list(strategy)
    for o in vorbs:
        hits = [x for x in given if x in o]
        if len(hits) != 1:
            raise GivenSetNotTransversal(f"orbit {sorted(o)} meets the given set {len(hits)} times", (sorted(o), hits))
    if len(set(given)) != len(given) or any(x not in A.vertex_orbit_of() for x in given):
        raise GivenSetNotTransversal("given set has duplicates or unknown vertices", given)
    return Transversal(frozenset(given), "given")


def transversal_rep(A: CategoryAction, T: Transversal, x: str) -> str:
    hits = A.vertex_orbit_of()[x] & T.chosen
    if len(hits) != 1:
        raise GivenSetNotTransversal(f"orbit of {x} meets T in {len(hits)} vertices", sorted(hits))
    return next(iter(hits))


def canonical_automorphism(A: CategoryAction, T: Transversal, x: str) -> str:
    """The unique g with x^(g^-1) in T, i.e. x = t^g for the representative t."""
    _require_semiregular(A)
    g = A.mover(transversal_rep(A, T, x), x)
    assert g is not None
    return g


def canonical_automorphisms(A: CategoryAction, T: Transversal) -> dict[str, str]:
    out = {}
    for t in T.chosen:
        for g in A.group.elements:
            out.setdefault(A.vertex_table[g][t], g)
    return out


@dataclass(frozen=True)
class Annotation:
    target: Any
    label: Mapping[str, Hashable]

    def __getitem__(self, a: str):
        return self.label[a]


@dataclass(frozen=True)
class Representation:
    category: Category
    annotation: Annotation

    @property
    def group(self):
        return self.annotation.target

    def A(self, a: str):
        return self.annotation.label[a]

    @property
    def faithful(self) -> bool:
        C, lab = self.category, self.annotation.label
        return all(len({lab[a] for a in arrs}) == len(arrs) for arrs in C._hom.values())

    def to_json(self) -> dict:
        G = self.group
        return {
            "category": self.category.to_json(),
            "annotation": {a: G.label(v) for a, v in sorted(self.annotation.label.items())},
            "group": G.to_json(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Representation":
        G = group_from_json(doc["group"])
        C = Category.from_json(doc["category"])
        return cls(C, Annotation(G, {a: G.parse(s) for a, s in doc["annotation"].items()}))


def natural_labels(A: CategoryAction, T: Transversal) -> dict[str, str]:
    """A_T(a) = g_T(cod a) . g_T(dom a)^-1 for every arrow of the source category."""
    gT = canonical_automorphisms(A, T)
    G = A.group
    return {a: G.mul(gT[t], G.inv(gT[s])) for a, (s, t) in A.category.arrows.items()}


def natural_annotation(
    A: CategoryAction,
    T: Transversal,
    target: Group | None = None,
    section: Callable[[str], Hashable] | None = None,
) -> Annotation:
    """Natural annotation on the orbit category (checked constant per orbit).

    Without ``target`` the labels live in the acting group.  With a target
    (e.g. an fg-abelian group for a finite cover of a Z-style fold) the
    ``section`` lifts acting-group elements into it.
    """
    O = orbit_category(A, require_semiregular=True)
    lab = natural_labels(A, T)
    out: dict[str, Hashable] = {}
    for cls, members in O.arrow_classes.items():
        vals = {lab[a] for a in members}
        if len(vals) != 1:
            raise OrbifoldError(f"natural annotation not constant on orbit {cls}", (cls, sorted(vals)))
        (val,) = vals
        out[cls] = section(val) if section else val
    if target is None:
        target = A.group
    elif section is None:
        raise ValueError("a target group needs a section map")
    return Annotation(target, out)


def transversal_category(A: CategoryAction, T: Transversal) -> Category:
    """Ob = T; Mor(x, y) = arrows from x into the orbit of y; a *_T b = a * b^(A_T(a))."""
    if not is_translative(A):
        raise NotTranslative("transversal category needs a translative action")
    f = is_foldable(A)
    if not f:
        raise NotFoldable("action is not foldable", f.witness)
    C = A.category
    gT = canonical_automorphisms(A, T)
    rep = {x: transversal_rep(A, T, x) for x in C.vertices}
    arrows = {a: (s, rep[t]) for a, (s, t) in C.arrows.items() if s in T.chosen}
    table = {}
    for a in arrows:
        shift = gT[C.dst(a)]
        for b in C.out_arrows(rep[C.dst(a)]):
            c = C.compose(a, A.act_arrow(b, shift))
            if c is not None:
                table[(a, b)] = c
    return Category(sorted(T.chosen), arrows, {t: C.identities[t] for t in T.chosen}, table, C.partial)


def build_representation(
    A: CategoryAction,
    T: Transversal,
    target: Group | None = None,
    section: Callable[[str], Hashable] | None = None,
) -> Representation:
    O = orbit_category(A, require_semiregular=True)
    return Representation(O.category, natural_annotation(A, T, target, section))
