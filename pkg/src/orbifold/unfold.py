"""Unfolding representations back into categories, and the round-trip checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .action import CategoryAction
from .category import CatMorphism, Category, check_morphism, is_isomorphism
from .errors import InfiniteGroup
from .groups import AbelianGroup, FiniteGroup
from .iso import find_isomorphism
from .orbitfold import (
    Representation,
    Transversal,
    build_representation,
    canonical_automorphisms,
    orbit_category,
    transversal_rep,
)
from .report import ValidationReport


def pair_id(item: str, layer_label: str) -> str:
    return f"{item}@{layer_label}"


def check_annotation(R: Representation, limit: int | None = 20) -> ValidationReport:
    """A(a*b) = A(b).A(a) wherever a*b is defined, and A(id) = 1."""
    rep = ValidationReport(limit=limit)
    C, G, lab = R.category, R.group, R.annotation.label
    for a in C.arrows:
        if a not in lab:
            rep.add("missing-label", a)
        elif lab[a] not in G:
            rep.add("label-not-in-group", a, lab[a])
    if not rep.ok:
        return rep
    for x, i in C.identities.items():
        if lab[i] != G.neutral:
            rep.add("identity", i, lab[i])
    for (a, b), c in C.table.items():
        if lab[c] != G.mul(lab[b], lab[a]):
            rep.add("contravariance", a, b, c, message=f"A({c})={lab[c]} but A({b})A({a})={G.mul(lab[b], lab[a])}")
    return rep


@dataclass(frozen=True)
class Unfolding:
    category: Category
    representation: Representation
    window: tuple | None
    vertex_of: Mapping[str, tuple[str, Hashable]]
    arrow_of: Mapping[str, tuple[str, Hashable]]

    def vertex_id(self, x: str, g) -> str:
        return pair_id(x, self.representation.group.label(g))

    def arrow_id(self, a: str, g) -> str:
        return pair_id(a, self.representation.group.label(g))


def _unfold(R: Representation, layers: list, partial: bool, window: tuple | None) -> Unfolding:
    C, G, lab = R.category, R.group, R.annotation.label
    layer_set = set(layers)
    L = {g: G.label(g) for g in layers}
    vertices, vertex_of = [], {}
    for x in C.vertices:
        for g in layers:
            v = pair_id(x, L[g])
            vertices.append(v)
            vertex_of[v] = (x, g)
    arrows, arrow_of = {}, {}
    end_layer = {}
    for a, (s, t) in C.arrows.items():
        for g in layers:
            h = G.mul(lab[a], g)
            if h not in layer_set:
                continue
            aid = pair_id(a, L[g])
            arrows[aid] = (pair_id(s, L[g]), pair_id(t, L[h]))
            arrow_of[aid] = (a, g)
            end_layer[aid] = h
    identities = {pair_id(x, L[g]): pair_id(i, L[g]) for x, i in C.identities.items() for g in layers}
    table = {}
    for aid, (a, g) in arrow_of.items():
        h = end_layer[aid]
        for b in C.out_arrows(C.dst(a)):
            bid = pair_id(b, L[h])
            if bid not in arrows:
                continue
            ab = C.compose(a, b)
            if ab is not None:
                table[(aid, bid)] = pair_id(ab, L[g])
    K = Category(vertices, arrows, identities, table, partial)
    return Unfolding(K, R, window, vertex_of, arrow_of)


def unfold(R: Representation) -> Unfolding:
    """Vertices (x, g), arrows (a, g): (dom a, g) -> (cod a, A(a) g)."""
    if not R.group.is_finite:
        raise InfiniteGroup("annotation group is infinite; use bounded_unfold", R.group.to_json())
    return _unfold(R, list(R.group.elements), R.category.partial, None)


def bounded_unfold(R: Representation, window: Iterable) -> Unfolding:
    """Restriction of the unfolding to layers in a finite window (partial category)."""
    layers = sorted(set(window), key=repr)
    G = R.group
    for g in layers:
        if g not in G:
            raise ValueError(f"window element {g!r} is not in the group")
    return _unfold(R, layers, True, tuple(layers))


def _finite_view(G) -> tuple[FiniteGroup, dict]:
    """FiniteGroup copy with element -> name map."""
    if isinstance(G, FiniteGroup):
        return G, {g: g for g in G.elements}
    if isinstance(G, AbelianGroup):
        return G.to_finite()
    raise TypeError(f"unsupported group {G!r}")


def induced_action(U: Unfolding) -> CategoryAction:
    """(x, h)^g = (x, h g) and (a, h)^g = (a, h g)."""
    R = U.representation
    G = R.group
    if U.window is not None or not G.is_finite:
        raise InfiniteGroup("induced action needs a full unfolding over a finite group")
    F, name = _finite_view(G)
    back = {n: g for g, n in name.items()}
    vt, at = {}, {}
    for gn in F.elements:
        g = back[gn]
        vt[gn] = {v: U.vertex_id(x, G.mul(h, g)) for v, (x, h) in U.vertex_of.items()}
        at[gn] = {a: U.arrow_id(b, G.mul(h, g)) for a, (b, h) in U.arrow_of.items()}
    return CategoryAction(F, U.category, vt, at)


def projection(U: Unfolding) -> CatMorphism:
    return CatMorphism(
        U.category,
        U.representation.category,
        {v: x for v, (x, _) in U.vertex_of.items()},
        {a: b for a, (b, _) in U.arrow_of.items()},
    )


def explicit_reconstruction(A: CategoryAction, T: Transversal, U: Unfolding) -> CatMorphism:
    """(x, g) -> t^g and (a, g) -> a_T^g, a_T the member of the class leaving T."""
    O = orbit_category(A)
    C = A.category
    start_in_T = {}
    for cls, members in O.arrow_classes.items():
        for a in members:
            if C.src(a) in T.chosen:
                start_in_T[cls] = a
    vrep = {cls: transversal_rep(A, T, min(members)) for cls, members in O.vertex_classes.items()}
    vmap = {v: A.act_vertex(vrep[x], g) for v, (x, g) in U.vertex_of.items()}
    amap = {u: A.act_arrow(start_in_T[a], g) for u, (a, g) in U.arrow_of.items()}
    return CatMorphism(U.category, C, vmap, amap)


@dataclass
class RoundTrip:
    refold_ok: bool
    unfold_ok: bool
    witnesses: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.refold_ok and self.unfold_ok


def verify_roundtrips(A: CategoryAction, T: Transversal, budget: int | None = None) -> RoundTrip:
    """unfold(fold(A)) is the source category and fold(unfold(R)) is R's category.

    Both are decided by isomorphism search; the explicit reconstruction map
    is reported alongside as an independent witness.
    """
    R = build_representation(A, T)
    U = unfold(R)
    iso_unfold = find_isomorphism(U.category, A.category, budget)
    IA = induced_action(U)
    O2 = orbit_category(IA)
    iso_refold = find_isomorphism(O2.category, R.category, budget)
    explicit = explicit_reconstruction(A, T, U)
    return RoundTrip(
        refold_ok=iso_refold is not None,
        unfold_ok=iso_unfold is not None,
        witnesses={
            "unfold": iso_unfold,
            "refold": iso_refold,
            "explicit": explicit,
            "explicit_ok": is_isomorphism(explicit),
            "representation": R,
            "unfolding": U,
            "induced_action": IA,
        },
    )
