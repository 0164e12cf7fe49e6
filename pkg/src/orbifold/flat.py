"""Vertex categories, irreducible arrows, flat orbit categories, singleton
category extensions and flat category representations.

Right-groupal categories are kept simple: the arrows of G are exactly the
pairs (s, t) of group elements whose value t*s^-1 lies in a finite set of
loop values, so a loop orbit of G is named by its value (the orbit of the
arrow 1 -> v).  Composing the orbit of v with the orbit of w ("v then w")
gives the orbit of w*v when the table allows it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .action import CategoryAction, is_translative, transport_coherence_report, right_normal_table
from .category import CatMorphism, Category, is_isomorphism, is_simple, validate_category
from .errors import (
    AxiomViolation,
    InfiniteGroup,
    NotRightNormal,
    NotSimple,
    NotTranslative,
    NotUniquelyRepresentable,
    OrbifoldError,
)
from .groups import AbelianGroup, FiniteGroup, ShiftedGroup, group_from_json
from .orbitfold import Annotation, Representation, Transversal, build_representation, orbit_category
from .report import ValidationReport, Verdict

# right-groupal categories


@dataclass(frozen=True)
class RightGroupalCategory:
    """Simple category on the elements of ``group`` with arrows s -> v*s, v in ``values``.

    ``then[(v, w)]`` is the value of the composite of an arrow of value v
    followed by one of value w, present exactly where composition is
    defined.  The right action is (s -> t).g = (s g -> t g).
    """

    group: Any
    values: frozenset
    then: Mapping[tuple[Hashable, Hashable], Hashable]

    @property
    def neutral(self):
        return self.group.neutral

    @classmethod
    def trivial(cls, group=None) -> "RightGroupalCategory":
        group = group if group is not None else FiniteGroup.trivial()
        e = group.neutral
        return cls(group, frozenset([e]), {(e, e): e})

    @classmethod
    def from_values(cls, group, values: Iterable[Hashable]) -> "RightGroupalCategory":
        """Loop values closed under composition where the product stays in the set."""
        vals = frozenset(values) | {group.neutral}
        then = {}
        for v in vals:
            for w in vals:
                u = group.mul(w, v)
                if u in vals:
                    then[(v, w)] = u
        return cls(group, vals, then)

    def value(self, s, t):
        return self.group.mul(t, self.group.inv(s))

    def has_arrow(self, s, t) -> bool:
        return self.value(s, t) in self.values

    def loop_then(self, v, w):
        return self.then.get((v, w))

    def label(self, v) -> str:
        return self.group.label(v)

    def arrow_id(self, s, t) -> str:
        return f"{self.label(s)}>{self.label(t)}"

    def act_right(self, arrow: tuple, g) -> tuple:
        s, t = arrow
        return self.group.mul(s, g), self.group.mul(t, g)

    def act_left(self, g, arrow: tuple) -> tuple:
        s, t = arrow
        return self.group.mul(g, s), self.group.mul(g, t)

    def sorted_values(self) -> list:
        return sorted(self.values, key=lambda v: (v != self.neutral, repr(v)))

    def loop_category(self) -> Category:
        """The single-vertex orbit category G / Ob G, arrows named by value labels."""
        lab = {v: self.label(v) for v in self.values}
        arrows = {lab[v]: ("1", "1") for v in self.values}
        table = {(lab[v], lab[w]): lab[u] for (v, w), u in self.then.items()}
        partial = len(table) < len(self.values) ** 2
        return Category(["1"], arrows, {"1": lab[self.neutral]}, table, partial)

    def vertex_window(self, window: Iterable | None = None) -> list:
        if window is None:
            if not self.group.is_finite:
                raise InfiniteGroup("vertex group is infinite; give a window")
            return list(self.group.elements)
        return sorted(set(window), key=repr)

    def materialize(self, window: Iterable | None = None) -> Category:
        """The category itself (restricted to ``window`` for infinite groups)."""
        verts = self.vertex_window(window)
        vs = set(verts)
        name = {g: self.label(g) for g in verts}
        arrows, ends = {}, {}
        for s in verts:
            for v in self.values:
                t = self.group.mul(v, s)
                if t in vs:
                    aid = self.arrow_id(s, t)
                    arrows[aid] = (name[s], name[t])
                    ends[aid] = (s, t, v)
        out: dict = {}
        for aid, (s, t, v) in ends.items():
            out.setdefault(s, []).append((aid, t, v))
        table = {}
        for aid, (s, t, v) in ends.items():
            for bid, u, w in out.get(t, []):
                if (v, w) in self.then:
                    cid = self.arrow_id(s, u)
                    if cid in arrows:
                        table[(aid, bid)] = cid
        identities = {name[g]: self.arrow_id(g, g) for g in verts}
        partial = window is not None or len(self.then) < len(self.values) ** 2
        return Category([name[g] for g in verts], arrows, identities, table, partial)

    def to_json(self) -> dict:
        lab = self.label
        return {
            "group": self.group.to_json(),
            "values": sorted(lab(v) for v in self.values),
            "then": sorted([lab(v), lab(w), lab(u)] for (v, w), u in self.then.items()),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "RightGroupalCategory":
        G = group_from_json(doc["group"])
        p = G.parse
        return cls(G, frozenset(p(v) for v in doc["values"]), {(p(v), p(w)): p(u) for v, w, u in doc["then"]})


def check_right_groupal(G: RightGroupalCategory, window: Iterable | None = None, limit: int | None = 20) -> ValidationReport:
    """Table consistency, identities, and the category laws of the materialization."""
    rep = ValidationReport(limit=limit)
    e, grp = G.neutral, G.group
    if e not in G.values:
        rep.add("neutral-loop", e)
    for v in G.values:
        if G.then.get((e, v)) != v or G.then.get((v, e)) != v:
            rep.add("identity-loop", v)
    for (v, w), u in G.then.items():
        if u != grp.mul(w, v):
            rep.add("then-value", v, w, u)
        if u not in G.values:
            rep.add("then-closed", v, w, u)
    for u, v, w in itertools.product(G.values, repeat=3):
        uv, vw = G.then.get((u, v)), G.then.get((v, w))
        lhs = G.then.get((uv, w)) if uv is not None else None
        rhs = G.then.get((u, vw)) if vw is not None else None
        if uv is not None and vw is not None and lhs != rhs:
            rep.add("assoc", u, v, w)
    if rep.ok and (window is not None or grp.is_finite):
        rep.extend(validate_category(G.materialize(window), limit=limit))
    return rep


def check_hom_translation(G: RightGroupalCategory, window: Iterable | None = None) -> ValidationReport:
    """Mor(x, y) = Mor(1, y x^-1) . x, compared as sets on the materialization."""
    rep = ValidationReport(limit=20)
    verts = G.vertex_window(window)
    grp = G.group
    M = G.materialize(window)
    lab = {G.label(g): g for g in verts}
    for x in verts:
        for y in verts:
            direct = {M.arrows[a] for a in M.hom(G.label(x), G.label(y))}
            yx = grp.mul(y, grp.inv(x))
            base = {(grp.neutral, yx)} if yx in G.values else set()
            moved = {G.act_right(p, x) for p in base}
            moved_ids = {(G.label(s), G.label(t)) for s, t in moved if s in lab.values() and t in lab.values()}
            if direct != moved_ids:
                rep.add("hom-translation", x, y)
    return rep


def is_groupal(G: RightGroupalCategory) -> Verdict:
    """Left multiplication is an automorphism: values and table are conjugation invariant."""
    grp = G.group
    elems = list(grp.elements) if grp.is_finite else []
    if isinstance(grp, AbelianGroup):
        return Verdict(True)
    for g in elems:
        conj = lambda v: grp.mul(grp.mul(g, v), grp.inv(g))  # noqa: E731
        for v in G.values:
            if conj(v) not in G.values:
                return Verdict(False, ("values", g, v))
        for (v, w), u in G.then.items():
            if G.then.get((conj(v), conj(w))) != conj(u):
                return Verdict(False, ("then", g, v, w))
    return Verdict(True)


def check_exchange_law(G: RightGroupalCategory, window: Iterable | None = None) -> ValidationReport:
    """Exchange law a^(dom b) * (cod a)b == (dom a)b * a^(cod b) for all arrows a, b.

    Both sides run from (dom a)(dom b) to (cod a)(cod b); in a simple
    category they agree exactly when both composites are defined together.
    """
    rep = ValidationReport(limit=20)
    grp = G.group
    verts = G.vertex_window(window)
    vs = set(verts)
    arrows = [(s, grp.mul(v, s)) for s in verts for v in G.values if grp.mul(v, s) in vs]

    def defined(p, q) -> bool | None:
        if not (p[0] in vs and p[1] in vs and q[0] in vs and q[1] in vs):
            return None
        return G.loop_then(G.value(*p), G.value(*q)) is not None

    for a in arrows:
        for b in arrows:
            lhs = defined(G.act_right(a, b[0]), G.act_left(a[1], b))
            rhs = defined(G.act_left(a[0], b), G.act_right(a, b[1]))
            if lhs is None or rhs is None:
                continue
            if lhs != rhs:
                rep.add("exchange", a, b)
    return rep


def vertex_category(A: CategoryAction, x: str) -> RightGroupalCategory:
    """Full subcategory on the orbit of x, with x^g . x^h = x^(gh) and neutral x."""
    if not is_translative(A):
        raise NotTranslative("vertex categories need a translative action")
    C, grp = A.category, A.group
    orbit = A.vertex_orbit_of()[x]
    sub = C.full_subcategory(orbit)
    if not is_simple(sub):
        raise NotSimple(f"vertex category of {x} has parallel arrows", x)
    elem = {y: A.mover(x, y) for y in orbit}
    values = frozenset(elem[C.dst(a)] for a in sub.out_arrows(x))
    then = {}
    for a in sub.out_arrows(x):
        v = elem[C.dst(a)]
        for b in sub.out_arrows(C.dst(a)):
            c = sub.compose(a, b)
            if c is not None:
                w = grp.mul(elem[C.dst(b)], grp.inv(v))
                then[(v, w)] = elem[C.dst(c)]
    return RightGroupalCategory(grp, values, then)


def vertex_category_map(A: CategoryAction, x: str, G: RightGroupalCategory) -> CatMorphism:
    """g -> x^g from the materialized right-groupal category onto the orbit subcategory."""
    C = A.category
    orbit = A.vertex_orbit_of()[x]
    sub = C.full_subcategory(orbit)
    M = G.materialize()
    vmap = {G.label(g): A.act_vertex(x, g) for g in G.group.elements}
    amap = {}
    for a, (s, t) in M.arrows.items():
        hom = sub.hom(vmap[s], vmap[t])
        if len(hom) != 1:
            raise OrbifoldError(f"no unique arrow for {a}", a)
        amap[a] = hom[0]
    return CatMorphism(M, sub, vmap, amap)


def shift_neutral(G: RightGroupalCategory, a) -> RightGroupalCategory:
    """Same category with product x *_a y = x a^-1 y and neutral a.

    The arrow 1 -> v keeps its place; its value under the new product is
    v *_a 1^-1.
    """
    S = ShiftedGroup(G.group, a)
    e = G.group.neutral
    nv = {v: S.mul(v, S.inv(e)) for v in G.values}
    return RightGroupalCategory(S, frozenset(nv.values()), {(nv[v], nv[w]): nv[u] for (v, w), u in G.then.items()})


def check_shift(G: RightGroupalCategory, a) -> ValidationReport:
    """x -> x a is an isomorphism G -> shift_neutral(G, a) preserving products."""
    rep = ValidationReport(limit=20)
    H = shift_neutral(G, a)
    grp, S = G.group, H.group
    elems = list(grp.elements)
    for x in elems:
        for y in elems:
            if grp.mul(grp.mul(x, y), a) != S.mul(grp.mul(x, a), grp.mul(y, a)):
                rep.add("product", x, y)
    M, N = G.materialize(), H.materialize()
    vmap = {G.label(g): G.label(grp.mul(g, a)) for g in elems}
    amap = {}
    for aid, (s, t) in M.arrows.items():
        hom = N.hom(vmap[s], vmap[t])
        if len(hom) != 1:
            rep.add("arrow", aid)
            return rep
        amap[aid] = hom[0]
    if not is_isomorphism(CatMorphism(M, N, vmap, amap)):
        rep.add("isomorphism", a)
    return rep


# irreducible arrows, r and n


def _reducible(K: Category) -> set[str]:
    out = set()
    for b, (_, t) in K.arrows.items():
        for y in K.loops(t):
            c = K.compose(b, y)
            if c is not None:
                out.add(c)
    return out


def representations(K: Category) -> dict[str, list[tuple[str, str]]]:
    """All (irreducible b, loop y at cod) with b * y = arrow, y possibly an identity."""
    irr = set(K.arrows) - _reducible(K)
    reps: dict[str, list[tuple[str, str]]] = {a: [] for a in K.arrows}
    for b in sorted(irr):
        for y in K.loops(K.dst(b), include_identity=True):
            c = K.compose(b, y)
            if c is not None:
                reps[c].append((b, y))
    return reps


def irreducible_arrows(K: Category) -> tuple[frozenset[str], bool]:
    """Arrows with no factorization b * y, y a non-identity loop at the codomain,
    and whether every arrow has exactly one (irreducible, loop) representation."""
    irr = frozenset(set(K.arrows) - _reducible(K))
    reps = representations(K)
    return irr, all(len(r) == 1 for r in reps.values())


@dataclass(frozen=True)
class FlatData:
    r: Mapping[str, str]
    n: Mapping[str, str]
    bullet: Mapping[tuple[str, str], str]
    irreducible: frozenset[str]


def r_n_maps(K: Category) -> FlatData:
    reps = representations(K)
    for a in sorted(reps):
        if len(reps[a]) != 1:
            kind = "ambiguous" if reps[a] else "unrepresented"
            raise NotUniquelyRepresentable(f"arrow {a} is {kind}: {reps[a]}", (a, reps[a]))
    r = {a: rs[0][0] for a, rs in reps.items()}
    n = {a: rs[0][1] for a, rs in reps.items()}
    irr = frozenset(set(K.arrows) - _reducible(K))
    bullet = {}
    for a in irr:
        for b in K.out_arrows(K.dst(a)):
            if b in irr:
                c = K.compose(a, b)
                if c is not None:
                    bullet[(a, b)] = r[c]
    return FlatData(r, n, bullet, irr)


def r_n_report(K: Category, D: FlatData) -> ValidationReport:
    """x = r(x)*n(x) and the identity laws for r and n."""
    rep = ValidationReport(limit=20)
    for x in K.arrows:
        if K.compose(D.r[x], D.n[x]) != x:
            rep.add("decomposition", x)
    for v, i in K.identities.items():
        if D.r[i] != i or D.n[i] != i:
            rep.add("r-n-identity", i)
    for a in K.arrows:
        s, t = K.arrows[a]
        ai = K.compose(a, K.identities[t])
        if ai is not None and (D.r[ai] != D.r[a] or D.n[ai] != D.n[a]):
            rep.add("r-n-right-unit", a)
        ia = K.compose(K.identities[s], a)
        if ia is not None and (D.r[ia] != D.r[a] or D.n[ia] != D.n[a]):
            rep.add("r-n-left-unit", a)
        if D.n[D.r[a]] != K.identities[t]:
            rep.add("n-of-irreducible", a)
    return rep


def flat_orbit_category(K: Category, data: FlatData | None = None) -> Category:
    """The irreducible arrows with x . y = r(x * y)."""
    D = data if data is not None else r_n_maps(K)
    arrows = {a: K.arrows[a] for a in sorted(D.irreducible)}
    partial = len(D.bullet) < sum(1 for a in arrows for b in K.out_arrows(K.dst(a)) if b in arrows)
    return Category(K.vertices, arrows, dict(K.identities), dict(D.bullet), partial)


def r_homomorphism_report(K: Category, D: FlatData) -> ValidationReport:
    """r(x * y) = r(x) . r(y) wherever x * y is defined."""
    rep = ValidationReport(limit=20)
    for (x, y), xy in K.table.items():
        if D.bullet.get((D.r[x], D.r[y])) != D.r[xy]:
            rep.add("r-homomorphism", x, y)
    return rep


def n_hat(K: Category, data: FlatData | None = None) -> dict[tuple[str, str], str]:
    """n(a * b) for composable irreducible a, b with a * b defined."""
    D = data if data is not None else r_n_maps(K)
    out = {}
    for a in D.irreducible:
        for b in K.out_arrows(K.dst(a)):
            if b in D.irreducible:
                c = K.compose(a, b)
                if c is not None:
                    out[(a, b)] = D.n[c]
    return out


def n_hat_report(K: Category, D: FlatData, nh: Mapping[tuple[str, str], str]) -> ValidationReport:
    rep = ValidationReport(limit=20)
    for (a, b), m in nh.items():
        if (K.is_identity(a) or K.is_identity(b)) and m != K.identities[K.dst(b)]:
            rep.add("n-hat-right-unit" if K.is_identity(b) else "n-hat-left-unit", a, b)
    return rep


def consistent_pairs(F: "FlatCategoryRepresentation") -> dict[tuple[str, str], bool]:
    """True for pairs whose overflow loop is an identity, False for long pairs."""
    e = F.G.neutral
    return {k: v == e for k, v in F.n.items()}


# right-normal C


def derive_C(A: CategoryAction) -> dict[tuple[str, str], str]:
    """C on the orbit category, lifted from C'(a, x) with x * a = a^g * C'(a, x)."""
    table, failure = right_normal_table(A)
    if failure is not None:
        raise NotRightNormal(f"no C' for {failure}", failure)
    O = orbit_category(A, require_semiregular=True)
    ac = O.arrow_class
    C: dict[tuple[str, str], str] = {}
    for (a, x), ent in table.items():
        key = (ac(a), ac(x))
        val = ac(ent.c_prime)
        if C.setdefault(key, val) != val:
            raise NotRightNormal(f"C not constant on the class pair {key}", key)
    K = O.category
    for a in K.arrows:
        for x in K.loops(K.src(a), include_identity=True):
            if K.compose(x, a) is not None and (a, x) not in C:
                raise NotRightNormal(f"missing C({a}, {x})", (a, x))
    rep = right_normal_report(K, C)
    if not rep.ok:
        v = rep.violations[0]
        raise NotRightNormal(str(v), v.witness)
    return C


def right_normal_report(K: Category, C: Mapping[tuple[str, str], str]) -> ValidationReport:
    """x * a = a * C(a, x), C(a, id) = id and, where s_a is injective, C(a, -) is a homomorphism."""
    rep = ValidationReport(limit=20)
    for (a, x), c in C.items():
        xa = K.compose(x, a)
        if xa is not None and K.compose(a, c) != xa:
            rep.add("loop-transport", a, x)
        if K.is_identity(x) and c != K.identities[K.dst(a)]:
            rep.add("transport-identity", a, x)
    for a in K.arrows:
        if not s_injective(K, a):
            continue
        loops = K.loops(K.src(a), include_identity=True)
        for x in loops:
            for y in loops:
                xy = K.compose(x, y)
                if xy is None or (a, xy) not in C or (a, x) not in C or (a, y) not in C:
                    continue
                rhs = K.compose(C[(a, x)], C[(a, y)])
                if rhs is not None and rhs != C[(a, xy)]:
                    rep.add("transport-homomorphism", a, x, y)
    return rep


def s_injective(K: Category, a: str) -> bool:
    """y -> a * y is injective on loops at cod a (where defined)."""
    seen = {}
    for y in K.loops(K.dst(a), include_identity=True):
        c = K.compose(a, y)
        if c is None:
            continue
        if c in seen:
            return False
        seen[c] = y
    return True


def transport_coherence(A: CategoryAction) -> ValidationReport:
    table, failure = right_normal_table(A)
    if failure is not None:
        raise NotRightNormal(f"no C' for {failure}", failure)
    return transport_coherence_report(A, table)


# singleton category extensions


def ext_id(a: str, x: str) -> str:
    return f"{a}|{x}"


def _loops_of(L: Category) -> tuple[str, list[str]]:
    if len(L.vertices) != 1:
        raise ValueError("loop category must have exactly one vertex")
    (v,) = L.vertices
    return L.identities[v], sorted(L.arrows)


def _ext_compose(K, n, C, L, a, x, b, y):
    ab = K.compose(a, b)
    if ab is None:
        return None
    m, c = n.get((a, b)), C.get((b, x))
    if m is None or c is None:
        return None
    mc = L.compose(m, c)
    if mc is None:
        return None
    z = L.compose(mc, y)
    return None if z is None else (ab, z)


def extension_axioms(
    K: Category,
    n: Mapping[tuple[str, str], str],
    C: Mapping[tuple[str, str], str],
    L: Category,
    limit: int | None = 20,
) -> ValidationReport:
    """Identity conditions and the four equations characterising extensions."""
    rep = ValidationReport(limit=limit)
    one, loops = _loops_of(L)
    lc = L.compose

    def eq(law, lhs, rhs, *w):
        if lhs != rhs:
            rep.add(law, *w, message=f"{lhs!r} != {rhs!r}")

    for a in K.arrows:
        if C.get((a, one)) != one:
            rep.add("C-identity", a)
    for a in K.arrows:
        s, t = K.arrows[a]
        if K.compose(a, K.identities[t]) is not None and n.get((a, K.identities[t])) != one:
            rep.add("overflow-identity", a, K.identities[t])
        if K.compose(K.identities[s], a) is not None and n.get((K.identities[s], a)) != one:
            rep.add("overflow-identity", K.identities[s], a)
    for a in K.arrows:
        ida = K.identities[K.src(a)]
        for x in loops:
            lhs = _ext_compose(K, n, C, L, ida, x, a, one)
            c = C.get((a, x))
            eq("loop-then-arrow", lhs, (a, c) if c is not None else None, a, x)
    for (a, b), ab in K.table.items():
        for c in K.out_arrows(K.dst(b)):
            bc = K.compose(b, c)
            if bc is None:
                continue
            abc = K.compose(ab, c)
            if abc is None or K.compose(a, bc) != abc:
                continue
            lhs = _lc(lc, n.get((a, bc)), n.get((b, c)))
            nab = n.get((a, b))
            rhs = _lc(lc, n.get((ab, c)), C.get((c, nab)) if nab is not None else None)
            eq("overflow-cocycle", lhs, rhs, a, b, c)
    for a in K.arrows:
        for x in loops:
            for y in loops:
                xy = lc(x, y)
                lhs = C.get((a, xy)) if xy is not None else None
                rhs = _lc(lc, C.get((a, x)), C.get((a, y)))
                if xy is None and rhs is None:
                    continue
                eq("transport-multiplicative", lhs, rhs, a, x, y)
    for (a, b), ab in K.table.items():
        m = n.get((a, b))
        for x in loops:
            lhs = _lc(lc, C.get((ab, x)), m)
            cax = C.get((a, x))
            rhs = _lc(lc, m, C.get((b, cax)) if cax is not None else None)
            eq("overflow-transport", lhs, rhs, a, b, x)
    return rep


def _lc(lc, p, q):
    if p is None or q is None:
        return None
    return lc(p, q)


def singleton_extension(
    K: Category,
    n: Mapping[tuple[str, str], str],
    C: Mapping[tuple[str, str], str],
    L: Category,
    check: bool = True,
) -> Category:
    """E<K, n, C, L>: arrows (a, x), (a, x) * (b, y) = (a . b, n(a, b) * C(b, x) * y)."""
    if check:
        rep = extension_axioms(K, n, C, L, limit=1)
        if not rep.ok:
            v = rep.violations[0]
            raise AxiomViolation(v.law, v.witness, v.message)
    one, loops = _loops_of(L)
    arrows = {ext_id(a, x): st for a, st in K.arrows.items() for x in loops}
    identities = {v: ext_id(i, one) for v, i in K.identities.items()}
    table = {}
    total = 0
    for a, b in K.composable_pairs():
        for x in loops:
            for y in loops:
                total += 1
                z = _ext_compose(K, n, C, L, a, x, b, y)
                if z is not None:
                    table[(ext_id(a, x), ext_id(b, y))] = ext_id(*z)
    E = Category(K.vertices, arrows, identities, table, K.partial or L.partial or len(table) < total)
    if check:
        rep = validate_category(E, limit=1)
        if not rep.ok:
            v = rep.violations[0]
            raise AxiomViolation(v.law, v.witness, v.message)
    return E


# flat category representations


@dataclass(frozen=True)
class FlatCategoryRepresentation:
    """(K, A, n, C, G): base K with concatenation ., annotation A into Ob G,
    overflow loops n(a, b), loop transport C(a, v) and the vertex category G.
    Loops are given by their values."""

    K: Category
    A: Mapping[str, Hashable]
    n: Mapping[tuple[str, str], Hashable]
    C: Mapping[tuple[str, Hashable], Hashable]
    G: RightGroupalCategory

    def loop_category(self) -> Category:
        return self.G.loop_category()

    def labelled(self) -> tuple[dict, dict]:
        lab = self.G.label
        n = {k: lab(v) for k, v in self.n.items()}
        C = {(a, lab(v)): lab(w) for (a, v), w in self.C.items()}
        return n, C

    def extension(self, check: bool = True) -> Category:
        n, C = self.labelled()
        return singleton_extension(self.K, n, C, self.loop_category(), check)

    def A_prime(self, a: str, v) -> Hashable:
        """cod x (dom x)^-1 A(a) for the loop orbit of value v."""
        return self.G.group.mul(v, self.A[a])

    def extension_representation(self, check: bool = True) -> Representation:
        E = self.extension(check)
        parse = {self.G.label(v): v for v in self.G.values}
        lab = {}
        for eid in E.arrows:
            a, x = eid.rsplit("|", 1)
            lab[eid] = self.A_prime(a, parse[x])
        return Representation(E, Annotation(self.G.group, lab))

    def to_json(self) -> dict:
        G = self.G
        lab = G.label
        return {
            "base": self.K.to_json(),
            "A": {a: lab(v) for a, v in sorted(self.A.items())},
            "n": sorted([a, b, lab(v)] for (a, b), v in self.n.items()),
            "C": sorted([a, lab(v), lab(w)] for (a, v), w in self.C.items()),
            "G": G.to_json(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "FlatCategoryRepresentation":
        G = RightGroupalCategory.from_json(doc["G"])
        p = G.group.parse
        return cls(
            Category.from_json(doc["base"]),
            {a: p(v) for a, v in doc["A"].items()},
            {(a, b): p(v) for a, b, v in doc["n"]},
            {(a, p(v)): p(w) for a, v, w in doc["C"]},
            G,
        )


def check_flat_annotation(F: FlatCategoryRepresentation, limit: int | None = 20) -> ValidationReport:
    """A(id) = 1 and the three annotation equations on values."""
    rep = ValidationReport(limit=limit)
    grp, K = F.G.group, F.K
    e = grp.neutral
    for i in K.identities.values():
        if F.A.get(i) != e:
            rep.add("A-identity", i)
    for a in K.arrows:
        for v in F.G.values:
            lhs = F.A_prime(a, v)
            rhs = grp.mul(F.A_prime(K.identities[K.dst(a)], v), F.A_prime(a, e))
            if lhs != rhs:
                rep.add("shifted-annotation", a, v)
    for (a, b), ab in K.table.items():
        m = F.n.get((a, b))
        want = grp.mul(grp.mul(F.A[b], F.A[a]), grp.inv(F.A[ab]))
        if m != want:
            rep.add("overflow-defect", a, b, message=f"n={m!r}, A-defect={want!r}")
    for (b, v), c in F.C.items():
        if grp.mul(F.A[b], v) != grp.mul(c, F.A[b]):
            rep.add("annotation-transport", b, v)
    return rep


def check_flat_rep(F: FlatCategoryRepresentation, limit: int | None = 20) -> ValidationReport:
    rep = ValidationReport(limit=limit)
    rep.extend(check_right_groupal(F.G))
    rep.extend(validate_category(F.K, limit=limit))
    n, C = F.labelled()
    rep.extend(extension_axioms(F.K, n, C, F.loop_category(), limit=limit))
    rep.extend(check_flat_annotation(F, limit=limit))
    return rep


def _loop_tables(R: Representation) -> dict[str, tuple[dict, dict]]:
    """Per vertex: value -> loop arrow, and the 'then' table on values."""
    K, lab = R.category, R.annotation.label
    out = {}
    for x in K.vertices:
        by_val: dict = {}
        for y in K.loops(x, include_identity=True):
            v = lab[y]
            if v in by_val:
                raise NotSimple(f"loops {by_val[v]} and {y} at {x} share the value {v!r}", (x, by_val[v], y))
            by_val[v] = y
        then = {}
        for v, y in by_val.items():
            for w, z in by_val.items():
                c = K.compose(y, z)
                if c is not None:
                    then[(v, w)] = lab[c]
        out[x] = (by_val, then)
    return out


def flat_rep_from_representation(R: Representation, base_vertex: str | None = None) -> FlatCategoryRepresentation:
    """Flat representation of a representation whose category is uniquely
    representable by irreducible arrows and whose vertex monoids agree."""
    O, lab, grp = R.category, R.annotation.label, R.group
    D = r_n_maps(O)
    K = flat_orbit_category(O, D)
    tables = _loop_tables(R)
    x0 = base_vertex if base_vertex is not None else O.vertices[0]
    by_val, then = tables[x0]
    for x, (bv, th) in tables.items():
        if set(bv) != set(by_val) or th != then:
            raise OrbifoldError(f"vertex monoids at {x0} and {x} differ", (x0, x))
    G = RightGroupalCategory(grp, frozenset(by_val), then)
    nh = {k: lab[m] for k, m in n_hat(O, D).items()}
    C = {}
    for a in K.arrows:
        s, t = K.arrows[a]
        for v, y in tables[s][0].items():
            ya = O.compose(y, a)
            if ya is None:
                continue
            if D.r[ya] != a:
                raise NotRightNormal(f"{y} * {a} does not reduce to {a}", (a, y))
            C[(a, v)] = lab[D.n[ya]]
    A = {a: lab[a] for a in K.arrows}
    return FlatCategoryRepresentation(K, A, nh, C, G)


def flat_rep_from_orbit(
    A: CategoryAction,
    T: Transversal,
    x: str,
    target=None,
    section: Callable | None = None,
) -> FlatCategoryRepresentation:
    """Flat representation of the fold of A, with G the vertex category of x in T.

    The loop transport is cross-checked against the lifted C' of the action,
    the vertex monoid against the vertex category, and the annotation
    equations are asserted.
    """
    if x not in T:
        raise ValueError(f"{x} is not in the transversal")
    R = build_representation(A, T, target, section)
    O = orbit_category(A, require_semiregular=True)
    Gx = vertex_category(A, x)
    F = flat_rep_from_representation(R, O.vertex_class(x))
    lift = section if section is not None else (lambda g: g)
    if {lift(v) for v in Gx.values} != set(F.G.values) or {
        (lift(v), lift(w)): lift(u) for (v, w), u in Gx.then.items()
    } != dict(F.G.then):
        raise OrbifoldError("vertex category and loop values of the fold disagree", x)
    Cl = derive_C(A)
    lab = R.annotation.label
    for (a, v), c in F.C.items():
        loop = next(y for y in O.category.loops(O.category.src(a), include_identity=True) if lab[y] == v)
        if lab[Cl[(a, loop)]] != c:
            raise NotRightNormal(f"C({a}, {loop}) disagrees with the lifted C'", (a, loop))
    rep = check_flat_annotation(F)
    if not rep.ok:
        v = rep.violations[0]
        raise AxiomViolation(v.law, v.witness, v.message)
    return F


def product_isomorphism(R: Representation, F: FlatCategoryRepresentation) -> CatMorphism:
    """(a, v) -> a * loop_v from the extension of F onto R's category."""
    E = F.extension()
    O, lab = R.category, R.annotation.label
    loops = {x: {lab[y]: y for y in O.loops(x, include_identity=True)} for x in O.vertices}
    parse = {F.G.label(v): v for v in F.G.values}
    amap = {}
    for eid in E.arrows:
        a, xs = eid.rsplit("|", 1)
        c = O.compose(a, loops[O.dst(a)][parse[xs]])
        if c is None:
            raise OrbifoldError(f"{a} * loop {xs} undefined", eid)
        amap[eid] = c
    return CatMorphism(E, O, {v: v for v in E.vertices}, amap)


# unfolding flat representations


@dataclass(frozen=True)
class FlatUnfolding:
    category: Category
    rep: FlatCategoryRepresentation
    window: tuple | None
    vertex_of: Mapping[str, tuple[str, Hashable]]
    arrow_of: Mapping[str, tuple[str, tuple]]


def unfold_flat(F: FlatCategoryRepresentation, window: Iterable | None = None, check: bool = True) -> FlatUnfolding:
    """Vertices (x, g); arrows (a, s -> t) from (dom a, A(a)^-1 s) to (cod a, t);
    (a, g) * (b, h) = (a . b, n(a, b) * C(b, g) * h) with the loop orbits placed
    to end at cod h."""
    if check:
        rep = check_flat_annotation(F, limit=1)
        if not rep.ok:
            v = rep.violations[0]
            raise AxiomViolation(v.law, v.witness, v.message)
    G, K = F.G, F.K
    grp = G.group
    layers = G.vertex_window(window)
    ls = set(layers)
    L = {g: grp.label(g) for g in layers}
    vertex_of, vertices = {}, []
    for x in K.vertices:
        for g in layers:
            vid = f"{x}@{L[g]}"
            vertices.append(vid)
            vertex_of[vid] = (x, g)
    arrows, arrow_of = {}, {}
    by_start: dict = {}
    for a, (s, t) in K.arrows.items():
        Ainv = grp.inv(F.A[a])
        for q in layers:
            for v in G.values:
                p = grp.mul(grp.inv(v), q)
                d = grp.mul(Ainv, p)
                if d not in ls:
                    continue
                aid = f"{a}@{G.arrow_id(p, q)}"
                arrows[aid] = (f"{s}@{L[d]}", f"{t}@{L[q]}")
                arrow_of[aid] = (a, (p, q))
                by_start.setdefault((s, d), []).append(aid)
    identities = {f"{x}@{L[g]}": f"{i}@{G.arrow_id(g, g)}" for x, i in K.identities.items() for g in layers}
    table = {}
    for aid, (a, (p, q)) in arrow_of.items():
        v = G.value(p, q)
        for bid in by_start.get((K.dst(a), q), []):
            b, (p2, q2) = arrow_of[bid]
            ab = K.compose(a, b)
            m, c = F.n.get((a, b)), F.C.get((b, v))
            if ab is None or m is None or c is None:
                continue
            mc = G.loop_then(m, c)
            tot = G.loop_then(mc, G.value(p2, q2)) if mc is not None else None
            if tot is None:
                continue
            start = grp.mul(grp.inv(tot), q2)
            cid = f"{ab}@{G.arrow_id(start, q2)}"
            if cid in arrows:
                table[(aid, bid)] = cid
    partial = window is not None or K.partial or G.loop_category().partial
    U = Category(vertices, arrows, identities, table, partial)
    return FlatUnfolding(U, F, tuple(layers) if window is not None else None, vertex_of, arrow_of)


def flat_to_plain_map(FU: FlatUnfolding, plain) -> CatMorphism:
    """(a, s -> t) -> ((a, value), A(a)^-1 s) into the unfolding of the extension."""
    F = FU.rep
    G, grp = F.G, F.G.group
    vmap = {vid: f"{x}@{grp.label(g)}" for vid, (x, g) in FU.vertex_of.items()}
    amap = {}
    for aid, (a, (p, q)) in FU.arrow_of.items():
        layer = grp.mul(grp.inv(F.A[a]), p)
        amap[aid] = f"{ext_id(a, G.label(G.value(p, q)))}@{grp.label(layer)}"
    return CatMorphism(FU.category, plain.category, vmap, amap)


# isomorphisms of flat representations


@dataclass(frozen=True)
class LayerShift:
    """Left multiplication by s on G: vertices g -> s g, loop values v -> s v s^-1."""

    group: Any
    s: Hashable

    def vertex(self, g):
        return self.group.mul(self.s, g)

    def loop(self, v):
        grp = self.group
        return grp.mul(grp.mul(self.s, v), grp.inv(self.s))

    def arrow(self, p, q) -> tuple:
        return self.vertex(p), self.vertex(q)

    def inverse(self) -> "LayerShift":
        return LayerShift(self.group, self.group.inv(self.s))


@dataclass(frozen=True)
class GroupalIso:
    """Isomorphism H -> G of right-groupal categories given on vertices.

    A loop orbit of value v goes to the orbit of value psi(v); ``None``
    stands for the identity map.
    """

    vertex_map: Mapping[Hashable, Hashable] | None = None

    def vertex(self, g):
        return g if self.vertex_map is None else self.vertex_map[g]

    def loop(self, v):
        return self.vertex(v)

    @classmethod
    def identity(cls) -> "GroupalIso":
        return cls(None)


@dataclass(frozen=True)
class FlatRepIso:
    """(phi, psi, h) from the second representation (L, B, m, D, H) to the first (K, A, n, C, G)."""

    phi: CatMorphism
    psi: GroupalIso
    h: Mapping[str, Any]


def identity_flat_iso(F: FlatCategoryRepresentation) -> FlatRepIso:
    grp = F.G.group
    return FlatRepIso(
        CatMorphism.identity(F.K),
        GroupalIso.identity(),
        {x: LayerShift(grp, grp.neutral) for x in F.K.vertices},
    )


def check_flat_iso(I: FlatRepIso, F1: FlatCategoryRepresentation, F2: FlatCategoryRepresentation) -> Verdict:
    """All four families of equations; the witness is the first violation (or None).

    F1 = (K, A, n, C, G) is the target, F2 = (L, B, m, D, H) the source of phi.
    """
    rep = flat_iso_report(I, F1, F2)
    return Verdict(rep.ok, None if rep.ok else rep.violations[0])


def flat_iso_report(
    I: FlatRepIso, F1: FlatCategoryRepresentation, F2: FlatCategoryRepresentation, limit: int | None = 20
) -> ValidationReport:
    rep = ValidationReport(limit=limit)
    K, L = F1.K, F2.K
    G, H = F1.G, F2.G
    grp = G.group
    phi, psi, h = I.phi, I.psi, I.h
    if phi.source != L or phi.target != K:
        rep.add("phi-type")
        return rep
    if not is_isomorphism(phi):
        rep.add("phi-iso")
        return rep
    if {psi.loop(v) for v in H.values} != set(G.values):
        rep.add("psi-loops")
    elif {(psi.loop(v), psi.loop(w)): psi.loop(u) for (v, w), u in H.then.items()} != dict(G.then):
        rep.add("psi-then")
    layers = G.vertex_window(None if grp.is_finite else G.values)
    Hlayers = [g for g in H.vertex_window(None if H.group.is_finite else H.values)]
    for x in L.vertices:
        hx = h[x]
        for p in layers:
            for v in G.values:
                q = grp.mul(v, p)
                for g in Hlayers:
                    pg = psi.vertex(g)
                    lhs = G.act_right(hx.arrow(p, q), pg)
                    rhs = hx.arrow(*G.act_right((p, q), pg))
                    if lhs != rhs:
                        rep.add("shift-equivariance", x, (p, q), g)
                        break
    for a in L.arrows:
        s, t = L.arrows[a]
        one = grp.neutral
        want = grp.mul(grp.mul(_inv_vertex(h[t], one, grp), F1.A[phi(a)]), h[s].vertex(one))
        if psi.vertex(F2.A[a]) != want:
            rep.add("annotation-shift", a)
    for (a, b), m in F2.n.items():
        nab = F1.n.get((phi(a), phi(b)))
        if nab is None or psi.loop(m) != _inv_loop(h[L.dst(b)], nab, grp):
            rep.add("overflow-shift", a, b)
    for (a, x), d in F2.C.items():
        inner = h[L.src(a)].loop(psi.loop(x))
        c = F1.C.get((phi(a), inner))
        if c is None or psi.loop(d) != _inv_loop(h[L.dst(a)], c, grp):
            rep.add("transport-shift", a, x)
    return rep


def _inv_vertex(hx, g, grp):
    return hx.inverse().vertex(g)


def _inv_loop(hx, v, grp):
    return hx.inverse().loop(v)


def find_layer_shift(
    F1: FlatCategoryRepresentation,
    F2: FlatCategoryRepresentation,
    phi: CatMorphism | None = None,
    budget: int = 10_000,
) -> FlatRepIso | None:
    """Search h(x) = left multiplication by s_x, with psi the identity on a shared group.

    s is propagated along a spanning forest of the base using
    B(a) = s_cod^-1 A(phi a) s_dom; root values range over the group when it
    is finite and are fixed to the neutral element otherwise.
    """
    grp = F1.G.group
    L = F2.K
    if phi is None:
        phi = CatMorphism(L, F1.K, {v: v for v in L.vertices}, {a: a for a in L.arrows})
    psi = GroupalIso.identity()
    roots = list(grp.elements) if grp.is_finite else [grp.neutral]
    adj: dict = {}
    for a, (s, t) in L.arrows.items():
        adj.setdefault(s, []).append((a, t, True))
        adj.setdefault(t, []).append((a, s, False))

    def propagate(root, s0) -> dict | None:
        s = {root: s0}
        stack = [root]
        while stack:
            u = stack.pop()
            for a, w, forward in adj.get(u, []):
                A, B = F1.A[phi(a)], F2.A[a]
                if forward:
                    want = grp.mul(grp.mul(A, s[u]), grp.inv(B))
                else:
                    want = grp.mul(grp.mul(grp.inv(A), s[u]), B)
                if w in s:
                    if s[w] != want:
                        return None
                    continue
                s[w] = want
                stack.append(w)
        return s

    per_comp: list[list[dict]] = []
    seen: set = set()
    for v in L.vertices:
        if v in seen:
            continue
        cands = []
        for r in roots:
            s = propagate(v, r)
            if s is not None:
                cands.append(s)
        if not cands:
            return None
        seen.update(cands[0])
        per_comp.append(cands)
    for combo in itertools.product(*per_comp):
        budget -= 1
        if budget < 0:
            return None
        h = {x: LayerShift(grp, sx) for s in combo for x, sx in s.items()}
        I = FlatRepIso(phi, psi, h)
        if check_flat_iso(I, F1, F2):
            return I
    return None


def flat_iso_unfolding_map(I: FlatRepIso, U1: FlatUnfolding, U2: FlatUnfolding) -> CatMorphism:
    """(a, g) -> (phi a, h(cod a)(psi g)) from the unfolding of F2 to that of F1."""
    G = U1.rep.G
    grp = G.group
    L = U2.rep.K
    vmap = {}
    for vid, (x, g) in U2.vertex_of.items():
        vmap[vid] = f"{I.phi.vertex_map[x]}@{grp.label(I.h[x].vertex(I.psi.vertex(g)))}"
    amap = {}
    for aid, (a, (p, q)) in U2.arrow_of.items():
        hx = I.h[L.dst(a)]
        p2, q2 = hx.arrow(I.psi.vertex(p), I.psi.vertex(q))
        amap[aid] = f"{I.phi(a)}@{G.arrow_id(p2, q2)}"
    return CatMorphism(U2.category, U1.category, vmap, amap)
