"""Partial subcategories, defining congruences, the property catalogue of
flat representations, and the gluing relation of tone systems."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, fields
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .action import CategoryAction, is_semiregular, is_translative
from .category import CatMorphism, Category, is_isomorphism, is_simple
from .errors import AxiomViolation, BudgetExhausted
from .flat import FlatCategoryRepresentation
from .iso import default_budget, find_isomorphism
from .orbitfold import Representation
from .paths import PATH_SEP, empty_path, quotient_by_congruence
from .report import ValidationReport

# partial subcategories


@dataclass(frozen=True)
class PartialSubcategory:
    """Vertices and arrows of ``parent``; a . b is defined iff a * b lies in the arrow set."""

    parent: Category
    vertices: frozenset[str]
    arrows: frozenset[str]

    @classmethod
    def full(cls, K: Category) -> "PartialSubcategory":
        return cls(K, frozenset(K.vertices), frozenset(K.arrows))

    @classmethod
    def discrete(cls, K: Category) -> "PartialSubcategory":
        return cls(K, frozenset(K.vertices), frozenset(K.identities.values()))

    @classmethod
    def from_arrows(cls, K: Category, arrows: Iterable[str]) -> "PartialSubcategory":
        """All vertices, their identities and the given arrows."""
        return cls(K, frozenset(K.vertices), frozenset(arrows) | frozenset(K.identities.values()))

    def category(self) -> Category:
        K = self.parent
        keep = self.arrows
        arrows = {a: K.arrows[a] for a in sorted(keep)}
        table = {(a, b): c for (a, b), c in K.table.items() if a in keep and b in keep and c in keep}
        return Category(
            [v for v in K.vertices if v in self.vertices],
            arrows,
            {v: K.identities[v] for v in K.vertices if v in self.vertices},
            table,
            partial=True,
        )

    def with_arrows(self, extra: Iterable[str]) -> "PartialSubcategory":
        return PartialSubcategory(self.parent, self.vertices, self.arrows | frozenset(extra))

    def __len__(self) -> int:
        return len(self.arrows)


def check_partial_subcategory(P: Category, K: Category, limit: int | None = 20) -> ValidationReport:
    """Subgraph with all identities whose concatenation is defined exactly when K's composite is in P."""
    rep = ValidationReport(limit=limit)
    for v in P.vertices:
        if v not in K.identities:
            rep.add("vertex", v)
        elif P.identities.get(v) != K.identities[v] or K.identities[v] not in P.arrows:
            rep.add("identity", v)
    for a, st in P.arrows.items():
        if K.arrows.get(a) != st:
            rep.add("arrow", a)
    if not rep.ok:
        return rep
    for a, b in P.composable_pairs():
        c = K.compose(a, b)
        want = c if c in P.arrows else None
        if P.compose(a, b) != want:
            rep.add("concatenation", a, b, message=f"P gives {P.compose(a, b)!r}, rule gives {want!r}")
    return rep


# fully / flat defining


def _budget(budget: int | None) -> int:
    return default_budget() if budget is None else budget


@dataclass(frozen=True)
class DefiningResult:
    fully: bool | None
    flat: bool | None
    witness: dict


@dataclass
class _Presentation:
    quotient: Category
    to_quotient: CatMorphism
    words: dict[str, tuple[str, tuple[str, ...]]]
    truncated: bool
    confluent: bool


def _present(P: Category, max_len: int, collapse_loops: bool, budget: int) -> _Presentation:
    """Path category of P modulo a.b ~ a*b (and loops ~ identities), on reduced words.

    Words are rewritten by replacing composable neighbours with their
    concatenation and, with ``collapse_loops``, by deleting closed subpaths.
    Every reduced word of length <= max_len becomes an arrow; distinct
    reduced forms of the same word are identified by the congruence.
    """
    edges = {a: st for a, st in P.arrows.items() if not P.is_identity(a)}
    out: dict[str, list[str]] = defaultdict(list)
    for e, (s, _) in sorted(edges.items()):
        out[s].append(e)
    cache: dict[tuple, frozenset] = {}
    steps = [budget]

    def nf(start: str, word: tuple[str, ...]) -> frozenset:
        key = (start, word)
        if key in cache:
            return cache[key]
        steps[0] -= 1
        if steps[0] < 0:
            raise BudgetExhausted("defining-congruence budget exhausted")
        reducts = []
        for i in range(len(word) - 1):
            c = P.compose(word[i], word[i + 1])
            if c is not None:
                mid = () if P.is_identity(c) else (c,)
                reducts.append(word[:i] + mid + word[i + 2 :])
        if collapse_loops:
            for i in range(len(word)):
                for j in range(i + 1, len(word) + 1):
                    if edges[word[i]][0] == edges[word[j - 1]][1]:
                        reducts.append(word[:i] + word[j:])
        if not reducts:
            res = frozenset([word])
        else:
            res = frozenset().union(*(nf(start, r) for r in reducts))
        cache[key] = res
        return res

    def name(start: str, word: tuple[str, ...]) -> str:
        return PATH_SEP.join(word) if word else empty_path(start)

    def end(start: str, word: tuple[str, ...]) -> str:
        return edges[word[-1]][1] if word else start

    words: dict[str, tuple[str, tuple[str, ...]]] = {}
    seeds: list[tuple[str, str]] = []
    truncated = False
    confluent = True
    # close the set of reduced words under appending an edge
    queue = [(x, ()) for x in P.vertices]
    seen = set(queue)
    while queue:
        s, w = queue.pop()
        for e in out[end(s, w)]:
            forms = sorted(nf(s, w + (e,)))
            if len(forms) > 1:
                confluent = False
            keep = [f for f in forms if len(f) <= max_len]
            if len(keep) < len(forms):
                truncated = True
            for f in keep:
                if (s, f) not in seen:
                    seen.add((s, f))
                    queue.append((s, f))
            for f, g in zip(keep, keep[1:]):
                seeds.append((name(s, f), name(s, g)))
    for s, w in seen:
        words[name(s, w)] = (s, w)
    arrows = {k: (s, end(s, w)) for k, (s, w) in words.items()}
    by_start: dict[str, list[str]] = defaultdict(list)
    for k, (s, _) in arrows.items():
        by_start[s].append(k)
    table = {}
    for p, (s, w) in words.items():
        t = end(s, w)
        for q in by_start[t]:
            forms = sorted(nf(s, w + words[q][1]))
            if len(forms) > 1:
                confluent = False
            keep = [f for f in forms if len(f) <= max_len]
            if len(keep) < len(forms):
                truncated = True
            if keep:
                table[(p, q)] = name(s, keep[0])
                for f in keep[1:]:
                    seeds.append((name(s, keep[0]), name(s, f)))
    identities = {x: empty_path(x) for x in P.vertices}
    C = Category(list(P.vertices), arrows, identities, table, partial=True)
    Q, to_q = quotient_by_congruence(C, seeds)
    return _Presentation(Q, to_q, words, truncated, confluent)


def _evaluate(pres: _Presentation, K: Category) -> CatMorphism | None:
    """Canonical map from the quotient into K sending a word to its composite."""
    amap: dict[str, str] = {}
    for k, (s, w) in pres.words.items():
        c = K.identities[s]
        for e in w:
            c = K.compose(c, e)
            if c is None:
                return None
        cls = pres.to_quotient.arrow_map[k]
        if amap.setdefault(cls, c) != c:
            return None
    vmap = {v: v for v in pres.quotient.vertices}
    return CatMorphism(pres.quotient, K, vmap, amap)


def _reachable(P: Category) -> dict[str, set[str]]:
    reach = {}
    for x in P.vertices:
        seen, stack = {x}, [x]
        while stack:
            u = stack.pop()
            for a in P.out_arrows(u):
                v = P.dst(a)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        reach[x] = seen
    return reach


def _annotation_invariant(P: Category, A: Mapping[str, Hashable], group) -> bool:
    """Whether A(a . b) = A(b) A(a) for every concatenation in P, so that the
    path annotation is constant on classes of the word congruence."""
    return all(P.compose(a, b) is None or A[P.compose(a, b)] == group.mul(A[b], A[a]) for a, b in P.composable_pairs())


def _path_values_exceed(P: Category, A: Mapping[str, Hashable], group, bound: int, max_len: int) -> tuple | None:
    """Breadth-first count of (start, end, path annotation) triples over paths
    of length <= max_len; returns a witness once more than ``bound`` are seen."""
    seen = {(x, x, group.neutral) for x in P.vertices}
    frontier = list(seen)
    edges = [a for a in P.arrows if not P.is_identity(a)]
    out = defaultdict(list)
    for e in edges:
        out[P.src(e)].append(e)
    for _ in range(max_len):
        nxt = []
        for s, t, g in frontier:
            for e in out[t]:
                item = (s, P.dst(e), group.mul(A[e], g))
                if item not in seen:
                    seen.add(item)
                    nxt.append(item)
                    if len(seen) > bound:
                        return item
        frontier = nxt
    return None


def _decide(
    P: Category, K: Category, max_len: int, collapse: bool, budget: int, A=None, group=None
) -> tuple[bool | None, dict]:
    reach = _reachable(P)
    for a, (s, t) in K.arrows.items():
        if t not in reach.get(s, set()):
            return False, {"unreachable": a}
    if not collapse and A is not None and _annotation_invariant(P, A, group):
        w = _path_values_exceed(P, A, group, len(K.arrows), max_len)
        if w is not None:
            # distinct path annotations give distinct classes: more classes than arrows of K
            return False, {"path-annotation": w}
    pres = _present(P, max_len, collapse, budget)
    ev = _evaluate(pres, K)
    if ev is not None and is_isomorphism(ev):
        return True, {"map": ev, "quotient": pres.quotient}
    if not pres.truncated:
        iso = find_isomorphism(pres.quotient, K, budget)
        if iso is not None:
            return True, {"map": iso, "quotient": pres.quotient}
        return False, {"quotient": pres.quotient}
    if not collapse and pres.confluent and len(pres.quotient.arrows) > len(K.arrows):
        # unique reduced forms: the quotient already has more arrows than K
        return False, {"quotient-size": len(pres.quotient.arrows)}
    return None, {"truncated": True, "quotient": pres.quotient}


def check_defining(
    P: Category,
    K: Category,
    max_len: int = 4,
    budget: int | None = None,
    annotation: Mapping[str, Hashable] | None = None,
    group=None,
) -> DefiningResult:
    """Tri-state fully / flat defining checks on reduced words of bounded length.

    With an annotation that P's concatenation respects, the path annotation
    separates classes, which can prove that P is not fully defining.
    """
    b = _budget(budget)
    fully, wf = _decide(P, K, max_len, False, b, annotation, group)
    flat, wl = _decide(P, K, max_len, True, b)
    return DefiningResult(fully, flat, {"fully": wf, "flat": wl})


# flat representations over partial subcategories


@dataclass(frozen=True)
class FlatRepresentation:
    """A flat category representation restricted to a partial subcategory of its base."""

    partial: PartialSubcategory
    rep: FlatCategoryRepresentation

    @property
    def base(self) -> Category:
        return self.rep.K

    def restrict(self, arrows: Iterable[str]) -> "FlatRepresentation":
        return FlatRepresentation(PartialSubcategory.from_arrows(self.rep.K, arrows), self.rep)


@dataclass(frozen=True)
class PropertyFlags:
    faithful: bool | None
    simple: bool | None
    ordered: bool | None
    s_symmetric: bool | None
    translatively_s_symmetric: bool | None
    antisymmetric: bool | None
    complete: bool | None
    antisym_s_complete: bool | None

    def as_dict(self) -> dict[str, bool | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def table(self) -> str:
        show = {True: "true", False: "false", None: "unknown"}
        return "\n".join(f"{k:28s} {show[v]}" for k, v in self.as_dict().items())


def _unpack(F) -> tuple[PartialSubcategory, Category, Mapping[str, Hashable], Any]:
    if isinstance(F, FlatRepresentation):
        return F.partial, F.rep.K, F.rep.A, F.rep.G.group
    if isinstance(F, FlatCategoryRepresentation):
        return PartialSubcategory.full(F.K), F.K, F.A, F.G.group
    if isinstance(F, Representation):
        return PartialSubcategory.full(F.category), F.category, F.annotation.label, F.group
    raise TypeError(f"unsupported representation {type(F).__name__}")


def faithful_flag(P: Category, A: Mapping[str, Hashable]) -> bool:
    return all(len({A[a] for a in arrs}) == len(arrs) for arrs in P._hom.values())


def ordered_flag(P: Category) -> bool:
    rel = {(s, t) for s, t in P.arrows.values()}
    vs = P.vertices
    if any((x, x) not in rel for x in vs):
        return False
    if any((y, x) in rel for x, y in rel if x != y):
        return False
    succ = defaultdict(set)
    for x, y in rel:
        succ[x].add(y)
    return all((x, z) in rel for x, y in rel for z in succ[y])


def antisymmetry_witness(P: Category, A: Mapping[str, Hashable], group) -> tuple[str, str] | None:
    """A pair a: x -> y, b: y -> x (x != y) with A(a)A(b) = 1, if any."""
    e = group.neutral
    for a, (x, y) in P.arrows.items():
        if x == y:
            continue
        for b in P.hom(y, x):
            if group.mul(A[a], A[b]) == e:
                return a, b
    return None


def restrict_action(S: CategoryAction, P: PartialSubcategory) -> CategoryAction | None:
    """S acting on the partial subcategory, or None when some element leaves it."""
    C = P.category()
    for g in S.group.elements:
        if any(S.act_arrow(a, g) not in P.arrows for a in P.arrows):
            return None
        if any(S.act_vertex(v, g) not in P.vertices for v in P.vertices):
            return None
    vt = {g: {v: S.act_vertex(v, g) for v in P.vertices} for g in S.group.elements}
    at = {g: {a: S.act_arrow(a, g) for a in P.arrows} for g in S.group.elements}
    return CategoryAction(S.group, C, vt, at)


def symmetry_flags(S: CategoryAction | None, P: PartialSubcategory) -> tuple[bool, bool]:
    if S is None:
        single = len(P.vertices) <= 1
        return single, single
    R = restrict_action(S, P)
    if R is None:
        return False, False
    orbit = R.vertex_orbit_of()
    transitive = all(len(o) == len(P.vertices) for o in orbit.values())
    if not transitive:
        return False, False
    return True, bool(is_semiregular(R)) and bool(is_translative(R))


def _complete(P: PartialSubcategory, K: Category, max_len: int, budget: int | None, A=None, group=None) -> bool | None:
    try:
        return _decide(P.category(), K, max_len, False, _budget(budget), A, group)[0]
    except BudgetExhausted:
        return None


def _orbit_extensions(S: CategoryAction | None, P: PartialSubcategory, K: Category) -> list[frozenset[str]]:
    rest = [a for a in K.non_identity_arrows() if a not in P.arrows]
    if S is None:
        return [frozenset([a]) for a in sorted(rest)]
    orb = S.arrow_orbit_of()
    return sorted({orb[a] for a in rest}, key=lambda o: sorted(o))


def property_catalogue(
    F,
    S: CategoryAction | None = None,
    budget: int | None = None,
    max_len: int | None = None,
) -> PropertyFlags:
    """Each flag by its definition; completeness is decided on bounded word quotients."""
    P, K, A, group = _unpack(F)
    PC = P.category()
    L = max_len if max_len is not None else max(2, len(K.vertices))
    faithful = faithful_flag(PC, A)
    simple = is_simple(PC)
    ordered = ordered_flag(PC)
    s_sym, t_sym = symmetry_flags(S, P)
    anti = antisymmetry_witness(PC, A, group) is None
    complete = _complete(P, K, L, budget, A, group)
    if not (anti and s_sym) or complete is False:
        asc: bool | None = False
    elif complete is None:
        asc = None
    else:
        # complete is an up-set, so a bigger candidate stays complete
        asc = True
        for ext in _orbit_extensions(S, P, K):
            Q = P.with_arrows(ext)
            QC = Q.category()
            if antisymmetry_witness(QC, A, group) is None and symmetry_flags(S, Q)[0]:
                asc = False
                break
    return PropertyFlags(faithful, simple, ordered, s_sym, t_sym, anti, complete, asc)


DEFAULT_REQUIRE = ("faithful", "antisymmetric", "translatively_s_symmetric", "complete")


def search_maximal(
    F,
    S: CategoryAction | None = None,
    budget: int = 10_000,
    require: Sequence[str] = DEFAULT_REQUIRE,
    max_len: int | None = None,
) -> list[tuple[FlatRepresentation | PartialSubcategory, PropertyFlags]]:
    """Maximal partial subcategories above F's that keep the required flags.

    The ascent adds whole S-orbits of arrows; faithful, simple and
    antisymmetric are down-sets (a failing node is pruned), complete is an
    up-set.  Results are 1-maximal: no single orbit can be added.
    """
    P0, K, A, group = _unpack(F)
    rep = F.rep if isinstance(F, FlatRepresentation) else F if isinstance(F, FlatCategoryRepresentation) else None
    L = max_len if max_len is not None else max(2, len(K.vertices))
    cands = _orbit_extensions(S, P0, K)
    down = {"faithful", "simple", "antisymmetric"}
    cache: dict[frozenset, dict[str, bool | None]] = {}
    steps = [budget]

    def flags(P: PartialSubcategory) -> dict[str, bool | None]:
        if P.arrows in cache:
            return cache[P.arrows]
        steps[0] -= 1
        if steps[0] < 0:
            raise BudgetExhausted("maximal-subrepresentation search budget exhausted")
        PC = P.category()
        out: dict[str, bool | None] = {}
        for name in require:
            if name == "faithful":
                out[name] = faithful_flag(PC, A)
            elif name == "simple":
                out[name] = is_simple(PC)
            elif name == "ordered":
                out[name] = ordered_flag(PC)
            elif name == "antisymmetric":
                out[name] = antisymmetry_witness(PC, A, group) is None
            elif name in ("s_symmetric", "translatively_s_symmetric"):
                s, t = symmetry_flags(S, P)
                out[name] = s if name == "s_symmetric" else t
            elif name == "complete":
                out[name] = _complete(P, K, L, None, A, group)
            else:
                raise ValueError(f"unknown flag {name!r}")
        cache[P.arrows] = out
        return out

    def ok(P: PartialSubcategory) -> bool:
        return all(v is True for v in flags(P).values())

    def dead(P: PartialSubcategory) -> bool:
        f = flags(P)
        return any(f.get(n) is False for n in down if n in f)

    results: dict[frozenset, PartialSubcategory] = {}
    visited: set[frozenset] = set()
    stack = [P0]
    while stack:
        P = stack.pop()
        if P.arrows in visited:
            continue
        visited.add(P.arrows)
        if dead(P):
            continue
        grown = False
        for ext in cands:
            if ext <= P.arrows:
                continue
            Q = P.with_arrows(ext)
            if dead(Q):
                continue
            if ok(Q) or not ok(P):
                stack.append(Q)
                grown = grown or ok(Q)
        if ok(P) and not grown:
            results[P.arrows] = P
    out = []
    for P in sorted(results.values(), key=lambda p: sorted(p.arrows)):
        item = FlatRepresentation(P, rep) if rep is not None else P
        out.append((item, property_catalogue(item if rep is not None else _as_rep(P, A, group), S, max_len=L)))
    return out


def _as_rep(P: PartialSubcategory, A, group) -> Representation:
    from .orbitfold import Annotation

    C = P.category()
    return Representation(C, Annotation(group, {a: A[a] for a in C.arrows}))


# tone systems


@dataclass(frozen=True)
class ToneSystem:
    tones: tuple[str, ...]
    group: Any
    delta: Mapping[tuple[str, str], Hashable]


def check_tone_system(T: ToneSystem, limit: int | None = 20) -> ValidationReport:
    """delta(t, t) = 1 and delta(t1, t3) = delta(t2, t3) delta(t1, t2)."""
    rep = ValidationReport(limit=limit)
    G, d = T.group, T.delta
    for t in T.tones:
        if d[(t, t)] != G.neutral:
            rep.add("identity", t)
    for t1, t2, t3 in itertools.product(T.tones, repeat=3):
        if d[(t1, t3)] != G.mul(d[(t2, t3)], d[(t1, t2)]):
            rep.add("cocycle", t1, t2, t3)
    return rep


def sigma_relation(T: ToneSystem) -> set[tuple[str, str]]:
    """t1 ~ t2 iff some t3 has delta(t1, t3) = delta(t2, t3)."""
    d = T.delta
    return {
        (t1, t2)
        for t1 in T.tones
        for t2 in T.tones
        if any(d[(t1, t3)] == d[(t2, t3)] for t3 in T.tones)
    }


def sigma_classes(T: ToneSystem) -> list[frozenset[str]]:
    rel = sigma_relation(T)
    for t in T.tones:
        if (t, t) not in rel:
            raise AxiomViolation("sigma-reflexive", t)
    for a, b in rel:
        if (b, a) not in rel:
            raise AxiomViolation("sigma-symmetric", (a, b))
    succ = defaultdict(set)
    for a, b in rel:
        succ[a].add(b)
    for a, b in rel:
        for c in succ[b]:
            if (a, c) not in rel:
                raise AxiomViolation("sigma-transitive", (a, b, c))
    classes = {frozenset(succ[t]) for t in T.tones}
    return sorted(classes, key=lambda c: sorted(c))


def tone_system_from_pitches(pitch: Mapping[str, int]) -> ToneSystem:
    """Tones with integer positions; delta(a, b) = pitch(b) - pitch(a) in Z."""
    from .groups import AbelianGroup

    G = AbelianGroup(1)
    tones = tuple(sorted(pitch))
    delta = {(a, b): (pitch[b] - pitch[a],) for a in tones for b in tones}
    return ToneSystem(tones, G, delta)


def tone_system_from_group(G) -> ToneSystem:
    """Tones are the group elements, delta(a, b) = b a^-1."""
    tones = tuple(G.label(g) for g in G.elements)
    back = {G.label(g): g for g in G.elements}
    delta = {(a, b): G.mul(back[b], G.inv(back[a])) for a in tones for b in tones}
    return ToneSystem(tones, G, delta)
