"""Length-bounded path categories and quotients by generated congruences."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from .category import CatMorphism, Category

PATH_SEP = "·"


def empty_path(x: str) -> str:
    return f"()@{x}"


def graph_of(C: Category) -> tuple[list[str], dict[str, tuple[str, str]]]:
    """Underlying graph without identity loops."""
    return list(C.vertices), {a: st for a, st in C.arrows.items() if not C.is_identity(a)}


def bounded_path_category(
    vertices: Sequence[str], edges: Mapping[str, tuple[str, str]], max_len: int
) -> tuple[Category, dict[str, tuple[str, ...]]]:
    """Paths of length <= max_len; concatenation when the total length fits.

    Returns the partial category and a map from arrow id to its edge word.
    Edge words are joined with ``·``; empty paths are ``()@x``.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    out: dict[str, list[str]] = defaultdict(list)
    for e, (s, _) in sorted(edges.items()):
        out[s].append(e)
    word: dict[str, tuple[str, ...]] = {}
    arrows: dict[str, tuple[str, str]] = {}
    identities = {}
    for x in vertices:
        i = empty_path(x)
        identities[x] = i
        arrows[i] = (x, x)
        word[i] = ()
    frontier = [((e,), edges[e][0], edges[e][1]) for e in sorted(edges)]
    length = 1
    while frontier and length <= max_len:
        nxt = []
        for w, s, t in frontier:
            pid = PATH_SEP.join(w)
            arrows[pid] = (s, t)
            word[pid] = w
            if length < max_len:
                for e in out[t]:
                    nxt.append((w + (e,), s, edges[e][1]))
        frontier = nxt
        length += 1
    by_word = {w: p for p, w in word.items() if w}
    by_end: dict[str, list[str]] = defaultdict(list)
    by_start: dict[str, list[str]] = defaultdict(list)
    for p, (s, t) in arrows.items():
        by_end[t].append(p)
        by_start[s].append(p)
    table = {}
    for y in vertices:
        for p in by_end[y]:
            for q in by_start[y]:
                if not word[p]:
                    table[(p, q)] = q
                elif not word[q]:
                    table[(p, q)] = p
                elif len(word[p]) + len(word[q]) <= max_len:
                    table[(p, q)] = by_word[word[p] + word[q]]
    return Category(list(vertices), arrows, identities, table, partial=True), word


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = defaultdict(list)
        for x in self.parent:
            out[self.find(x)].append(x)
        return out


def congruence_closure(C: Category, seed_pairs: Iterable[tuple[str, str]]) -> tuple[dict[str, str], dict[str, str]]:
    """Smallest congruence containing the seeds.

    Returns (arrow -> class root, vertex -> class root).  Merging two arrows
    merges their endpoints, merging vertices merges their identities, and
    composites of merged arrows are merged (worklist fixpoint).
    """
    arr = _UnionFind(C.arrows)
    ver = _UnionFind(C.vertices)
    pending = list(seed_pairs)
    entries = list(C.table.items())
    while True:
        while pending:
            a, b = pending.pop()
            if arr.union(a, b):
                for end in (C.src, C.dst):
                    x, y = end(a), end(b)
                    if ver.union(x, y):
                        pending.append((C.identities[x], C.identities[y]))
        seen: dict[tuple[str, str], str] = {}
        for (a, b), c in entries:
            key = (arr.find(a), arr.find(b))
            prev = seen.setdefault(key, c)
            if arr.find(prev) != arr.find(c):
                pending.append((prev, c))
        if not pending:
            break
    return {a: arr.find(a) for a in C.arrows}, {v: ver.find(v) for v in C.vertices}


def quotient_by_congruence(C: Category, seed_pairs: Iterable[tuple[str, str]]) -> tuple[Category, CatMorphism]:
    """Quotient by the congruence generated by the seeds.

    Classes are named by their least member.  The quotient is marked partial
    exactly when some composable pair of classes has no composable
    representatives (so a bounded path category can have a total quotient).
    """
    acls, vcls = congruence_closure(C, seed_pairs)
    aname: dict[str, str] = {}
    for a, r in acls.items():
        if r not in aname or a < aname[r]:
            aname[r] = a
    vname: dict[str, str] = {}
    for v, r in vcls.items():
        if r not in vname or v < vname[r]:
            vname[r] = v
    amap = {a: aname[acls[a]] for a in C.arrows}
    vmap = {v: vname[vcls[v]] for v in C.vertices}
    arrows = {}
    for a, (s, t) in C.arrows.items():
        arrows[amap[a]] = (vmap[s], vmap[t])
    identities = {vmap[v]: amap[i] for v, i in C.identities.items()}
    table = {}
    for (a, b), c in C.table.items():
        table[(amap[a], amap[b])] = amap[c]
    out = defaultdict(list)
    for a, (s, _) in arrows.items():
        out[s].append(a)
    partial = any((a, b) not in table for a, (_, t) in arrows.items() for b in out[t])
    vertices = sorted(set(vmap.values()))
    Q = Category(vertices, arrows, identities, table, partial)
    return Q, CatMorphism(C, Q, vmap, amap)
