"""Backtracking isomorphism search for finite (partial) categories.

Vertices are matched first, pruned by colour refinement and hom-set sizes;
arrows are then matched hom-set by hom-set with forward propagation along
the composition table.  A step counter bounds the work so that "ran out of
budget" is distinguishable from "no isomorphism".
"""
from __future__ import annotations

import os
import sys
from collections import Counter, defaultdict
from typing import Mapping

from .category import CatMorphism, Category
from .errors import BudgetExhausted

DEFAULT_BUDGET = 2_000_000


def default_budget() -> int:
    env = os.environ.get("ORBIFOLD_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class _Steps:
    def __init__(self, budget: int):
        self.left = budget

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExhausted("isomorphism search budget exhausted")


def _hom_sizes(C: Category) -> dict[tuple[str, str], int]:
    return {k: len(v) for k, v in C._hom.items() if v}


def _neighbours(X: Category, h: dict[tuple[str, str], int]) -> dict[str, list[tuple[str, int, int]]]:
    pairs = {frozenset(k) for k in h if k[0] != k[1]}
    nbr: dict[str, list[tuple[str, int, int]]] = defaultdict(list)
    for p in pairs:
        x, y = sorted(p)
        nbr[x].append((y, h.get((x, y), 0), h.get((y, x), 0)))
        nbr[y].append((x, h.get((y, x), 0), h.get((x, y), 0)))
    return nbr


def _refine(C: Category, D: Category) -> tuple[dict[str, int], dict[str, int]]:
    """Joint colour refinement; equal colours are necessary for matching."""
    hc, hd = _hom_sizes(C), _hom_sizes(D)

    def init(X, h):
        col = {}
        for v in X.vertices:
            comps = sum(1 for a in X.hom(v, v) for b in X.hom(v, v) if (a, b) in X.table)
            col[v] = (h.get((v, v), 0), len(X.out_arrows(v)), len(X.in_arrows(v)), comps)
        return col

    cc, cd = init(C, hc), init(D, hd)
    nbr_c, nbr_d = _neighbours(C, hc), _neighbours(D, hd)
    ncolours = -1
    while True:
        sig_c = {v: (cc[v], tuple(sorted((k1, k2, cc[w]) for w, k1, k2 in nbr_c[v]))) for v in C.vertices}
        sig_d = {v: (cd[v], tuple(sorted((k1, k2, cd[w]) for w, k1, k2 in nbr_d[v]))) for v in D.vertices}
        palette = {s: i for i, s in enumerate(sorted(set(sig_c.values()) | set(sig_d.values()), key=repr))}
        cc = {v: palette[s] for v, s in sig_c.items()}
        cd = {v: palette[s] for v, s in sig_d.items()}
        if len(palette) == ncolours:
            return cc, cd
        ncolours = len(palette)


def _quick_reject(C: Category, D: Category) -> bool:
    if len(C.vertices) != len(D.vertices) or len(C.arrows) != len(D.arrows) or len(C.table) != len(D.table):
        return True
    if sorted(_hom_sizes(C).values()) != sorted(_hom_sizes(D).values()):
        return True
    return False


def find_isomorphism(
    C: Category,
    D: Category,
    budget: int | None = None,
    vertex_hint: Mapping[str, str] | None = None,
) -> CatMorphism | None:
    """Return an isomorphism C -> D, or None if none exists.

    Raises BudgetExhausted if the search was cut short.  Composition must
    match exactly, including where it is undefined in partial categories.
    ``vertex_hint`` pins some vertex images.
    """
    steps = _Steps(default_budget() if budget is None else budget)
    if _quick_reject(C, D):
        return None
    col_c, col_d = _refine(C, D)
    if Counter(col_c.values()) != Counter(col_d.values()):
        return None
    hc, hd = _hom_sizes(C), _hom_sizes(D)
    by_col = defaultdict(list)
    for v in D.vertices:
        by_col[col_d[v]].append(v)

    # vertex order: rarest colour first, then grow along adjacency
    adj = defaultdict(set)
    for (x, y) in hc:
        adj[x].add(y)
        adj[y].add(x)
    order: list[str] = []
    placed = set()
    remaining = sorted(C.vertices, key=lambda v: (len(by_col[col_c[v]]), v))
    while remaining:
        start = remaining[0]
        stack = [start]
        while stack:
            v = stack.pop(0)
            if v in placed:
                continue
            placed.add(v)
            order.append(v)
            stack.extend(sorted(adj[v] - placed, key=lambda w: (len(by_col[col_c[w]]), w)))
        remaining = [v for v in remaining if v not in placed]

    vmap: dict[str, str] = {}
    used_v: set[str] = set()

    def vertex_ok(v: str, w: str) -> bool:
        if hc.get((v, v), 0) != hd.get((w, w), 0):
            return False
        for u, z in vmap.items():
            if hc.get((v, u), 0) != hd.get((w, z), 0) or hc.get((u, v), 0) != hd.get((z, w), 0):
                return False
        return True

    fact = Counter()
    for (a, b), c in C.table.items():
        if not C.is_identity(a) and not C.is_identity(b):
            fact[c] += 1
    arrow_order = sorted(C.non_identity_arrows(), key=lambda a: (fact[a], len(C.hom(*C.arrows[a])), a))

    def match_arrows() -> dict[str, str] | None:
        amap: dict[str, str] = {}
        used: set[str] = set()
        trail: list[str] = []

        def assign(a: str, b: str) -> bool:
            queue = [(a, b)]
            while queue:
                a, b = queue.pop()
                if a in amap:
                    if amap[a] != b:
                        return False
                    continue
                if b in used or D.arrows[b] != (vmap[C.src(a)], vmap[C.dst(a)]):
                    return False
                amap[a] = b
                used.add(b)
                trail.append(a)
                for y in C.out_arrows(C.dst(a)):
                    if y in amap:
                        c = C.table.get((a, y))
                        d = D.table.get((b, amap[y]))
                        if (c is None) != (d is None):
                            return False
                        if c is not None:
                            queue.append((c, d))
                for x in C.in_arrows(C.src(a)):
                    if x in amap:
                        c = C.table.get((x, a))
                        d = D.table.get((amap[x], b))
                        if (c is None) != (d is None):
                            return False
                        if c is not None:
                            queue.append((c, d))
            return True

        def undo(mark: int) -> None:
            while len(trail) > mark:
                a = trail.pop()
                used.discard(amap.pop(a))

        for v, i in C.identities.items():
            if not assign(i, D.identities[vmap[v]]):
                return None

        def rec(k: int) -> bool:
            while k < len(arrow_order) and arrow_order[k] in amap:
                k += 1
            if k == len(arrow_order):
                return True
            a = arrow_order[k]
            for b in D.hom(vmap[C.src(a)], vmap[C.dst(a)]):
                if b in used:
                    continue
                steps.tick()
                mark = len(trail)
                if assign(a, b) and rec(k + 1):
                    return True
                undo(mark)
            return False

        return dict(amap) if rec(0) else None

    def rec_v(k: int) -> CatMorphism | None:
        if k == len(order):
            amap = match_arrows()
            return CatMorphism(C, D, dict(vmap), amap) if amap is not None else None
        v = order[k]
        cands = [vertex_hint[v]] if vertex_hint and v in vertex_hint else by_col[col_c[v]]
        for w in cands:
            if w in used_v or col_d.get(w) != col_c[v] or not vertex_ok(v, w):
                continue
            steps.tick()
            vmap[v] = w
            used_v.add(w)
            found = rec_v(k + 1)
            if found is not None:
                return found
            del vmap[v]
            used_v.discard(w)
        return None

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(C.arrows) + 1000))
    try:
        return rec_v(0)
    finally:
        sys.setrecursionlimit(limit)
