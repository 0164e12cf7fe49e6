"""Groups used as acting groups and as annotation targets.

Two concrete kinds:

* ``FiniteGroup``: an explicit Cayley table over string element ids.
* ``AbelianGroup``: Z^d x Z_{n1} x ... x Z_{nk} with integer-vector elements,
  torsion coordinates kept in ``[0, n_i)``.

Both expose ``mul``, ``inv``, ``neutral``, ``is_finite``, ``elements``,
``label`` and ``parse`` so the rest of the package can treat them alike.
Products follow the action convention ``(x^g)^h = x^(g h)``: for permutation
groups ``g h`` means "apply g, then h".
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .errors import InfiniteGroup
from .report import ValidationReport


class FiniteGroup:
    __slots__ = ("elements", "neutral", "_mul", "_inv", "_index")

    def __init__(self, elements: Sequence[str], mul: Mapping[tuple[str, str], str]):
        self.elements: tuple[str, ...] = tuple(elements)
        self._index = {g: i for i, g in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("duplicate group elements")
        self._mul = dict(mul)
        neutral = None
        for e in self.elements:
            if all(self._mul.get((e, g)) == g and self._mul.get((g, e)) == g for g in self.elements):
                neutral = e
                break
        if neutral is None:
            raise ValueError("multiplication table has no neutral element")
        self.neutral: str = neutral
        self._inv = {}
        for g in self.elements:
            for h in self.elements:
                if self._mul.get((g, h)) == neutral:
                    self._inv[g] = h
                    break
            else:
                raise ValueError(f"element {g!r} has no inverse")

    is_finite = True

    def mul(self, g: str, h: str) -> str:
        return self._mul[(g, h)]

    def inv(self, g: str) -> str:
        return self._inv[g]

    def prod(self, *gs: str) -> str:
        out = self.neutral
        for g in gs:
            out = self._mul[(out, g)]
        return out

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.elements == other.elements and self._mul == other._mul

    def __hash__(self) -> int:
        return hash(tuple(self.elements))

    def __contains__(self, g) -> bool:
        return g in self._index

    def label(self, g: str) -> str:
        return g

    def parse(self, s: str) -> str:
        if s not in self._index:
            raise KeyError(s)
        return s

    def table(self) -> dict[tuple[str, str], str]:
        return dict(self._mul)

    def check(self) -> ValidationReport:
        rep = ValidationReport(limit=20)
        els = self.elements
        for g, h in itertools.product(els, els):
            if self._mul.get((g, h)) not in self._index:
                rep.add("closure", g, h)
        if not rep.ok:
            return rep
        for g, h, k in itertools.product(els, els, els):
            if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                rep.add("associativity", g, h, k)
        return rep

    def to_json(self) -> dict:
        return {
            "kind": "finite",
            "elements": list(self.elements),
            "mul": [[g, h, self._mul[(g, h)]] for g in self.elements for h in self.elements],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "FiniteGroup":
        return cls(doc["elements"], {(g, h): k for g, h, k in doc["mul"]})

    # constructors

    @classmethod
    def trivial(cls, name: str = "0") -> "FiniteGroup":
        return cls([name], {(name, name): name})

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        els = [str(i) for i in range(n)]
        return cls(els, {(str(i), str(j)): str((i + j) % n) for i in range(n) for j in range(n)})

    @classmethod
    def product(cls, g1: "FiniteGroup", g2: "FiniteGroup") -> "FiniteGroup":
        pairs = list(itertools.product(g1.elements, g2.elements))
        name = {p: f"{p[0]},{p[1]}" for p in pairs}
        mul = {
            (name[p], name[q]): name[(g1.mul(p[0], q[0]), g2.mul(p[1], q[1]))]
            for p in pairs
            for q in pairs
        }
        return cls([name[p] for p in pairs], mul)

    @classmethod
    def from_permutations(
        cls, generators: Mapping[str, Mapping[Hashable, Hashable]]
    ) -> tuple["FiniteGroup", dict[str, dict]]:
        """Close a set of permutations (dicts) under composition.

        Elements are named by the shortest generator word that reaches them
        (breadth-first, generators in the given order), joined by ``.``;
        the neutral element is ``"1"``.  Returns the group and a map from
        element name to the permutation it denotes.
        """
        domain = set()
        for p in generators.values():
            domain |= set(p) | set(p.values())
        gens = {name: {x: p.get(x, x) for x in domain} for name, p in generators.items()}
        for name, p in gens.items():
            if len(set(p.values())) != len(domain):
                raise ValueError(f"generator {name!r} is not a bijection")
        order = sorted(domain, key=repr)

        def key(p):
            return tuple(p[x] for x in order)

        identity = {x: x for x in domain}
        perms = {"1": identity}
        seen = {key(identity): "1"}
        queue = deque(["1"])
        while queue:
            w = queue.popleft()
            for gname, g in gens.items():
                p = perms[w]
                q = {x: g[p[x]] for x in domain}  # w then g
                k = key(q)
                if k not in seen:
                    name = gname if w == "1" else f"{w}.{gname}"
                    seen[k] = name
                    perms[name] = q
                    queue.append(name)
        names = list(perms)
        mul = {}
        for a in names:
            for b in names:
                pa, pb = perms[a], perms[b]
                mul[(a, b)] = seen[key({x: pb[pa[x]] for x in domain})]
        return cls(names, mul), perms


class AbelianGroup:
    """Z^free_rank x prod Z_{torsion[i]}; elements are tuples of ints."""

    __slots__ = ("free_rank", "torsion", "neutral")

    def __init__(self, free_rank: int = 0, torsion: Sequence[int] = ()):
        if free_rank < 0 or any(t < 1 for t in torsion):
            raise ValueError("invalid fg-abelian signature")
        self.free_rank = free_rank
        self.torsion = tuple(torsion)
        self.neutral = (0,) * (free_rank + len(self.torsion))

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def normalize(self, v: Iterable[int]) -> tuple[int, ...]:
        v = tuple(int(x) for x in v)
        if len(v) != self.rank:
            raise ValueError(f"expected vector of length {self.rank}, got {v}")
        f = self.free_rank
        return v[:f] + tuple(x % n for x, n in zip(v[f:], self.torsion))

    def mul(self, g, h):
        return self.normalize(a + b for a, b in zip(g, h))

    def inv(self, g):
        return self.normalize(-a for a in g)

    def prod(self, *gs):
        out = self.neutral
        for g in gs:
            out = self.mul(out, g)
        return out

    def __contains__(self, g) -> bool:
        try:
            return self.normalize(g) == tuple(g)
        except (ValueError, TypeError):
            return False

    @property
    def elements(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_finite:
            raise InfiniteGroup("group has free rank > 0; supply a window", self.descriptor())
        return tuple(itertools.product(*(range(n) for n in self.torsion)))

    def __len__(self) -> int:
        return len(self.elements)

    def label(self, g) -> str:
        return ",".join(str(x) for x in g)

    def parse(self, s: str):
        return self.normalize(int(x) for x in s.split(",")) if s else self.neutral

    def box(self, ranges: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
        """Axis-aligned window; ``ranges[i] = (lo, hi)`` inclusive."""
        if len(ranges) != self.rank:
            raise ValueError("one range per coordinate")
        return sorted({self.normalize(p) for p in itertools.product(*(range(lo, hi + 1) for lo, hi in ranges))})

    def to_finite(self) -> tuple[FiniteGroup, dict]:
        """Finite Cayley-table copy plus the element -> label map."""
        els = self.elements
        lab = {g: self.label(g) for g in els}
        mul = {(lab[g], lab[h]): lab[self.mul(g, h)] for g in els for h in els}
        return FiniteGroup([lab[g] for g in els], mul), lab

    def descriptor(self) -> dict:
        return {"kind": "fg-abelian", "free_rank": self.free_rank, "torsion": list(self.torsion)}

    def to_json(self) -> dict:
        return self.descriptor()

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroup) and (self.free_rank, self.torsion) == (other.free_rank, other.torsion)

    def __hash__(self) -> int:
        return hash((self.free_rank, self.torsion))

    def __repr__(self) -> str:
        return f"AbelianGroup(free_rank={self.free_rank}, torsion={list(self.torsion)})"


Group = Union[FiniteGroup, AbelianGroup]


def group_from_json(doc: Mapping) -> Group:
    if doc.get("kind") == "fg-abelian":
        return AbelianGroup(doc.get("free_rank", 0), doc.get("torsion", []))
    return FiniteGroup.from_json(doc)


class ShiftedGroup:
    """Same carrier as ``base`` with product ``x *_a y = x a^-1 y``; neutral is ``a``."""

    def __init__(self, base: Group, a):
        self.base = base
        self.shift = a
        self.neutral = a
        self._ainv = base.inv(a)

    @property
    def is_finite(self) -> bool:
        return self.base.is_finite

    @property
    def elements(self):
        return self.base.elements

    def mul(self, x, y):
        return self.base.mul(self.base.mul(x, self._ainv), y)

    def inv(self, x):
        b = self.base
        return b.mul(b.mul(self.shift, b.inv(x)), self.shift)

    def prod(self, *gs):
        out = self.neutral
        for g in gs:
            out = self.mul(out, g)
        return out

    def label(self, g) -> str:
        return self.base.label(g)

    def parse(self, s: str):
        return self.base.parse(s)

    def __contains__(self, g) -> bool:
        return g in self.base
