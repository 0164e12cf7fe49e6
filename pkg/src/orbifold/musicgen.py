"""Deterministic fixtures: the five-vertex folding example, chain bundles,
cyclic covers, lattice orbit windows and the music-theoretic systems."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .action import CategoryAction
from .category import CatMorphism, Category
from .flat import FlatCategoryRepresentation, RightGroupalCategory
from .groups import AbelianGroup, FiniteGroup
from .orbitfold import Annotation, Representation
from .partialcat import FlatRepresentation, PartialSubcategory, ToneSystem, tone_system_from_pitches

# the five-vertex example


def gen_fix_k() -> tuple[Category, CategoryAction, CategoryAction]:
    """Category on 1..5 with a, b into 3 and c, d out of 3.

    Returns the category, the action of <phi psi> and the action of
    <phi, psi>.
    """
    vertices = ["1", "2", "3", "4", "5"]
    arrows = {
        "a": ("1", "3"),
        "b": ("2", "3"),
        "c": ("3", "4"),
        "d": ("3", "5"),
        "a*c": ("1", "4"),
        "a*d": ("1", "5"),
        "b*c": ("2", "4"),
        "b*d": ("2", "5"),
    }
    identities = {v: f"id{v}" for v in vertices}
    for v, i in identities.items():
        arrows[i] = (v, v)
    table = {}
    for a, (s, t) in arrows.items():
        table[(identities[s], a)] = a
        table[(a, identities[t])] = a
    for x in "ab":
        for y in "cd":
            table[(x, y)] = f"{x}*{y}"
    K = Category(vertices, arrows, identities, table)
    phi = (
        {"1": "2", "2": "1"},
        {"a": "b", "b": "a", "a*c": "b*c", "b*c": "a*c", "a*d": "b*d", "b*d": "a*d", "id1": "id2", "id2": "id1"},
    )
    psi = (
        {"4": "5", "5": "4"},
        {"c": "d", "d": "c", "a*c": "a*d", "a*d": "a*c", "b*c": "b*d", "b*d": "b*c", "id4": "id5", "id5": "id4"},
    )
    phipsi_v = {v: psi[0].get(phi[0].get(v, v), phi[0].get(v, v)) for v in vertices}
    phipsi_a = {a: psi[1].get(phi[1].get(a, a), phi[1].get(a, a)) for a in arrows}
    cyclic = CategoryAction.from_generators(K, {"phi.psi": (phipsi_v, phipsi_a)})
    both = CategoryAction.from_generators(K, {"phi": phi, "psi": psi})
    return K, cyclic, both


# chain bundles


def chain_category(h: int, prefix: str = "") -> Category:
    """Total order 0 < 1 < ... < h as a thin category (h edges, h+1 vertices)."""
    vs = [f"{prefix}{j}" for j in range(h + 1)]
    return Category.from_relation(vs, [(vs[j], vs[j + 1]) for j in range(h)])


def gen_chain_bundle(k: int, h: int) -> CategoryAction:
    """k disjoint chains of height h, rotated by Z_k."""
    if k < 1 or h < 0:
        raise ValueError("need k >= 1 and h >= 0")
    vertices, arrows, identities, table = [], {}, {}, {}
    name = lambda i, j: f"c{i}_{j}"  # noqa: E731
    for i in range(k):
        for j in range(h + 1):
            vertices.append(name(i, j))
            identities[name(i, j)] = f"{name(i, j)}<{j}"
        for j in range(h + 1):
            for l in range(j, h + 1):
                arrows[f"{name(i, j)}<{l}"] = (name(i, j), name(i, l))
        for j in range(h + 1):
            for l in range(j, h + 1):
                for m in range(l, h + 1):
                    table[(f"{name(i, j)}<{l}", f"{name(i, l)}<{m}")] = f"{name(i, j)}<{m}"
    K = Category(vertices, arrows, identities, table)
    G = FiniteGroup.cyclic(k)
    vt, at = {}, {}
    for r in range(k):
        vt[str(r)] = {name(i, j): name((i + r) % k, j) for i in range(k) for j in range(h + 1)}
        at[str(r)] = {
            f"{name(i, j)}<{l}": f"{name((i + r) % k, j)}<{l}" for i in range(k) for j in range(h + 1) for l in range(j, h + 1)
        }
    return CategoryAction(G, K, vt, at)


# cyclic covers of (Z, <=) / nZ


def zn_length_bound(n: int, dmax: int) -> int:
    """Largest step length kept: the loop part n*floor(d/n) stays <= dmax."""
    return n * (dmax // n + 1) - 1


def default_cover_size(n: int, dmax: int) -> int:
    return dmax // n + 2


def zn_cover(n: int, dmax: int, m: int | None = None) -> CategoryAction:
    """Finite model of the fold of (Z, <=) by nZ.

    Vertices Z_{n m}; arrows (y, d) for 0 <= d <= zn_length_bound(n, dmax),
    composed by adding lengths while the sum stays in bound; Z_m acts by
    y -> y + n.  The cover size m must exceed the largest octave count so
    that distinct arrows stay distinct.
    """
    D = zn_length_bound(n, dmax)
    if m is None:
        m = default_cover_size(n, dmax)
    N = n * m
    if N <= D:
        raise ValueError("cover too small: n*m must exceed the length bound")
    w = len(str(N - 1))
    wd = len(str(D))
    V = lambda y: f"{y % N:0{w}d}"  # noqa: E731
    Ar = lambda y, d: f"{y % N:0{w}d}+{d:0{wd}d}"  # noqa: E731
    vertices = [V(y) for y in range(N)]
    arrows = {Ar(y, d): (V(y), V(y + d)) for y in range(N) for d in range(D + 1)}
    identities = {V(y): Ar(y, 0) for y in range(N)}
    table = {}
    for y in range(N):
        for d1 in range(D + 1):
            for d2 in range(D + 1 - d1):
                table[(Ar(y, d1), Ar(y + d1, d2))] = Ar(y, d1 + d2)
    K = Category(vertices, arrows, identities, table, partial=True)
    G = FiniteGroup.cyclic(m)
    vt = {str(k): {V(y): V(y + k * n) for y in range(N)} for k in range(m)}
    at = {str(k): {Ar(y, d): Ar(y + k * n, d) for y in range(N) for d in range(D + 1)} for k in range(m)}
    return CategoryAction(G, K, vt, at)


def cyclic_section(m: int):
    """Least non-negative lift Z_m -> Z, as a 1-vector."""
    return lambda g: (int(g) % m,)


# lattice orbit windows


def _solve_rational(B: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction]:
    """Coordinates x with sum_i x_i B[i] = v (B square, full rank)."""
    k = len(B)
    M = [[Fraction(B[i][j]) for i in range(k)] + [Fraction(v[j])] for j in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][k] for r in range(k)]


@dataclass(frozen=True)
class Sublattice:
    """Full-rank sublattice of Z^k spanned by the rows of ``basis``."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence[int]) -> list[Fraction]:
        return _solve_rational(self.basis, v)

    def contains(self, v: Sequence[int]) -> bool:
        return all(x.denominator == 1 for x in self.coords(v))

    def index(self) -> int:
        return len(self.coset_reps())

    def coset_reps(self) -> list[tuple[int, ...]]:
        """One representative per coset, the first met in lexicographic order."""
        size = abs(_det(self.basis))
        reps: list[tuple[int, ...]] = []
        for p in itertools.product(range(size), repeat=self.rank):
            if not any(self.contains(tuple(a - b for a, b in zip(p, r))) for r in reps):
                reps.append(p)
                if len(reps) == size:
                    break
        return reps

    def reducer(self):
        reps = self.coset_reps()
        cache: dict[tuple[int, ...], tuple[int, ...]] = {}

        def reduce(v: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
            """(canonical representative, lattice coordinates of v - rep)."""
            v = tuple(v)
            for r in reps:
                c = self.coords(tuple(a - b for a, b in zip(v, r)))
                if all(x.denominator == 1 for x in c):
                    return r, tuple(int(x) for x in c)
            raise AssertionError("no coset representative found")

        return reduce


def _det(B) -> int:
    k = len(B)
    if k == 1:
        return B[0][0]
    return sum((-1) ** j * B[0][j] * _det([row[:j] + row[j + 1 :] for row in B[1:]]) for j in range(k))


def _label(v: Sequence[int]) -> str:
    return ",".join(str(x) for x in v)


def lattice_orbit_window(basis: Sequence[Sequence[int]], bounds: Sequence[int]) -> Representation:
    """Windowed orbit category of (Z^k, product order) by a sublattice.

    Vertices are cosets (named by a canonical representative), arrows are
    (coset, v) with 0 <= v_i <= bounds[i]; composition adds steps while the
    sum stays in the box.  The annotation sends (c, v) to the lattice
    coordinates of c + v - reduce(c + v), an element of Z^k.
    """
    L = Sublattice(tuple(tuple(b) for b in basis))
    k = L.rank
    reduce = L.reducer()
    reps = L.coset_reps()
    steps = list(itertools.product(*(range(b + 1) for b in bounds)))
    vname = {r: _label(r) for r in reps}
    aid = lambda c, v: f"{vname[c]}+{_label(v)}"  # noqa: E731
    arrows, label, end = {}, {}, {}
    for c in reps:
        for v in steps:
            target, coords = reduce(tuple(a + b for a, b in zip(c, v)))
            arrows[aid(c, v)] = (vname[c], vname[target])
            label[aid(c, v)] = coords
            end[(c, v)] = target
    zero = (0,) * k
    identities = {vname[c]: aid(c, zero) for c in reps}
    stepset = set(steps)
    table = {}
    for c in reps:
        for v1 in steps:
            c2 = end[(c, v1)]
            for v2 in steps:
                s = tuple(a + b for a, b in zip(v1, v2))
                if s in stepset:
                    table[(aid(c, v1), aid(c2, v2))] = aid(c, s)
    K = Category([vname[c] for c in reps], arrows, identities, table, partial=True)
    return Representation(K, Annotation(AbelianGroup(k), label))


def gen_zn_fold(n: int, dmax: int) -> tuple[Category, Representation]:
    """Orbit window of (Z, <=)/nZ with steps up to zn_length_bound(n, dmax)."""
    R = lattice_orbit_window([[n]], [zn_length_bound(n, dmax)])
    return R.category, R


def gen_lattice_window(periods: Sequence[int] = (4, 3), bound: int = 7) -> Representation:
    """Orbit window of (Z^2, <=) by p1 Z x p2 Z with step coordinates in [0, bound]."""
    basis = [[periods[0], 0], [0, periods[1]]]
    return lattice_orbit_window(basis, [bound, bound])


def gen_skew_lattice_fold(bound: int = 3) -> Representation:
    """(Z^2, <=) folded by the sublattice spanned by (1, 1) and (1, -1)."""
    return lattice_orbit_window([[1, 1], [1, -1]], [bound, bound])


# flat representations of diagonal lattice folds


def _translation_group(periods: Sequence[int]) -> FiniteGroup:
    els = list(itertools.product(*(range(p) for p in periods)))
    mul = {
        (_label(g), _label(h)): _label(tuple((a + b) % p for a, b, p in zip(g, h, periods)))
        for g in els
        for h in els
    }
    return FiniteGroup([_label(g) for g in els], mul)


def lattice_flat_rep(periods: Sequence[int], window: int) -> FlatCategoryRepresentation:
    """Flat representation of (Z^k, <=) folded by p1 Z x ... x pk Z, built arithmetically.

    The base has one arrow c -> c + v for each step 0 <= v_i < p_i; the
    annotation is the carry floor((c + v) / p), the overflow of v then w is
    floor((v + w) / p), loops commute with everything, and loop values are
    the multiples in the box [0, window]^k.
    """
    k = len(periods)
    verts = list(itertools.product(*(range(p) for p in periods)))
    steps = verts
    aid = lambda c, v: f"{_label(c)}+{_label(v)}"  # noqa: E731
    arrows, A = {}, {}
    for c in verts:
        for v in steps:
            s = [a + b for a, b in zip(c, v)]
            arrows[aid(c, v)] = (_label(c), _label(tuple(x % p for x, p in zip(s, periods))))
            A[aid(c, v)] = tuple(x // p for x, p in zip(s, periods))
    table, n = {}, {}
    for c in verts:
        for v in steps:
            c2 = tuple((a + b) % p for a, b, p in zip(c, v, periods))
            for w in steps:
                vw = [a + b for a, b in zip(v, w)]
                table[(aid(c, v), aid(c2, w))] = aid(c, tuple(x % p for x, p in zip(vw, periods)))
                n[(aid(c, v), aid(c2, w))] = tuple(x // p for x, p in zip(vw, periods))
    zero = (0,) * k
    K = Category([_label(c) for c in verts], arrows, {_label(c): aid(c, zero) for c in verts}, table)
    group = AbelianGroup(k)
    G = RightGroupalCategory.from_values(group, itertools.product(range(window + 1), repeat=k))
    C = {(a, v): v for a in arrows for v in G.values}
    return FlatCategoryRepresentation(K, A, n, C, G)


def gen_ntet(n: int, window: int = 2) -> FlatCategoryRepresentation:
    """n-tone equal temperament: the flat representation of (Z, <=) / nZ."""
    if n < 1:
        raise ValueError("need n >= 1")
    return lattice_flat_rep((n,), window)


def rotation_action(K: Category, periods: Sequence[int]) -> CategoryAction:
    """Translations of a lattice flat base by Z_p1 x ... x Z_pk."""
    G = _translation_group(periods)

    def shift(label: str, g: tuple[int, ...]) -> str:
        c = tuple(int(x) for x in label.split(","))
        return _label(tuple((a + b) % p for a, b, p in zip(c, g, periods)))

    vt, at = {}, {}
    for g in itertools.product(*(range(p) for p in periods)):
        vt[_label(g)] = {x: shift(x, g) for x in K.vertices}
        at[_label(g)] = {}
        for a in K.arrows:
            c, v = a.split("+")
            at[_label(g)][a] = f"{shift(c, g)}+{v}"
    return CategoryAction(G, K, vt, at)


def step_of(a: str) -> tuple[int, ...]:
    return tuple(int(x) for x in a.split("+")[1].split(","))


def gen_shepard(n: int, window: int = 2) -> FlatRepresentation:
    """Shepard's relation on n chroma classes: steps d with 0 <= d < n / 2 (strict)."""
    if n < 2:
        raise ValueError("need n >= 2")
    F = gen_ntet(n, window)
    keep = [a for a in F.K.arrows if 2 * step_of(a)[0] < n]
    return FlatRepresentation(PartialSubcategory.from_arrows(F.K, keep), F)


MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)


@dataclass(frozen=True)
class DiatonicEmbedding:
    scale: FlatCategoryRepresentation
    chromatic: FlatCategoryRepresentation
    vertex_map: dict[str, str]
    arrow_map: dict[str, str]

    def morphism(self) -> CatMorphism:
        return CatMorphism(self.scale.K, self.chromatic.K, self.vertex_map, self.arrow_map)


def gen_diatonic(offsets: Sequence[int] = MAJOR_SCALE, window: int = 2) -> DiatonicEmbedding:
    """7-TET mapped into 12-TET by the scale offsets; a scale step i -> i + d
    goes to the chromatic step between the two offsets."""
    m, N = len(offsets), 12
    if sorted(set(offsets)) != list(offsets) or offsets[0] != 0 or offsets[-1] >= N:
        raise ValueError("offsets must increase from 0 within one octave")
    S, C = gen_ntet(m, window), gen_ntet(N, window)
    vmap = {str(i): str(offsets[i]) for i in range(m)}
    amap = {}
    for i in range(m):
        for d in range(m):
            diff = (offsets[(i + d) % m] - offsets[i]) % N
            amap[f"{i}+{d}"] = f"{offsets[i]}+{diff}"
    return DiatonicEmbedding(S, C, vmap, amap)


def invariant_rotations(image: Iterable[int], n: int) -> list[int]:
    pcs = {x % n for x in image}
    return [r for r in range(n) if {(x + r) % n for x in pcs} == pcs]


def tonnetz_periods(third_period: int = 3) -> tuple[int, int, int]:
    if third_period not in (2, 3):
        raise ValueError("third_period must be 2 or 3")
    return (1, 12, third_period)


def gen_tonnetz(window: int = 1, third_period: int = 3, steps: Sequence[int] = (1, 1)) -> FlatRepresentation:
    """Torus of chromas: Z^3 folded by Z x 12Z x pZ, with the partial base of
    steps (0, v1, v2) where v1 <= steps[0] and v2 <= steps[1]."""
    F = lattice_flat_rep(tonnetz_periods(third_period), window)
    keep = [a for a in F.K.arrows if step_of(a)[1] <= steps[0] and step_of(a)[2] <= steps[1]]
    return FlatRepresentation(PartialSubcategory.from_arrows(F.K, keep), F)


def tonnetz_action(F: FlatRepresentation, third_period: int = 3) -> CategoryAction:
    return rotation_action(F.rep.K, tonnetz_periods(third_period))


# tone systems


def gen_gluing_fixture(shift: int = 7) -> ToneSystem:
    """Two major-scale tiles over Z, the second moved up by ``shift``."""
    pitch = {f"C{i}": p for i, p in enumerate(MAJOR_SCALE)}
    pitch.update({f"G{i}": p + shift for i, p in enumerate(MAJOR_SCALE)})
    return tone_system_from_pitches(pitch)


# random corpus for round-trip properties


def random_forest_representation(rng, n_vertices: int, group: FiniteGroup) -> Representation:
    """Transitive closure of a random directed forest with random labels on its edges.

    Paths in a forest are unique, so any edge labels extend to a
    contravariant annotation: A(path) is the product of the labels read
    backwards.
    """
    vs = [f"v{i}" for i in range(n_vertices)]
    parent = {i: rng.randrange(-1, i) for i in range(1, n_vertices)}
    edge_label = {i: rng.choice(group.elements) for i in parent if parent[i] >= 0}
    pairs, label = [], {}
    for i in range(n_vertices):
        # walk from i up to the root, accumulating A along the path anc -> ... -> i
        g, j = group.neutral, i
        while j in edge_label:
            g = group.mul(g, edge_label[j])
            j = parent[j]
            pairs.append((vs[j], vs[i]))
            label[(vs[j], vs[i])] = g
    K = Category.from_relation(vs, pairs)
    lab = {}
    for a, (s, t) in K.arrows.items():
        lab[a] = group.neutral if s == t else label[(s, t)]
    return Representation(K, Annotation(group, lab))


def random_crown_representation(rng, n_min: int, n_max: int, group: FiniteGroup, density: float = 0.6) -> Representation:
    """Bipartite arrows from minima to maxima; no composites, so labels are free."""
    lows = [f"m{i}" for i in range(n_min)]
    highs = [f"M{i}" for i in range(n_max)]
    pairs = [(x, y) for x in lows for y in highs if rng.random() < density]
    K = Category.from_relation(lows + highs, pairs)
    lab = {a: group.neutral if s == t else rng.choice(group.elements) for a, (s, t) in K.arrows.items()}
    return Representation(K, Annotation(group, lab))


SMALL_GROUPS = {
    "Z2": lambda: FiniteGroup.cyclic(2),
    "Z3": lambda: FiniteGroup.cyclic(3),
    "Z4": lambda: FiniteGroup.cyclic(4),
    "Z2xZ2": lambda: FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2)),
    "S3": lambda: FiniteGroup.from_permutations({"s": {0: 1, 1: 0}, "t": {1: 2, 2: 1}})[0],
}


def random_corpus(seed: int = 0, size: int = 100, max_folded: int = 12) -> list[tuple[str, CategoryAction]]:
    """Chain bundles and unfoldings of random forest / crown representations.

    Every folded category has at most ``max_folded`` vertices.  Returns
    (name, action) pairs; the actions are free by construction.
    """
    import random

    from .unfold import induced_action, unfold

    rng = random.Random(seed)
    out: list[tuple[str, CategoryAction]] = []
    names = sorted(SMALL_GROUPS)
    while len(out) < size:
        kind = len(out) % 3
        if kind == 0:
            k, h = rng.randint(1, 4), rng.randint(0, 5)
            out.append((f"chain_bundle({k},{h})", gen_chain_bundle(k, h)))
            continue
        gname = rng.choice(names)
        G = SMALL_GROUPS[gname]()
        if kind == 1:
            n = rng.randint(1, min(6, max_folded))
            R = random_forest_representation(rng, n, G)
            tag = f"forest({n},{gname})"
        else:
            a, b = rng.randint(1, 3), rng.randint(1, 3)
            R = random_crown_representation(rng, a, b, G)
            tag = f"crown({a},{b},{gname})"
        out.append((tag, induced_action(unfold(R))))
    return out
