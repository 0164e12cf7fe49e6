import dataclasses

from hypothesis import given
from hypothesis import strategies as st

from orbifold.category import Category
from orbifold.groups import AbelianGroup, FiniteGroup
from orbifold.musicgen import chain_category, gen_gluing_fixture, gen_ntet, gen_shepard, rotation_action, step_of
from orbifold.orbitfold import Annotation, Representation
from orbifold.partialcat import (
    FlatRepresentation,
    PartialSubcategory,
    ToneSystem,
    antisymmetry_witness,
    check_defining,
    check_partial_subcategory,
    check_tone_system,
    faithful_flag,
    property_catalogue,
    search_maximal,
    sigma_classes,
    sigma_relation,
    symmetry_flags,
    tone_system_from_group,
    tone_system_from_pitches,
)


def step_graph(F):
    K = F.K
    return PartialSubcategory.from_arrows(K, [a for a in K.arrows if step_of(a) == (1,)])


def trivial_rep(C):
    G = FiniteGroup.trivial()
    return Representation(C, Annotation(G, {a: G.neutral for a in C.arrows}))


# partial subcategories


def test_full_subgraph_is_partial_subcategory():
    K = gen_ntet(4).K
    assert check_partial_subcategory(PartialSubcategory.full(K).category(), K).ok
    assert check_partial_subcategory(step_graph(gen_ntet(4)).category(), K).ok


def test_missing_identity_reported():
    K = chain_category(2)
    P = PartialSubcategory(K, frozenset(K.vertices), frozenset(a for a in K.arrows if a != "1<1"))
    C = P.category()
    rep = check_partial_subcategory(C, K)
    assert "identity" in rep.laws()


def test_undefined_concatenation_reported():
    K = chain_category(2)
    C = K.as_partial()
    table = dict(C.table)
    del table[("0<1", "1<2")]
    rep = check_partial_subcategory(Category(C.vertices, C.arrows, C.identities, table, True), K)
    assert "concatenation" in rep.laws()


# defining subcategories


def test_whole_category_defines_itself():
    K = gen_ntet(5).K
    r = check_defining(K, K, 1)
    assert r.fully is True and r.flat is True


def test_chain_cover_relation_is_fully_defining():
    for h in range(1, 5):
        C = chain_category(h)
        P = PartialSubcategory.from_arrows(C, [f"{j}<{j + 1}" for j in range(h)])
        r = check_defining(P.category(), C, h)
        assert r.fully is True


def test_step_graph_is_flat_but_not_fully_defining():
    F = gen_ntet(12)
    P = step_graph(F).category()
    r = check_defining(P, F.K, 12)
    assert r.flat is True
    assert r.fully is False
    # with the annotation the path values already separate too many classes
    r2 = check_defining(P, F.K, 12, annotation=F.A, group=F.G.group)
    assert r2.fully is False and "path-annotation" in r2.witness["fully"]


def test_discrete_is_not_defining():
    K = gen_ntet(3).K
    r = check_defining(PartialSubcategory.discrete(K).category(), K, 3)
    assert r.fully is False and r.flat is False
    assert "unreachable" in r.witness["fully"]


# property catalogue


def test_twelve_tet_catalogue():
    F = gen_ntet(12)
    flags = property_catalogue(F, rotation_action(F.K, (12,)))
    assert flags.faithful and flags.simple and flags.antisymmetric
    assert flags.s_symmetric and flags.translatively_s_symmetric
    assert flags.complete is True and flags.antisym_s_complete is True
    assert flags.ordered is False
    assert "complete" in flags.table()


def test_discrete_is_not_complete():
    F = gen_ntet(6)
    flags = property_catalogue(FlatRepresentation(PartialSubcategory.discrete(F.K), F), rotation_action(F.K, (6,)))
    assert flags.complete is False
    assert flags.ordered is True


def test_shepard_catalogue():
    S = gen_shepard(12)
    flags = property_catalogue(S, rotation_action(S.rep.K, (12,)))
    assert flags.antisymmetric and flags.simple
    assert flags.ordered is False
    P = S.partial.category()
    assert all(len(P.out_arrows(v)) == 6 for v in P.vertices)


def test_shepard_odd_and_tiny():
    P = gen_shepard(7).partial.category()
    assert all(len(P.out_arrows(v)) == 4 for v in P.vertices)
    P2 = gen_shepard(2).partial.category()
    assert all(P2.is_identity(a) for a in P2.arrows)


def test_chain_is_ordered():
    flags = property_catalogue(trivial_rep(chain_category(3)))
    assert flags.ordered and flags.antisymmetric and flags.complete


def test_zero_annotation_is_not_antisymmetric():
    F = gen_ntet(3)
    Z = dataclasses.replace(F, A={a: (0,) for a in F.K.arrows})
    w = antisymmetry_witness(F.K, Z.A, AbelianGroup(1))
    assert w is not None
    a, b = w
    assert F.K.arrows[a] == tuple(reversed(F.K.arrows[b]))


# maximal subrepresentations


def test_twelve_tet_maximal_is_full_base():
    F = gen_ntet(12)
    found = search_maximal(F, rotation_action(F.K, (12,)))
    assert len(found) == 1
    P, flags = found[0]
    assert P.partial.arrows == frozenset(F.K.arrows)
    assert flags.complete and flags.antisymmetric


def test_maximal_antisymmetric_choices():
    # with a zero annotation on 3-TET, steps of length 1 and 2 cannot coexist
    F = gen_ntet(3)
    Z = dataclasses.replace(F, A={a: (0,) for a in F.K.arrows})
    start = FlatRepresentation(PartialSubcategory.discrete(F.K), Z)
    found = search_maximal(start, rotation_action(F.K, (3,)), require=("antisymmetric", "s_symmetric"))
    steps = sorted(sorted({step_of(a)[0] for a in P.partial.arrows} - {0}) for P, _ in found)
    assert steps == [[1], [2]]


def test_empty_requirement_gives_full_base():
    F = gen_ntet(4)
    start = FlatRepresentation(PartialSubcategory.discrete(F.K), F)
    found = search_maximal(start, rotation_action(F.K, (4,)), require=())
    assert [P.partial.arrows for P, _ in found] == [frozenset(F.K.arrows)]


def test_chain_maximal_is_itself():
    C = chain_category(3)
    found = search_maximal(trivial_rep(C), None, require=("antisymmetric",))
    assert [set(P.arrows) for P, _ in found] == [set(C.arrows)]


# order-theoretic invariants


@given(st.sampled_from([4, 5, 6]), st.data())
def test_faithful_and_antisymmetric_are_down_sets(n, data):
    F = gen_ntet(n)
    arrows = sorted(F.K.arrows)
    big = data.draw(st.sets(st.sampled_from(arrows)))
    small = data.draw(st.sets(st.sampled_from(sorted(big)))) if big else set()
    Pb = PartialSubcategory.from_arrows(F.K, big).category()
    Ps = PartialSubcategory.from_arrows(F.K, small).category()
    if faithful_flag(Pb, F.A):
        assert faithful_flag(Ps, F.A)
    if antisymmetry_witness(Pb, F.A, F.G.group) is None:
        assert antisymmetry_witness(Ps, F.A, F.G.group) is None


@given(st.sampled_from([4, 6]), st.data())
def test_symmetric_subcategories_closed_under_intersection(n, data):
    F = gen_ntet(n)
    S = rotation_action(F.K, (n,))
    steps = list(range(1, n))
    d1 = data.draw(st.sets(st.sampled_from(steps)))
    d2 = data.draw(st.sets(st.sampled_from(steps)))
    mk = lambda ds: PartialSubcategory.from_arrows(F.K, [a for a in F.K.arrows if step_of(a)[0] in ds])  # noqa: E731
    P1, P2 = mk(d1), mk(d2)
    assert symmetry_flags(S, P1)[0] and symmetry_flags(S, P2)[0]
    meet = PartialSubcategory(F.K, P1.vertices & P2.vertices, P1.arrows & P2.arrows)
    assert symmetry_flags(S, meet)[0]


@given(st.sampled_from([5, 6]), st.data())
def test_antisymmetry_survives_unions_of_chains(n, data):
    F = gen_ntet(n)
    Z = {a: (0,) for a in F.K.arrows}
    grp = F.G.group
    order = data.draw(st.permutations(sorted(F.K.arrows)))
    chain, current = [], set()
    for a in order:
        trial = PartialSubcategory.from_arrows(F.K, current | {a}).category()
        if antisymmetry_witness(trial, Z, grp) is None:
            current = current | {a}
            chain.append(set(current))
    union = set().union(*chain) if chain else set()
    assert antisymmetry_witness(PartialSubcategory.from_arrows(F.K, union).category(), Z, grp) is None


# tone systems


def test_group_tone_system_has_singleton_classes():
    T = tone_system_from_group(FiniteGroup.cyclic(12))
    assert check_tone_system(T).ok
    assert all(len(c) == 1 for c in sigma_classes(T))


def test_gluing_identifies_overlap():
    T = gen_gluing_fixture()
    assert check_tone_system(T).ok
    classes = sigma_classes(T)
    assert len(T.tones) == 14 and len(classes) == 11
    glued = sorted(sorted(c) for c in classes if len(c) > 1)
    # G-major shares G, A and B with the C-major tile
    assert glued == [["C4", "G0"], ["C5", "G1"], ["C6", "G2"]]


def test_bad_cocycle_reported():
    T = tone_system_from_pitches({"a": 0, "b": 1})
    d = dict(T.delta)
    d[("a", "b")] = (5,)
    assert "cocycle" in check_tone_system(ToneSystem(T.tones, T.group, d)).laws()


@given(st.dictionaries(st.sampled_from("abcdefgh"), st.integers(-5, 5), min_size=1))
def test_sigma_is_equivalence_grouping_equal_pitches(pitch):
    T = tone_system_from_pitches(pitch)
    assert check_tone_system(T).ok
    rel = sigma_relation(T)
    assert all((t, t) in rel for t in T.tones)
    assert all((b, a) in rel for a, b in rel)
    classes = sigma_classes(T)
    assert sorted(map(sorted, classes)) == sorted(
        sorted(t for t in T.tones if pitch[t] == p) for p in set(pitch.values())
    )
