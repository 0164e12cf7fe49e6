import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbifold.category import validate_category
from orbifold.errors import GivenSetNotTransversal, NotSemiRegular, NotTranslative
from orbifold.iso import find_isomorphism
from orbifold.musicgen import chain_category, gen_chain_bundle, gen_fix_k, zn_cover
from orbifold.orbitfold import (
    Representation,
    build_representation,
    canonical_automorphism,
    choose_transversal,
    natural_annotation,
    natural_labels,
    orbit_category,
    transversal_category,
)
from orbifold.unfold import check_annotation

from test_action import swap_groupoid


def test_fix_k_orbit_category():
    _, _, both = gen_fix_k()
    O = orbit_category(both)
    K = O.category
    assert len(K.vertices) == 3
    assert len(K.non_identity_arrows()) == 3
    assert validate_category(K).ok
    with pytest.raises(NotSemiRegular):
        orbit_category(both, require_semiregular=True)
    with pytest.raises(NotSemiRegular):
        build_representation(both, choose_transversal(both))


def test_chain_bundle_folds_to_chain():
    A = gen_chain_bundle(3, 4)
    T = choose_transversal(A)
    assert len(T) == 5
    R = build_representation(A, T)
    assert find_isomorphism(R.category, chain_category(4)) is not None
    assert set(R.annotation.label.values()) == {"0"}


def test_given_transversal_is_checked():
    A = gen_chain_bundle(3, 1)
    assert choose_transversal(A, ["c0_0", "c2_1"]).strategy == "given"
    with pytest.raises(GivenSetNotTransversal):
        choose_transversal(A, ["c0_0", "c1_0", "c0_1"])
    with pytest.raises(GivenSetNotTransversal):
        choose_transversal(A, ["c0_0"])


def brute_force_labels(A, T):
    """A_T(a) = g(cod) g(dom)^-1 with g(x) found by scanning the group."""
    G = A.group
    rep_of = {}
    for t in T.chosen:
        for g in G.elements:
            rep_of[A.act_vertex(t, g)] = g
    return {a: G.mul(rep_of[t], G.inv(rep_of[s])) for a, (s, t) in A.category.arrows.items()}


@given(st.integers(1, 4), st.integers(0, 3), st.data())
def test_natural_annotation_matches_scan(k, h, data):
    A = gen_chain_bundle(k, h)
    picks = [f"c{data.draw(st.integers(0, k - 1))}_{j}" for j in range(h + 1)]
    T = choose_transversal(A, picks)
    assert natural_labels(A, T) == brute_force_labels(A, T)
    R = build_representation(A, T)
    assert check_annotation(R).ok
    for x in A.category.vertices:
        g = canonical_automorphism(A, T, x)
        t = next(iter(A.vertex_orbit_of()[x] & T.chosen))
        assert A.act_vertex(t, g) == x


def test_cover_annotation_into_integers():
    from orbifold.groups import AbelianGroup
    from orbifold.musicgen import cyclic_section

    A = zn_cover(4, 8)
    T = choose_transversal(A)
    ann = natural_annotation(A, T, AbelianGroup(1), cyclic_section(len(A.group)))
    R = Representation(orbit_category(A).category, ann)
    assert check_annotation(R).ok
    # a step of length d from residue c crosses floor((c + d) / 4) octaves
    for a, (s, _) in R.category.arrows.items():
        d = int(a.split("+")[1])
        assert ann[a] == ((int(s) + d) // 4,)


def test_transversal_category():
    A = gen_chain_bundle(2, 2)
    T = choose_transversal(A)
    TC = transversal_category(A, T)
    assert validate_category(TC).ok
    assert find_isomorphism(TC, chain_category(2)) is not None
    with pytest.raises(NotTranslative):
        transversal_category(swap_groupoid(), choose_transversal(swap_groupoid()))


def test_representation_json_roundtrip():
    A = gen_chain_bundle(2, 2)
    R = build_representation(A, choose_transversal(A, ["c0_0", "c1_1", "c0_2"]))
    S = Representation.from_json(R.to_json())
    assert S.category == R.category and dict(S.annotation.label) == dict(R.annotation.label)
