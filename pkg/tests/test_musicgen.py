import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbifold.action import check_action, is_foldable, is_semiregular
from orbifold.category import check_morphism, is_simple, validate_category
from orbifold.cli import action_doc, dump, representation_doc
from orbifold.musicgen import (
    MAJOR_SCALE,
    gen_chain_bundle,
    gen_diatonic,
    gen_fix_k,
    gen_lattice_window,
    gen_ntet,
    gen_shepard,
    gen_tonnetz,
    gen_zn_fold,
    invariant_rotations,
    random_corpus,
    rotation_action,
    step_of,
    tonnetz_action,
    zn_cover,
)
from orbifold.partialcat import antisymmetry_witness, property_catalogue


def test_generators_are_deterministic():
    assert dump(action_doc(gen_chain_bundle(3, 4))) == dump(action_doc(gen_chain_bundle(3, 4)))
    assert dump(representation_doc(gen_zn_fold(5, 10)[1])) == dump(representation_doc(gen_zn_fold(5, 10)[1]))
    a = [(t, dump(action_doc(A))) for t, A in random_corpus(3, 12)]
    b = [(t, dump(action_doc(A))) for t, A in random_corpus(3, 12)]
    assert a == b


def test_fix_k_counts():
    K, cyclic, both = gen_fix_k()
    assert len(K.vertices) == 5
    assert len(K.non_identity_arrows()) == 8
    assert len(cyclic.group) == 2 and len(both.group) == 4
    assert check_action(cyclic).ok and check_action(both).ok


@pytest.mark.parametrize("k,h", [(1, 0), (1, 3), (3, 4)])
def test_chain_bundle_sizes(k, h):
    A = gen_chain_bundle(k, h)
    assert len(A.category.vertices) == k * (h + 1)
    # each chain has (h+1)(h+2)/2 arrows including identities
    assert len(A.category.arrows) == k * (h + 1) * (h + 2) // 2
    assert validate_category(A.category).ok


def test_chain_bundle_rejects_bad_sizes():
    with pytest.raises(ValueError):
        gen_chain_bundle(0, 2)


@pytest.mark.parametrize("n", [3, 5, 12])
def test_zn_fold_octave_loop(n):
    K, R = gen_zn_fold(n, 2 * n)
    assert len(K.vertices) == n
    assert R.annotation.label[f"0+{n}"] == (1,)
    assert R.annotation.label["0+0"] == (0,)
    assert validate_category(K).ok


@pytest.mark.parametrize("n", [2, 5, 12])
def test_ntet_base_is_simple(n):
    F = gen_ntet(n)
    assert len(F.K.vertices) == n
    assert len(F.K.arrows) == n * n
    assert is_simple(F.K)
    for a in F.K.arrows:
        c, d = int(a.split("+")[0]), step_of(a)[0]
        assert F.A[a] == ((c + d) // n,)


def test_shepard_bound_is_strict():
    for n in (2, 3, 12, 13):
        P = gen_shepard(n).partial.category()
        assert {step_of(a)[0] for a in P.arrows} == {d for d in range(n) if 2 * d < n}
    with pytest.raises(ValueError):
        gen_shepard(1)


def test_diatonic_embedding():
    D = gen_diatonic()
    assert sorted(int(v) for v in D.vertex_map.values()) == list(MAJOR_SCALE)
    flags = check_morphism(D.morphism())
    assert flags.valid and flags.faithful
    assert len(set(D.arrow_map.values())) == len(D.arrow_map)
    assert invariant_rotations(MAJOR_SCALE, 12) == [0]
    assert invariant_rotations([0, 4, 8], 12) == [0, 4, 8]
    with pytest.raises(ValueError):
        gen_diatonic((0, 2, 2))


def test_tonnetz():
    T = gen_tonnetz()
    assert len(T.rep.K.vertices) == 36
    flags = property_catalogue(T, tonnetz_action(T))
    assert flags.antisymmetric and flags.s_symmetric
    assert len(gen_tonnetz(third_period=2).rep.K.vertices) == 24
    with pytest.raises(ValueError):
        gen_tonnetz(third_period=4)


def test_lattice_window_factor_relation():
    R = gen_lattice_window()
    K = R.category
    assert len(K.vertices) == 12
    assert validate_category(K).ok
    rel = {K.arrows[a] for a in K.arrows}
    assert ("0,1", "3,1") in rel and ("3,1", "0,1") in rel
    # annotated arrows still cannot close a zero-valued 2-cycle
    assert antisymmetry_witness(K, R.annotation.label, R.group) is None


def test_generated_actions_are_foldable():
    actions = [gen_chain_bundle(3, 2), zn_cover(3, 6), gen_fix_k()[2]]
    actions.append(rotation_action(gen_ntet(6).K, (6,)))
    for A in actions:
        assert check_action(A).ok
        assert is_foldable(A)
    assert is_semiregular(actions[0]) and is_semiregular(actions[1])


@given(st.integers(0, 10_000))
def test_corpus_items_are_free_actions(seed):
    for tag, A in random_corpus(seed, 6):
        assert is_semiregular(A), tag
        assert is_foldable(A), tag


def test_corpus_json_is_plain():
    tag, A = random_corpus(0, 2)[1]
    doc = json.loads(dump(action_doc(A)))
    assert doc["kind"] == "action"
