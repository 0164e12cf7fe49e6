import dataclasses
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbifold.category import is_isomorphism, is_simple, validate_category
from orbifold.errors import AxiomViolation, NotTranslative, NotUniquelyRepresentable
from orbifold.flat import (
    FlatCategoryRepresentation,
    FlatRepIso,
    LayerShift,
    RightGroupalCategory,
    check_exchange_law,
    check_flat_annotation,
    check_flat_iso,
    check_flat_rep,
    check_hom_translation,
    check_right_groupal,
    check_shift,
    derive_C,
    extension_axioms,
    find_layer_shift,
    flat_iso_unfolding_map,
    flat_orbit_category,
    flat_rep_from_orbit,
    flat_rep_from_representation,
    flat_to_plain_map,
    identity_flat_iso,
    irreducible_arrows,
    is_groupal,
    n_hat,
    n_hat_report,
    product_isomorphism,
    r_homomorphism_report,
    r_n_maps,
    r_n_report,
    right_normal_report,
    shift_neutral,
    singleton_extension,
    transport_coherence,
    unfold_flat,
    vertex_category,
    vertex_category_map,
)
from orbifold.groups import AbelianGroup, FiniteGroup
from orbifold.iso import find_isomorphism
from orbifold.musicgen import gen_ntet, gen_zn_fold, zn_cover
from orbifold.orbitfold import Transversal, choose_transversal
from orbifold.unfold import unfold

from test_action import swap_groupoid
from test_unfold import z2_loop

S3 = FiniteGroup.from_permutations({"s": {0: 1, 1: 0}, "t": {1: 2, 2: 1}})[0]


# right-groupal categories


@given(st.integers(2, 7), st.sets(st.integers(0, 6)))
def test_cyclic_value_sets_are_right_groupal(n, vals):
    G = RightGroupalCategory.from_values(FiniteGroup.cyclic(n), {str(v % n) for v in vals})
    assert check_right_groupal(G).ok
    assert check_hom_translation(G).ok
    assert check_exchange_law(G).ok
    assert validate_category(G.materialize()).ok
    assert is_simple(G.materialize())


@given(st.integers(2, 6), st.data())
def test_neutral_shift_preserves_structure(n, data):
    grp = FiniteGroup.cyclic(n)
    vals = data.draw(st.sets(st.sampled_from(grp.elements)))
    a = data.draw(st.sampled_from(grp.elements))
    G = RightGroupalCategory.from_values(grp, vals)
    assert check_shift(G, a).ok
    H = shift_neutral(G, a)
    assert H.neutral == a
    assert check_right_groupal(H).ok


def test_shift_on_nonabelian_group():
    G = RightGroupalCategory.from_values(S3, S3.elements)
    for a in S3.elements:
        assert check_shift(G, a).ok


def test_groupal_needs_conjugation_invariance():
    assert is_groupal(RightGroupalCategory.from_values(S3, S3.elements))
    v = is_groupal(RightGroupalCategory.from_values(S3, ["s"]))
    assert not v and v.witness[0] == "values"


def test_infinite_group_window():
    G = RightGroupalCategory.from_values(AbelianGroup(1), [(0,), (1,)])
    M = G.materialize([(k,) for k in range(-2, 3)])
    assert len(M.vertices) == 5
    # identities plus the four unit steps
    assert len(M.arrows) == 9
    assert check_hom_translation(G, [(k,) for k in range(-2, 3)]).ok


def test_json_roundtrip_groupal():
    G = RightGroupalCategory.from_values(FiniteGroup.cyclic(4), ["1", "2"])
    assert RightGroupalCategory.from_json(G.to_json()) == G


# vertex categories


def test_cover_vertex_category():
    A = zn_cover(4, 8)
    G = vertex_category(A, "00")
    # loops at a residue reach 0, 1 and 2 octaves up
    assert G.values == frozenset({"0", "1", "2"})
    assert G.then[("1", "1")] == "2" and ("1", "2") not in G.then
    assert is_isomorphism(vertex_category_map(A, "00", G))


def test_vertex_category_needs_translative():
    with pytest.raises(NotTranslative):
        vertex_category(swap_groupoid(), "a0")


# irreducible arrows and the flat orbit category


@pytest.mark.parametrize("n", [3, 4, 5])
def test_r_n_laws(n):
    K, R = gen_zn_fold(n, 2 * n)
    D = r_n_maps(K)
    assert r_n_report(K, D).ok
    assert r_homomorphism_report(K, D).ok
    assert n_hat_report(K, D, n_hat(K, D)).ok
    Kf = flat_orbit_category(K, D)
    assert validate_category(Kf).ok and is_simple(Kf)
    pairs = {Kf.arrows[a] for a in Kf.arrows}
    assert len(Kf.arrows) == n * n == len(pairs)
    irr, unique = irreducible_arrows(K)
    assert unique and irr == D.irreducible


def test_unrepresentable_loop_monoid():
    # every arrow of Z_2 is a loop times a loop, so nothing is irreducible
    with pytest.raises(NotUniquelyRepresentable) as e:
        r_n_maps(z2_loop().category)
    assert "unrepresented" in str(e.value)


def test_right_normal_cover():
    A = zn_cover(4, 8)
    C = derive_C(A)
    from orbifold.orbitfold import orbit_category

    assert right_normal_report(orbit_category(A).category, C).ok
    assert transport_coherence(A).ok


# flat representations


@pytest.mark.parametrize("n", [3, 4, 5])
def test_flat_rep_of_zn_fold(n):
    _, R = gen_zn_fold(n, 2 * n)
    F = flat_rep_from_representation(R)
    assert check_flat_rep(F).ok
    assert is_isomorphism(product_isomorphism(R, F))
    E = F.extension()
    assert validate_category(E).ok


def test_arithmetic_ntet_matches_fold():
    # the closed-form carries agree with the r / n calculus on the orbit window
    for n in (2, 3, 7, 12):
        _, R = gen_zn_fold(n, 2 * n)
        F = flat_rep_from_representation(R)
        G = gen_ntet(n)
        assert (G.K, dict(G.A), dict(G.n), dict(G.C)) == (F.K, dict(F.A), dict(F.n), dict(F.C))
        assert G.G.values == F.G.values and dict(G.G.then) == dict(F.G.then)


def test_flat_rep_json_roundtrip():
    F = gen_ntet(4)
    F2 = FlatCategoryRepresentation.from_json(F.to_json())
    assert F2.to_json() == F.to_json()


def test_bad_annotation_detected():
    F = gen_ntet(4)
    A = dict(F.A)
    A["1+2"] = (1,)
    rep = check_flat_annotation(dataclasses.replace(F, A=A))
    assert "overflow-defect" in rep.laws()


@given(st.sampled_from([3, 4]), st.data())
def test_extension_detects_single_value_perturbation(n, data):
    F = gen_ntet(n)
    nl, Cl = F.labelled()
    L = F.loop_category()
    loops = sorted(L.arrows)
    if data.draw(st.booleans()):
        key = data.draw(st.sampled_from(sorted(k for k in nl if not any(F.K.is_identity(a) for a in k))))
        nl = dict(nl)
        nl[key] = data.draw(st.sampled_from([x for x in loops if x != nl[key]]))
    else:
        key = data.draw(st.sampled_from(sorted(k for k in Cl if not F.K.is_identity(k[0]))))
        Cl = dict(Cl)
        Cl[key] = data.draw(st.sampled_from([x for x in loops if x != Cl[key]]))
    assert not extension_axioms(F.K, nl, Cl, L).ok
    with pytest.raises(AxiomViolation):
        singleton_extension(F.K, nl, Cl, L)


def test_flat_rep_from_cover():
    A = zn_cover(4, 8)
    T = choose_transversal(A)
    F = flat_rep_from_orbit(A, T, min(T))
    assert check_flat_annotation(F).ok
    U = unfold_flat(F)
    assert validate_category(U.category).ok
    PU = unfold(F.extension_representation())
    assert is_isomorphism(flat_to_plain_map(U, PU))
    assert find_isomorphism(U.category, A.category) is not None
    with pytest.raises(ValueError):
        flat_rep_from_orbit(A, T, "05")


# isomorphisms of flat representations


def mixed_transversal(n, m, rule):
    N = n * m
    w = len(str(N - 1))
    return Transversal(frozenset(f"{(i + n * rule(i)) % N:0{w}d}" for i in range(n)))


def test_identity_iso():
    F = gen_ntet(5)
    assert check_flat_iso(identity_flat_iso(F), F, F)


@given(st.sampled_from([(3, 6), (4, 8)]), st.data())
def test_transversal_change_gives_layer_shift(params, data):
    n, dmax = params
    A = zn_cover(n, dmax)
    m = len(A.group)
    shifts = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    T1 = choose_transversal(A)
    T2 = mixed_transversal(n, m, lambda i: shifts[i])
    F1 = flat_rep_from_orbit(A, T1, min(T1))
    F2 = flat_rep_from_orbit(A, T2, min(T2))
    I = find_layer_shift(F1, F2)
    assert I is not None
    assert check_flat_iso(I, F1, F2)
    U1, U2 = unfold_flat(F1), unfold_flat(F2)
    assert is_isomorphism(flat_iso_unfolding_map(I, U1, U2))


def test_corrupted_isos_rejected():
    A = zn_cover(4, 8)
    T1 = choose_transversal(A)
    T2 = mixed_transversal(4, len(A.group), lambda i: i % 3)
    F1 = flat_rep_from_orbit(A, T1, min(T1))
    F2 = flat_rep_from_orbit(A, T2, min(T2))
    I = find_layer_shift(F1, F2)
    h = dict(I.h)
    x = sorted(h)[1]
    grp = h[x].group
    h[x] = LayerShift(grp, grp.mul(h[x].s, "1"))
    v = check_flat_iso(FlatRepIso(I.phi, I.psi, h), F1, F2)
    assert not v and v.witness.law == "annotation-shift"
    key = next(k for k in sorted(F2.C, key=repr) if not F2.K.is_identity(k[0]) and k[1] != F2.G.neutral)
    C = dict(F2.C)
    C[key] = F2.G.neutral
    v = check_flat_iso(I, F1, dataclasses.replace(F2, C=C))
    assert not v and v.witness.law == "transport-shift"
