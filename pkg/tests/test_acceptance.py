"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS line with its runtime; the conftest summary hook
prints one PASS/FAIL line per criterion at the end of the run.
"""
import random
import time

from orbifold.action import check_action, is_foldable, is_semiregular, is_translative
from orbifold.category import is_isomorphism, is_simple, validate_category
from orbifold.errors import AxiomViolation
from orbifold.flat import (
    check_flat_annotation,
    check_flat_iso,
    extension_axioms,
    find_layer_shift,
    flat_iso_unfolding_map,
    flat_orbit_category,
    flat_rep_from_orbit,
    flat_rep_from_representation,
    flat_to_plain_map,
    n_hat,
    n_hat_report,
    product_isomorphism,
    r_homomorphism_report,
    r_n_maps,
    r_n_report,
    singleton_extension,
    unfold_flat,
)
from orbifold.groups import FiniteGroup
from orbifold.iso import find_isomorphism
from orbifold.musicgen import (
    gen_fix_k,
    gen_gluing_fixture,
    gen_lattice_window,
    gen_ntet,
    gen_shepard,
    gen_zn_fold,
    random_corpus,
    rotation_action,
    zn_cover,
)
from orbifold.orbitfold import Transversal, build_representation, choose_transversal, orbit_category
from orbifold.partialcat import (
    check_tone_system,
    property_catalogue,
    sigma_classes,
    sigma_relation,
    tone_system_from_group,
    tone_system_from_pitches,
)
from orbifold.unfold import induced_action, projection, unfold, verify_roundtrips


def report(n, start, limit=None):
    took = time.perf_counter() - start
    if limit is not None:
        assert took < limit, f"criterion {n} took {took:.2f} s (limit {limit} s)"
    print(f"PASS criterion {n} ({took:.2f} s)")


CORPUS = None


def corpus():
    global CORPUS
    if CORPUS is None:
        CORPUS = random_corpus(seed=0, size=100, max_folded=12)
    return CORPUS


def test_criterion_01_fix_k_foldability():
    t = time.perf_counter()
    K, cyclic, both = gen_fix_k()
    v = is_foldable(cyclic)
    assert not v
    # the witness is two composable pairs whose factors share orbits but whose composites do not
    a1, b1, a2, b2 = v.witness
    orbit = cyclic.arrow_orbit_of()
    assert orbit[a1] == orbit[a2] and orbit[b1] == orbit[b2]
    assert orbit[K.compose(a1, b1)] != orbit[K.compose(a2, b2)]
    assert {b1, b2} <= {"c", "d"} or {a1, a2} <= {"a", "b"}
    assert is_foldable(both)
    O = orbit_category(both).category
    assert len(O.vertices) == 3 and len(O.non_identity_arrows()) == 3
    assert validate_category(O).ok
    report(1, t, 1.0)


def test_criterion_02_lattice_antisymmetry_failure():
    t = time.perf_counter()
    R = gen_lattice_window((4, 3), 7)
    K = R.category
    unit = {"0,1": (0, 1), "1,0": (1, 0)}

    def step(x, y):
        return [a for a in K.hom(x, y) if a.split("+")[1] in unit]

    first = ["0,0", "0,1", "1,1", "2,1", "3,1"]
    second = ["0,0", "1,0", "2,0", "3,0", "3,1", "0,1"]
    for path in (first, second):
        assert all(step(x, y) for x, y in zip(path, path[1:])), path
    # the simple factor relation relates [(0,1)] and [(3,1)] both ways
    rel = {K.arrows[a] for a in K.arrows}
    assert ("0,1", "3,1") in rel and ("3,1", "0,1") in rel
    assert validate_category(K).ok
    report(2, t, 5.0)


def test_criterion_03_reconstruction_roundtrips():
    t = time.perf_counter()
    items = corpus()
    assert len(items) >= 100
    failures = []
    for tag, A in items:
        T = choose_transversal(A)
        assert len(T) <= 12
        rt = verify_roundtrips(A, T)
        if not (rt.unfold_ok and rt.refold_ok):
            failures.append(tag)
    assert failures == []
    report(3, t, 120.0)


def test_criterion_04_projection_kernel_is_orbit_partition():
    t = time.perf_counter()
    for tag, A in corpus():
        U = unfold(build_representation(A, choose_transversal(A)))
        IA = induced_action(U)
        pi = projection(U)
        assert set(pi.kernel()) == set(IA.arrow_orbit_of().values()), tag
        vker = {}
        for v, x in pi.vertex_map.items():
            vker.setdefault(x, set()).add(v)
        assert {frozenset(c) for c in vker.values()} == set(IA.vertex_orbit_of().values()), tag
    report(4, t)


def test_criterion_05_unfolding_laws():
    t = time.perf_counter()
    for tag, A in corpus():
        U = unfold(build_representation(A, choose_transversal(A)))
        assert validate_category(U.category, limit=None).ok, tag
        IA = induced_action(U)
        assert check_action(IA, limit=None).ok, tag
        assert is_semiregular(IA) and is_translative(IA), tag
    report(5, t)


def test_criterion_06_flat_calculus():
    t = time.perf_counter()
    for n in (3, 4, 5, 12):
        K, R = gen_zn_fold(n, 2 * n)
        D = r_n_maps(K)
        assert r_n_report(K, D).ok
        assert r_homomorphism_report(K, D).ok
        assert n_hat_report(K, D, n_hat(K, D)).ok
        Kf = flat_orbit_category(K, D)
        assert validate_category(Kf, limit=None).ok
        assert is_simple(Kf)
        F = flat_rep_from_representation(R)
        P = product_isomorphism(R, F)
        assert is_isomorphism(P)
        assert validate_category(P.source).ok and validate_category(P.target).ok
    report(6, t, 60.0)


def test_criterion_07_perturbations_detected():
    t = time.perf_counter()
    rng = random.Random(2024)
    bases = {}
    for n in (3, 4, 5):
        F = flat_rep_from_representation(gen_zn_fold(n, 2 * n)[1])
        nl, Cl = F.labelled()
        L = F.loop_category()
        assert extension_axioms(F.K, nl, Cl, L).ok
        assert validate_category(singleton_extension(F.K, nl, Cl, L)).ok
        bases[n] = (F, nl, Cl, L)
    detected = 0
    for _ in range(50):
        F, nl, Cl, L = bases[rng.choice(sorted(bases))]
        loops = sorted(L.arrows)
        nl, Cl = dict(nl), dict(Cl)
        if rng.random() < 0.5:
            key = rng.choice(sorted(k for k in nl if not any(F.K.is_identity(a) for a in k)))
            nl[key] = rng.choice([x for x in loops if x != nl[key]])
        else:
            key = rng.choice(sorted(k for k in Cl if not F.K.is_identity(k[0])))
            Cl[key] = rng.choice([x for x in loops if x != Cl[key]])
        rep = extension_axioms(F.K, nl, Cl, L)
        try:
            singleton_extension(F.K, nl, Cl, L)
            raised = False
        except AxiomViolation:
            raised = True
        if not rep.ok and rep.violations[0].witness is not None and raised:
            detected += 1
    assert detected == 50
    report(7, t)


def test_criterion_08_flat_unfolding_matches_plain():
    t = time.perf_counter()
    items = list(corpus()) + [(f"zn_cover({n})", zn_cover(n, 2 * n)) for n in (2, 3, 4)]
    for tag, A in items:
        T = choose_transversal(A)
        F = flat_rep_from_orbit(A, T, min(T))
        assert check_flat_annotation(F, limit=None).ok, tag
        FU = unfold_flat(F)
        PU = unfold(F.extension_representation())
        assert is_isomorphism(flat_to_plain_map(FU, PU)), tag
        assert find_isomorphism(FU.category, A.category) is not None, tag
    report(8, t)


def test_criterion_09_transversal_change():
    t = time.perf_counter()
    A = zn_cover(12, 24)
    m = len(A.group)
    T1 = choose_transversal(A)
    N = 12 * m
    T2 = Transversal(frozenset(f"{(i + 12 * (i % m)) % N:0{len(str(N - 1))}d}" for i in range(12)))
    assert T1.chosen != T2.chosen
    choose_transversal(A, sorted(T2.chosen))
    F1 = flat_rep_from_orbit(A, T1, min(T1))
    F2 = flat_rep_from_orbit(A, T2, min(T2))
    I = find_layer_shift(F1, F2)
    assert I is not None
    assert check_flat_iso(I, F1, F2)
    U1, U2 = unfold_flat(F1), unfold_flat(F2)
    assert is_isomorphism(flat_iso_unfolding_map(I, U1, U2))
    report(9, t)


def test_criterion_10_twelve_tet_and_shepard():
    t = time.perf_counter()
    F = gen_ntet(12)
    flags = property_catalogue(F, rotation_action(F.K, (12,)))
    assert flags.faithful is True
    assert flags.simple is True
    assert flags.antisymmetric is True
    assert flags.translatively_s_symmetric is True
    assert flags.complete is True
    S = gen_shepard(12)
    sflags = property_catalogue(S, rotation_action(S.rep.K, (12,)))
    assert sflags.antisymmetric is True and sflags.ordered is False
    P = S.partial.category()
    assert all(len(P.out_arrows(v)) == 6 for v in P.vertices)
    report(10, t)


def test_criterion_11_sigma_equivalence():
    t = time.perf_counter()
    systems = [tone_system_from_group(FiniteGroup.cyclic(n)) for n in (5, 7, 12)]
    systems.append(tone_system_from_pitches({f"p{i}": i % 5 for i in range(9)}))
    glued = gen_gluing_fixture()
    systems.append(glued)
    for T in systems:
        assert check_tone_system(T).ok
        rel = sigma_relation(T)
        tones = list(T.tones)
        assert all((x, x) in rel for x in tones)
        assert all((y, x) in rel for x, y in rel)
        assert all((x, z) in rel for x, y in rel for y2, z in rel if y == y2)
        sigma_classes(T)
    assert len(sigma_classes(glued)) < len(glued.tones)
    report(11, t)
