import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbifold.errors import InfiniteGroup
from orbifold.groups import AbelianGroup, FiniteGroup, ShiftedGroup, group_from_json

from conftest import small_groups


def test_cyclic_table():
    G = FiniteGroup.cyclic(5)
    assert G.check().ok
    assert G.mul("3", "4") == "2"
    assert G.inv("2") == "3"
    assert G.neutral == "0"


def test_product_and_permutation_groups():
    V = FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    assert len(V) == 4 and V.check().ok
    assert all(V.mul(g, g) == V.neutral for g in V.elements)
    S3, perms = FiniteGroup.from_permutations({"s": {0: 1, 1: 0}, "t": {1: 2, 2: 1}})
    assert len(S3) == 6 and S3.check().ok
    # "g h" applies g first
    s, t = perms["s"], perms["t"]
    st_ = S3.mul("s", "t")
    assert perms[st_] == {x: t[s[x]] for x in range(3)}


def test_non_bijective_generator_rejected():
    with pytest.raises(ValueError):
        FiniteGroup.from_permutations({"f": {0: 1, 1: 1}})


@given(small_groups(), st.data())
def test_group_axioms(G, data):
    a, b, c = (data.draw(st.sampled_from(G.elements)) for _ in range(3))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inv(a)) == G.neutral
    assert G.mul(G.neutral, a) == a


def test_abelian_group():
    Z = AbelianGroup(1)
    assert Z.mul((3,), (-5,)) == (-2,)
    assert not Z.is_finite
    with pytest.raises(InfiniteGroup):
        Z.elements
    T = AbelianGroup(0, (3, 4))
    assert len(T) == 12
    assert T.mul((2, 3), (2, 3)) == (1, 2)
    assert T.parse(T.label((1, 2))) == (1, 2)
    assert (5, 0) not in T and (2, 0) in T
    F, lab = T.to_finite()
    assert F.check().ok and len(F) == 12


def test_json_roundtrip():
    for G in (FiniteGroup.cyclic(3), AbelianGroup(2, (5,))):
        H = group_from_json(G.to_json())
        assert H.to_json() == G.to_json()


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-3, 3))
def test_shifted_group_is_a_group_with_neutral_a(x, y, z, a):
    S = ShiftedGroup(AbelianGroup(1), (a,))
    x, y, z = (x,), (y,), (z,)
    assert S.mul(S.mul(x, y), z) == S.mul(x, S.mul(y, z))
    assert S.mul(S.neutral, x) == x == S.mul(x, S.neutral)
    assert S.mul(x, S.inv(x)) == S.neutral


def test_shifted_finite_group():
    G = FiniteGroup.cyclic(6)
    S = ShiftedGroup(G, "2")
    for x, y in itertools.product(G.elements, repeat=2):
        assert S.mul(x, S.inv(x)) == "2"
        assert S.mul(x, y) == G.mul(G.mul(x, "4"), y)
