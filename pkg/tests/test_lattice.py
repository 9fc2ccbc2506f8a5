from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from mirrorcell.arrangement import Arrangement, build_Akl
from mirrorcell.cyclotomic import cyclotomic_field, rank
from mirrorcell.errors import InvalidParameterError
from mirrorcell.lattice import (
    characteristic_polynomial,
    charpoly_subsets,
    format_poly,
    intersection_lattice,
    mobius,
    serialize_lattice,
    triple_check,
)

from oracles import numeric_charpoly, numeric_rank_sizes


@pytest.mark.parametrize("params,sizes", [((2, 2, 1), [1, 3, 1]), ((0, 3, 1), [1, 3, 1]), ((0, 2, 2), [1, 2, 1])])
def test_rank_sizes_examples(params, sizes):
    assert intersection_lattice(build_Akl(*params)).rank_sizes == sizes


@pytest.mark.parametrize("params", [(1, 3, 2), (3, 3, 1), (0, 3, 3), (2, 3, 2), (0, 4, 1)])
def test_rank_sizes_match_numeric_oracle(params):
    A = build_Akl(*params)
    assert intersection_lattice(A).rank_sizes == numeric_rank_sizes(A)


def test_mobius_examples():
    L = mobius(intersection_lattice(build_Akl(2, 2, 1)))
    assert [X.mobius for X in L.flats] == [1, -1, -1, -1, 2]
    L = mobius(intersection_lattice(build_Akl(0, 2, 2)))
    assert L.flats[-1].mobius == 1
    for A in (build_Akl(1, 3, 2), build_Akl(0, 4, 1)):
        L = mobius(intersection_lattice(A))
        assert all(X.mobius == -1 for X in L.flats if X.rank == 1)


def test_charpoly_examples():
    assert characteristic_polynomial(build_Akl(2, 2, 1)) == (2, -3, 1)
    assert format_poly(characteristic_polynomial(build_Akl(2, 2, 1))) == "t^2 - 3t + 2"
    assert characteristic_polynomial(build_Akl(0, 2, 2)) == (1, -2, 1)
    empty = Arrangement(2, cyclotomic_field(1), ())
    assert characteristic_polynomial(empty) == (0, 0, 1)
    assert intersection_lattice(empty).rank_sizes == [1]


def test_known_factorizations():
    # free arrangements: chi factors over their exponents
    assert characteristic_polynomial(build_Akl(1, 3, 2)) == (-9, 15, -7, 1)
    assert characteristic_polynomial(build_Akl(3, 3, 3)) == (-28, 39, -12, 1)
    # braid arrangement in C^4: t (t-1)(t-2)(t-3)
    assert characteristic_polynomial(build_Akl(0, 4, 1)) == (0, -6, 11, -6, 1)


def test_format_poly():
    assert format_poly((0, 0, 1)) == "t^2"
    assert format_poly((1, -2, 1)) == "t^2 - 2t + 1"
    assert format_poly((0, -1, 0, 1), "x") == "x^3 - x"
    assert format_poly(()) == "0"


GRID = [(k, ell, r) for ell in (2, 3, 4) for r in (1, 2, 3) for k in range(ell + 1)]


@pytest.mark.parametrize("params", [p for p in GRID if len(build_Akl(*p)) <= 10])
def test_mobius_recursion_equals_subset_expansion(params):
    A = build_Akl(*params)
    chi = characteristic_polynomial(A)
    assert chi == charpoly_subsets(A)
    assert chi == numeric_charpoly(A)


@pytest.mark.parametrize("params", GRID)
def test_charpoly_sign_and_evaluation_properties(params):
    A = build_Akl(*params)
    chi = characteristic_polynomial(A)
    assert len(chi) == A.dim + 1 and chi[-1] == 1
    assert sum(chi) == 0
    assert all(c * (-1) ** (A.dim - i) >= 0 for i, c in enumerate(chi))
    assert sum(c * (-1) ** i for i, c in enumerate(chi)) != 0
    L = mobius(intersection_lattice(A))
    assert sum(L.mobius_values()) == 0


def test_subset_expansion_cap():
    with pytest.raises(InvalidParameterError):
        charpoly_subsets(build_Akl(0, 4, 2))


@pytest.mark.parametrize("params", [(k, ell, r) for ell in (2, 3) for r in (1, 2, 3) for k in range(ell + 1)])
def test_triple_check_every_hyperplane(params):
    A = build_Akl(*params)
    assert all(triple_check(A, i) for i in range(len(A)))


def test_triple_check_examples():
    A = build_Akl(2, 2, 1)
    assert triple_check(A, A.hyperplanes[0])
    single = Arrangement.from_covectors([A.hyperplanes[0].covector], 2, A.field)
    assert triple_check(single, 0)
    with pytest.raises(InvalidParameterError):
        triple_check(A, 7)


def test_lattice_closed_under_meets():
    A = build_Akl(1, 3, 2)
    L = intersection_lattice(A)
    keys = {X.containing for X in L.flats}
    for X in L.flats:
        for Y in L.flats:
            if X.rank and Y.rank:
                from mirrorcell.lattice import flat_of

                assert flat_of(A, X.containing + Y.containing).containing in keys


def test_poset_order_is_row_space_containment():
    A = build_Akl(2, 3, 2)
    L = intersection_lattice(A)
    for X in L.flats:
        for Y in L.flats:
            # forms vanishing on X lie in the row space of Y's forms
            contained = rank(list(Y.basis) + list(X.basis)) == Y.rank
            assert L.is_below(X, Y) == contained


@given(st.integers(2, 3), st.integers(1, 3), st.data())
def test_lattice_invariant_under_block_symmetry(ell, r, data):
    k = data.draw(st.integers(0, ell))
    A = build_Akl(k, ell, r)
    perm = list(data.draw(st.permutations(range(k)))) + list(data.draw(st.permutations(range(k, ell))))
    B = Arrangement.from_covectors(A.permute_coordinates(perm).covectors(), ell, A.field)
    LA, LB = mobius(intersection_lattice(A)), mobius(intersection_lattice(B))
    assert LA.rank_sizes == LB.rank_sizes
    assert sorted((X.rank, X.mobius) for X in LA.flats) == sorted((X.rank, X.mobius) for X in LB.flats)


def test_serialize_lattice():
    text = serialize_lattice(intersection_lattice(build_Akl(2, 2, 1)))
    assert text.splitlines() == [
        "rank=0 mobius=1 hyperplanes=[]",
        "rank=1 mobius=-1 hyperplanes=[0]",
        "rank=1 mobius=-1 hyperplanes=[1]",
        "rank=1 mobius=-1 hyperplanes=[2]",
        "rank=2 mobius=2 hyperplanes=[0,1,2]",
    ]
