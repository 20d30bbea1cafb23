import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocalculus.decomposition import (JoinDecomposition, PairwiseCover, all_cubes, build_cube,
                                      cover_from_decomposition, cover_of_cube,
                                      decomposition_from_cover, elements_below_with_jdim_at_most,
                                      enumerate_pairwise_covers, enumerate_reduced_covers,
                                      indecomposable_decomposition, is_join_irreducible,
                                      is_strongly_bicartesian, jdim, jdim_bruteforce, max_jdim)
from cocalculus.generators import random_downset_lattice
from cocalculus.lattice import (ExplicitLattice, GridLattice, LatticeError, NonDistributiveError,
                                PowerSetLattice, downset_lattice, find_m3_n5, is_distributive,
                                lattice_from_descriptor, m3_lattice, n5_lattice,
                                parse_lattice_spec)

from oracles import (covers_bruteforce, is_distributive_bruteforce,
                     join_irreducible_count_below)


def corpus():
    """Small distributive lattices, each with at most 32 elements."""
    rng = random.Random(11)
    out = [GridLattice([2, 2]), GridLattice([3, 3]), GridLattice([2, 3, 2]), GridLattice([4, 2]),
           GridLattice([2, 2, 2, 2]), PowerSetLattice("abc"), PowerSetLattice("abcd"),
           GridLattice([5])]
    while len(out) < 16:
        L = random_downset_lattice(rng, rng.randint(2, 5))
        if len(L) <= 32:
            out.append(L)
    return out


CORPUS = corpus()


# joins, meets, distributivity ------------------------------------------------------------

def test_grid_join_is_coordinatewise_max():
    L = GridLattice([2, 3])
    assert L.join((1, 0), (0, 2)) == (1, 2)
    assert L.meet((1, 0), (0, 2)) == (0, 0)


def test_powerset_meet_is_intersection():
    L = PowerSetLattice("abc")
    assert L.meet(frozenset("ab"), frozenset("bc")) == frozenset("b")


def test_m3_join_of_two_atoms_is_top():
    L = m3_lattice()
    assert L.join("a1", "a2") == "a4"
    assert L.meet("a1", "a2") == "a0"


def test_distributivity_of_small_lattices():
    assert is_distributive(GridLattice([2, 2]), exhaustive=True) == (True, None)
    ok, w = is_distributive(m3_lattice())
    assert not ok and w is not None
    x, y, z = w
    L = m3_lattice()
    assert L.meet(x, L.join(y, z)) != L.join(L.meet(x, y), L.meet(x, z))
    assert not is_distributive(n5_lattice())[0]


@pytest.mark.parametrize("L", CORPUS + [m3_lattice(), n5_lattice()], ids=repr)
def test_distributivity_matches_bruteforce_and_sublattice_criterion(L):
    ok = is_distributive(L, exhaustive=True)[0]
    assert ok == is_distributive_bruteforce(L)
    assert ok == (find_m3_n5(L) is None)


def test_find_m3_n5_names_the_sublattice():
    assert find_m3_n5(m3_lattice())[0] == "M3"
    assert find_m3_n5(n5_lattice())[0] == "N5"


def test_explicit_lattice_validation():
    with pytest.raises(LatticeError):
        ExplicitLattice(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(LatticeError):
        # two maximal elements, no join
        ExplicitLattice(["o", "a", "b"], [("o", "a"), ("o", "b")])
    with pytest.raises(LatticeError):
        ExplicitLattice(["a", "a"], [])


def test_explicit_text_round_trip(tmp_path):
    L = n5_lattice()
    text = L.to_text()
    again = ExplicitLattice.from_text("# pentagon\n" + text)
    assert set(again.cover_pairs()) == set(L.cover_pairs())
    p = tmp_path / "n5.txt"
    p.write_text(text)
    assert set(parse_lattice_spec(str(p)).cover_pairs()) == set(L.cover_pairs())


def test_descriptor_round_trip():
    for L in [GridLattice([3, 2]), PowerSetLattice("xyz"), m3_lattice()]:
        again = lattice_from_descriptor(L.descriptor())
        assert again.elements == L.elements
        assert set(again.cover_pairs()) == set(L.cover_pairs())


def test_parse_lattice_spec_forms():
    assert parse_lattice_spec("grid:3x2").heights == (3, 2)
    assert len(parse_lattice_spec("powerset:a,b,c")) == 8
    assert len(parse_lattice_spec("{a,b}")) == 4


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3), st.data())
@settings(max_examples=60, deadline=None)
def test_grid_lattice_axioms(heights, data):
    L = GridLattice(heights)
    els = L.elements
    x = data.draw(st.sampled_from(els))
    y = data.draw(st.sampled_from(els))
    j, m = L.join(x, y), L.meet(x, y)
    assert L.leq(x, j) and L.leq(y, j) and L.leq(m, x) and L.leq(m, y)
    assert all(not (L.leq(x, u) and L.leq(y, u)) or L.leq(j, u) for u in els)
    assert all(not (L.leq(u, x) and L.leq(u, y)) or L.leq(u, m) for u in els)


# join-irreducibility and decompositions ----------------------------------------------------

def test_join_irreducible_examples():
    L = GridLattice([2, 2, 3, 2])
    assert is_join_irreducible(L, (0, 0, 2, 0))
    assert not is_join_irreducible(L, (1, 1, 0, 0))
    assert not is_join_irreducible(L, L.bottom)
    P = PowerSetLattice("abc")
    assert is_join_irreducible(P, frozenset("a"))
    assert not is_join_irreducible(P, frozenset("ab"))


def test_indecomposable_decomposition_of_1120():
    L = GridLattice([2, 2, 3, 1])
    d = indecomposable_decomposition(L, (1, 1, 2, 0))
    assert set(d.parts) == {(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 2, 0)}
    assert d.is_reduced(L) and d.is_indecomposable(L)


def test_decomposition_edge_cases():
    L = GridLattice([2, 2])
    assert indecomposable_decomposition(L, (0, 0)).parts == ()
    P = PowerSetLattice("abc")
    assert set(indecomposable_decomposition(P, frozenset("ab")).parts) == {frozenset("a"), frozenset("b")}
    with pytest.raises(NonDistributiveError):
        indecomposable_decomposition(m3_lattice(), "a4")


def test_jdim_examples():
    L = GridLattice([2, 2, 3, 3])
    assert jdim(L, (1, 1, 2, 2)) == 4
    assert jdim(L, (0, 0, 0, 0)) == 0
    P = PowerSetLattice("abcde")
    assert all(jdim(P, u) == len(u) for u in P.elements)


def test_jdim_on_m3_n5_uses_reduced_decompositions():
    assert [jdim(m3_lattice(), x) for x in ["a0", "a1", "a2", "a3", "a4"]] == [0, 1, 1, 1, 2]
    assert [jdim(n5_lattice(), x) for x in ["b0", "b1", "b2", "b3", "b4"]] == [0, 1, 1, 1, 2]


@pytest.mark.parametrize("L", CORPUS, ids=repr)
def test_jdim_agrees_with_decomposition_and_bruteforce(L):
    for v in L.elements:
        d = indecomposable_decomposition(L, v)
        assert d.is_valid(L) and d.is_reduced(L) and d.is_indecomposable(L)
        assert jdim(L, v) == len(d.parts) == join_irreducible_count_below(L, v)
        if len(L) <= 20:
            assert jdim(L, v) == jdim_bruteforce(L, v)


# covers ------------------------------------------------------------------------------------

def test_cover_from_decomposition_example():
    L = GridLattice([2, 2, 3, 3])
    d = JoinDecomposition((1, 1, 2, 2), ((1, 1, 0, 0), (1, 0, 2, 1), (0, 0, 0, 2)))
    c = cover_from_decomposition(L, d)
    assert set(c.parts) == {(1, 1, 2, 1), (1, 1, 0, 2), (1, 0, 2, 2)}
    assert c.is_reduced(L)


def test_decomposition_from_cover_example():
    L = GridLattice([2, 2, 3, 3])
    c = PairwiseCover((1, 1, 2, 2), ((1, 1, 2, 1), (1, 1, 0, 2), (1, 0, 2, 2)))
    d = decomposition_from_cover(L, c)
    # coordinatewise minima of the other two parts
    assert d.parts == ((1, 0, 0, 2), (1, 0, 2, 1), (1, 1, 0, 1))
    assert d.join(L) == (1, 1, 2, 2)


def test_cover_conventions_for_small_cases():
    L = GridLattice([2, 2])
    single = cover_from_decomposition(L, JoinDecomposition((1, 1), ((1, 1),)))
    assert single.parts == (L.bottom,)
    P = PowerSetLattice("ab")
    c = cover_from_decomposition(P, JoinDecomposition(frozenset("ab"), (frozenset("a"), frozenset("b"))))
    assert set(c.parts) == {frozenset("a"), frozenset("b")}
    d = decomposition_from_cover(P, c)
    assert set(d.parts) == {frozenset("a"), frozenset("b")}


def test_reduced_covers_of_the_square_top():
    L = GridLattice([2, 2])
    covers = enumerate_reduced_covers(L, (1, 1), 2)
    assert [set(c.parts) for c in covers] == [{(0, 1), (1, 0)}]


def test_elements_below_with_small_jdim():
    L = GridLattice([2, 2])
    assert set(elements_below_with_jdim_at_most(L, (1, 1), 1)) == {(0, 0), (0, 1), (1, 0)}
    assert elements_below_with_jdim_at_most(L, (1, 1), 0) == [(0, 0)]


@pytest.mark.parametrize("L", CORPUS + [m3_lattice(), n5_lattice()], ids=repr)
def test_reduced_covers_match_bruteforce(L):
    for v in L.elements:
        for size in (1, 2, 3, 4):
            got = {frozenset(c.parts) for c in enumerate_reduced_covers(L, v, size)}
            assert got == covers_bruteforce(L, v, size)


def test_cover_counts_are_frozen():
    # counts obtained from the brute-force enumeration in tests/oracles.py
    L = GridLattice([3, 3, 3])
    assert sum(len(enumerate_reduced_covers(L, v, 2)) for v in L.elements) == 162
    assert sum(len(enumerate_reduced_covers(L, v, 3)) for v in L.elements) == 27
    P = PowerSetLattice("abcd")
    assert [sum(len(enumerate_reduced_covers(P, v, s)) for v in P.elements)
            for s in (2, 3, 4)] == [55, 14, 1]


def test_enumeration_order_is_deterministic():
    L = GridLattice([3, 3, 3])
    a = [c.parts for c in enumerate_reduced_covers(L, (2, 2, 2), 3)]
    b = [c.parts for c in enumerate_reduced_covers(GridLattice([3, 3, 3]), (2, 2, 2), 3)]
    assert a == b == sorted(a, key=lambda ps: [(jdim(L, p), L.key(p)) for p in ps])


def test_nonreduced_covers_include_the_target():
    L = GridLattice([2, 2])
    covers = enumerate_pairwise_covers(L, (1, 1), 2)
    assert any((1, 1) in c.parts for c in covers)
    assert all(c.is_valid(L) for c in covers)


@pytest.mark.parametrize("L", [L for L in CORPUS if len(L) <= 32], ids=repr)
def test_cover_decomposition_round_trip(L):
    for v in L.elements:
        for size in (2, 3):
            for c in enumerate_reduced_covers(L, v, size):
                d = decomposition_from_cover(L, c)
                assert d.is_valid(L) and d.is_reduced(L)
                for i, q in enumerate(d.parts):
                    others = c.parts[:i] + c.parts[i + 1:]
                    assert q == L.meet_all(others)
                back = cover_from_decomposition(L, d)
                assert back.target == v and back.is_valid(L)


# cubes -------------------------------------------------------------------------------------

@pytest.mark.parametrize("L", CORPUS[:10], ids=repr)
def test_cubes_of_covers_are_strongly_bicartesian(L):
    for v in L.elements:
        for size in (2, 3):
            for c in enumerate_reduced_covers(L, v, size):
                cube = build_cube(L, c)
                assert cube.is_monotone(L)
                assert cube.vertices[cube.full] == v
                for i in range(size):
                    assert cube.vertices[cube.full - {i}] == c.parts[i]
                assert is_strongly_bicartesian(L, cube)


@pytest.mark.parametrize("L", [GridLattice([2, 2]), GridLattice([3, 2]), PowerSetLattice("ab"),
                               GridLattice([2, 2, 2])], ids=repr)
def test_bicartesian_squares_come_from_covers(L):
    for cube in all_cubes(L, 2):
        if is_strongly_bicartesian(L, cube):
            c = cover_of_cube(cube)
            assert c.is_valid(L)
            assert build_cube(L, c).vertices == cube.vertices


def test_m3_square_on_two_atoms_is_bicartesian():
    L = m3_lattice()
    cube = build_cube(L, PairwiseCover("a4", ("a1", "a2")))
    assert cube.vertices[frozenset()] == "a0"
    assert is_strongly_bicartesian(L, cube)


def test_unit_square_cube():
    L = GridLattice([2, 2])
    cube = build_cube(L, PairwiseCover((1, 1), ((0, 1), (1, 0))))
    assert set(cube.vertices.values()) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert is_strongly_bicartesian(L, cube)


def test_max_jdim():
    assert max_jdim(GridLattice([3, 3, 3])) == 3
    assert max_jdim(PowerSetLattice("abcd")) == 4
    assert max_jdim(downset_lattice(["p", "q"], [("p", "q")])) == 1


def test_downset_lattice_is_distributive():
    L = downset_lattice(["p", "q", "r"], [("p", "r")])
    assert is_distributive(L, exhaustive=True)[0]
    assert len(L) == len({s for s in L.elements})


def test_invalid_elements_rejected():
    L = GridLattice([2, 2])
    with pytest.raises(Exception):
        L.check_element((2, 0))
    assert (1, 1) in L and (2, 0) not in L
    assert list(itertools.islice(L.elements, 1)) == [L.bottom]
