import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from cocalculus import fixtures
from cocalculus.decomposition import jdim, max_jdim
from cocalculus.diagram import BooleanValues, PosetDiagram, codegree_lower_bound, is_codegree
from cocalculus.generators import (FreeQuotient, pullback_along_projection, random_chain_diagram,
                                   random_grid, random_ordered_diagram, random_small_lattice,
                                   random_vect_diagram)
from cocalculus.homalg.field import GF2, QQ, field
from cocalculus.lattice import GridLattice, NonDistributiveError, PowerSetLattice
from cocalculus.taylor import (check_naturality, check_telescope_triangles, check_universality,
                               converges, dual_degree, layer_map, stabilization_index, taylor,
                               taylor_grid_fast, telescope, universal_factorization,
                               verify_theorem_A, verify_theorem_B)

from oracles import taylor_sup_oracle

FIELDS = [GF2, field(3), QQ]
FIELD_IDS = ["GF2", "GF3", "QQ"]


def small_lattices():
    """Grids up to 3×3×3 and power sets up to four vertices."""
    grids = st.lists(st.integers(2, 3), min_size=1, max_size=3).map(GridLattice)
    sets = st.integers(1, 4).map(lambda n: PowerSetLattice(list("abcd"[:n])))
    return st.one_of(grids, sets)


def fast_to_full(fast, full):
    """Comparison map ``T_k^fast F(x) → T_k F(x)`` induced by the corner inclusion."""
    F = full.source
    out = {}
    for x in F.lattice.elements:
        cf = full.colimits[x]
        out[x] = fast.colimits[x].induced(lambda s, x=x: cf.leg(fast.corner(x, s)), cf.dim)
    return out


# examples ----------------------------------------------------------------------------------

@pytest.mark.parametrize("fld", FIELDS, ids=FIELD_IDS)
def test_three_corner_square_first_layer(fld):
    T = taylor(fixtures.three_corner_square(fld), 1)
    assert T.approx.dim((1, 1)) == 2
    assert T.approx.dim((1, 0)) == T.approx.dim((0, 1)) == 1


def test_zeroth_layer_is_constant_at_bottom():
    rng = random.Random(1)
    for _ in range(15):
        L = random_small_lattice(rng)
        F = random_vect_diagram(rng, L, QQ)
        T = taylor(F, 0).approx
        b = L.bottom
        for x in L.elements:
            assert T.dim(x) == F.dim(b)
        for u, w in L.cover_pairs():
            assert QQ.equal(T.edge(u, w), QQ.eye(F.dim(b)))


@pytest.mark.parametrize("fld", FIELDS, ids=FIELD_IDS)
def test_point_sphere_square_first_layer_is_circle(fld):
    T = taylor(fixtures.point_sphere_square(fld), 1)
    assert T.approx.value((1, 1)).homology() == {1: 1}
    assert T.approx.value((1, 0)).homology() == {}
    assert T.approx.value((0, 0)).homology() == {0: 1}


def test_nondistributive_lattice_is_refused():
    with pytest.raises(NonDistributiveError):
        taylor(fixtures.m3_diagram(), 1)
    T = taylor(fixtures.m3_diagram(), 1, allow_nondistributive=True)
    assert T.approx.dim("a4") == 3


def test_negative_k_is_refused():
    with pytest.raises(ValueError):
        taylor(fixtures.one_variable_square(), -1)


def test_fast_needs_grid_or_power_set():
    with pytest.raises(TypeError):
        taylor_grid_fast(fixtures.m3_diagram(), 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fast_ordered_power_set_is_max_over_small_subsets(n):
    F = fixtures.cardinality_functor(n)
    L = F.lattice
    for k in range(n + 1):
        T = taylor_grid_fast(F, k).approx
        for x in L.elements:
            assert T.value(x) == min(len(x), k)


def test_ordered_layers_against_sup_oracle():
    rng = random.Random(2)
    for _ in range(30):
        L = random_small_lattice(rng)
        F = random_ordered_diagram(rng, L)
        for k in range(max_jdim(L) + 1):
            T = taylor(F, k).approx
            for x in L.elements:
                assert T.value(x) == taylor_sup_oracle(F, x, k, lambda v: jdim(L, v))


def test_k_at_least_axes_reproduces_the_diagram():
    rng = random.Random(3)
    for _ in range(20):
        L = random_grid(rng)
        F = random_vect_diagram(rng, L, rng.choice(FIELDS))
        for build in (taylor, taylor_grid_fast):
            T = build(F, len(L.heights))
            assert all(T.eps_is_equivalence(x) for x in L.elements)


def test_constant_diagram_has_constant_layers():
    L = GridLattice([3, 3])
    F = PosetDiagram.vect(L, GF2, {x: 2 for x in L.elements},
                          {e: GF2.eye(2) for e in L.cover_pairs()})
    for layer in telescope(F, 2):
        assert all(layer.approx.dim(x) == 2 for x in L.elements)
        assert all(layer.eps_is_equivalence(x) for x in L.elements)
    O = PosetDiagram.ordered(PowerSetLattice("abc"), lambda x: Fraction(7, 2))
    for k in range(4):
        assert all(v == Fraction(7, 2) for v in
                   (taylor_grid_fast(O, k).approx.value(x) for x in O.lattice.elements))


# fast and full constructions agree ------------------------------------------------------------

@pytest.mark.parametrize("fld", FIELDS, ids=FIELD_IDS)
def test_fast_and_full_vect_layers_are_isomorphic(fld):
    rng = random.Random(4)
    for _ in range(25):
        L = random_grid(rng) if rng.random() < 0.7 else PowerSetLattice(list("abc"))
        F = random_vect_diagram(rng, L, fld)
        for k in range(max_jdim(L) + 1):
            fast, full = taylor_grid_fast(F, k), taylor(F, k)
            cmp = fast_to_full(fast, full)
            for x in L.elements:
                m = cmp[x]
                assert m.shape[0] == m.shape[1] == fld.rank(m)
                # the comparison commutes with eps
                assert fld.equal(fld.matmul(full.eps[x], m), fast.eps[x])
            for u, w in L.cover_pairs():
                assert fld.equal(fld.matmul(cmp[w], fast.approx.edge(u, w)),
                                 fld.matmul(full.approx.edge(u, w), cmp[u]))


def test_fast_and_full_chain_layers_are_quasi_isomorphic():
    rng = random.Random(5)
    for _ in range(12):
        L = GridLattice([rng.randint(2, 3), 2])
        F = random_chain_diagram(rng, L, rng.choice(FIELDS))
        for k in (1, 2):
            fast, full = taylor_grid_fast(F, k), taylor(F, k)
            for x in L.elements:
                assert fast.approx.value(x).homology() == full.approx.value(x).homology()
                assert fast.eps[x].is_quasi_iso() == full.eps[x].is_quasi_iso()
            assert fast.approx.validate() == []


# structure maps ------------------------------------------------------------------------------

def test_eps_is_natural_and_layers_functorial():
    rng = random.Random(6)
    for _ in range(20):
        L = random_small_lattice(rng)
        F = random_vect_diagram(rng, L, rng.choice(FIELDS))
        for k in range(max_jdim(L) + 1):
            T = taylor(F, k)
            assert T.approx.validate() == []
            assert check_naturality(T) == []


def test_chain_eps_is_natural():
    rng = random.Random(7)
    for _ in range(8):
        F = random_chain_diagram(rng, GridLattice([2, 2, 2]), GF2)
        for k in (1, 2):
            T = taylor(F, k)
            assert T.approx.validate() == []
            assert check_naturality(T) == []
            Tf = taylor_grid_fast(F, k)
            assert check_naturality(Tf) == []


def test_eps_is_equivalence_where_jdim_is_small():
    rng = random.Random(8)
    for _ in range(20):
        L = random_small_lattice(rng)
        F = random_vect_diagram(rng, L, field(5))
        for k in range(max_jdim(L) + 1):
            T = taylor(F, k)
            for x in L.elements:
                if jdim(L, x) <= k:
                    assert T.eps_is_equivalence(x)


def test_cardinality_telescope_table():
    for n in range(1, 6):
        F = fixtures.cardinality_functor(n)
        top = F.lattice.top
        layers = telescope(F, 5)
        assert [layer.approx.value(top) for layer in layers] == [min(n, m) for m in range(6)]
        assert check_telescope_triangles(layers) == []


@pytest.mark.parametrize("fast", [False, True])
def test_vect_telescope_triangles(fast):
    rng = random.Random(9)
    for _ in range(15):
        L = random_grid(rng) if fast else random_small_lattice(rng)
        F = random_vect_diagram(rng, L, rng.choice(FIELDS))
        layers = telescope(F, max_jdim(L), fast=fast)
        assert check_telescope_triangles(layers) == []
        # r is natural
        for lo in layers[:-1]:
            hi = layers[lo.k + 1]
            fld = F.field
            for u, w in L.cover_pairs():
                assert fld.equal(fld.matmul(lo.r[w], lo.approx.edge(u, w)),
                                 fld.matmul(hi.approx.edge(u, w), lo.r[u]))


def test_chain_telescope_triangles():
    rng = random.Random(10)
    F = random_chain_diagram(rng, GridLattice([2, 2, 2]), QQ)
    assert check_telescope_triangles(telescope(F, 3)) == []


def test_layer_map_composes():
    rng = random.Random(11)
    F = random_vect_diagram(rng, GridLattice([3, 3, 2]), QQ)
    t0, t1, t2 = (taylor(F, k) for k in range(3))
    r01, r12, r02 = layer_map(t0, t1), layer_map(t1, t2), layer_map(t0, t2)
    for x in F.lattice.elements:
        assert QQ.equal(QQ.matmul(r12[x], r01[x]), r02[x])


def test_stabilization_index_is_max_jdim_for_cardinality():
    for n in range(1, 5):
        assert stabilization_index(fixtures.cardinality_functor(n)) == n


def test_convergence_on_random_diagrams():
    rng = random.Random(12)
    for _ in range(20):
        L = random_small_lattice(rng)
        F = random_vect_diagram(rng, L, rng.choice(FIELDS))
        assert converges(F)
        assert stabilization_index(F) <= max_jdim(L)
        # eps_k invertible everywhere iff F is codegree k, by the two theorems
        assert stabilization_index(F) == codegree_lower_bound(F)


# theorems ------------------------------------------------------------------------------------

@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_lattices(), st.integers(0, 10**6), st.integers(0, 3), st.sampled_from([2, 3, None]))
def test_theorem_A_vect(L, seed, k, p):
    rng = random.Random(seed)
    F = random_vect_diagram(rng, L, field(p))
    rep = verify_theorem_A(F, k)
    assert rep.holds, rep.detail


@settings(max_examples=40, deadline=None)
@given(small_lattices(), st.integers(0, 10**6), st.integers(0, 3))
def test_theorem_A_ordered(L, seed, k):
    F = random_ordered_diagram(random.Random(seed), L)
    assert verify_theorem_A(F, k).holds


def test_theorem_A_chain_small():
    rng = random.Random(13)
    for _ in range(4):
        F = random_chain_diagram(rng, GridLattice([2, 2, 2]), GF2)
        assert verify_theorem_A(F, 1).holds


def test_theorem_A_fails_on_m3():
    rep = verify_theorem_A(fixtures.m3_diagram(), 1, allow_nondistributive=True)
    assert not rep.holds and rep.witness is not None


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_lattices(), st.integers(0, 10**6), st.integers(0, 3))
def test_theorem_B_on_approximations(L, seed, n):
    rng = random.Random(seed)
    G = random_vect_diagram(rng, L, rng.choice(FIELDS))
    F = taylor(G, n).approx
    assert verify_theorem_B(F, n).holds
    # idempotence
    TT = taylor(F, n)
    assert all(TT.eps_is_equivalence(x) for x in L.elements)


def test_theorem_B_refuses_without_precondition():
    rep = verify_theorem_B(fixtures.three_corner_square(), 1)
    assert not rep.holds and rep.status == "precondition unverified"


def test_theorem_B_on_independent_variable_diagrams():
    rng = random.Random(14)
    for _ in range(15):
        G = random_vect_diagram(rng, GridLattice([3, 2]), QQ)
        F = pullback_along_projection(G, [3, 2, 2], [0, 1])
        assert verify_theorem_B(F, 2).holds


# universality --------------------------------------------------------------------------------

def free_map(rng, G0: FreeQuotient, embed, F):
    """Natural map from the pullback of a free diagram into ``F``: each
    generator goes to a random vector of ``F`` at its position."""
    fld = F.field
    L = F.lattice
    images = [fld.random_matrix(rng, F.dim(embed(p)), 1) for p in G0.generators]
    zeta = {}
    for x in L.elements:
        act = [j for j, p in enumerate(G0.generators) if L.leq(embed(p), x)]
        m = fld.zeros(F.dim(x), len(act))
        for i, j in enumerate(act):
            m[:, i:i + 1] = fld.matmul(F.map(embed(G0.generators[j]), x), images[j])
        zeta[x] = m
    return zeta


def test_universality_from_free_codegree_diagrams():
    rng = random.Random(15)
    for _ in range(20):
        fld = rng.choice(FIELDS)
        heights = [rng.randint(2, 3) for _ in range(3)]
        kept = sorted(rng.sample(range(3), rng.randint(1, 2)))
        small = GridLattice([heights[i] for i in kept])
        G0 = FreeQuotient(small, fld, [rng.choice(small.elements) for _ in range(rng.randint(1, 3))], [])
        G = pullback_along_projection(G0.diagram(), heights, kept)

        def embed(p):
            out = [0] * 3
            for i, c in zip(kept, p):
                out[i] = c
            return tuple(out)

        F = random_vect_diagram(rng, GridLattice(heights), fld)
        zeta = free_map(rng, G0, embed, F)
        for u, w in F.lattice.cover_pairs():
            assert fld.equal(fld.matmul(F.edge(u, w), zeta[u]), fld.matmul(zeta[w], G.edge(u, w)))
        n = len(kept)
        assert is_codegree(G, n)
        assert check_universality(zeta, G, F, n)


def test_universality_for_eps_itself():
    rng = random.Random(16)
    for _ in range(10):
        L = random_small_lattice(rng)
        F = random_vect_diagram(rng, L, QQ)
        T = taylor(F, 1)
        assert check_universality(T.eps, T.approx, F, 1)


def test_factorization_needs_invertible_eps():
    F = fixtures.three_corner_square(QQ)
    ident = {x: QQ.eye(F.dim(x)) for x in F.lattice.elements}
    assert universal_factorization(ident, F, F, 1) is None


# dual approximation ---------------------------------------------------------------------------

def indicator(L, faces):
    return PosetDiagram.ordered(L, lambda s: s in faces, value_lattice=BooleanValues(),
                                contravariant=True)


def test_dual_degree_is_and_over_small_faces():
    rng = random.Random(17)
    L = PowerSetLattice(list("abcd"))
    for _ in range(30):
        faces = {s for s in L.elements if rng.random() < 0.6}
        X = indicator(L, faces)
        for n in range(5):
            T = dual_degree(X, n)
            for s in L.elements:
                expected = all(t in faces for t in L.elements if t <= s and len(t) <= n)
                assert T.value(s) == expected


def test_dual_degree_large_n_and_full_simplex():
    rng = random.Random(18)
    L = PowerSetLattice(list("abc"))
    tops = [s for s in L.elements if rng.random() < 0.3]
    faces = {s for s in L.elements if any(s <= t for t in tops)}
    X = indicator(L, faces)
    assert X.is_valid()
    assert all(dual_degree(X, 3).value(s) == X.value(s) for s in L.elements)
    full = indicator(L, set(L.elements))
    for n in range(1, 4):
        assert all(dual_degree(full, n).value(s) for s in L.elements)


def test_dual_degree_rejects_vector_spaces():
    with pytest.raises(ValueError):
        dual_degree(fixtures.one_variable_square(), 1)


def test_contravariant_ordered_needs_dual_degree():
    L = PowerSetLattice(list("ab"))
    with pytest.raises(ValueError):
        taylor(indicator(L, set(L.elements)), 1)
