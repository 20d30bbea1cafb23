"""Small pinned diagrams with known Taylor approximations and codegrees."""
from __future__ import annotations

from .diagram import PosetDiagram
from .homalg.chain import ChainComplex, ChainMap
from .homalg.field import Field, GF2
from .lattice import GridLattice, PowerSetLattice, m3_lattice, n5_lattice

SQUARE = GridLattice([2, 2])


def _vect_on_square(fld: Field, dims: dict, maps: dict) -> PosetDiagram:
    return PosetDiagram.vect(SQUARE, fld, dims,
                             {k: fld.array(v) for k, v in maps.items()})


def one_variable_square(fld: Field = GF2) -> PosetDiagram:
    """``F(1,0) = F(1,1) = 𝔽`` joined by the identity, zero elsewhere.

    Codegree 1: it only depends on the first coordinate.
    """
    return _vect_on_square(fld, {(0, 0): 0, (1, 0): 1, (0, 1): 0, (1, 1): 1},
                           {((1, 0), (1, 1)): [[1]]})


def three_corner_square(fld: Field = GF2) -> PosetDiagram:
    """``𝔽`` at every corner except the bottom, identities between them.

    Codegree 2 but not 1: the pushout at the top would need ``𝔽 ⊕ 𝔽``.
    """
    return _vect_on_square(fld, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                           {((1, 0), (1, 1)): [[1]], ((0, 1), (1, 1)): [[1]]})


def direct_sum_square(fld: Field = GF2) -> PosetDiagram:
    """``𝔽 ⊕ 𝔽`` at the top with the two coordinate inclusions; codegree 1."""
    return _vect_on_square(fld, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 2},
                           {((0, 1), (1, 1)): [[1], [0]], ((1, 0), (1, 1)): [[0], [1]]})


def sphere(fld: Field, n: int) -> ChainComplex:
    """``S^n``: one copy of the field in degree ``n``."""
    return ChainComplex.concentrated(fld, n, 1)


def disk(fld: Field, n: int) -> ChainComplex:
    """``D^n``: the field in degrees ``n`` and ``n - 1`` with identity differential."""
    return ChainComplex(fld, {n: 1, n - 1: 1}, {n: fld.eye(1)})


def pushout_complex(fld: Field = GF2) -> ChainComplex:
    """Two copies of ``D^1`` glued along their boundary: ``𝔽² --(1 1)--> 𝔽``."""
    return ChainComplex(fld, {1: 2, 0: 1}, {1: fld.array([[1, 1]])})


def pushout_to_circle(fld: Field = GF2, top=(1, 0)) -> ChainMap:
    """Map from the pushout complex onto ``S^1`` collapsing one of the disks.

    The cycle of the source is ``e1 - e2``, so the degree-1 component must not
    vanish on it; ``top=(1, 1)`` gives a map that is zero on homology.
    """
    return ChainMap(pushout_complex(fld), sphere(fld, 1), {1: fld.array([list(top)])})


def point_sphere_square(fld: Field = GF2) -> PosetDiagram:
    """Chain diagram with ``S^0`` at the bottom and zero elsewhere."""
    zero = ChainComplex.zero(fld)
    values = {(0, 0): sphere(fld, 0), (1, 0): zero, (0, 1): zero, (1, 1): zero}
    return PosetDiagram.chain(SQUARE, fld, values, {})


def as_chain_diagram(D: PosetDiagram) -> PosetDiagram:
    """A vector-space diagram viewed as complexes concentrated in degree 0."""
    fld = D.field
    L = D.lattice
    values = {x: ChainComplex.concentrated(fld, 0, D.dim(x)) for x in L.elements}
    maps = {(u, w): ChainMap(values[u], values[w], {0: D.edge(u, w)})
            for u, w in L.cover_pairs()}
    return PosetDiagram.chain(L, fld, values, maps)


def m3_diagram(fld: Field = GF2) -> PosetDiagram:
    """``𝔽`` on the three atoms of M3, zero at the bottom and top."""
    L = m3_lattice()
    dims = {"a0": 0, "a1": 1, "a2": 1, "a3": 1, "a4": 0}
    return PosetDiagram.vect(L, fld, dims, {})


def n5_diagram(fld: Field = GF2) -> PosetDiagram:
    """``𝔽`` at ``b2`` and ``b3`` of N5, zero elsewhere."""
    L = n5_lattice()
    dims = {"b0": 0, "b1": 0, "b2": 1, "b3": 1, "b4": 0}
    return PosetDiagram.vect(L, fld, dims, {})


def cardinality_functor(n: int) -> PosetDiagram:
    """``X ↦ |X|`` on the subsets of ``{1..n}`` with exact values."""
    L = PowerSetLattice(list(range(1, n + 1)))
    return PosetDiagram.ordered(L, lambda x: len(x))
