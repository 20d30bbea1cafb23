"""Seeded random diagrams, lattices, complexes and point clouds.

Random vector-space diagrams are quotients of free diagrams: generators sit at
chosen elements, and relations are vectors of the free diagram at other
elements. Every such quotient is exactly functorial, so no rejection sampling
is needed.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from .diagram import PosetDiagram
from .homalg.chain import ChainComplex, ChainMap
from .homalg.field import Field, GF2
from .lattice import FiniteLattice, GridLattice, PowerSetLattice, downset_lattice


class FreeQuotient:
    """Free diagram on generators modulo a family of relations.

    ``generators[j]`` is the element carrying generator ``j``; ``relations``
    is a list of ``(element, coefficient vector over all generators)`` where
    only generators below the element may have nonzero coefficients.
    """

    def __init__(self, L: FiniteLattice, fld: Field, generators: list, relations: list):
        self.L = L
        self.field = fld
        self.generators = list(generators)
        self.relations = list(relations)
        self._active = {x: [j for j, p in enumerate(self.generators) if L.leq(p, x)]
                        for x in L.elements}
        self._quot = {}
        self._sect = {}
        for x in L.elements:
            act = self._active[x]
            cols = []
            for r, vec in self.relations:
                if L.leq(r, x):
                    cols.append([vec[j] for j in act])
            if cols and act:
                rel = fld.array(cols).T.copy()
                q = fld.left_nullspace(rel)
            else:
                q = fld.eye(len(act))
            self._quot[x] = q
            self._sect[x] = fld.right_inverse(q)

    def dim(self, x) -> int:
        return self._quot[x].shape[0]

    def free_dim(self, x) -> int:
        return len(self._active[x])

    def inclusion(self, x, y) -> np.ndarray:
        """Coordinate inclusion of the free diagram at ``x`` into ``y``."""
        f = self.field
        ax, ay = self._active[x], self._active[y]
        pos = {j: i for i, j in enumerate(ay)}
        out = f.zeros(len(ay), len(ax))
        for i, j in enumerate(ax):
            out[pos[j], i] = f.scalar(1)
        return out

    def map(self, x, y) -> np.ndarray:
        f = self.field
        return f.mul(self._quot[y], self.inclusion(x, y), self._sect[x])

    def element(self, x, coeffs) -> np.ndarray:
        """Image in ``F(x)`` of a vector of the free diagram at ``x``."""
        f = self.field
        vec = f.array([[c] for c in coeffs], (self.free_dim(x), 1))
        return f.matmul(self._quot[x], vec)

    def diagram(self) -> PosetDiagram:
        L = self.L
        dims = {x: self.dim(x) for x in L.elements}
        maps = {(u, w): self.map(u, w) for u, w in L.cover_pairs()}
        return PosetDiagram.vect(L, self.field, dims, maps)


def random_free_quotient(rng: random.Random, L: FiniteLattice, fld: Field = GF2,
                         max_generators: int = 3, max_relations: int = 2) -> FreeQuotient:
    els = list(L.elements)
    ngen = rng.randint(1, max_generators)
    gens = [rng.choice(els) for _ in range(ngen)]
    rels = []
    for _ in range(rng.randint(0, max_relations)):
        r = rng.choice(els)
        vec = [fld.scalar(rng.randint(-2, 2) if fld.is_rational else rng.randrange(fld.p))
               if L.leq(g, r) else fld.scalar(0) for g in gens]
        rels.append((r, vec))
    return FreeQuotient(L, fld, gens, rels)


def random_vect_diagram(rng: random.Random, L: FiniteLattice, fld: Field = GF2,
                        max_generators: int = 3, max_relations: int = 2) -> PosetDiagram:
    return random_free_quotient(rng, L, fld, max_generators, max_relations).diagram()


def random_chain_diagram(rng: random.Random, L: FiniteLattice, fld: Field = GF2,
                         max_generators: int = 2) -> PosetDiagram:
    """Two-term complexes ``free → quotient`` with a natural differential.

    The differential sends each degree-1 generator at ``p`` to a random
    vector of the degree-0 diagram at ``p``, which extends uniquely to a
    natural map out of the free diagram.
    """
    B = random_free_quotient(rng, L, fld, max_generators, 1)
    els = list(L.elements)
    top_gens = [rng.choice(els) for _ in range(rng.randint(0, max_generators))]
    A = FreeQuotient(L, fld, top_gens, [])
    images = []
    for p in top_gens:
        coeffs = [rng.randrange(fld.p) if not fld.is_rational else rng.randint(-2, 2)
                  for _ in range(B.free_dim(p))]
        images.append(B.element(p, coeffs))
    values = {}
    for x in L.elements:
        act = A._active[x]
        d = fld.zeros(B.dim(x), len(act))
        for i, j in enumerate(act):
            d[:, i:i + 1] = fld.matmul(B.map(top_gens[j], x), images[j])
        values[x] = ChainComplex(fld, {1: len(act), 0: B.dim(x)}, {1: d})
    maps = {}
    for u, w in L.cover_pairs():
        maps[(u, w)] = ChainMap(values[u], values[w], {1: A.map(u, w), 0: B.map(u, w)})
    return PosetDiagram.chain(L, fld, values, maps)


def random_ordered_diagram(rng: random.Random, L: FiniteLattice, max_generators: int = 4,
                           denominator: int = 4) -> PosetDiagram:
    """Monotone ``[0, ∞]``-valued diagram: max of random values at generators below."""
    els = list(L.elements)
    gens = [(rng.choice(els), Fraction(rng.randint(1, 8 * denominator), denominator))
            for _ in range(rng.randint(1, max_generators))]

    def value(x):
        return max((v for p, v in gens if L.leq(p, x)), default=Fraction(0))

    return PosetDiagram.ordered(L, value)


def pullback_along_projection(G: PosetDiagram, heights: list[int], kept_axes: list[int]) -> PosetDiagram:
    """``F(x) = G(x restricted to kept_axes)`` on the bigger grid.

    Every map along an axis outside ``kept_axes`` is an identity.
    """
    L = GridLattice(heights)

    def proj(x):
        return tuple(x[i] for i in kept_axes)

    dims = {x: G.dim(proj(x)) for x in L.elements}
    maps = {(u, w): G.map(proj(u), proj(w)) for u, w in L.cover_pairs()}
    return PosetDiagram.vect(L, G.field, dims, maps)


def random_grid(rng: random.Random, max_axes: int = 3, max_height: int = 3) -> GridLattice:
    return GridLattice([rng.randint(2, max_height) for _ in range(rng.randint(1, max_axes))])


def random_small_lattice(rng: random.Random) -> FiniteLattice:
    """A grid up to 3×3×3, a power set up to 4 vertices, or a down-set lattice."""
    kind = rng.random()
    if kind < 0.5:
        return random_grid(rng)
    if kind < 0.8:
        return PowerSetLattice(list("abcd"[:rng.randint(1, 4)]))
    return random_downset_lattice(rng, rng.randint(2, 4))


def random_downset_lattice(rng: random.Random, points: int):
    names = [f"p{i}" for i in range(points)]
    rels = [(a, b) for a, b in itertools.combinations(names, 2) if rng.random() < 0.35]
    return downset_lattice(names, rels)
