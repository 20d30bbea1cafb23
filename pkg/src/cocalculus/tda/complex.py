"""Finite abstract simplicial complexes stored by their maximal faces."""
from __future__ import annotations

import itertools
import json
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from ..diagram import BooleanValues, PosetDiagram, SetValues, is_codegree
from ..homalg.chain import ChainComplex
from ..homalg.field import Field, GF2
from ..lattice import PowerSetLattice


class ComplexError(ValueError):
    pass


def _maximal(faces: Iterable[frozenset]) -> list[frozenset]:
    faces = sorted(set(faces), key=len, reverse=True)
    out: list[frozenset] = []
    for f in faces:
        if not any(f <= g for g in out):
            out.append(f)
    return out


class SimplicialComplex:
    """A down-closed family of subsets of an ordered vertex universe.

    The empty simplex always belongs to the complex. Only the maximal faces
    are stored; membership is a subset query against them.
    """

    def __init__(self, universe: Sequence[Hashable], faces: Iterable[Iterable[Hashable]] = ()):
        self.universe = tuple(universe)
        if len(set(self.universe)) != len(self.universe):
            raise ComplexError("vertex labels must be distinct")
        self.position = {v: i for i, v in enumerate(self.universe)}
        fs = []
        for f in faces:
            f = frozenset(f)
            unknown = [v for v in f if v not in self.position]
            if unknown:
                raise ComplexError(f"face uses unknown vertex {unknown[0]!r}")
            fs.append(f)
        fs.append(frozenset())
        self.maximal = tuple(sorted(_maximal(fs), key=self.face_key))

    # basics ------------------------------------------------------------------------
    def face_key(self, f) -> tuple:
        return (len(f), sorted(self.position[v] for v in f))

    def sorted_face(self, f) -> tuple:
        return tuple(sorted(f, key=self.position.__getitem__))

    def __contains__(self, face) -> bool:
        f = frozenset(face)
        return any(f <= m for m in self.maximal)

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex) and set(self.maximal) == set(other.maximal))

    def __hash__(self):
        return hash(frozenset(self.maximal))

    def __repr__(self):
        faces = ", ".join("".join(str(v) for v in self.sorted_face(m)) or "∅" for m in self.maximal)
        return f"SimplicialComplex([{faces}])"

    @property
    def dimension(self) -> int:
        return max(len(m) for m in self.maximal) - 1

    @cached_property
    def vertices(self) -> tuple:
        used = set().union(*self.maximal)
        return tuple(v for v in self.universe if v in used)

    def simplices(self, dim: int | None = None) -> list[frozenset]:
        """All simplices (of one dimension if given), sorted, ∅ included for dim -1."""
        out = set()
        sizes = [dim + 1] if dim is not None else None
        for m in self.maximal:
            rng = sizes if sizes is not None else range(len(m) + 1)
            for r in rng:
                if 0 <= r <= len(m):
                    out.update(frozenset(c) for c in itertools.combinations(m, r))
        return sorted(out, key=self.face_key)

    def count_upper_bound(self) -> int:
        return sum(2 ** len(m) for m in self.maximal)

    def as_predicate(self):
        return lambda face: face in self

    # constructors -----------------------------------------------------------------
    @classmethod
    def full_simplex(cls, universe: Sequence[Hashable]) -> "SimplicialComplex":
        return cls(universe, [universe])

    @classmethod
    def boundary(cls, universe: Sequence[Hashable]) -> "SimplicialComplex":
        u = list(universe)
        return cls(u, [c for c in itertools.combinations(u, len(u) - 1)])

    @classmethod
    def standard_simplex(cls, n: int) -> "SimplicialComplex":
        return cls.full_simplex(list(range(n + 1)))

    @classmethod
    def clique_complex(cls, universe: Sequence[Hashable], edges: Iterable) -> "SimplicialComplex":
        """Flag complex: every set of pairwise adjacent vertices is a simplex."""
        u = list(universe)
        adj = {v: set() for v in u}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        faces = []

        # Bron–Kerbosch without pivoting, fine at these sizes
        def expand(r, p, x):
            if not p and not x:
                faces.append(r)
                return
            for v in list(p):
                expand(r | {v}, p & adj[v], x & adj[v])
                p = p - {v}
                x = x | {v}

        expand(frozenset(), set(u), set())
        return cls(u, faces)

    @classmethod
    def from_predicate(cls, universe: Sequence[Hashable], member) -> "SimplicialComplex":
        """Complex of all subsets accepted by a down-closed predicate."""
        u = list(universe)
        faces = [c for r in range(len(u) + 1) for c in itertools.combinations(u, r)
                 if member(frozenset(c))]
        return cls(u, faces)

    # truncations -------------------------------------------------------------------
    def skeleton(self, n: int) -> "SimplicialComplex":
        faces = []
        for m in self.maximal:
            if len(m) <= n + 1:
                faces.append(m)
            else:
                faces.extend(itertools.combinations(m, n + 1))
        return SimplicialComplex(self.universe, faces)

    def is_n_skeletal(self, n: int) -> bool:
        return self.dimension <= n

    def coskeleton(self, n: int) -> "SimplicialComplex":
        """Largest complex with the same ``n``-skeleton."""
        sk = self.skeleton(n)
        return SimplicialComplex.from_predicate(
            self.universe,
            lambda s: all(frozenset(t) in sk for t in itertools.combinations(s, min(len(s), n + 1))))

    def is_n_coskeletal(self, n: int) -> bool:
        """``σ ∈ X`` exactly when every face of ``σ`` with at most ``n + 1``
        vertices is in ``X``, checked over every subset of the universe."""
        u = self.universe
        for r in range(n + 2, len(u) + 1):
            for c in itertools.combinations(u, r):
                s = frozenset(c)
                faces_in = all(frozenset(t) in self for t in itertools.combinations(c, n + 1))
                if faces_in != (s in self):
                    return False
        return True

    # functors on the power set ----------------------------------------------------
    def indicator_diagram(self) -> PosetDiagram:
        """``X`` as a contravariant ``{0, 1}``-valued diagram on ``P(V)``."""
        L = PowerSetLattice(self.universe)
        return PosetDiagram.ordered(L, lambda s: s in self, value_lattice=BooleanValues(),
                                    contravariant=True)

    def span_functor(self) -> PosetDiagram:
        """``U ↦ P(U) ∩ X``, the subcomplex spanned by ``U``, valued in sets of simplices."""
        L = PowerSetLattice(self.universe)
        simplices = self.simplices()
        return PosetDiagram.ordered(L, lambda u: frozenset(s for s in simplices if s <= u),
                                    value_lattice=SetValues())

    # products and mapping complexes -------------------------------------------------
    def product(self, other: "SimplicialComplex") -> "SimplicialComplex":
        """Categorical product: ``U`` is a simplex when both projections are."""
        universe = [(a, b) for a in self.universe for b in other.universe]
        faces = [[(a, b) for a in s for b in t]
                 for s in self.maximal for t in other.maximal if s and t]
        return SimplicialComplex(universe, faces)

    # homology ----------------------------------------------------------------------
    def chain_complex(self, fld: Field = GF2) -> ChainComplex:
        """Simplicial chains (unreduced), simplices ordered by vertex position."""
        by_dim: dict[int, list] = {}
        for s in self.simplices():
            if s:
                by_dim.setdefault(len(s) - 1, []).append(self.sorted_face(s))
        index = {d: {s: i for i, s in enumerate(faces)} for d, faces in by_dim.items()}
        dims = {d: len(f) for d, f in by_dim.items()}
        diffs = {}
        for d, faces in by_dim.items():
            if d == 0:
                continue
            mat = fld.zeros(dims[d - 1], dims[d])
            lower = index[d - 1]
            for j, s in enumerate(faces):
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    mat[lower[face], j] = fld.scalar(-1 if i % 2 else 1)
            diffs[d] = mat
        return ChainComplex(fld, dims, diffs, check=False)

    def nerve(self) -> "SimplicialComplex":
        """Nerve of the cover by maximal faces, with vertices ``0..m-1``.

        Every nonempty intersection of simplices is a simplex, so the nerve
        has the same homology. Its maximal faces are the maximal families
        ``{maximal faces containing v}`` over vertices ``v``.
        """
        faces = [m for m in self.maximal if m]
        families = [frozenset(i for i, m in enumerate(faces) if v in m) for v in self.vertices]
        return SimplicialComplex(list(range(len(faces))), families)

    def homology(self, fld: Field = GF2, direct_limit: int = 4000, method: str = "auto") -> dict[int, int]:
        """Homology dimensions by degree.

        ``method="direct"`` uses the boundary matrices of this complex,
        ``"nerve"`` repeatedly replaces the complex by the nerve of its
        maximal faces while that shrinks it, ``"auto"`` picks direct when the
        simplex count is at most ``direct_limit``.
        """
        X = self
        if method == "direct" or (method == "auto" and X.count_upper_bound() <= direct_limit):
            return X.chain_complex(fld).homology()
        if method not in ("auto", "nerve"):
            raise ValueError(f"unknown method {method!r}")
        while True:
            if not X.vertices:
                return {}
            N = X.nerve()
            if N.count_upper_bound() >= X.count_upper_bound():
                if X.count_upper_bound() > 50 * direct_limit:
                    raise ComplexError("complex too large for homology computation")
                return X.chain_complex(fld).homology()
            X = N
            if X.count_upper_bound() <= direct_limit:
                return X.chain_complex(fld).homology()

    # serialisation -------------------------------------------------------------------
    def to_json(self) -> dict:
        return {"vertices": list(self.universe),
                "maximal": [list(self.sorted_face(m)) for m in self.maximal if m]}

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialComplex":
        return cls(data["vertices"], data.get("maximal", []))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SimplicialComplex":
        return cls.from_json(json.loads(text))


# coskeletal checks by three routes -------------------------------------------------

def is_n_coskeletal(X: SimplicialComplex, n: int) -> bool:
    return X.is_n_coskeletal(n)


def coskeletal_by_dual_degree(X: SimplicialComplex, n: int) -> bool:
    """``T^{n+1} X = X`` for the contravariant indicator diagram."""
    from ..taylor import dual_degree
    D = X.indicator_diagram()
    T = dual_degree(D, n + 1)
    return all(T.value(s) == D.value(s) for s in D.lattice.elements)


def coskeletal_by_covers(X: SimplicialComplex, n: int) -> bool:
    """``X(σ) = ∧ X(τ_i)`` for every reduced pairwise cover of size ``n + 2``."""
    return is_codegree(X.indicator_diagram(), n + 1).holds


def skeletal_by_span_functor(X: SimplicialComplex, n: int) -> bool:
    """``X`` is ``n``-skeletal iff its span functor is codegree ``n + 1``."""
    return is_codegree(X.span_functor(), n + 1).holds


def hom_complex(X: SimplicialComplex, Y: SimplicialComplex, max_vertices: int = 10**5) -> SimplicialComplex:
    """Mapping complex: vertices are simplicial maps ``X → Y`` and a set of
    maps is a simplex when the union of images of every simplex of ``X`` is
    a simplex of ``Y``.

    Vertices are tuples of images indexed by ``X.vertices``. For each choice
    of a maximal face ``τ_σ`` of ``Y`` per maximal face ``σ`` of ``X``, all
    maps with ``f(σ) ⊆ τ_σ`` form a simplex; these boxes cover the complex,
    so its maximal faces are the maximal boxes.
    """
    maps = simplicial_maps(X, Y, limit=max_vertices)
    xv = list(X.vertices)
    xmax = [m for m in X.maximal if m]
    ymax = [m for m in Y.maximal if m]
    boxes = set()
    for choice in itertools.product(ymax, repeat=len(xmax)):
        allowed = []
        for v in xv:
            a = None
            for s, t in zip(xmax, choice):
                if v in s:
                    a = t if a is None else a & t
            if not a:
                break
            allowed.append(Y.sorted_face(a))
        else:
            boxes.add(frozenset(itertools.product(*allowed)))
    return SimplicialComplex(maps, boxes)


def simplicial_maps(X: SimplicialComplex, Y: SimplicialComplex, limit: int | None = None) -> list[tuple]:
    """All simplicial maps as image tuples over ``X.vertices``.

    Backtracking over vertex assignments, pruning as soon as a partially
    assigned maximal face has an image outside ``Y``. Raises
    :class:`ComplexError` once more than ``limit`` maps are found.
    """
    xv = list(X.vertices)
    xmax = [m for m in X.maximal if m]
    touching = [[m for m in xmax if v in m] for v in xv]
    out = []
    assign: dict = {}

    def extend(i):
        if i == len(xv):
            out.append(tuple(assign[v] for v in xv))
            if limit is not None and len(out) > limit:
                raise ComplexError(f"Hom complex has more than {limit} vertices")
            return
        for y in Y.vertices:
            assign[xv[i]] = y
            if all(frozenset(assign[w] for w in m if w in assign) in Y for m in touching[i]):
                extend(i + 1)
            del assign[xv[i]]

    extend(0)
    return out


def product_complex(X: SimplicialComplex, Y: SimplicialComplex) -> SimplicialComplex:
    return X.product(Y)


def simplicial_homology(X: SimplicialComplex, fld: Field = GF2, **kwargs) -> dict[int, int]:
    return X.homology(fld, **kwargs)
