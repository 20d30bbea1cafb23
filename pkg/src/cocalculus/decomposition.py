"""Join-decompositions, join-dimension, pairwise covers and cubes.

In a finite distributive lattice every element ``v`` is the join of the
maximal join-irreducibles below it, and this is its unique reduced
decomposition into join-irreducibles. Its size is the join-dimension.
Grids and power sets get closed-form fast paths; explicit lattices use the
general definitions.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .lattice import (FiniteLattice, GridLattice, LatticeError, PowerSetLattice,
                      is_distributive, require_distributive)


@dataclass(frozen=True)
class JoinDecomposition:
    target: object
    parts: tuple

    def join(self, L: FiniteLattice):
        return L.join_all(self.parts)

    def is_valid(self, L: FiniteLattice) -> bool:
        return len(set(self.parts)) == len(self.parts) and self.join(L) == self.target

    def is_reduced(self, L: FiniteLattice) -> bool:
        if not self.is_valid(L):
            return False
        for i in range(len(self.parts)):
            rest = self.parts[:i] + self.parts[i + 1:]
            if L.join_all(rest) == self.target:
                return False
        return True

    def is_indecomposable(self, L: FiniteLattice) -> bool:
        return all(is_join_irreducible(L, p) for p in self.parts)


@dataclass(frozen=True)
class PairwiseCover:
    target: object
    parts: tuple

    def __len__(self):
        return len(self.parts)

    def is_valid(self, L: FiniteLattice) -> bool:
        if not all(L.leq(p, self.target) for p in self.parts):
            return False
        if len(self.parts) == 1:
            return True
        return all(L.join(a, b) == self.target
                   for a, b in itertools.combinations(self.parts, 2))

    def is_reduced(self, L: FiniteLattice) -> bool:
        return self.is_valid(L) and all(p != self.target for p in self.parts)

    def format(self, L: FiniteLattice) -> str:
        inner = ", ".join(L.format_element(p) for p in self.parts)
        return f"{{{inner}}} of {L.format_element(self.target)}"


@dataclass
class CubeSpec:
    """A cube ``S ↦ vertices[S]`` indexed by subsets of ``{0..k}``."""

    apex: object
    size: int
    vertices: dict = field(default_factory=dict)
    cover: PairwiseCover | None = None

    def vertex(self, subset) -> object:
        return self.vertices[frozenset(subset)]

    @property
    def full(self) -> frozenset:
        return frozenset(range(self.size))

    def punctured(self) -> list[frozenset]:
        return [s for s in self.vertices if s != self.full]

    def is_monotone(self, L: FiniteLattice) -> bool:
        for s, x in self.vertices.items():
            for i in self.full - s:
                if not L.leq(x, self.vertices[s | {i}]):
                    return False
        return True


# join-irreducibles and dimension -------------------------------------------------

def is_join_irreducible(L: FiniteLattice, v) -> bool:
    """Non-least element with exactly one lower cover.

    In a finite lattice this is the same as not being a join of two strictly
    smaller elements.
    """
    if v == L.bottom:
        return False
    if isinstance(L, GridLattice):
        return sum(1 for c in v if c) == 1
    if isinstance(L, PowerSetLattice):
        return len(v) == 1
    return len(L.lower_covers(v)) == 1


def join_irreducibles(L: FiniteLattice) -> list:
    cache = L.__dict__.setdefault("_ji_cache", None)
    if cache is None:
        cache = [x for x in L.elements if is_join_irreducible(L, x)]
        L.__dict__["_ji_cache"] = cache
    return cache


def indecomposable_decomposition(L: FiniteLattice, v) -> JoinDecomposition:
    """The unique reduced decomposition of ``v`` into join-irreducibles."""
    require_distributive(L)
    if isinstance(L, GridLattice):
        parts = tuple(tuple(c if j == i else 0 for j in range(L.arity))
                      for i, c in enumerate(v) if c)
    elif isinstance(L, PowerSetLattice):
        parts = tuple(frozenset([x]) for x in L.sorted_vertices(v))
    else:
        below = [p for p in join_irreducibles(L) if L.leq(p, v)]
        parts = tuple(p for p in below if not any(L.less(p, q) for q in below))
    return JoinDecomposition(v, parts)


def jdim(L: FiniteLattice, v) -> int:
    """Join-dimension: 0 for the least element, else the size of the
    indecomposable reduced decomposition.

    On a non-distributive lattice the indecomposable decomposition need not
    be reduced, so there the value is the largest size of a reduced
    decomposition, computed by search.
    """
    if isinstance(L, GridLattice):
        return sum(1 for c in v if c)
    if isinstance(L, PowerSetLattice):
        return len(v)
    cache = L.__dict__.setdefault("_jdim_cache", {})
    if v not in cache:
        if is_distributive(L)[0]:
            cache[v] = len(indecomposable_decomposition(L, v).parts)
        else:
            cache[v] = jdim_bruteforce(L, v)
    return cache[v]


def jdim_bruteforce(L: FiniteLattice, v) -> int:
    """Largest size of a reduced join-decomposition of ``v``.

    Sizes of reduced decompositions form a down-closed range (merging two
    parts of a reduced decomposition keeps it reduced), so the search stops at
    the first size with no example.
    """
    if v == L.bottom:
        return 0
    cands = [u for u in L.below(v) if u != L.bottom]
    best = 1
    size = 2
    while size <= len(cands):
        found = False
        for combo in itertools.combinations(cands, size):
            d = JoinDecomposition(v, combo)
            if d.is_reduced(L):
                found = True
                break
        if not found:
            break
        best = size
        size += 1
    return best


def max_jdim(L: FiniteLattice) -> int:
    return max(jdim(L, x) for x in L.elements)


def order_key(L: FiniteLattice, x):
    return (jdim(L, x), L.key(x))


def sort_elements(L: FiniteLattice, xs) -> list:
    return sorted(xs, key=lambda x: order_key(L, x))


def elements_below_with_jdim_at_most(L: FiniteLattice, x, k: int) -> list:
    """``{v ≤ x : jdim(v) ≤ k}`` sorted by ``(jdim, key)``."""
    if isinstance(L, GridLattice):
        nz = [i for i, c in enumerate(x) if c]
        out = []
        for r in range(min(k, len(nz)) + 1):
            for axes in itertools.combinations(nz, r):
                ranges = [range(1, x[i] + 1) for i in axes]
                for vals in itertools.product(*ranges):
                    v = [0] * L.arity
                    for i, c in zip(axes, vals):
                        v[i] = c
                    out.append(tuple(v))
    elif isinstance(L, PowerSetLattice):
        verts = L.sorted_vertices(x)
        out = [frozenset(c) for r in range(min(k, len(verts)) + 1)
               for c in itertools.combinations(verts, r)]
    else:
        out = [v for v in L.below(x) if jdim(L, v) <= k]
    return sort_elements(L, out)


# covers and cubes ----------------------------------------------------------------

def cover_from_decomposition(L: FiniteLattice, d: JoinDecomposition) -> PairwiseCover:
    """``x^i`` is the join of all parts other than ``p^i``.

    A single part gives the one-element cover ``{⊥}`` (the empty join).
    """
    if not d.parts:
        raise LatticeError("decomposition must have at least one part")
    parts = tuple(L.join_all(d.parts[:i] + d.parts[i + 1:]) for i in range(len(d.parts)))
    return PairwiseCover(d.target, parts)


def decomposition_from_cover(L: FiniteLattice, c: PairwiseCover) -> JoinDecomposition:
    """``q^i`` is the meet of all cover parts other than ``x^i``."""
    if len(c.parts) < 2:
        raise LatticeError("cover must have at least two parts")
    parts = tuple(L.meet_all(c.parts[:i] + c.parts[i + 1:]) for i in range(len(c.parts)))
    return JoinDecomposition(c.target, parts)


def build_cube(L: FiniteLattice, c: PairwiseCover) -> CubeSpec:
    """Cube with ``X(full) = v`` and ``X(S) = ∧_{i ∉ S} x^i`` otherwise."""
    m = len(c.parts)
    full = frozenset(range(m))
    verts = {}
    for r in range(m + 1):
        for s in itertools.combinations(range(m), r):
            s = frozenset(s)
            if s == full:
                verts[s] = c.target
            else:
                verts[s] = L.meet_all(c.parts[i] for i in range(m) if i not in s)
    return CubeSpec(c.target, m, verts, c)


def is_strongly_bicartesian(L: FiniteLattice, cube: CubeSpec) -> bool:
    """Every 2-face is both a join square and a meet square."""
    m = cube.size
    for s in cube.vertices:
        rest = [i for i in range(m) if i not in s]
        for i, j in itertools.combinations(rest, 2):
            a = cube.vertices[s | {i}]
            b = cube.vertices[s | {j}]
            if L.join(a, b) != cube.vertices[s | {i, j}]:
                return False
            if L.meet(a, b) != cube.vertices[s]:
                return False
    return True


def cover_of_cube(cube: CubeSpec) -> PairwiseCover:
    full = cube.full
    return PairwiseCover(cube.apex, tuple(cube.vertices[full - {i}] for i in range(cube.size)))


def _grid_covers(L: GridLattice, v, size: int) -> Iterator[tuple]:
    nz = [i for i, c in enumerate(v) if c]
    for assign in itertools.product(range(-1, size), repeat=len(nz)):
        if any(p not in assign for p in range(size)):
            continue
        owned = [[nz[t] for t, a in enumerate(assign) if a == p] for p in range(size)]
        choices = []
        for axes in owned:
            opts = []
            for vals in itertools.product(*[range(v[i]) for i in axes]):
                x = list(v)
                for i, c in zip(axes, vals):
                    x[i] = c
                opts.append(tuple(x))
            choices.append(opts)
        for parts in itertools.product(*choices):
            yield parts


def _powerset_covers(L: PowerSetLattice, v, size: int) -> Iterator[tuple]:
    verts = L.sorted_vertices(v)
    for assign in itertools.product(range(-1, size), repeat=len(verts)):
        if any(p not in assign for p in range(size)):
            continue
        yield tuple(v - {verts[t] for t, a in enumerate(assign) if a == p} for p in range(size))


def _generic_covers(L: FiniteLattice, v, size: int, reduced: bool) -> Iterator[tuple]:
    cands = sort_elements(L, [u for u in L.below(v) if not (reduced and u == v)])

    def extend(chosen, start):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for t in range(start, len(cands)):
            u = cands[t]
            if all(L.join(u, w) == v for w in chosen):
                yield from extend(chosen + [u], t + 1)

    yield from extend([], 0)


def enumerate_reduced_covers(L: FiniteLattice, v, size: int) -> list[PairwiseCover]:
    """All reduced pairwise covers of ``v`` with ``size`` distinct parts.

    Parts within a cover are sorted by ``(jdim, key)`` and covers are listed
    lexicographically; covers equal as sets appear once.
    """
    if size < 1:
        return []
    if isinstance(L, (GridLattice, PowerSetLattice)):
        # these compare by value, so repeated checks on one shape share the work
        return list(_cached_reduced_covers(L, v, size))
    return _reduced_covers(L, v, size)


def _reduced_covers(L: FiniteLattice, v, size: int) -> list[PairwiseCover]:
    if size == 1:
        raw = ((u,) for u in L.below(v) if u != v)
    elif isinstance(L, GridLattice):
        raw = _grid_covers(L, v, size)
    elif isinstance(L, PowerSetLattice):
        raw = _powerset_covers(L, v, size)
    else:
        raw = _generic_covers(L, v, size, reduced=True)
    return _normalise(L, v, raw)


@functools.lru_cache(maxsize=4096)
def _cached_reduced_covers(L: FiniteLattice, v, size: int) -> tuple:
    return tuple(_reduced_covers(L, v, size))


def enumerate_pairwise_covers(L: FiniteLattice, v, size: int) -> list[PairwiseCover]:
    """All pairwise covers with ``size`` distinct parts, reduced or not."""
    if size < 1:
        return []
    if size == 1:
        return _normalise(L, v, ((u,) for u in L.below(v)))
    return _normalise(L, v, _generic_covers(L, v, size, reduced=False))


def _normalise(L, v, raw) -> list[PairwiseCover]:
    seen = {}
    for parts in raw:
        parts = tuple(sort_elements(L, parts))
        if len(set(parts)) != len(parts):
            continue
        key = tuple(order_key(L, p) for p in parts)
        seen.setdefault(key, parts)
    return [PairwiseCover(v, seen[k]) for k in sorted(seen)]


def all_cubes(L: FiniteLattice, size: int) -> Iterator[CubeSpec]:
    """Every monotone cube of the given size, by exhaustive search.

    Only intended for tiny lattices.
    """
    subsets = [frozenset(s) for r in range(size + 1)
               for s in itertools.combinations(range(size), r)]
    els = L.elements

    def extend(i, verts):
        if i == len(subsets):
            yield CubeSpec(verts[frozenset(range(size))], size, dict(verts))
            return
        s = subsets[i]
        for x in els:
            if all(L.leq(verts[s - {j}], x) for j in s):
                verts[s] = x
                yield from extend(i + 1, verts)
                del verts[s]

    yield from extend(0, {})
