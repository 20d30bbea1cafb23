"""Sublevel complexes of monotone functions on vertex subsets."""
from __future__ import annotations

import random
from fractions import Fraction

from ..diagram import PosetDiagram
from ..lattice import PowerSetLattice
from .complex import SimplicialComplex


def check_filtration_function(f: PosetDiagram) -> list[str]:
    """Problems preventing ``f`` from being a filtration function."""
    if not isinstance(f.lattice, PowerSetLattice):
        return ["filtration functions live on a power set"]
    out = f.validate()
    bottom = f.lattice.bottom
    if not f.value_lattice.equal(f.value(bottom), f.value_lattice.coerce(0)):
        out.append("value on the empty set is not 0")
    return out


def filtration_complex(f: PosetDiagram, t, squared: bool = False) -> SimplicialComplex:
    """``{σ : f(σ) ≤ t}``; with ``squared`` the threshold is compared as ``t²``,
    matching the squared Čech and Rips functions."""
    L = f.lattice
    vl = f.value_lattice
    if squared and t != float("inf"):
        t = (Fraction(t) if vl.exact else float(t)) ** 2
    t = vl.coerce(t)
    # values are monotone, so only extend sets already accepted
    faces = []
    frontier = [frozenset()]
    seen = {frozenset()}
    verts = list(L.universe)
    while frontier:
        nxt = []
        for s in frontier:
            grew = False
            for v in verts:
                if v in s:
                    continue
                u = s | {v}
                if u in seen:
                    grew = True
                    continue
                if vl.leq(f.value(u), t):
                    seen.add(u)
                    nxt.append(u)
                    grew = True
            if not grew:
                faces.append(s)
        frontier = nxt
    return SimplicialComplex(verts, faces)


def critical_values(f: PosetDiagram) -> list:
    vl = f.value_lattice
    vals = []
    for x in f.lattice.elements:
        v = f.value(x)
        if not any(vl.equal(v, w) for w in vals):
            vals.append(v)
    return sorted(vals)


def sublevel_complexes(f: PosetDiagram) -> list[tuple]:
    """``(t, X_t)`` for each critical value ``t``; between them nothing changes."""
    return [(t, filtration_complex(f, t)) for t in critical_values(f)]


def random_filtration_function(rng: random.Random, vertices: list, max_generators: int = 5,
                               denominator: int = 4) -> PosetDiagram:
    """Monotone ``f`` with ``f(∅) = 0``: the max of random values over generating sets."""
    L = PowerSetLattice(vertices)
    gens = []
    for _ in range(rng.randint(1, max_generators)):
        s = frozenset(v for v in vertices if rng.random() < 0.5)
        if s:
            gens.append((s, Fraction(rng.randint(1, 4 * denominator), denominator)))

    def value(u):
        return max((v for s, v in gens if s <= u), default=Fraction(0))

    return PosetDiagram.ordered(L, value)
