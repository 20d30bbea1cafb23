"""Codegree-k approximations and the Taylor telescope.

``T_k F(x)`` is the colimit of ``F`` over ``{v ≤ x : jdim(v) ≤ k}``: a plain
colimit for vector spaces, a supremum for ordered values and the bar
construction for chain complexes. The structure maps of ``T_k F`` are induced
by the inclusions of these index sets, ``eps_k : T_k F → F`` by the maps
``F(v ≤ x)`` and ``r_k : T_k F → T_{k+1} F`` by enlarging ``k``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .decomposition import elements_below_with_jdim_at_most, max_jdim
from .diagram import CodegreeResult, PosetDiagram, TargetKind, is_codegree
from .homalg.colim import BarComplex, VectColimit, colim_vect
from .lattice import (FiniteLattice, GridLattice, NonDistributiveError, PowerSetLattice,
                      is_distributive)


@dataclass
class TaylorLayer:
    k: int
    source: PosetDiagram
    approx: PosetDiagram
    eps: dict                       # x -> map approx(x) -> F(x); None for ordered values
    index: dict                     # x -> list of index objects of the colimit at x
    colimits: dict = field(default_factory=dict)   # x -> VectColimit or BarComplex
    r: dict | None = None           # x -> map approx(x) -> next layer's approx(x)
    fast: bool = False

    def eps_is_equivalence(self, x) -> bool:
        F = self.source
        if F.target == TargetKind.EXTENDED_REAL:
            return F.value_lattice.equal(self.approx.value(x), F.value(x))
        if F.target == TargetKind.VECT:
            m = self.eps[x]
            return m.shape[0] == m.shape[1] and F.field.rank(m) == m.shape[0]
        return self.eps[x].is_quasi_iso()

    def corner(self, x, s):
        """Index object ``s`` at ``x`` as a lattice element."""
        if self.fast:
            return _corner(self.approx.lattice, x, s)
        return s


def _check_lattice(L: FiniteLattice, allow_nondistributive: bool):
    if not is_distributive(L)[0] and not allow_nondistributive:
        raise NonDistributiveError("Taylor approximations need a distributive lattice")


def _corner(L: FiniteLattice, x, s):
    """``λ(x, S)``: keep the coordinates of ``x`` indexed by ``S``, zero the rest."""
    if isinstance(L, GridLattice):
        return tuple(c if i in s else 0 for i, c in enumerate(x))
    return frozenset(s)


def _support(L: FiniteLattice, x) -> list:
    if isinstance(L, GridLattice):
        return [i for i, c in enumerate(x) if c]
    return L.sorted_vertices(x)


def taylor(F: PosetDiagram, k: int, allow_nondistributive: bool = False) -> TaylorLayer:
    """``T_k F`` over the full index sets ``{v ≤ x : jdim(v) ≤ k}``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    L = F.lattice
    _check_lattice(L, allow_nondistributive)
    index = {x: elements_below_with_jdim_at_most(L, x, k) for x in L.elements}
    corner = (lambda x, q: q)
    return _build(F, k, index, corner, lambda x, y, q: q, fast=False)


def taylor_grid_fast(F: PosetDiagram, k: int) -> TaylorLayer:
    """``T_k F`` on a grid or power set, indexed by the corners ``λ(x, S)``
    with ``|S| ≤ k``, ``S`` a set of axes where ``x`` is nonzero."""
    L = F.lattice
    if not isinstance(L, (GridLattice, PowerSetLattice)):
        raise TypeError("fast Taylor approximation needs a grid or power set")
    if k < 0:
        raise ValueError("k must be nonnegative")
    index = {}
    for x in L.elements:
        supp = _support(L, x)
        index[x] = [frozenset(s) for r in range(min(k, len(supp)) + 1)
                    for s in itertools.combinations(supp, r)]

    def corner(x, s):
        return _corner(L, x, s)

    return _build(F, k, index, corner, lambda x, y, s: s, fast=True)


def _pairs_if_downset(L: FiniteLattice, objs) -> list | None:
    """Covering pairs of ``objs`` read off the lattice when ``objs`` is
    down-closed; ``None`` (compute them from scratch) otherwise."""
    members = set(objs)
    pairs = []
    for w in objs:
        for c in L.lower_covers(w):
            if c not in members:
                return None
            pairs.append((c, w))
    return pairs


def _build(F: PosetDiagram, k: int, index: dict, corner: Callable, transport: Callable,
           fast: bool) -> TaylorLayer:
    """Assemble ``T_k F`` from index sets.

    ``corner(x, q)`` is the lattice element of index object ``q`` at ``x``;
    ``transport(x, y, q)`` is the index object at ``y ≥ x`` receiving ``q``.
    """
    L = F.lattice
    if F.target == TargetKind.EXTENDED_REAL:
        vl = F.value_lattice
        if F.contravariant:
            raise ValueError("use dual_degree for contravariant ordered diagrams")
        values = {x: vl.sup(F.value(corner(x, q)) for q in index[x]) for x in L.elements}
        approx = PosetDiagram.ordered(L, values, value_lattice=vl)
        return TaylorLayer(k, F, approx, {x: None for x in L.elements}, index, fast=fast)

    fld = F.field
    if fast:
        def leq(a, b):
            return a <= b
    else:
        leq = L.leq

    if F.target == TargetKind.VECT:
        cols: dict = {}
        for x in L.elements:
            objs = index[x]
            pairs = None if fast else _pairs_if_downset(L, objs)
            cols[x] = colim_vect(fld, objs, lambda q, x=x: F.dim(corner(x, q)),
                                 lambda a, b, x=x: F.map(corner(x, a), corner(x, b)), leq,
                                 pairs)
        maps = {}
        for u, w in L.cover_pairs():
            cw = cols[w]
            maps[(u, w)] = cols[u].induced(
                lambda q, u=u, w=w: fld.matmul(cw.leg(transport(u, w, q)),
                                               F.map(corner(u, q), corner(w, transport(u, w, q)))),
                cw.dim)
        dims = {x: cols[x].dim for x in L.elements}
        approx = PosetDiagram.vect(L, fld, dims, maps)
        eps = {x: cols[x].induced(lambda q, x=x: F.map(corner(x, q), x), F.dim(x))
               for x in L.elements}
        return TaylorLayer(k, F, approx, eps, index, cols, fast=fast)

    bars: dict = {}
    for x in L.elements:
        bars[x] = BarComplex(fld, index[x], leq, lambda q, x=x: F.value(corner(x, q)),
                             lambda a, b, x=x: F.map(corner(x, a), corner(x, b)))
    maps = {}
    for u, w in L.cover_pairs():
        if fast:
            maps[(u, w)] = bars[u].pushforward(
                bars[w], lambda q, u=u, w=w: transport(u, w, q),
                lambda q, u=u, w=w: F.map(corner(u, q), corner(w, transport(u, w, q))))
        else:
            maps[(u, w)] = bars[u].inclusion_into(bars[w])
    complexes = {x: bars[x].complex for x in L.elements}
    approx = PosetDiagram.chain(L, fld, complexes, maps)
    eps = {x: bars[x].augmentation(F.value(x), lambda q, x=x: F.map(corner(x, q), x))
           for x in L.elements}
    return TaylorLayer(k, F, approx, eps, index, bars, fast=fast)


def layer_map(lower: TaylorLayer, upper: TaylorLayer) -> dict:
    """``r : T_k F → T_m F`` for ``k ≤ m`` (same construction kind)."""
    F = lower.source
    L = F.lattice
    if F.target == TargetKind.EXTENDED_REAL:
        return {x: None for x in L.elements}
    out = {}
    for x in L.elements:
        if F.target == TargetKind.VECT:
            cu: VectColimit = upper.colimits[x]
            out[x] = lower.colimits[x].induced(lambda q: cu.leg(q), cu.dim)
        else:
            out[x] = lower.colimits[x].inclusion_into(upper.colimits[x])
    return out


def telescope(F: PosetDiagram, upto: int, fast: bool = False,
              allow_nondistributive: bool = False) -> list[TaylorLayer]:
    """Layers ``T_0 F, ..., T_upto F`` with ``r`` maps filled in."""
    build = (lambda k: taylor_grid_fast(F, k)) if fast else \
        (lambda k: taylor(F, k, allow_nondistributive))
    layers = [build(k) for k in range(upto + 1)]
    for lo, hi in zip(layers, layers[1:]):
        lo.r = layer_map(lo, hi)
    return layers


def check_telescope_triangles(layers: list[TaylorLayer]) -> list[str]:
    """Every ``eps_{k+1} ∘ r_k`` against ``eps_k``; returns the failures."""
    bad = []
    for lo, hi in zip(layers, layers[1:]):
        F = lo.source
        if F.target == TargetKind.EXTENDED_REAL:
            vl = F.value_lattice
            for x in F.lattice.elements:
                if not vl.leq(lo.approx.value(x), hi.approx.value(x)):
                    bad.append(f"k={lo.k} at {F.lattice.format_element(x)}: values decrease")
            continue
        for x in F.lattice.elements:
            comp = F.compose(hi.eps[x], lo.r[x])
            same = F.field.equal(comp, lo.eps[x]) if F.target == TargetKind.VECT \
                else comp.equals(lo.eps[x])
            if not same:
                bad.append(f"k={lo.k} at {F.lattice.format_element(x)}")
    return bad


def check_naturality(layer: TaylorLayer) -> list[str]:
    """``eps`` squares over every covering relation."""
    F = layer.source
    T = layer.approx
    bad = []
    if F.target == TargetKind.EXTENDED_REAL:
        return bad
    for u, w in F.lattice.cover_pairs():
        lhs = F.compose(F.edge(u, w), layer.eps[u])
        rhs = F.compose(layer.eps[w], T.edge(u, w))
        same = F.field.equal(lhs, rhs) if F.target == TargetKind.VECT else lhs.equals(rhs)
        if not same:
            bad.append(f"{F.lattice.format_element(u)} -> {F.lattice.format_element(w)}")
    return bad


# theorem checks ------------------------------------------------------------------

@dataclass
class TheoremReport:
    name: str
    holds: bool
    status: str
    detail: str = ""
    witness: object = None

    def __bool__(self):
        return self.holds


def verify_theorem_A(F: PosetDiagram, k: int, shape: str = "lower_set",
                     allow_nondistributive: bool = False) -> TheoremReport:
    """``T_k F`` is codegree ``k``."""
    layer = taylor(F, k, allow_nondistributive)
    res: CodegreeResult = is_codegree(layer.approx, k, shape=shape,
                                      allow_nondistributive=allow_nondistributive)
    if res.holds:
        return TheoremReport("A", True, "holds", f"{res.checked} covers checked")
    return TheoremReport("A", False, "fails", res.detail, res.witness)


def verify_theorem_B(F: PosetDiagram, n: int) -> TheoremReport:
    """If ``F`` is codegree ``n`` then every ``eps_n`` component is an equivalence."""
    pre = is_codegree(F, n)
    if not pre.holds:
        return TheoremReport("B", False, "precondition unverified",
                             f"input is not codegree {n}: {pre.detail}", pre.witness)
    layer = taylor(F, n)
    for x in F.lattice.elements:
        if not layer.eps_is_equivalence(x):
            return TheoremReport("B", False, "fails",
                                 f"eps at {F.lattice.format_element(x)} is not an equivalence", x)
    return TheoremReport("B", True, "holds")


def converges(F: PosetDiagram) -> bool:
    """``T_k F ≃ F`` through ``eps`` for ``k`` the largest join-dimension."""
    layer = taylor(F, max_jdim(F.lattice))
    return all(layer.eps_is_equivalence(x) for x in F.lattice.elements)


def stabilization_index(F: PosetDiagram) -> int:
    """Smallest ``k`` whose ``eps_k`` is an equivalence everywhere."""
    for k in range(max_jdim(F.lattice) + 1):
        layer = taylor(F, k)
        if all(layer.eps_is_equivalence(x) for x in F.lattice.elements):
            return k
    raise AssertionError("Taylor telescope failed to converge on a finite lattice")


# maps between approximations (vector spaces) ------------------------------------

def taylor_of_map(zeta: dict, TG: TaylorLayer, TF: TaylorLayer) -> dict:
    """``T_k ζ : T_k G → T_k F`` for a natural transformation ``ζ : G → F``."""
    F = TF.source
    out = {}
    for x in F.lattice.elements:
        cf: VectColimit = TF.colimits[x]
        out[x] = TG.colimits[x].induced(lambda q, x=x: F.field.matmul(cf.leg(q), zeta[TG.corner(x, q)]),
                                        cf.dim)
    return out


def universal_factorization(zeta: dict, G: PosetDiagram, F: PosetDiagram, n: int):
    """For ``G`` codegree ``n``, the map ``υ = T_n ζ ∘ eps_G^{-1} : G → T_n F``.

    Returns ``(υ, T_n F)``, or ``None`` when some component of ``eps_G`` is not invertible.
    """
    TG = taylor(G, n)
    TF = taylor(F, n)
    tz = taylor_of_map(zeta, TG, TF)
    out = {}
    for x in G.lattice.elements:
        e = TG.eps[x]
        if e.shape[0] != e.shape[1] or G.field.rank(e) != e.shape[0]:
            return None
        out[x] = G.field.matmul(tz[x], G.field.inv(e))
    return out, TF


def check_universality(zeta: dict, G: PosetDiagram, F: PosetDiagram, n: int) -> bool:
    """``eps_F ∘ υ = ζ`` componentwise, and ``υ`` is natural."""
    res = universal_factorization(zeta, G, F, n)
    if res is None:
        return False
    ups, TF = res
    fld = F.field
    for x in F.lattice.elements:
        if not fld.equal(fld.matmul(TF.eps[x], ups[x]), zeta[x]):
            return False
    for u, w in F.lattice.cover_pairs():
        if not fld.equal(fld.matmul(TF.approx.edge(u, w), ups[u]), fld.matmul(ups[w], G.edge(u, w))):
            return False
    return True


# dual approximation for ordered values -------------------------------------------

def dual_degree(F: PosetDiagram, n: int) -> PosetDiagram:
    """``T^n F(x)``: the infimum of ``F`` over ``{v ≤ x : jdim(v) ≤ n}``."""
    if F.target != TargetKind.EXTENDED_REAL:
        raise ValueError("dual approximation is implemented for ordered values only")
    L = F.lattice
    vl = F.value_lattice
    values = {x: vl.inf(F.value(v) for v in elements_below_with_jdim_at_most(L, x, n))
              for x in L.elements}
    return PosetDiagram.ordered(L, values, value_lattice=vl, contravariant=F.contravariant)
