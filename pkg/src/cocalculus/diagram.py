"""Functors from a finite lattice into ordered values, vector spaces or chain
complexes, with functoriality validation and the codegree decision.

A diagram stores one value per lattice element and one map per covering
relation. Composites along longer relations are computed on demand along a
canonical path and cached.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .decomposition import (PairwiseCover, build_cube, enumerate_pairwise_covers,
                            enumerate_reduced_covers,
                            is_strongly_bicartesian, max_jdim, sort_elements)
from .homalg.chain import ChainComplex, ChainMap
from .homalg.colim import BarComplex
from .homalg.field import Field, field as get_field
from .lattice import (FiniteLattice, NonDistributiveError, is_distributive,
                      lattice_from_descriptor)

FORMAT_TAG = "cocalculus-diagram"


class TargetKind(enum.Enum):
    EXTENDED_REAL = "extended_real"
    VECT = "vect"
    CHAIN = "chain"


class DiagramError(ValueError):
    pass


# ordered value lattices ------------------------------------------------------------

class ExtendedReals:
    """The complete lattice ``[0, ∞]``.

    In exact mode every finite value is a :class:`Fraction` (floats are
    converted exactly) and comparisons are exact. In float mode values are
    floats compared with an absolute tolerance.
    """

    kind = "extended_real"

    def __init__(self, exact: bool = True, tolerance: float = 1e-9):
        if tolerance <= 0:
            raise ValueError("tolerance must be positive")
        self.exact = exact
        self.tolerance = tolerance

    bottom = 0

    @property
    def top(self):
        return math.inf

    def coerce(self, x):
        if isinstance(x, str):
            t = x.strip().lower()
            if t in ("inf", "+inf", "infinity", "∞"):
                return math.inf
            x = Fraction(t) if self.exact else float(t)
        if isinstance(x, float) and math.isinf(x):
            if x < 0:
                raise ValueError("values must be nonnegative")
            return math.inf
        x = Fraction(x) if self.exact else float(x)
        if x < 0:
            raise ValueError("values must be nonnegative")
        return x

    def leq(self, a, b) -> bool:
        if self.exact or math.isinf(a) or math.isinf(b):
            return a <= b
        return a <= b + self.tolerance

    def equal(self, a, b) -> bool:
        if self.exact or math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= self.tolerance

    def sup(self, xs):
        return max(xs, default=self.coerce(0))

    def inf(self, xs):
        return min(xs, default=math.inf)

    def to_json(self, x):
        if math.isinf(x):
            return "inf"
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else str(x)
        return x

    def from_json(self, data):
        return self.coerce(data)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "exact": self.exact, "tolerance": self.tolerance}


class BooleanValues:
    """The two-element lattice ``False < True``."""

    kind = "boolean"
    bottom = False
    top = True

    def coerce(self, x):
        return bool(x)

    def leq(self, a, b) -> bool:
        return (not a) or b

    def equal(self, a, b) -> bool:
        return bool(a) == bool(b)

    def sup(self, xs):
        return any(xs)

    def inf(self, xs):
        return all(xs)

    def to_json(self, x):
        return bool(x)

    def from_json(self, data):
        return bool(data)

    def descriptor(self) -> dict:
        return {"kind": self.kind}


class SetValues:
    """Finite sets ordered by inclusion, used for families of simplices."""

    kind = "sets"
    bottom = frozenset()

    def coerce(self, x):
        return frozenset(x)

    def leq(self, a, b) -> bool:
        return a <= b

    def equal(self, a, b) -> bool:
        return a == b

    def sup(self, xs):
        out = frozenset()
        for x in xs:
            out |= x
        return out

    def inf(self, xs):
        xs = list(xs)
        if not xs:
            raise ValueError("empty meet of sets is undefined here")
        out = xs[0]
        for x in xs[1:]:
            out &= x
        return out

    def to_json(self, x):
        items = [sorted(s, key=str) if isinstance(s, frozenset) else s for s in x]
        return sorted(items, key=lambda s: (len(s), [str(v) for v in s]) if isinstance(s, list) else (0, [str(s)]))

    def from_json(self, data):
        return frozenset(frozenset(s) if isinstance(s, list) else s for s in data)

    def descriptor(self) -> dict:
        return {"kind": self.kind}


def value_lattice_from_descriptor(desc: dict):
    kind = desc.get("kind")
    if kind == "extended_real":
        return ExtendedReals(desc.get("exact", True), desc.get("tolerance", 1e-9))
    if kind == "boolean":
        return BooleanValues()
    if kind == "sets":
        return SetValues()
    raise DiagramError(f"unknown value lattice {kind!r}")


# the diagram ----------------------------------------------------------------------

class PosetDiagram:
    def __init__(self, lattice: FiniteLattice, target: TargetKind, values: dict,
                 maps: dict | None = None, fld: Field | None = None,
                 value_lattice=None, contravariant: bool = False):
        self.lattice = lattice
        self.target = TargetKind(target)
        self.field = fld if fld is not None else (get_field(2) if self.target != TargetKind.EXTENDED_REAL else None)
        self.contravariant = contravariant
        if contravariant and self.target != TargetKind.EXTENDED_REAL:
            raise DiagramError("contravariant diagrams are supported for ordered targets only")
        self.value_lattice = value_lattice
        if self.target == TargetKind.EXTENDED_REAL and value_lattice is None:
            self.value_lattice = ExtendedReals()
        missing = [x for x in lattice.elements if x not in values]
        if missing:
            raise DiagramError(f"no value at {lattice.format_element(missing[0])}")
        if self.target == TargetKind.EXTENDED_REAL:
            self._values = {x: self.value_lattice.coerce(values[x]) for x in lattice.elements}
        elif self.target == TargetKind.VECT:
            self._values = {x: int(values[x]) for x in lattice.elements}
            if any(v < 0 for v in self._values.values()):
                raise DiagramError("dimensions must be nonnegative")
        else:
            self._values = {x: values[x] for x in lattice.elements}
        self._edges = {}
        if self.target != TargetKind.EXTENDED_REAL:
            maps = maps or {}
            for u, w in lattice.cover_pairs():
                m = maps.get((u, w))
                if self.target == TargetKind.VECT:
                    shape = (self._values[w], self._values[u])
                    if m is None:
                        if shape[0] and shape[1]:
                            raise DiagramError(
                                f"missing map {lattice.format_element(u)} -> {lattice.format_element(w)}")
                        m = self.field.zeros(*shape)
                    if m.shape != shape:
                        raise DiagramError(
                            f"map {lattice.format_element(u)} -> {lattice.format_element(w)} "
                            f"has shape {m.shape}, expected {shape}")
                else:
                    if m is None:
                        src, tgt = self._values[u], self._values[w]
                        if any(tgt.dim(n) for n in src.dims):
                            raise DiagramError(
                                f"missing chain map {lattice.format_element(u)} -> {lattice.format_element(w)}")
                        m = src.zero_map_to(tgt)
                self._edges[(u, w)] = m
        self._composites: dict = {}

    # construction helpers -----------------------------------------------------
    @classmethod
    def ordered(cls, lattice, values: dict | Callable, value_lattice=None, contravariant=False):
        if callable(values):
            values = {x: values(x) for x in lattice.elements}
        return cls(lattice, TargetKind.EXTENDED_REAL, values, value_lattice=value_lattice,
                   contravariant=contravariant)

    @classmethod
    def vect(cls, lattice, fld: Field, dims: dict, maps: dict):
        return cls(lattice, TargetKind.VECT, dims, maps, fld)

    @classmethod
    def chain(cls, lattice, fld: Field, complexes: dict, maps: dict):
        return cls(lattice, TargetKind.CHAIN, complexes, maps, fld)

    # access ----------------------------------------------------------------------
    def value(self, x):
        return self._values[x]

    def dim(self, x) -> int:
        if self.target == TargetKind.VECT:
            return self._values[x]
        raise DiagramError("dim is only defined for vector-space diagrams")

    def edge(self, u, w):
        return self._edges[(u, w)]

    def identity(self, x):
        if self.target == TargetKind.VECT:
            return self.field.eye(self._values[x])
        if self.target == TargetKind.CHAIN:
            return self._values[x].identity()
        raise DiagramError("ordered diagrams have no maps")

    def compose(self, second, first):
        if self.target == TargetKind.VECT:
            return self.field.matmul(second, first)
        return second.compose(first)

    def map(self, u, w):
        """``D(u ≤ w)`` along a canonical chain of covering relations."""
        if self.target == TargetKind.EXTENDED_REAL:
            raise DiagramError("ordered diagrams have no maps")
        key = (u, w)
        hit = self._composites.get(key)
        if hit is not None:
            return hit
        L = self.lattice
        if u == w:
            out = self.identity(u)
        elif (u, w) in self._edges:
            out = self._edges[(u, w)]
        else:
            if not L.leq(u, w):
                raise DiagramError(f"{L.format_element(u)} is not below {L.format_element(w)}")
            c = next(c for c in L.lower_covers(w) if L.leq(u, c))
            out = self.compose(self._edges[(c, w)], self.map(u, c))
        self._composites[key] = out
        return out

    def is_iso_at(self, u, w) -> bool:
        if self.target == TargetKind.VECT:
            m = self.map(u, w)
            return m.shape[0] == m.shape[1] and self.field.rank(m) == m.shape[0]
        if self.target == TargetKind.CHAIN:
            return self.map(u, w).is_quasi_iso()
        return self.value_lattice.equal(self.value(u), self.value(w))

    def _equal_maps(self, a, b) -> bool:
        if self.target == TargetKind.VECT:
            return self.field.equal(a, b)
        return a.equals(b)

    # validation ------------------------------------------------------------------
    def validate(self) -> list[str]:
        """Every non-monotone edge, invalid chain map or non-commuting square."""
        L = self.lattice
        fmt = L.format_element
        report = []
        if self.target == TargetKind.EXTENDED_REAL:
            vl = self.value_lattice
            for u, w in L.cover_pairs():
                a, b = self.value(u), self.value(w)
                ok = vl.leq(b, a) if self.contravariant else vl.leq(a, b)
                if not ok:
                    report.append(f"non-monotone edge {fmt(u)} -> {fmt(w)}: "
                                  f"{vl.to_json(a)} vs {vl.to_json(b)}")
            return report
        if self.target == TargetKind.CHAIN:
            for (u, w), f in self._edges.items():
                try:
                    f.check()
                except ValueError as exc:
                    report.append(f"edge {fmt(u)} -> {fmt(w)} is not a chain map: {exc}")
            if report:
                return report
        # cover squares: two lower covers of w and their meet
        for w in L.elements:
            cs = L.lower_covers(w)
            for c1, c2 in itertools.combinations(cs, 2):
                u = L.meet(c1, c2)
                if u in L.lower_covers(c1) and u in L.lower_covers(c2):
                    p1 = self.compose(self._edges[(c1, w)], self._edges[(u, c1)])
                    p2 = self.compose(self._edges[(c2, w)], self._edges[(u, c2)])
                    if not self._equal_maps(p1, p2):
                        report.append(f"square {fmt(u)} -> {fmt(c1)}, {fmt(c2)} -> {fmt(w)} does not commute")
        if report or is_distributive(L)[0]:
            return report
        # general lattices: compare every pair of paths by dynamic programming
        for u in L.elements:
            comp = {u: self.identity(u)}
            for w in L.elements_by_rank():
                if w == u or not L.leq(u, w):
                    continue
                cands = [c for c in L.lower_covers(w) if L.leq(u, c)]
                first = self.compose(self._edges[(cands[0], w)], comp[cands[0]])
                for c in cands[1:]:
                    other = self.compose(self._edges[(c, w)], comp[c])
                    if not self._equal_maps(first, other):
                        report.append(f"paths {fmt(u)} -> {fmt(w)} through {fmt(cands[0])} "
                                      f"and {fmt(c)} disagree")
                comp[w] = first
        return report

    def is_valid(self) -> bool:
        return not self.validate()

    # serialisation ---------------------------------------------------------------
    def to_json(self, header: dict | None = None) -> dict:
        L = self.lattice
        ej = L.element_to_json
        out = {"format": FORMAT_TAG, "version": 1, "lattice": L.descriptor(),
               "target": self.target.value}
        if header:
            out["header"] = header
        if self.target == TargetKind.EXTENDED_REAL:
            vl = self.value_lattice
            out["values_in"] = vl.descriptor()
            out["contravariant"] = self.contravariant
            out["values"] = [{"at": ej(x), "value": vl.to_json(self.value(x))} for x in L.elements]
            return out
        f = self.field
        out["field"] = f.name
        if self.target == TargetKind.VECT:
            out["values"] = [{"at": ej(x), "dim": self.value(x)} for x in L.elements]
            out["maps"] = [{"from": ej(u), "to": ej(w),
                            "matrix": [[f.format_scalar(a) for a in row] for row in m]}
                           for (u, w), m in self._edges.items() if m.size]
        else:
            out["values"] = [{"at": ej(x), "complex": self.value(x).to_json()} for x in L.elements]
            maps = []
            for (u, w), m in self._edges.items():
                comps = {str(n): [[f.format_scalar(a) for a in row] for row in m[n]]
                         for n in sorted(m.source.dims) if m[n].size}
                if comps:
                    maps.append({"from": ej(u), "to": ej(w), "components": comps})
            out["maps"] = maps
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PosetDiagram":
        if data.get("format") != FORMAT_TAG:
            raise DiagramError("not a diagram file")
        L = lattice_from_descriptor(data["lattice"])
        target = TargetKind(data["target"])
        pe = L.element_from_json
        if target == TargetKind.EXTENDED_REAL:
            vl = value_lattice_from_descriptor(data.get("values_in", {"kind": "extended_real"}))
            values = {pe(e["at"]): vl.from_json(e["value"]) for e in data["values"]}
            return cls(L, target, values, value_lattice=vl,
                       contravariant=bool(data.get("contravariant", False)))
        f = Field.parse(data.get("field", "2"))
        if target == TargetKind.VECT:
            dims = {pe(e["at"]): int(e["dim"]) for e in data["values"]}
            maps = {}
            for e in data.get("maps", []):
                u, w = pe(e["from"]), pe(e["to"])
                shape = (dims[w], dims[u])
                maps[(u, w)] = f.array([[f.parse_scalar(a) for a in row] for row in e["matrix"]], shape)
            return cls(L, target, dims, maps, f)
        complexes = {pe(e["at"]): ChainComplex.from_json(f, e["complex"]) for e in data["values"]}
        maps = {}
        for e in data.get("maps", []):
            u, w = pe(e["from"]), pe(e["to"])
            src, tgt = complexes[u], complexes[w]
            comps = {}
            for n, rows in e["components"].items():
                n = int(n)
                comps[n] = f.array([[f.parse_scalar(a) for a in row] for row in rows],
                                   (tgt.dim(n), src.dim(n)))
            maps[(u, w)] = ChainMap(src, tgt, comps)
        return cls(L, target, complexes, maps, f)

    def dumps(self, header: dict | None = None) -> str:
        return json.dumps(self.to_json(header), indent=1, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "PosetDiagram":
        return cls.from_json(json.loads(text))

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    def summary(self, x) -> str:
        v = self.value(x)
        if self.target == TargetKind.EXTENDED_REAL:
            return str(self.value_lattice.to_json(v))
        if self.target == TargetKind.VECT:
            return str(v)
        return str(v.homology())

    def __repr__(self):
        return f"PosetDiagram({self.lattice!r}, {self.target.value})"


# codegree -------------------------------------------------------------------------

@dataclass
class CodegreeResult:
    holds: bool
    n: int
    witness: PairwiseCover | None = None
    detail: str = ""
    checked: int = 0

    def __bool__(self):
        return self.holds


def lower_set_of(L: FiniteLattice, parts) -> list:
    """``{u : u ≤ x for some part x}`` sorted by ``(jdim, key)``."""
    seen = set()
    out = []
    for p in parts:
        for u in L.below(p):
            if u not in seen:
                seen.add(u)
                out.append(u)
    return sort_elements(L, out)


def downset_pairs(L: FiniteLattice, objects) -> list[tuple]:
    """Covering pairs of a down-closed subset, read off the lattice itself."""
    objs = set(objects)
    return [(c, w) for w in objects for c in L.lower_covers(w) if c in objs]


def _vect_comparison(D: PosetDiagram, objects, value_at, map_between, leq, pairs, apex_map) -> tuple[bool, str]:
    """Whether the canonical map ``colim → D(apex)`` is an isomorphism.

    The colimit is the cokernel of the relation matrix ``R`` and the induced
    map factors the block row ``C = [D(u ≤ v)]``; it is an isomorphism iff
    ``C`` is onto and ``dim colim = total - rank R`` equals ``dim D(v)``.
    """
    f = D.field
    dims = {o: value_at(o) for o in objects}
    offsets = {}
    total = 0
    for o in objects:
        offsets[o] = total
        total += dims[o]
    cols = []
    for u, w in pairs:
        du = dims[u]
        if not du:
            continue
        block = f.zeros(total, du)
        if dims[w]:
            block[offsets[w]:offsets[w] + dims[w], :] = map_between(u, w)
        for i in range(du):
            block[offsets[u] + i, i] = f.sub(block[offsets[u] + i, i], f.scalar(1))
        cols.append(block)
    rank_r = f.rank(np.concatenate(cols, axis=1)) if cols else 0
    colim_dim = total - rank_r
    apex_dim, legs = apex_map
    if colim_dim != apex_dim:
        return False, f"colimit has dimension {colim_dim}, value has dimension {apex_dim}"
    if apex_dim == 0:
        return True, ""
    c = f.zeros(apex_dim, total)
    for o in objects:
        if dims[o]:
            c[:, offsets[o]:offsets[o] + dims[o]] = legs(o)
    if f.rank(c) != apex_dim:
        return False, "canonical map is not onto"
    return True, ""


def check_cover(D: PosetDiagram, cover: PairwiseCover, shape: str = "lower_set") -> tuple[bool, str]:
    """Test the colimit condition for one pairwise cover."""
    L = D.lattice
    v = cover.target
    if D.target == TargetKind.EXTENDED_REAL:
        vl = D.value_lattice
        vals = [D.value(x) for x in cover.parts]
        agg = vl.inf(vals) if D.contravariant else vl.sup(vals)
        if vl.equal(agg, D.value(v)):
            return True, ""
        op = "inf" if D.contravariant else "sup"
        return False, f"{op} over cover is {vl.to_json(agg)}, value is {vl.to_json(D.value(v))}"

    if shape == "cube":
        cube = build_cube(L, cover)
        objects = sorted(cube.punctured(), key=lambda s: (len(s), sorted(s)))
        at = cube.vertices

        def leq(s, t):
            return s <= t

        value_at = (lambda s: D.value(at[s]))
        map_between = (lambda s, t: D.map(at[s], at[t]))
        pairs = [(s, s | {i}) for s in objects for i in range(cube.size)
                 if i not in s and (s | {i}) != cube.full]
        legs = (lambda s: D.map(at[s], v))
    elif shape == "lower_set":
        objects = lower_set_of(L, cover.parts)
        leq = L.leq
        value_at = D.value
        map_between = D.map
        pairs = downset_pairs(L, objects)
        legs = (lambda u: D.map(u, v))
    else:
        raise ValueError(f"unknown shape {shape!r}")

    if D.target == TargetKind.VECT:
        return _vect_comparison(D, objects, value_at, map_between, leq, pairs,
                                (D.value(v), legs))
    bar = BarComplex(D.field, objects, leq, value_at, map_between)
    aug = bar.augmentation(D.value(v), legs)
    if aug.is_quasi_iso():
        return True, ""
    return False, (f"homotopy colimit homology {bar.complex.homology()} vs value homology "
                   f"{D.value(v).homology()}")


def is_codegree(D: PosetDiagram, n: int, shape: str = "lower_set",
                allow_nondistributive: bool = False, prune: bool = True) -> CodegreeResult:
    """Decide whether ``D`` is codegree ``n``.

    Every reduced pairwise cover of size ``n + 1`` of every element is
    checked; covers containing the apex itself are skipped because their cube
    is trivially cocartesian (``prune=False`` checks them too). On a
    non-distributive lattice the check requires ``allow_nondistributive``
    and then only uses covers whose cube is strongly bicartesian, with the
    punctured-cube shape.
    """
    L = D.lattice
    if n < 0:
        raise ValueError("n must be nonnegative")
    distributive = is_distributive(L)[0]
    if not distributive:
        if not allow_nondistributive:
            raise NonDistributiveError("codegree is decided on distributive lattices only")
        shape = "cube"
    checked = 0
    for v in sort_elements(L, L.elements):
        if prune:
            covers = enumerate_reduced_covers(L, v, n + 1)
        else:
            covers = enumerate_pairwise_covers(L, v, n + 1)
        for cover in covers:
            if not distributive and not is_strongly_bicartesian(L, build_cube(L, cover)):
                continue
            checked += 1
            ok, detail = check_cover(D, cover, shape)
            if not ok:
                return CodegreeResult(False, n, cover, detail, checked)
    return CodegreeResult(True, n, None, "", checked)


def codegree_lower_bound(D: PosetDiagram, **kwargs) -> int:
    """Smallest ``n`` for which ``D`` is codegree ``n``.

    Codegree ``n`` implies codegree ``m`` for every ``m ≥ n``, and no reduced
    cover has more parts than the largest join-dimension, so the upward
    search stops at the first success and at worst at ``max jdim``.
    """
    top = max_jdim(D.lattice)
    for n in range(top + 1):
        if is_codegree(D, n, **kwargs):
            return n
    return top
