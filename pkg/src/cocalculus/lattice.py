"""Finite lattices: products of chains, power sets and explicit Hasse diagrams.

Elements are plain hashable Python values: tuples of ints for grids,
frozensets of vertex labels for power sets and name strings for explicit
lattices. Every lattice exposes the same small interface (order, join, meet,
lower covers, elements below) so the algorithms above never need to know the
representation.
"""
from __future__ import annotations

import itertools
import json
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np


class LatticeError(ValueError):
    pass


class NonDistributiveError(LatticeError):
    pass


class FiniteLattice:
    kind = "abstract"

    # subclasses provide: elements, leq, join, meet, lower_covers, key,
    # format_element, parse_element, descriptor

    @cached_property
    def elements(self) -> tuple:
        raise NotImplementedError

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        try:
            return x in self.index
        except TypeError:
            return False

    def check_element(self, x):
        if x not in self:
            raise LatticeError(f"{x!r} is not an element of {self}")
        return x

    def leq(self, x, y) -> bool:
        raise NotImplementedError

    def less(self, x, y) -> bool:
        return x != y and self.leq(x, y)

    def join(self, x, y):
        raise NotImplementedError

    def meet(self, x, y):
        raise NotImplementedError

    def join_all(self, xs: Iterable):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def meet_all(self, xs: Iterable):
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    @cached_property
    def bottom(self):
        return self.meet_all(self.elements)

    @cached_property
    def top(self):
        out = self.elements[0]
        for x in self.elements:
            out = self.join(out, x)
        return out

    def lower_covers(self, x) -> list:
        below = [u for u in self.elements if self.less(u, x)]
        return [u for u in below if not any(self.less(u, w) for w in below)]

    def upper_covers(self, x) -> list:
        return self._upper_covers[x]

    @cached_property
    def _upper_covers(self) -> dict:
        up = {x: [] for x in self.elements}
        for x in self.elements:
            for u in self.lower_covers(x):
                up[u].append(x)
        return up

    def cover_pairs(self) -> list[tuple]:
        """All covering relations ``(u, w)`` with ``u ⋖ w``."""
        return [(u, w) for w in self.elements for u in self.lower_covers(w)]

    def below(self, x) -> list:
        """Elements ``u ≤ x`` in lattice order."""
        return [u for u in self.elements if self.leq(u, x)]

    def key(self, x):
        return self.index[x]

    def format_element(self, x) -> str:
        return str(x)

    def parse_element(self, text: str):
        raise NotImplementedError

    def element_to_json(self, x):
        return self.format_element(x)

    def element_from_json(self, data):
        return self.parse_element(data)

    def descriptor(self) -> dict:
        raise NotImplementedError

    @property
    def known_distributive(self) -> bool:
        return False

    @cached_property
    def max_chain_rank(self) -> int:
        """Length of the longest chain (number of covering steps)."""
        height = {}
        for x in self.elements_by_rank():
            cs = self.lower_covers(x)
            height[x] = 1 + max((height[u] for u in cs), default=-1)
        return max(height.values())

    def elements_by_rank(self) -> list:
        """Elements in an order extending the lattice order."""
        # a linear extension: sort by the number of elements below
        counts = {x: len(self.below(x)) for x in self.elements}
        return sorted(self.elements, key=lambda x: (counts[x], self.key(x)))


class GridLattice(FiniteLattice):
    """Product of chains ``{0 < 1 < ... < h-1}``, one per axis."""

    kind = "grid"

    def __init__(self, heights: Sequence[int]):
        heights = tuple(int(h) for h in heights)
        if not heights or any(h < 1 for h in heights):
            raise LatticeError("grid needs at least one axis and every height ≥ 1")
        self.heights = heights
        self.arity = len(heights)

    def __repr__(self):
        return f"GridLattice({list(self.heights)})"

    def __eq__(self, other):
        return isinstance(other, GridLattice) and other.heights == self.heights

    def __hash__(self):
        return hash(("grid", self.heights))

    @cached_property
    def elements(self) -> tuple:
        return tuple(itertools.product(*[range(h) for h in self.heights]))

    def __contains__(self, x) -> bool:
        return (isinstance(x, tuple) and len(x) == self.arity
                and all(isinstance(c, (int, np.integer)) and 0 <= c < h
                        for c, h in zip(x, self.heights)))

    def leq(self, x, y) -> bool:
        return all(a <= b for a, b in zip(x, y))

    def join(self, x, y):
        return tuple(max(a, b) for a, b in zip(x, y))

    def meet(self, x, y):
        return tuple(min(a, b) for a, b in zip(x, y))

    @cached_property
    def bottom(self):
        return (0,) * self.arity

    @cached_property
    def top(self):
        return tuple(h - 1 for h in self.heights)

    def lower_covers(self, x) -> list:
        out = []
        for i, c in enumerate(x):
            if c > 0:
                out.append(x[:i] + (c - 1,) + x[i + 1:])
        return out

    def upper_covers(self, x) -> list:
        out = []
        for i, c in enumerate(x):
            if c + 1 < self.heights[i]:
                out.append(x[:i] + (c + 1,) + x[i + 1:])
        return out

    def below(self, x) -> list:
        return list(itertools.product(*[range(c + 1) for c in x]))

    def key(self, x):
        return tuple(x)

    def format_element(self, x) -> str:
        return "(" + ",".join(str(c) for c in x) + ")"

    def parse_element(self, text):
        if isinstance(text, (list, tuple)):
            vals = tuple(int(c) for c in text)
        else:
            t = str(text).strip().strip("()[]")
            vals = tuple(int(c) for c in t.split(",") if c.strip()) if t else ()
        return self.check_element(vals)

    def element_to_json(self, x):
        return list(x)

    def descriptor(self) -> dict:
        return {"kind": "grid", "heights": list(self.heights)}

    @property
    def known_distributive(self) -> bool:
        return True

    @cached_property
    def max_chain_rank(self) -> int:
        return sum(h - 1 for h in self.heights)

    def elements_by_rank(self) -> list:
        return sorted(self.elements, key=lambda x: (sum(x), x))


class PowerSetLattice(FiniteLattice):
    """Subsets of a finite ordered vertex universe, ordered by inclusion."""

    kind = "powerset"

    def __init__(self, universe: Sequence[Hashable]):
        universe = tuple(universe)
        if len(set(universe)) != len(universe):
            raise LatticeError("vertex labels must be distinct")
        self.universe = universe
        self.position = {v: i for i, v in enumerate(universe)}

    def __repr__(self):
        return f"PowerSetLattice({list(self.universe)})"

    def __eq__(self, other):
        return isinstance(other, PowerSetLattice) and other.universe == self.universe

    def __hash__(self):
        return hash(("powerset", self.universe))

    @cached_property
    def elements(self) -> tuple:
        n = len(self.universe)
        out = []
        for size in range(n + 1):
            for combo in itertools.combinations(self.universe, size):
                out.append(frozenset(combo))
        return tuple(out)

    def __contains__(self, x) -> bool:
        return isinstance(x, frozenset) and all(v in self.position for v in x)

    def leq(self, x, y) -> bool:
        return x <= y

    def join(self, x, y):
        return x | y

    def meet(self, x, y):
        return x & y

    @cached_property
    def bottom(self):
        return frozenset()

    @cached_property
    def top(self):
        return frozenset(self.universe)

    def lower_covers(self, x) -> list:
        return [x - {v} for v in self.sorted_vertices(x)]

    def upper_covers(self, x) -> list:
        return [x | {v} for v in self.universe if v not in x]

    def below(self, x) -> list:
        verts = self.sorted_vertices(x)
        return [frozenset(c) for r in range(len(verts) + 1)
                for c in itertools.combinations(verts, r)]

    def sorted_vertices(self, x) -> list:
        return sorted(x, key=self.position.__getitem__)

    def key(self, x):
        return (len(x), tuple(sorted(self.position[v] for v in x)))

    def format_element(self, x) -> str:
        return "{" + ",".join(str(v) for v in self.sorted_vertices(x)) + "}"

    def parse_element(self, text):
        if isinstance(text, (list, tuple, set, frozenset)):
            items = list(text)
        else:
            t = str(text).strip().strip("{}[]")
            items = [s.strip() for s in t.split(",") if s.strip()] if t else []
        labels = {str(v): v for v in self.universe}
        out = []
        for it in items:
            if it in self.position:
                out.append(it)
            elif str(it) in labels:
                out.append(labels[str(it)])
            else:
                raise LatticeError(f"unknown vertex {it!r}")
        return frozenset(out)

    def element_to_json(self, x):
        return [v for v in self.sorted_vertices(x)]

    def descriptor(self) -> dict:
        return {"kind": "powerset", "universe": list(self.universe)}

    @property
    def known_distributive(self) -> bool:
        return True

    @cached_property
    def max_chain_rank(self) -> int:
        return len(self.universe)

    def elements_by_rank(self) -> list:
        return list(self.elements)


class ExplicitLattice(FiniteLattice):
    """Lattice given by element names and covering relations ``a < b``.

    The order is the reflexive transitive closure of the given relations.
    Order axioms and the existence of all joins and meets are checked on
    construction.
    """

    kind = "explicit"

    def __init__(self, names: Sequence[str], relations: Iterable[tuple[str, str]]):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise LatticeError("element names must be distinct")
        if not names:
            raise LatticeError("lattice must be nonempty")
        self.names = names
        idx = {n: i for i, n in enumerate(names)}
        n = len(names)
        order = np.eye(n, dtype=bool)
        rels = []
        for a, b in relations:
            a, b = str(a), str(b)
            if a not in idx or b not in idx:
                raise LatticeError(f"relation {a} < {b} mentions an unknown element")
            order[idx[a], idx[b]] = True
            rels.append((a, b))
        self.relations = tuple(rels)
        # transitive closure (Warshall)
        for k in range(n):
            order |= np.outer(order[:, k], order[k, :])
        if np.any(order & order.T & ~np.eye(n, dtype=bool)):
            raise LatticeError("relations contain a cycle, order is not antisymmetric")
        self._order = order
        self._join = self._bound_table(order, upper=True)
        self._meet = self._bound_table(order, upper=False)

    def _bound_table(self, order: np.ndarray, upper: bool) -> np.ndarray:
        n = len(self.names)
        table = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i, n):
                if upper:
                    common = np.nonzero(order[i] & order[j])[0]
                    cand = [c for c in common if order[c, common].all()]
                else:
                    common = np.nonzero(order[:, i] & order[:, j])[0]
                    cand = [c for c in common if order[common, c].all()]
                if len(cand) != 1:
                    what = "join" if upper else "meet"
                    raise LatticeError(f"{what} of {self.names[i]} and {self.names[j]} does not exist")
                table[i, j] = table[j, i] = cand[0]
        return table

    def __repr__(self):
        return f"ExplicitLattice({len(self.names)} elements)"

    @cached_property
    def elements(self) -> tuple:
        return self.names

    def leq(self, x, y) -> bool:
        return bool(self._order[self.index[x], self.index[y]])

    def join(self, x, y):
        return self.names[self._join[self.index[x], self.index[y]]]

    def meet(self, x, y):
        return self.names[self._meet[self.index[x], self.index[y]]]

    @cached_property
    def _lower_covers(self) -> dict:
        o = self._order
        n = len(self.names)
        strict = o & ~np.eye(n, dtype=bool)
        out = {}
        for j in range(n):
            below = np.nonzero(strict[:, j])[0]
            out[self.names[j]] = [self.names[i] for i in below
                                  if not np.any(strict[i, below])]
        return out

    def lower_covers(self, x) -> list:
        return list(self._lower_covers[x])

    def below(self, x) -> list:
        col = self._order[:, self.index[x]]
        return [self.names[i] for i in np.nonzero(col)[0]]

    def parse_element(self, text):
        return self.check_element(str(text).strip())

    def descriptor(self) -> dict:
        return {"kind": "explicit", "names": list(self.names),
                "covers": [[u, w] for u, w in self.cover_pairs()]}

    def to_text(self) -> str:
        lines = [" ".join(self.names)]
        lines += [f"{u} < {w}" for u, w in self.cover_pairs()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExplicitLattice":
        """First non-comment line lists names; remaining lines are ``a < b``."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise LatticeError("empty lattice description")
        names = lines[0].replace(",", " ").split()
        rels = []
        for ln in lines[1:]:
            parts = [p.strip() for p in ln.split("<")]
            if len(parts) < 2 or not all(parts):
                raise LatticeError(f"cannot parse relation line {ln!r}")
            rels.extend(zip(parts[:-1], parts[1:]))
        return cls(names, rels)


def lattice_from_descriptor(desc: dict) -> FiniteLattice:
    kind = desc.get("kind")
    if kind == "grid":
        return GridLattice(desc["heights"])
    if kind == "powerset":
        return PowerSetLattice(desc["universe"])
    if kind == "explicit":
        return ExplicitLattice(desc["names"], [tuple(p) for p in desc.get("covers", [])])
    raise LatticeError(f"unknown lattice kind {kind!r}")


def parse_lattice_spec(text: str) -> FiniteLattice:
    """Short command-line lattice descriptors.

    ``grid:3x3x2`` gives a grid with those axis heights, ``powerset:a,b,c``
    a power set, and anything else is read as an explicit lattice file path.
    """
    t = text.strip()
    if t.startswith("grid:"):
        return GridLattice([int(h) for h in t[5:].lower().split("x")])
    if t.startswith("powerset:"):
        return PowerSetLattice([s.strip() for s in t[9:].split(",") if s.strip()])
    if t.startswith("{") and t.endswith("}"):
        return PowerSetLattice([s.strip() for s in t[1:-1].split(",") if s.strip()])
    with open(t) as fh:
        content = fh.read()
    if content.lstrip().startswith("{"):
        return lattice_from_descriptor(json.loads(content))
    return ExplicitLattice.from_text(content)


# distributivity ---------------------------------------------------------------

def _tables(L: FiniteLattice):
    n = len(L)
    J = np.empty((n, n), dtype=np.int64)
    M = np.empty((n, n), dtype=np.int64)
    els = L.elements
    idx = L.index
    for i, x in enumerate(els):
        for j in range(i, n):
            y = els[j]
            J[i, j] = J[j, i] = idx[L.join(x, y)]
            M[i, j] = M[j, i] = idx[L.meet(x, y)]
    return J, M


def distributivity_witness(L: FiniteLattice):
    """A triple violating ``x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z)``, or ``None``.

    Exhaustive over all triples, vectorised over two of the three indices.
    """
    J, M = _tables(L)
    n = len(L)
    for i in range(n):
        lhs = M[i][J]                    # x ∧ (y ∨ z)
        rhs = J[M[i][:, None], M[i][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            j, k = bad[0]
            els = L.elements
            return els[i], els[int(j)], els[int(k)]
    return None


def is_distributive(L: FiniteLattice, exhaustive: bool = False):
    """Return ``(True, None)`` or ``(False, (x, y, z))``.

    Grids and power sets are distributive by construction; pass
    ``exhaustive=True`` to check them anyway.
    """
    if L.known_distributive and not exhaustive:
        return True, None
    cache = L.__dict__.setdefault("_distributive_cache", {})
    if "result" not in cache:
        w = distributivity_witness(L)
        cache["result"] = (w is None, w)
    return cache["result"]


def require_distributive(L: FiniteLattice):
    ok, w = is_distributive(L)
    if not ok:
        raise NonDistributiveError(f"lattice is not distributive, witness {w}")


def find_m3_n5(L: FiniteLattice):
    """Search for an M3 or N5 sublattice.

    Returns ``("M3", (o, a, b, c, i))`` or ``("N5", (o, a, c, b, i))`` with
    ``a < c`` in the N5 case, or ``None``.
    """
    els = L.elements
    n = len(els)
    for a, b, c in itertools.combinations(els, 3):
        if L.leq(a, b) or L.leq(b, a) or L.leq(a, c) or L.leq(c, a) or L.leq(b, c) or L.leq(c, b):
            continue
        top = L.join(a, b)
        bot = L.meet(a, b)
        if L.join(a, c) == top and L.join(b, c) == top and L.meet(a, c) == bot and L.meet(b, c) == bot:
            return "M3", (bot, a, b, c, top)
    for i in range(n):
        for j in range(n):
            a, c = els[i], els[j]
            if not L.less(a, c):
                continue
            for b in els:
                if L.leq(b, c) or L.leq(c, b) or L.leq(a, b) or L.leq(b, a):
                    continue
                if L.join(a, b) == L.join(c, b) and L.meet(a, b) == L.meet(c, b):
                    return "N5", (L.meet(a, b), a, c, b, L.join(a, b))
    return None


# builders ---------------------------------------------------------------------

def m3_lattice() -> ExplicitLattice:
    """The diamond: ``a0`` below three incomparable atoms below ``a4``."""
    return ExplicitLattice(["a0", "a1", "a2", "a3", "a4"],
                           [("a0", "a1"), ("a0", "a2"), ("a0", "a3"),
                            ("a1", "a4"), ("a2", "a4"), ("a3", "a4")])


def n5_lattice() -> ExplicitLattice:
    """The pentagon ``b0 < b1 < b3 < b4`` and ``b0 < b2 < b4``."""
    return ExplicitLattice(["b0", "b1", "b2", "b3", "b4"],
                           [("b0", "b1"), ("b1", "b3"), ("b3", "b4"),
                            ("b0", "b2"), ("b2", "b4")])


def downset_lattice(points: Sequence[str], relations: Iterable[tuple[str, str]]) -> ExplicitLattice:
    """Distributive lattice of down-sets of a finite poset.

    Elements are named by their members joined with ``"."`` (``"_"`` for the
    empty down-set), so the result is a lattice with explicit Hasse diagram.
    """
    pts = list(points)
    rel = {(a, b) for a, b in relations}
    below = {p: {p} for p in pts}
    changed = True
    while changed:
        changed = False
        for a, b in rel:
            new = below[b] | below[a]
            if new != below[b]:
                below[b] = new
                changed = True
    downsets = []
    for r in range(len(pts) + 1):
        for combo in itertools.combinations(pts, r):
            s = set(combo)
            if all(below[p] <= s for p in s):
                downsets.append(frozenset(s))

    def name(s):
        return ".".join(p for p in pts if p in s) or "_"

    names = [name(s) for s in downsets]
    covers = [(name(s), name(t)) for s in downsets for t in downsets
              if s < t and len(t) == len(s) + 1]
    return ExplicitLattice(names, covers)
