"""Colimits of vector-space diagrams and homotopy colimits of chain diagrams.

Both routines take a finite poset given by a list of objects and the diagram
through callbacks, so they work for any subposet of a lattice.

The plain colimit is the cokernel of the relation matrix whose columns are
``incl_w ∘ D(u ≤ w) - incl_u`` over the covering pairs of the subposet.
The homotopy colimit is the bar construction: a sum over strictly increasing
chains ``x0 < ... < xp`` of ``D(x0)`` shifted up by ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Hashable, Sequence

import numpy as np

from .chain import ChainComplex, ChainMap
from .field import Field


def hasse_pairs(objects: Sequence[Hashable], leq: Callable) -> list[tuple]:
    """Covering pairs ``(u, w)`` of the order restricted to ``objects``."""
    objs = list(objects)
    below = {w: [u for u in objs if u != w and leq(u, w)] for w in objs}
    pairs = []
    for w in objs:
        bw = below[w]
        for u in bw:
            if not any(m != u and leq(u, m) for m in bw):
                pairs.append((u, w))
    return pairs


@dataclass
class VectColimit:
    field: Field
    objects: list
    offsets: dict
    dims: dict
    quotient: np.ndarray  # dim x total, kernel equals the relation span
    _section: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.quotient.shape[0]

    def leg(self, obj) -> np.ndarray:
        o = self.offsets[obj]
        return self.quotient[:, o:o + self.dims[obj]]

    def section(self) -> np.ndarray:
        if self._section is None:
            self._section = self.field.right_inverse(self.quotient)
        return self._section

    def induced(self, cocone: Callable[[Hashable], np.ndarray], target_dim: int) -> np.ndarray:
        """Map out of the colimit determined by a compatible cocone."""
        f = self.field
        total = self.quotient.shape[1]
        big = f.zeros(target_dim, total)
        for obj in self.objects:
            d = self.dims[obj]
            if d:
                o = self.offsets[obj]
                big[:, o:o + d] = cocone(obj)
        return f.matmul(big, self.section())


def colim_vect(fld: Field, objects: Sequence[Hashable], dim: Callable[[Hashable], int],
               map_: Callable[[Hashable, Hashable], np.ndarray], leq: Callable,
               pairs: list[tuple] | None = None) -> VectColimit:
    """Colimit of a functor on the finite poset ``objects``.

    ``map_(u, w)`` is the matrix of ``D(u ≤ w)``. Only covering pairs are used,
    which is enough because the diagram is a functor.
    """
    objs = list(objects)
    dims = {o: dim(o) for o in objs}
    offsets = {}
    total = 0
    for o in objs:
        offsets[o] = total
        total += dims[o]
    if pairs is None:
        pairs = hasse_pairs(objs, leq)
    cols = []
    for u, w in pairs:
        du = dims[u]
        if du == 0:
            continue
        block = fld.zeros(total, du)
        if dims[w]:
            block[offsets[w]:offsets[w] + dims[w], :] = map_(u, w)
        for i in range(du):
            block[offsets[u] + i, i] = fld.sub(block[offsets[u] + i, i], fld.scalar(1))
        cols.append(block)
    if cols:
        rel = np.concatenate(cols, axis=1)
        quotient = fld.left_nullspace(rel)
    else:
        quotient = fld.eye(total)
    return VectColimit(fld, objs, offsets, dims, quotient)


def chains_of(objects: Sequence[Hashable], leq: Callable, max_length: int | None = None) -> list[tuple]:
    """All strictly increasing chains, as tuples, in a deterministic order."""
    objs = list(objects)
    above = {a: [b for b in objs if b != a and leq(a, b)] for a in objs}
    out: list[tuple] = []

    def extend(chain):
        out.append(chain)
        if max_length is not None and len(chain) > max_length:
            return
        for b in above[chain[-1]]:
            extend(chain + (b,))

    for a in objs:
        extend((a,))
    return out


class BarComplex:
    """Bar construction model of the homotopy colimit of a chain diagram.

    A basis vector is a triple ``(chain, internal degree, index)``; the
    total degree is ``internal degree + len(chain) - 1``.
    """

    def __init__(self, fld: Field, objects: Sequence[Hashable], leq: Callable,
                 value: Callable[[Hashable], ChainComplex],
                 map_: Callable[[Hashable, Hashable], ChainMap]):
        self.field = fld
        self.objects = list(objects)
        self.leq = leq
        self.value = value
        self.map_ = map_
        self.chains = chains_of(self.objects, leq)
        # layout[total degree] -> list of (chain, internal degree, offset, size)
        self.layout: dict[int, list] = {}
        self.position: dict[tuple, tuple[int, int]] = {}
        sizes: dict[int, int] = {}
        for ch in self.chains:
            c = value(ch[0])
            p = len(ch) - 1
            for m, k in sorted(c.dims.items()):
                n = m + p
                off = sizes.get(n, 0)
                self.layout.setdefault(n, []).append((ch, m, off, k))
                self.position[(ch, m)] = (n, off)
                sizes[n] = off + k
        self.complex = self._build(sizes)

    def _build(self, sizes: dict[int, int]) -> ChainComplex:
        f = self.field
        diffs = {}
        for n, entries in self.layout.items():
            if sizes.get(n - 1, 0) == 0:
                continue
            mat = f.zeros(sizes[n - 1], sizes[n])
            for ch, m, off, k in entries:
                p = len(ch) - 1
                c0 = self.value(ch[0])
                # internal differential with sign (-1)^p
                if c0.dim(m - 1):
                    _, o2 = self.position[(ch, m - 1)]
                    sgn = -1 if p % 2 else 1
                    mat[o2:o2 + c0.dim(m - 1), off:off + k] = f.add(
                        mat[o2:o2 + c0.dim(m - 1), off:off + k], f.scale(sgn, c0.d(m)))
                if p == 0:
                    continue
                # face 0 pushes forward along D(x0 <= x1)
                face = ch[1:]
                tgt = self.value(face[0])
                if tgt.dim(m):
                    _, o2 = self.position[(face, m)]
                    push = self.map_(ch[0], ch[1])[m]
                    mat[o2:o2 + tgt.dim(m), off:off + k] = f.add(
                        mat[o2:o2 + tgt.dim(m), off:off + k], push)
                for i in range(1, p + 1):
                    face = ch[:i] + ch[i + 1:]
                    _, o2 = self.position[(face, m)]
                    sgn = f.scalar(-1 if i % 2 else 1)
                    block = mat[o2:o2 + k, off:off + k]
                    for j in range(k):
                        block[j, j] = f.add(block[j, j], sgn)
            diffs[n] = mat
        return ChainComplex(f, sizes, diffs, check=False)

    def augmentation(self, target: ChainComplex,
                     to_target: Callable[[Hashable], ChainMap]) -> ChainMap:
        """Chain map to ``target`` from a cocone of chain maps out of the values."""
        f = self.field
        comps = {}
        for n, entries in self.layout.items():
            mat = f.zeros(target.dim(n), self.complex.dim(n))
            for ch, m, off, k in entries:
                if len(ch) == 1 and target.dim(n):
                    mat[:, off:off + k] = to_target(ch[0])[m]
            comps[n] = mat
        return ChainMap(self.complex, target, comps, check=False)

    def inclusion_into(self, bigger: "BarComplex") -> ChainMap:
        """Inclusion induced by a subposet inclusion (same diagram values)."""
        f = self.field
        comps = {}
        for n, entries in self.layout.items():
            mat = f.zeros(bigger.complex.dim(n), self.complex.dim(n))
            for ch, m, off, k in entries:
                _, o2 = bigger.position[(ch, m)]
                for j in range(k):
                    mat[o2 + j, off + j] = f.scalar(1)
            comps[n] = mat
        return ChainMap(self.complex, bigger.complex, comps, check=False)

    def pushforward(self, other: "BarComplex", obj_map: Callable,
                    nat: Callable[[Hashable], ChainMap]) -> ChainMap:
        """Chain map induced by an order embedding of index posets together
        with a natural family ``nat(q): D(q) → E(obj_map(q))``."""
        f = self.field
        comps = {}
        for n, entries in self.layout.items():
            mat = f.zeros(other.complex.dim(n), self.complex.dim(n))
            for ch, m, off, k in entries:
                image = tuple(obj_map(c) for c in ch)
                tgt_dim = other.value(image[0]).dim(m)
                if not tgt_dim:
                    continue
                _, o2 = other.position[(image, m)]
                mat[o2:o2 + tgt_dim, off:off + k] = nat(ch[0])[m]
            comps[n] = mat
        return ChainMap(self.complex, other.complex, comps, check=False)

    def vertex_inclusion(self, obj) -> ChainMap:
        """Inclusion of ``D(obj)`` as the length-zero chain ``(obj,)``."""
        f = self.field
        c = self.value(obj)
        comps = {}
        for m, k in c.dims.items():
            n, off = self.position[((obj,), m)]
            mat = f.zeros(self.complex.dim(n), k)
            for j in range(k):
                mat[off + j, j] = f.scalar(1)
            comps[m] = mat
        return ChainMap(c, self.complex, comps, check=False)


def hocolim_chain(fld: Field, objects, leq, value, map_) -> BarComplex:
    return BarComplex(fld, objects, leq, value, map_)


def colim_chain_strict(fld: Field, objects: Sequence[Hashable], leq: Callable,
                       value: Callable[[Hashable], ChainComplex],
                       map_: Callable[[Hashable, Hashable], ChainMap]) -> ChainComplex:
    """Degreewise plain colimit of a chain diagram.

    Used as an independent cross-check: for diagrams that are cofibrant in the
    projective sense this agrees with the bar construction up to homology.
    """
    objs = list(objects)
    pairs = hasse_pairs(objs, leq)
    degrees = sorted(set().union(*[value(o).dims for o in objs])) if objs else []
    cols = {}
    for m in degrees:
        cols[m] = colim_vect(fld, objs, lambda o: value(o).dim(m),
                             lambda u, w: map_(u, w)[m], leq, pairs)
    dims = {m: cols[m].dim for m in degrees}
    diffs = {}
    for m in degrees:
        if m - 1 not in cols:
            continue
        lo = cols[m - 1]
        diffs[m] = cols[m].induced(
            lambda o: fld.matmul(lo.leg(o), value(o).d(m)), lo.dim)
    return ChainComplex(fld, dims, diffs)
