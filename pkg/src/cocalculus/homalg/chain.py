"""Bounded chain complexes of finite-dimensional vector spaces.

Grading is homological: ``d(n)`` maps degree ``n`` to degree ``n - 1`` and is
stored as a matrix of shape ``(dim(n - 1), dim(n))``.
"""
from __future__ import annotations

import numpy as np

from .field import Field, field as get_field


class ChainComplex:
    def __init__(self, fld: Field, dims: dict[int, int], diffs: dict[int, np.ndarray] | None = None,
                 check: bool = True):
        self.field = fld
        self.dims = {int(n): int(k) for n, k in dims.items() if int(k) > 0}
        self._d: dict[int, np.ndarray] = {}
        for n, mat in (diffs or {}).items():
            n = int(n)
            shape = (self.dim(n - 1), self.dim(n))
            if mat.shape != shape:
                raise ValueError(f"differential in degree {n} has shape {mat.shape}, expected {shape}")
            if shape[0] and shape[1] and not fld.is_zero(mat):
                self._d[n] = mat
        if check:
            self.check()

    @classmethod
    def zero(cls, fld: Field) -> "ChainComplex":
        return cls(fld, {})

    @classmethod
    def concentrated(cls, fld: Field, degree: int, dim: int) -> "ChainComplex":
        return cls(fld, {degree: dim})

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> np.ndarray:
        mat = self._d.get(n)
        if mat is None:
            return self.field.zeros(self.dim(n - 1), self.dim(n))
        return mat

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def degree_range(self) -> range:
        if not self.dims:
            return range(0)
        return range(min(self.dims), max(self.dims) + 1)

    def check(self):
        for n in self._d:
            if n - 1 in self._d:
                if not self.field.is_zero(self.field.matmul(self.d(n - 1), self.d(n))):
                    raise ValueError(f"d∘d is nonzero at degree {n}")

    def betti(self, n: int) -> int:
        f = self.field
        return self.dim(n) - f.rank(self.d(n)) - f.rank(self.d(n + 1))

    def homology(self) -> dict[int, int]:
        """Nonzero homology dimensions by degree."""
        out = {}
        for n in self.degree_range():
            b = self.betti(n)
            if b:
                out[n] = b
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())

    def is_acyclic(self) -> bool:
        return not self.homology()

    def shift(self, k: int) -> "ChainComplex":
        """Complex with ``C[k]_n = C_{n-k}`` and differential ``(-1)^k d``."""
        sign = -1 if k % 2 else 1
        dims = {n + k: m for n, m in self.dims.items()}
        diffs = {n + k: self.field.scale(sign, m) for n, m in self._d.items()}
        return ChainComplex(self.field, dims, diffs, check=False)

    def direct_sum(self, other: "ChainComplex") -> "ChainComplex":
        f = self.field
        dims = {n: self.dim(n) + other.dim(n) for n in set(self.dims) | set(other.dims)}
        diffs = {}
        for n in set(self._d) | set(other._d):
            diffs[n] = f.block([
                [self.d(n), f.zeros(self.dim(n - 1), other.dim(n))],
                [f.zeros(other.dim(n - 1), self.dim(n)), other.d(n)],
            ])
        return ChainComplex(f, dims, diffs, check=False)

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {n: self.field.eye(k) for n, k in self.dims.items()}, check=False)

    def zero_map_to(self, other: "ChainComplex") -> "ChainMap":
        return ChainMap(self, other, {}, check=False)

    def same_as(self, other: "ChainComplex") -> bool:
        if self.dims != other.dims:
            return False
        return all(self.field.equal(self.d(n), other.d(n)) for n in set(self._d) | set(other._d))

    def to_json(self) -> dict:
        f = self.field
        return {
            "dims": {str(n): k for n, k in sorted(self.dims.items())},
            "d": {str(n): [[f.format_scalar(x) for x in row] for row in m]
                  for n, m in sorted(self._d.items())},
        }

    @classmethod
    def from_json(cls, fld: Field, data: dict) -> "ChainComplex":
        dims = {int(n): int(k) for n, k in data.get("dims", {}).items()}
        diffs = {}
        for n, rows in data.get("d", {}).items():
            n = int(n)
            shape = (dims.get(n - 1, 0), dims.get(n, 0))
            diffs[n] = fld.array([[fld.parse_scalar(x) for x in row] for row in rows], shape)
        return cls(fld, dims, diffs)

    def __repr__(self):
        return f"ChainComplex({self.field.name}, dims={self.dims})"


class ChainMap:
    def __init__(self, source: ChainComplex, target: ChainComplex,
                 components: dict[int, np.ndarray], check: bool = True):
        self.source = source
        self.target = target
        self.field = source.field
        self._f: dict[int, np.ndarray] = {}
        for n, mat in components.items():
            shape = (target.dim(n), source.dim(n))
            if mat.shape != shape:
                raise ValueError(f"component {n} has shape {mat.shape}, expected {shape}")
            if shape[0] and shape[1]:
                self._f[int(n)] = mat
        if check:
            self.check()

    def __getitem__(self, n: int) -> np.ndarray:
        mat = self._f.get(n)
        if mat is None:
            return self.field.zeros(self.target.dim(n), self.source.dim(n))
        return mat

    def check(self):
        f = self.field
        for n in set(self.source.dims) | {m + 1 for m in self.target.dims}:
            lhs = f.matmul(self.target.d(n), self[n])
            rhs = f.matmul(self[n - 1], self.source.d(n))
            if not f.equal(lhs, rhs):
                raise ValueError(f"not a chain map at degree {n}")

    def compose(self, first: "ChainMap") -> "ChainMap":
        """``self ∘ first``."""
        f = self.field
        comps = {n: f.matmul(self[n], first[n]) for n in first.source.dims}
        return ChainMap(first.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        f = self.field
        degrees = set(self._f) | set(other._f)
        return ChainMap(self.source, self.target,
                        {n: f.add(self[n], other[n]) for n in degrees}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        f = self.field
        degrees = set(self._f) | set(other._f)
        return ChainMap(self.source, self.target,
                        {n: f.sub(self[n], other[n]) for n in degrees}, check=False)

    def equals(self, other: "ChainMap") -> bool:
        degrees = set(self.source.dims) | set(other.source.dims)
        return all(self.field.equal(self[n], other[n]) for n in degrees)

    def cone(self) -> ChainComplex:
        """Mapping cone: ``cone_n = C_{n-1} ⊕ D_n``, ``d(c, x) = (-dc, f c + dx)``."""
        f = self.field
        src, tgt = self.source, self.target
        degrees = set(d + 1 for d in src.dims) | set(tgt.dims)
        dims = {n: src.dim(n - 1) + tgt.dim(n) for n in degrees}
        diffs = {}
        for n in degrees | {n + 1 for n in degrees}:
            diffs[n] = f.block([
                [f.neg(src.d(n - 1)), f.zeros(src.dim(n - 2), tgt.dim(n))],
                [self[n - 1], tgt.d(n)],
            ])
        return ChainComplex(f, dims, diffs, check=False)

    def is_quasi_iso(self) -> bool:
        return self.cone().is_acyclic()

    def is_iso(self) -> bool:
        for n in set(self.source.dims) | set(self.target.dims):
            if self.source.dim(n) != self.target.dim(n):
                return False
            if self.field.rank(self[n]) != self.source.dim(n):
                return False
        return True

    def homology_ranks(self) -> dict[int, int]:
        """Rank of the induced map on homology in each degree.

        Computed as ``dim(im f_n|Z_n + B_n) - dim B_n`` inside the target.
        """
        f = self.field
        out = {}
        for n in self.source.degree_range():
            z = f.nullspace(self.source.d(n))
            if z.shape[1] == 0:
                continue
            fz = f.matmul(self[n], z)
            b = self.target.d(n + 1)
            both = np.concatenate([fz, b], axis=1)
            r = f.rank(both) - f.rank(b)
            if r:
                out[n] = r
        return out


def as_field(p) -> Field:
    return p if isinstance(p, Field) else get_field(p)
