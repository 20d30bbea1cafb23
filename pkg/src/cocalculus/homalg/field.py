"""Exact linear algebra over a prime field GF(p) or the rationals.

Matrices are plain numpy arrays: ``int64`` with entries in ``[0, p)`` for
GF(p), ``object`` arrays of :class:`fractions.Fraction` for the rationals.
Every routine returns fresh arrays and never mutates its arguments.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """A coefficient field: ``Field(p)`` for GF(p), ``Field(None)`` for QQ."""

    def __init__(self, p: int | None = 2):
        if p is not None:
            p = int(p)
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p >= 2**31:
                raise ValueError("prime must be below 2**31")
        self.p = p

    # identity -----------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def name(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def dtype(self):
        return object if self.p is None else np.int64

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.p!r})"

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Accepts ``"2"``, ``"GF(5)"``, ``"Q"``, ``"QQ"`` or ``"rational"``."""
        t = str(text).strip().lower()
        if t in ("q", "qq", "rational", "rationals"):
            return cls(None)
        if t.startswith("gf(") and t.endswith(")"):
            t = t[3:-1]
        return cls(int(t))

    # scalars -------------------------------------------------------------
    def scalar(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            num = x.numerator % self.p
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"{x} has no image in {self.name}")
            return (num * pow(den, -1, self.p)) % self.p
        return int(x) % self.p

    def format_scalar(self, x) -> int | str:
        if self.p is None:
            x = Fraction(x)
            return str(x) if x.denominator != 1 else x.numerator
        return int(x)

    def parse_scalar(self, x):
        if self.p is None and isinstance(x, str):
            return Fraction(x)
        return self.scalar(x)

    # construction --------------------------------------------------------
    def array(self, data, shape: tuple[int, int] | None = None) -> np.ndarray:
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return self.zeros(*shape)
        if self.p is None:
            rows = [[Fraction(v) for v in row] for row in data]
            out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
            for i, row in enumerate(rows):
                for j, v in enumerate(row):
                    out[i, j] = v
        else:
            out = np.array(data, dtype=object)
            if out.ndim != 2:
                out = out.reshape(len(data), -1)
            out = np.array([[self.scalar(v) for v in row] for row in out],
                           dtype=np.int64).reshape(out.shape)
        if shape is not None and out.shape != tuple(shape):
            out = out.reshape(shape)
        return out

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        if self.p is None:
            out = np.empty((rows, cols), dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = Fraction(1) if self.p is None else 1
        return out

    def random_matrix(self, rng, rows: int, cols: int, density: float = 1.0) -> np.ndarray:
        """Random matrix drawn from a :class:`random.Random` instance."""
        out = self.zeros(rows, cols)
        lo, hi = (-2, 2) if self.p is None else (0, self.p - 1)
        for i in range(rows):
            for j in range(cols):
                if rng.random() < density:
                    out[i, j] = self.scalar(rng.randint(lo, hi))
        return out

    # arithmetic ----------------------------------------------------------
    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        if self.p is None:
            return a.dot(b)
        if a.shape[1] * (self.p - 1) ** 2 < 2**62:
            return (a @ b) % self.p
        prod = a.astype(object).dot(b.astype(object))
        return np.array(prod % self.p, dtype=np.int64)

    def mul(self, *mats: np.ndarray) -> np.ndarray:
        """Product of matrices read right to left as composition."""
        out = mats[-1]
        for m in reversed(mats[:-1]):
            out = self.matmul(m, out)
        return out

    def add(self, a, b):
        if self.p is None:
            return a + b
        return (a + b) % self.p

    def sub(self, a, b):
        if self.p is None:
            return a - b
        return (a - b) % self.p

    def neg(self, a):
        if self.p is None:
            return -a
        return (-a) % self.p

    def scale(self, c, a):
        c = self.scalar(c)
        if self.p is None:
            return a * c
        return (a * c) % self.p

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.any(a != 0)

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and not np.any(a != b)

    def block(self, rows: list[list[np.ndarray]]) -> np.ndarray:
        """Assemble a block matrix; every block must already have its shape."""
        if not rows:
            return self.zeros(0, 0)
        heights = [r[0].shape[0] for r in rows]
        widths = [b.shape[1] for b in rows[0]]
        out = self.zeros(sum(heights), sum(widths))
        r0 = 0
        for h, row in zip(heights, rows):
            c0 = 0
            for w, blk in zip(widths, row):
                if blk.shape != (h, w):
                    raise ValueError("inconsistent block shapes")
                out[r0:r0 + h, c0:c0 + w] = blk
                c0 += w
            r0 += h
        return out

    # elimination ---------------------------------------------------------
    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and the list of pivot columns."""
        m = a.copy()
        nrows, ncols = m.shape
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            nz = np.nonzero(m[r:, c] != 0)[0]
            if len(nz) == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                m[[r, i]] = m[[i, r]]
            if self.p is None:
                m[r] = m[r] / m[r, c]
                col = m[:, c].copy()
                col[r] = Fraction(0)
                m = m - np.outer(col, m[r])
            else:
                inv = pow(int(m[r, c]), -1, self.p)
                m[r] = (m[r] * inv) % self.p
                col = m[:, c].copy()
                col[r] = 0
                m = (m - np.outer(col, m[r])) % self.p
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self, a: np.ndarray) -> int:
        if a.shape[0] == 0 or a.shape[1] == 0:
            return 0
        if self.p is None:
            return _bareiss_rank(a)
        if self.p == 2:
            return _gf2_rank(a)
        return len(self.rref(a)[1])

    def nullspace(self, a: np.ndarray) -> np.ndarray:
        """Matrix whose columns form a basis of ``ker a``."""
        ncols = a.shape[1]
        if a.shape[0] == 0:
            return self.eye(ncols)
        r, pivots = self.rref(a)
        free = [c for c in range(ncols) if c not in set(pivots)]
        out = self.zeros(ncols, len(free))
        one = Fraction(1) if self.p is None else 1
        for j, f in enumerate(free):
            out[f, j] = one
            for i, pc in enumerate(pivots):
                out[pc, j] = self.neg(r[i, f])
        return out

    def left_nullspace(self, a: np.ndarray) -> np.ndarray:
        """Matrix whose rows form a basis of ``{y : y a = 0}``."""
        return self.nullspace(a.T).T.copy()

    def colspace(self, a: np.ndarray) -> np.ndarray:
        """Columns of ``a`` forming a basis of its column space."""
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], 0)
        _, pivots = self.rref(a)
        return a[:, pivots].copy()

    def inv(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix is not square")
        if n == 0:
            return self.zeros(0, 0)
        r, pivots = self.rref(np.concatenate([a, self.eye(n)], axis=1))
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return r[:, n:].copy()

    def right_inverse(self, a: np.ndarray) -> np.ndarray:
        """``X`` with ``a @ X == I`` for a matrix of full row rank."""
        m, n = a.shape
        if m == 0:
            return self.zeros(n, 0)
        _, pivots = self.rref(a)
        if len(pivots) != m:
            raise ValueError("matrix does not have full row rank")
        sub_inv = self.inv(a[:, pivots])
        out = self.zeros(n, m)
        out[pivots, :] = sub_inv
        return out

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """One solution ``X`` of ``a X = b``, or ``None`` if inconsistent."""
        m, n = a.shape
        k = b.shape[1]
        if m == 0:
            return self.zeros(n, k)
        r, pivots = self.rref(np.concatenate([a, b], axis=1))
        if any(p >= n for p in pivots):
            return None
        out = self.zeros(n, k)
        for i, pc in enumerate(pivots):
            out[pc, :] = r[i, n:]
        return out

    def in_span(self, a: np.ndarray, b: np.ndarray) -> bool:
        """Whether every column of ``b`` lies in the column space of ``a``."""
        return self.solve(a, b) is not None


def _gf2_rank(a: np.ndarray) -> int:
    """Rank over GF(2) with rows packed into Python integers."""
    if a.shape[0] < a.shape[1]:
        a = a.T
    weights = 1 << np.arange(a.shape[1], dtype=object)
    rows = [int(r) for r in (a.astype(object) * weights).sum(axis=1)] if a.shape[1] else []
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def _bareiss_rank(a: np.ndarray) -> int:
    """Fraction-free rank of a rational matrix (rows cleared to integers)."""
    rows = []
    for row in a:
        den = lcm(*[Fraction(v).denominator for v in row]) if len(row) else 1
        rows.append([int(Fraction(v) * den) for v in row])
    m = rows
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        piv = next((i for i in range(rank, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for i in range(rank + 1, nrows):
            ri = m[i]
            a_ic = ri[c]
            m[i] = [(pr[c] * ri[j] - a_ic * pr[j]) // prev for j in range(ncols)]
        prev = pr[c]
        rank += 1
    return rank


@lru_cache(maxsize=None)
def field(p: int | None = 2) -> Field:
    """Shared field instance."""
    return Field(p)


GF2 = field(2)
QQ = field(None)
