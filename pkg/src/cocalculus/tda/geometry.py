"""Point clouds, minimal enclosing balls and the Čech / Vietoris–Rips functions.

Radii are handled squared throughout so rational inputs stay exact: the
Čech function stores the squared radius of the smallest enclosing ball and
the Rips function the squared diameter. Codegree is unchanged by the
monotone reparametrisation ``r ↦ r²``.
"""
from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..diagram import CodegreeResult, ExtendedReals, PosetDiagram, is_codegree
from ..lattice import PowerSetLattice
from ..taylor import taylor_grid_fast


class GeometryError(ValueError):
    pass


@dataclass
class PointCloud:
    points: list[tuple]
    labels: list[str]
    exact: bool = True

    def __post_init__(self):
        if not self.points:
            raise GeometryError("point cloud is empty")
        if len(self.labels) != len(self.points):
            raise GeometryError("one label per point required")
        if len(set(self.labels)) != len(self.labels):
            raise GeometryError("point labels must be distinct")
        dims = {len(p) for p in self.points}
        if len(dims) != 1:
            raise GeometryError(f"points have mixed dimensions {sorted(dims)}")
        conv = Fraction if self.exact else float
        self.points = [tuple(conv(c) for c in p) for p in self.points]

    @classmethod
    def from_points(cls, points: Sequence[Sequence], labels=None, exact: bool = True) -> "PointCloud":
        labels = list(labels) if labels is not None else [f"p{i}" for i in range(len(points))]
        return cls([tuple(p) for p in points], labels, exact)

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def __len__(self):
        return len(self.points)

    def point(self, label):
        return self.points[self.labels.index(label)]

    def subset(self, labels) -> list[tuple]:
        pos = {l: i for i, l in enumerate(self.labels)}
        return [self.points[pos[l]] for l in labels]

    def value_lattice(self, tolerance: float = 1e-9) -> ExtendedReals:
        return ExtendedReals(exact=self.exact, tolerance=tolerance)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["label"] + [f"x{i}" for i in range(self.dimension)])
        for l, p in zip(self.labels, self.points):
            w.writerow([l] + [str(c) for c in p])
        return out.getvalue()


def _number(text: str, exact: bool):
    text = text.strip()
    return Fraction(text) if exact else float(text)


def parse_point_cloud(text: str, exact: bool = True) -> PointCloud:
    """Comma-separated rows, one point per row, optional header row.

    A header whose first field is ``label`` (or rows whose first field is
    not numeric) marks a label column.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(f.strip() for f in r)]
    rows = [r for r in rows if not r[0].lstrip().startswith("#")]
    if not rows:
        raise GeometryError("no points found")

    def numeric(f):
        try:
            _number(f, True)
            return True
        except (ValueError, ZeroDivisionError):
            return False

    has_labels = False
    first = rows[0]
    # a header has a keyword or a non-numeric coordinate field; "a,0,1" is a labelled point
    if (first[0].strip().lower() in ("label", "name", "id") or not all(numeric(f) for f in first[1:])
            or (len(first) == 1 and not numeric(first[0]))):
        has_labels = first[0].strip().lower() in ("label", "name", "id")
        rows = rows[1:]
    if rows and not numeric(rows[0][0]):
        has_labels = True
    points, labels = [], []
    for i, r in enumerate(rows):
        fields = r[1:] if has_labels else r
        try:
            points.append(tuple(_number(f, exact) for f in fields))
        except (ValueError, ZeroDivisionError):
            raise GeometryError(f"row {i + 1}: non-numeric coordinate") from None
        labels.append(r[0].strip() if has_labels else f"p{i}")
    return PointCloud(points, labels, exact)


def load_point_cloud(path: str, exact: bool = True) -> PointCloud:
    with open(path) as fh:
        return parse_point_cloud(fh.read(), exact)


# squared distances and balls ----------------------------------------------------------

def sqdist(p, q):
    return sum((a - b) * (a - b) for a, b in zip(p, q))


def _solve(a: list[list], b: list):
    """Gaussian elimination; ``None`` when the system is singular."""
    n = len(a)
    m = [row[:] + [bi] for row, bi in zip(a, b)]
    for c in range(n):
        piv = max(range(c, n), key=lambda i: abs(m[i][c]))
        if m[piv][c] == 0 or (isinstance(m[piv][c], float) and abs(m[piv][c]) < 1e-12):
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def circumball(support: Sequence[tuple]):
    """Smallest ball with every support point on its boundary.

    The centre lies in the affine hull: ``c = p0 + Σ λ_i (p_i - p0)`` with
    ``2 G λ = b`` for the Gram matrix ``G`` and ``b_i = |p_i - p0|²``.
    Returns ``(centre, r²)`` or ``None`` if the points are affinely dependent.
    """
    p0 = support[0]
    if len(support) == 1:
        return p0, p0[0] * 0
    vs = [tuple(a - b for a, b in zip(p, p0)) for p in support[1:]]
    gram = [[2 * sum(x * y for x, y in zip(u, v)) for v in vs] for u in vs]
    rhs = [sum(x * x for x in u) for u in vs]
    lam = _solve(gram, rhs)
    if lam is None:
        return None
    centre = tuple(c + sum(l * v[i] for l, v in zip(lam, vs)) for i, c in enumerate(p0))
    return centre, sqdist(centre, p0)


def _contains(ball, p, slack=0) -> bool:
    centre, r2 = ball
    return sqdist(centre, p) <= r2 + slack


def meb_welzl(points: Sequence[tuple], rng: random.Random | None = None):
    """Minimal enclosing ball ``(centre, r²)`` by Welzl's randomised recursion.

    Exact when the coordinates are Fractions. Duplicate points are dropped
    first so boundary sets stay affinely independent.
    """
    pts = list(dict.fromkeys(points))
    if not pts:
        raise GeometryError("empty point set")
    rng = rng or random.Random(0)
    rng.shuffle(pts)
    d = len(pts[0])
    slack = 0 if isinstance(pts[0][0], Fraction) else 1e-9

    def trivial(boundary):
        if not boundary:
            return None
        ball = circumball(boundary)
        if ball is None:
            raise GeometryError("degenerate boundary set")
        return ball

    def rec(n, boundary):
        if n == 0 or len(boundary) == d + 1:
            return trivial(boundary)
        p = pts[n - 1]
        ball = rec(n - 1, boundary)
        if ball is not None and _contains(ball, p, slack):
            return ball
        return rec(n - 1, boundary + [p])

    return rec(len(pts), [])


def meb_bruteforce(points: Sequence[tuple]):
    """Minimal enclosing ball by trying every support set of at most ``d + 1`` points."""
    pts = list(dict.fromkeys(points))
    d = len(pts[0])
    slack = 0 if isinstance(pts[0][0], Fraction) else 1e-9
    best = None
    for r in range(1, min(d + 1, len(pts)) + 1):
        for support in itertools.combinations(pts, r):
            ball = circumball(support)
            if ball is None:
                continue
            if all(_contains(ball, p, slack) for p in pts):
                if best is None or ball[1] < best[1]:
                    best = ball
    return best


def meb_radius_squared(points: Sequence[tuple], method: str = "welzl"):
    if method == "welzl":
        return meb_welzl(points)[1]
    if method == "bruteforce":
        return meb_bruteforce(points)[1]
    raise ValueError(f"unknown method {method!r}")


def diameter_squared(points: Sequence[tuple]):
    if len(points) < 2:
        return points[0][0] * 0 if points else 0
    return max(sqdist(p, q) for p, q in itertools.combinations(points, 2))


# filtration functions -------------------------------------------------------------------

def _subset_function(cloud: PointCloud, fn, tolerance: float) -> PosetDiagram:
    L = PowerSetLattice(cloud.labels)
    zero = Fraction(0) if cloud.exact else 0.0

    def value(u):
        if not u:
            return zero
        return fn(cloud.subset(L.sorted_vertices(u)))

    return PosetDiagram.ordered(L, value, value_lattice=cloud.value_lattice(tolerance))


def cech_function(cloud: PointCloud, method: str = "welzl", tolerance: float = 1e-9) -> PosetDiagram:
    """``U ↦ r(U)²``, the squared radius of the smallest ball containing ``U``."""
    return _subset_function(cloud, lambda pts: meb_radius_squared(pts, method), tolerance)


def vr_function(cloud: PointCloud, tolerance: float = 1e-9) -> PosetDiagram:
    """``U ↦ diam(U)²``."""
    return _subset_function(cloud, diameter_squared, tolerance)


@dataclass
class IdentityReport:
    holds: bool
    checked: int
    failures: list      # (subset, 4·T_2 value, diam² value)

    def __bool__(self):
        return self.holds


def verify_vr_identity(cloud: PointCloud, tolerance: float = 1e-9) -> IdentityReport:
    """Check ``diam(U)² = 4 · T_2(r²)(U)`` on every subset ``U``.

    ``T_2`` is computed by the Taylor construction on the power set; on
    squared values the identity ``diam = 2 · T_2 r`` reads as above since
    squaring commutes with suprema of nonnegative numbers.
    """
    cech = cech_function(cloud, tolerance=tolerance)
    vr = vr_function(cloud, tolerance=tolerance)
    t2 = taylor_grid_fast(cech, 2).approx
    vl = cech.value_lattice
    failures = []
    L = cech.lattice
    for u in L.elements:
        lhs = 4 * t2.value(u)
        rhs = vr.value(u)
        if not vl.equal(lhs, rhs):
            failures.append((L.format_element(u), lhs, rhs))
    return IdentityReport(not failures, len(L.elements), failures)


def cech_codegree_bound(cloud: PointCloud, tolerance: float = 1e-9) -> CodegreeResult:
    """Whether the Čech function of a cloud in ``ℝ^d`` is codegree ``d + 1``."""
    return is_codegree(cech_function(cloud, tolerance=tolerance), cloud.dimension + 1)


def random_cloud(rng: random.Random, npoints: int, dim: int, denominator: int = 8,
                 span: int = 4) -> PointCloud:
    """Points with coordinates in ``[0, span]`` on a ``1/denominator`` lattice."""
    pts = set()
    while len(pts) < npoints:
        pts.add(tuple(Fraction(rng.randint(0, span * denominator), denominator) for _ in range(dim)))
    return PointCloud.from_points(sorted(pts))


HELLY_FAILURE = PointCloud.from_points([(0, 0), (2, 0), (1, 2), (5, 5)])
