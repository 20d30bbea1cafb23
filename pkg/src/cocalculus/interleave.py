"""Translations, interleaving certificates and one-parameter barcodes.

Modules over ``ℝ_{≥0}^n`` are modelled as right-constant modules on a finite
grid of critical values: grid index ``i`` on an axis stands for the
half-open range ``[a_i, a_{i+1})`` of that axis, with ``a_0 = 0``.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .decomposition import jdim
from .diagram import PosetDiagram, TargetKind
from .homalg.field import Field
from .lattice import GridLattice
from .taylor import TaylorLayer, taylor


class InterleavingError(ValueError):
    pass


# annotated grids -------------------------------------------------------------------------

@dataclass(frozen=True)
class GridAnnotation:
    """Per-axis critical values for indices ``1..h-1``; index 0 is the value 0."""
    axes: tuple

    def __init__(self, axes: Sequence[Sequence]):
        norm = []
        for ax in axes:
            vals = tuple(Fraction(v) for v in ax)
            if any(v <= 0 for v in vals):
                raise InterleavingError("critical values must be positive")
            if any(a >= b for a, b in zip(vals, vals[1:])):
                raise InterleavingError("critical values must be strictly increasing")
            norm.append(vals)
        object.__setattr__(self, "axes", tuple(norm))

    @property
    def lattice(self) -> GridLattice:
        return GridLattice([len(a) + 1 for a in self.axes])

    def value(self, axis: int, index: int) -> Fraction:
        return Fraction(0) if index == 0 else self.axes[axis][index - 1]

    def coordinates(self, x) -> tuple:
        return tuple(self.value(i, c) for i, c in enumerate(x))

    def floor_index(self, axis: int, t) -> int:
        """Largest index whose value is at most ``t``."""
        best = 0
        for i, v in enumerate(self.axes[axis], start=1):
            if v <= t:
                best = i
        return best

    def to_json(self) -> list:
        return [[str(v) for v in ax] for ax in self.axes]

    @classmethod
    def from_json(cls, data) -> "GridAnnotation":
        return cls(data)


def exp_scale(eps) -> Fraction:
    """``e^ε`` as a rational, snapped to the nearest fraction with a bounded denominator."""
    eps = float(eps)
    if eps < 0:
        raise InterleavingError("ε must be nonnegative")
    if eps == 0:
        return Fraction(1)
    return Fraction(math.exp(eps)).limit_denominator(10**12)


# translations --------------------------------------------------------------------------

@dataclass
class Translation:
    """A monotone self-map ``Γ`` of a grid with ``x ≤ Γ(x)``."""
    lattice: GridLattice
    image: dict
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.image[x]

    def power(self, m: int) -> "Translation":
        img = {x: x for x in self.lattice.elements}
        for _ in range(m):
            img = {x: self.image[y] for x, y in img.items()}
        return Translation(self.lattice, img, f"{self.kind}^{m}", dict(self.params))

    def then(self, other: "Translation") -> "Translation":
        """``other ∘ self``."""
        img = {x: other.image[self.image[x]] for x in self.lattice.elements}
        return Translation(self.lattice, img, "composite", {})

    def check(self) -> list[str]:
        L = self.lattice
        out = []
        for x in L.elements:
            if not L.leq(x, self.image[x]):
                out.append(f"{L.format_element(x)} is not below its image")
        for u, w in L.cover_pairs():
            if not L.leq(self.image[u], self.image[w]):
                out.append(f"not monotone on {L.format_element(u)} ≤ {L.format_element(w)}")
        return out

    def leq(self, other: "Translation") -> bool:
        return all(self.lattice.leq(self.image[x], other.image[x]) for x in self.lattice.elements)

    def preserves_jdim(self, k: int) -> bool:
        L = self.lattice
        return all(jdim(L, self.image[x]) <= k for x in L.elements if jdim(L, x) <= k)

    def is_identity(self) -> bool:
        return all(self.image[x] == x for x in self.lattice.elements)

    def to_json(self) -> dict:
        if self.kind in ("lambda", "shift"):
            return {"kind": self.kind, **self.params}
        return {"kind": "custom", "heights": list(self.lattice.heights),
                "image": [[list(x), list(y)] for x, y in self.image.items()]}


def identity_translation(L: GridLattice) -> Translation:
    return Translation(L, {x: x for x in L.elements}, "identity")


def shift_translation(L: GridLattice, shift: Sequence[int]) -> Translation:
    """``x ↦ x + shift``, clamped at the top of each axis."""
    if len(shift) != len(L.heights) or any(s < 0 for s in shift):
        raise InterleavingError("shift must be a nonnegative vector with one entry per axis")
    img = {x: tuple(min(c + s, h - 1) for c, s, h in zip(x, shift, L.heights)) for x in L.elements}
    return Translation(L, img, "shift", {"shift": list(shift), "heights": list(L.heights)})


def lambda_translation(ann: GridAnnotation, eps=0, scale=None) -> Translation:
    """``Λ_ε``: each coordinate is multiplied by ``e^ε`` and rounded down to the grid."""
    s = Fraction(scale) if scale is not None else exp_scale(eps)
    if s < 1:
        raise InterleavingError("scale must be at least 1")
    L = ann.lattice
    per_axis = [[ann.floor_index(i, s * ann.value(i, c)) for c in range(h)]
                for i, h in enumerate(L.heights)]
    img = {x: tuple(per_axis[i][c] for i, c in enumerate(x)) for x in L.elements}
    params = {"annotation": ann.to_json(), "scale": str(s)}
    if scale is None:
        params["eps"] = float(eps)
    return Translation(L, img, "lambda", params)


def translation_from_json(data: dict) -> Translation:
    kind = data["kind"]
    if kind == "lambda":
        t = lambda_translation(GridAnnotation.from_json(data["annotation"]),
                               scale=Fraction(data["scale"]))
        if "eps" in data:
            t.params["eps"] = data["eps"]
        return t
    if kind == "shift":
        return shift_translation(GridLattice(data["heights"]), data["shift"])
    L = GridLattice(data["heights"])
    return Translation(L, {tuple(x): tuple(y) for x, y in data["image"]})


# certificates --------------------------------------------------------------------------

@dataclass
class InterleavingCertificate:
    """``φ_x : F(x) → G(Γx)`` and ``ψ_x : G(x) → F(Γx)`` for every ``x``."""
    gamma: Translation
    phi: dict
    psi: dict

    def to_json(self, fld: Field) -> dict:
        L = self.gamma.lattice

        def mat(m):
            return [[fld.format_scalar(v) for v in row] for row in m.tolist()]

        return {"translation": self.gamma.to_json(),
                "phi": {L.format_element(x): {"shape": list(m.shape), "entries": mat(m)}
                        for x, m in self.phi.items()},
                "psi": {L.format_element(x): {"shape": list(m.shape), "entries": mat(m)}
                        for x, m in self.psi.items()}}

    @classmethod
    def from_json(cls, data: dict, fld: Field) -> "InterleavingCertificate":
        gamma = translation_from_json(data["translation"])
        L = gamma.lattice

        def load(block):
            return {L.parse_element(k): fld.array([[fld.parse_scalar(v) for v in row]
                                                   for row in m["entries"]], tuple(m["shape"]))
                    for k, m in block.items()}

        return cls(gamma, load(data["phi"]), load(data["psi"]))

    def dumps(self, fld: Field) -> str:
        return json.dumps(self.to_json(fld), indent=1, sort_keys=True) + "\n"


@dataclass
class CertificateCheck:
    holds: bool
    violations: list

    def __bool__(self):
        return self.holds


def _require_vect(*ds: PosetDiagram):
    for d in ds:
        if d.target != TargetKind.VECT:
            raise InterleavingError("interleavings are checked for vector-space diagrams")


def verify_certificate(F: PosetDiagram, G: PosetDiagram, gamma: Translation,
                       cert: InterleavingCertificate) -> CertificateCheck:
    """Exact check of shapes, naturality of ``φ`` and ``ψ`` and both composite
    conditions ``ψ_{Γx} φ_x = F(x ≤ Γ²x)`` and ``φ_{Γx} ψ_x = G(x ≤ Γ²x)``."""
    _require_vect(F, G)
    if F.lattice != G.lattice or gamma.lattice != F.lattice:
        raise InterleavingError("diagrams and translation must share the grid")
    L = F.lattice
    fld = F.field
    g = gamma.image
    fmt = L.format_element
    bad = [f"translation: {p}" for p in gamma.check()]
    for name, maps, src, dst in (("phi", cert.phi, F, G), ("psi", cert.psi, G, F)):
        for x in L.elements:
            m = maps.get(x)
            if m is None:
                bad.append(f"{name} missing at {fmt(x)}")
            elif m.shape != (dst.dim(g[x]), src.dim(x)):
                bad.append(f"{name} at {fmt(x)} has shape {m.shape}, "
                           f"expected {(dst.dim(g[x]), src.dim(x))}")
    if bad:
        return CertificateCheck(False, bad)
    for name, maps, src, dst in (("phi", cert.phi, F, G), ("psi", cert.psi, G, F)):
        for u, w in L.cover_pairs():
            lhs = fld.matmul(dst.map(g[u], g[w]), maps[u])
            rhs = fld.matmul(maps[w], src.map(u, w))
            if not fld.equal(lhs, rhs):
                bad.append(f"{name} not natural on {fmt(u)} ≤ {fmt(w)}")
    for name, first, second, D in (("psi∘phi", cert.phi, cert.psi, F),
                                   ("phi∘psi", cert.psi, cert.phi, G)):
        for x in L.elements:
            lhs = fld.matmul(second[g[x]], first[x])
            if not fld.equal(lhs, D.map(x, g[g[x]])):
                bad.append(f"{name} differs from the transition map at {fmt(x)}")
    return CertificateCheck(not bad, bad)


def identity_certificate(F: PosetDiagram) -> InterleavingCertificate:
    L = F.lattice
    ident = {x: F.identity(x) for x in L.elements}
    return InterleavingCertificate(identity_translation(L), ident, dict(ident))


def shifted_module(F: PosetDiagram, gamma: Translation) -> PosetDiagram:
    """``F ∘ Γ``."""
    L = F.lattice
    g = gamma.image
    return PosetDiagram.vect(L, F.field, {x: F.dim(g[x]) for x in L.elements},
                             {(u, w): F.map(g[u], g[w]) for u, w in L.cover_pairs()})


def _random_invertible(rng: random.Random, fld: Field, n: int) -> np.ndarray:
    while True:
        m = fld.random_matrix(rng, n, n)
        if fld.rank(m) == n:
            return m


def conjugate(G: PosetDiagram, bases: dict) -> PosetDiagram:
    """Isomorphic copy of ``G`` with ``G'(u ≤ w) = B_w G(u ≤ w) B_u^{-1}``."""
    fld = G.field
    L = G.lattice
    inv = {x: fld.inv(b) for x, b in bases.items()}
    return PosetDiagram.vect(L, fld, {x: G.dim(x) for x in L.elements},
                             {(u, w): fld.mul(bases[w], G.edge(u, w), inv[u])
                              for u, w in L.cover_pairs()})


def shift_pair(F: PosetDiagram, gamma: Translation, rng: random.Random | None = None):
    """``(G, cert)`` with ``G ≅ F ∘ Γ`` and a ``Γ``-interleaving between ``F`` and ``G``.

    On ``F ∘ Γ`` the certificate is ``φ_x = F(x ≤ Γ²x)`` and ``ψ_x = id``; with
    ``rng`` the shifted module is further conjugated by random isomorphisms.
    """
    _require_vect(F)
    L = F.lattice
    fld = F.field
    g = gamma.image
    G = shifted_module(F, gamma)
    phi = {x: F.map(x, g[g[x]]) for x in L.elements}
    psi = {x: F.identity(g[x]) for x in L.elements}
    if rng is not None:
        bases = {x: _random_invertible(rng, fld, G.dim(x)) for x in L.elements}
        inv = {x: fld.inv(b) for x, b in bases.items()}
        G = conjugate(G, bases)
        phi = {x: fld.matmul(bases[g[x]], phi[x]) for x in L.elements}
        psi = {x: fld.matmul(psi[x], inv[x]) for x in L.elements}
    return G, InterleavingCertificate(gamma, phi, psi)


def weaken_certificate(F: PosetDiagram, G: PosetDiagram, cert: InterleavingCertificate,
                       bigger: Translation) -> InterleavingCertificate:
    """Push a ``Γ``-interleaving to any translation ``Γ' ≥ Γ``."""
    if not cert.gamma.leq(bigger):
        raise InterleavingError("target translation is not above the certificate's")
    fld = F.field
    g, h = cert.gamma.image, bigger.image
    L = F.lattice
    phi = {x: fld.matmul(G.map(g[x], h[x]), cert.phi[x]) for x in L.elements}
    psi = {x: fld.matmul(F.map(g[x], h[x]), cert.psi[x]) for x in L.elements}
    return InterleavingCertificate(bigger, phi, psi)


def compose_certificates(F: PosetDiagram, G: PosetDiagram, H: PosetDiagram,
                         fg: InterleavingCertificate, gh: InterleavingCertificate,
                         target: Translation) -> InterleavingCertificate:
    """An ``F``–``H`` interleaving from ``F``–``G`` and ``G``–``H`` ones.

    ``target`` must lie above both ``Γ_2 Γ_1`` and ``Γ_1 Γ_2``; for ``Λ``
    translations ``Λ_{a+b}`` does.
    """
    fld = F.field
    g1, g2, t = fg.gamma.image, gh.gamma.image, target.image
    L = F.lattice
    for x in L.elements:
        if not (L.leq(g2[g1[x]], t[x]) and L.leq(g1[g2[x]], t[x])):
            raise InterleavingError("target translation is too small for the composite")
    phi = {x: fld.mul(H.map(g2[g1[x]], t[x]), gh.phi[g1[x]], fg.phi[x]) for x in L.elements}
    psi = {x: fld.mul(F.map(g1[g2[x]], t[x]), fg.psi[g2[x]], gh.psi[x]) for x in L.elements}
    return InterleavingCertificate(target, phi, psi)


# induced certificates on Taylor layers ---------------------------------------------------

def _induced_side(TF: TaylorLayer, TG: TaylorLayer, gamma: Translation, maps: dict) -> dict:
    g = gamma.image
    fld = TF.source.field
    out = {}
    for x in TF.source.lattice.elements:
        target = TG.colimits[g[x]]
        out[x] = TF.colimits[x].induced(lambda q, x=x: fld.matmul(target.leg(g[q]), maps[q]),
                                        target.dim)
    return out


def induced_taylor_certificate(F: PosetDiagram, G: PosetDiagram, cert: InterleavingCertificate,
                               k: int, TF: TaylorLayer | None = None,
                               TG: TaylorLayer | None = None):
    """Interleaving of ``T_k F`` and ``T_k G`` induced from one of ``F`` and ``G``.

    ``φ̂_x`` is the map out of the colimit ``T_k F(x)`` given by the cocone
    ``q ↦ λ^{G, Γx}_{Γq} ∘ φ_q``; this needs ``Γ`` to keep elements of
    join-dimension at most ``k`` inside that set. Returns
    ``(certificate, T_k F, T_k G)``.
    """
    _require_vect(F, G)
    gamma = cert.gamma
    if not gamma.preserves_jdim(k):
        raise InterleavingError(f"translation does not preserve join-dimension ≤ {k}")
    TF = TF if TF is not None else taylor(F, k)
    TG = TG if TG is not None else taylor(G, k)
    if TF.fast or TG.fast:
        raise InterleavingError("induced certificates need full-index Taylor layers")
    phi = _induced_side(TF, TG, gamma, cert.phi)
    psi = _induced_side(TG, TF, gamma, cert.psi)
    return InterleavingCertificate(gamma, phi, psi), TF, TG


def eps_compatibility(TF: TaylorLayer, TG: TaylorLayer, cert: InterleavingCertificate,
                      induced: InterleavingCertificate) -> list[str]:
    """Places where ``ε^G_{Γx} φ̂_x ≠ φ_x ε^F_x`` (or the same for ``ψ``)."""
    fld = TF.source.field
    g = cert.gamma.image
    L = TF.source.lattice
    bad = []
    for name, A, B, orig, ind in (("phi", TF, TG, cert.phi, induced.phi),
                                  ("psi", TG, TF, cert.psi, induced.psi)):
        for x in L.elements:
            lhs = fld.matmul(B.eps[g[x]], ind[x])
            rhs = fld.matmul(orig[x], A.eps[x])
            if not fld.equal(lhs, rhs):
                bad.append(f"{name} at {L.format_element(x)}")
    return bad


def certificate_bound(cert: InterleavingCertificate):
    """``ε`` recorded on a ``Λ``-certificate, or ``None`` for other translations."""
    if cert.gamma.kind != "lambda":
        return None
    return math.log(Fraction(cert.gamma.params["scale"]))


def layer_bounds(F: PosetDiagram, G: PosetDiagram, cert: InterleavingCertificate,
                 ks: Sequence[int]) -> dict:
    """For each ``k``, whether the induced certificate on ``(T_k F, T_k G)`` verifies."""
    out = {}
    for k in ks:
        ind, TF, TG = induced_taylor_certificate(F, G, cert, k)
        out[k] = verify_certificate(TF.approx, TG.approx, cert.gamma, ind).holds
    return out


# one-parameter barcodes ------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Bar:
    """Bar over grid indices ``birth..death`` inclusive; ``death = None`` runs to the end."""
    birth: int
    death: int | None

    def interval(self, ann: GridAnnotation, axis: int = 0) -> tuple:
        lo = ann.value(axis, self.birth)
        hi = math.inf if self.death is None else ann.value(axis, self.death + 1)
        return lo, hi


def _require_line(F: PosetDiagram):
    _require_vect(F)
    if not isinstance(F.lattice, GridLattice) or len(F.lattice.heights) != 1:
        raise InterleavingError("barcodes need a module on a single-axis grid")


def barcode_1d(F: PosetDiagram) -> list[Bar]:
    """Interval decomposition by the elder rule.

    A basis of ``F(i)`` is kept with a birth index per vector. Images in
    ``F(i+1)`` are scanned from oldest to youngest; one that lies in the
    span of older images dies at ``i``, new vectors completing the basis are
    born at ``i + 1``.
    """
    _require_line(F)
    fld = F.field
    h = F.lattice.heights[0]
    bars = []
    basis = fld.eye(F.dim((0,)))
    births = [0] * basis.shape[1]
    for i in range(h):
        if i == h - 1:
            bars.extend(Bar(b, None) for b in births)
            break
        m = F.map((i,), (i + 1,))
        images = fld.matmul(m, basis)
        order = sorted(range(len(births)), key=lambda j: births[j])
        kept_cols, kept_births = [], []
        for j in order:
            col = images[:, j:j + 1]
            span = np.concatenate(kept_cols, axis=1) if kept_cols else fld.zeros(col.shape[0], 0)
            if fld.rank(np.concatenate([span, col], axis=1)) == span.shape[1]:
                bars.append(Bar(births[j], i))
            else:
                kept_cols.append(col)
                kept_births.append(births[j])
        dim_next = F.dim((i + 1,))
        span = np.concatenate(kept_cols, axis=1) if kept_cols else fld.zeros(dim_next, 0)
        new_births = list(kept_births)
        eye = fld.eye(dim_next)
        for c in range(dim_next):
            trial = np.concatenate([span, eye[:, c:c + 1]], axis=1)
            if fld.rank(trial) > span.shape[1]:
                span = trial
                new_births.append(i + 1)
        basis, births = span, new_births
    return sorted(bars, key=lambda b: (b.birth, math.inf if b.death is None else b.death))


def barcode_intervals(F: PosetDiagram, ann: GridAnnotation) -> list[tuple]:
    return [b.interval(ann) for b in barcode_1d(F)]


def interval_module(ann: GridAnnotation, bars: Sequence[Bar], fld: Field) -> PosetDiagram:
    """Direct sum of interval modules on a single annotated axis."""
    L = ann.lattice
    h = L.heights[0]

    def alive(b, i):
        return b.birth <= i and (b.death is None or i <= b.death)

    dims = {(i,): sum(alive(b, i) for b in bars) for i in range(h)}
    maps = {}
    for i in range(h - 1):
        src = [j for j, b in enumerate(bars) if alive(b, i)]
        dst = [j for j, b in enumerate(bars) if alive(b, i + 1)]
        m = fld.zeros(len(dst), len(src))
        for c, j in enumerate(src):
            if j in dst:
                m[dst.index(j), c] = fld.scalar(1)
        maps[((i,), (i + 1,))] = m
    return PosetDiagram.vect(L, fld, dims, maps)


def _log(t) -> float:
    if t == 0:
        return -math.inf
    if t == math.inf:
        return math.inf
    return math.log(t)


def _match_cost(a: tuple, b: tuple) -> float:
    out = 0.0
    for s, t in zip(a, b):
        ls, lt = _log(s), _log(t)
        if ls == lt:
            continue
        out = max(out, abs(ls - lt))
    return out


def _delete_cost(a: tuple) -> float:
    lo, hi = _log(a[0]), _log(a[1])
    return (hi - lo) / 2


def bottleneck_log(A: Sequence[tuple], B: Sequence[tuple]) -> float:
    """Bottleneck distance between interval lists with ``|log|`` endpoint costs.

    An interval left unmatched costs half its log-length.
    """
    n, m = len(A), len(B)
    if n + m == 0:
        return 0.0
    size = n + m
    cost = np.full((size, size), math.inf)
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            cost[i, j] = _match_cost(a, b)
        cost[i, m + i] = _delete_cost(a)
    for j, b in enumerate(B):
        cost[n + j, j] = _delete_cost(b)
    cost[n:, m:] = 0.0
    candidates = sorted(set(float(c) for c in cost.ravel()))
    finite = [c for c in candidates if c != math.inf]

    def feasible(delta):
        allowed = np.where(cost <= delta + 1e-12, 0.0, 1.0)
        r, c = linear_sum_assignment(allowed)
        return allowed[r, c].sum() == 0

    lo, hi = 0, len(finite) - 1
    if not finite or not feasible(finite[-1]):
        return math.inf
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(finite[mid]):
            hi = mid
        else:
            lo = mid + 1
    return finite[lo]


def multiplicative_distance_1d(F: PosetDiagram, G: PosetDiagram, ann: GridAnnotation,
                               ann_g: GridAnnotation | None = None) -> float:
    """Multiplicative interleaving distance of two one-parameter modules."""
    _require_line(F)
    _require_line(G)
    return bottleneck_log(barcode_intervals(F, ann), barcode_intervals(G, ann_g or ann))


def random_line_module(rng: random.Random, h: int, fld: Field, max_dim: int = 3,
                       density: float = 0.6) -> PosetDiagram:
    """Random one-parameter module: random dimensions and random maps."""
    L = GridLattice([h])
    dims = {(i,): rng.randint(0, max_dim) for i in range(h)}
    maps = {((i,), (i + 1,)): fld.random_matrix(rng, dims[(i + 1,)], dims[(i,)], density)
            for i in range(h - 1)}
    return PosetDiagram.vect(L, fld, dims, maps)


def random_annotation(rng: random.Random, heights: Sequence[int], denominator: int = 4) -> GridAnnotation:
    axes = []
    for h in heights:
        vals = sorted(rng.sample(range(1, 8 * denominator * h), h - 1))
        axes.append([Fraction(v, denominator) for v in vals])
    return GridAnnotation(axes)


def geometric_annotation(heights: Sequence[int], ratio=2, start=1) -> GridAnnotation:
    """Critical values ``start·ratio^i``; ``Λ_{ln ratio}`` is then a one-step shift."""
    return GridAnnotation([[Fraction(start) * Fraction(ratio) ** i for i in range(h - 1)]
                           for h in heights])
