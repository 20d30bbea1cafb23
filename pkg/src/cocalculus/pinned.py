"""The pinned example diagrams, each compared with its expected values."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fixtures
from .diagram import codegree_lower_bound, is_codegree
from .homalg.field import Field, GF2
from .taylor import taylor


@dataclass
class PinnedCheck:
    name: str
    ok: bool
    detail: str


def _check(name, ok, detail="") -> PinnedCheck:
    return PinnedCheck(name, bool(ok), detail)


def check_codegrees(fld: Field) -> list[PinnedCheck]:
    out = []
    for name, make, expected in (("deg_1", fixtures.one_variable_square, 1),
                                 ("deg_2", fixtures.three_corner_square, 2),
                                 ("direct_sum", fixtures.direct_sum_square, 1)):
        got = codegree_lower_bound(make(fld))
        out.append(_check(f"{name}.codegree", got == expected, f"expected {expected}, got {got}"))
    res = is_codegree(fixtures.three_corner_square(fld), 1)
    out.append(_check("deg_2.codegree1_witness", not res.holds and res.witness is not None,
                      res.detail))
    return out


def check_coproduct(fld: Field) -> list[PinnedCheck]:
    """``T_1`` of the three-corner square is ``𝔽 ⊕ 𝔽`` at the top with the
    two legs forming a basis and ``eps`` the fold map."""
    F = fixtures.three_corner_square(fld)
    T = taylor(F, 1)
    top = (1, 1)
    dim = T.approx.dim(top)
    out = [_check("deg_2.T1_dim", dim == 2, f"dim {dim}")]
    if dim != 2:
        return out
    legs = np.concatenate([T.approx.map((1, 0), top), T.approx.map((0, 1), top)], axis=1)
    out.append(_check("deg_2.T1_legs_basis", fld.rank(legs) == 2, str(legs.tolist())))
    fold = fld.matmul(T.eps[top], legs)
    out.append(_check("deg_2.T1_eps_fold", fld.equal(fold, fld.array([[1, 1]])), str(fold.tolist())))
    return out


def check_chain_circle(fld: Field) -> list[PinnedCheck]:
    """``S^0`` at the bottom of the square: ``T_1`` at the top is a circle."""
    F = fixtures.point_sphere_square(fld)
    T = taylor(F, 1)
    hom = T.approx.value((1, 1)).homology()
    out = [_check("chain_circle.T1_homology", hom == {1: 1}, str(hom))]
    res = is_codegree(T.approx, 1)
    out.append(_check("chain_circle.T1_codegree1", res.holds, res.detail))
    return out


def check_nondistributive(fld: Field) -> list[PinnedCheck]:
    out = []
    M = fixtures.m3_diagram(fld)
    T = taylor(M, 1, allow_nondistributive=True)
    d = T.approx.dim("a4")
    out.append(_check("M3.T1_dim", d == 3, f"dim {d}"))
    res = is_codegree(M, 1, allow_nondistributive=True)
    out.append(_check("M3.not_codegree1", not res.holds,
                      res.witness.format(M.lattice) if res.witness else "no witness"))
    N = fixtures.n5_diagram(fld)
    res = is_codegree(N, 1, allow_nondistributive=True)
    out.append(_check("N5.not_codegree1", not res.holds,
                      res.witness.format(N.lattice) if res.witness else "no witness"))
    return out


def check_cardinality_table(upto: int = 5) -> list[PinnedCheck]:
    """``T_m`` of ``X ↦ |X|`` at ``{1..n}`` is ``min(n, m)``."""
    bad = []
    for n in range(1, upto + 1):
        F = fixtures.cardinality_functor(n)
        top = F.lattice.top
        for m in range(0, upto + 1):
            got = taylor(F, m).approx.value(top)
            if got != min(n, m):
                bad.append(f"n={n} m={m}: {got}")
    return [_check("cardinality.table", not bad, "; ".join(bad) or f"n,m ≤ {upto}")]


def run_all(fld: Field = GF2) -> list[PinnedCheck]:
    out = []
    for group in (check_codegrees, check_coproduct, check_chain_circle, check_nondistributive):
        try:
            out.extend(group(fld))
        except Exception as exc:  # a broken fixture should name itself, not abort the run
            out.append(_check(group.__name__, False, f"{type(exc).__name__}: {exc}"))
    out.extend(check_cardinality_table())
    return out
