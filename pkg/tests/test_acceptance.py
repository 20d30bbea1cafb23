"""Acceptance gate: one test per criterion, each timed against its budget.

Every test appends a PASS/FAIL line to the terminal summary before asserting,
so a full ``pytest`` run ends with the ten verdicts in order.
"""
import itertools
import math
import random
import time

from cocalculus import pinned
from cocalculus.decomposition import max_jdim
from cocalculus.diagram import is_codegree
from cocalculus.fixtures import as_chain_diagram
from cocalculus.generators import (random_chain_diagram, random_downset_lattice, random_grid,
                                   random_vect_diagram)
from cocalculus.homalg.colim import colim_vect, hocolim_chain
from cocalculus.homalg.field import GF2, QQ
from cocalculus.interleave import (barcode_1d, geometric_annotation, induced_taylor_certificate,
                                   lambda_translation, random_line_module, shift_pair,
                                   verify_certificate)
from cocalculus.lattice import GridLattice, PowerSetLattice
from cocalculus.taylor import converges, taylor
from cocalculus.tda.complex import (SimplicialComplex, coskeletal_by_covers,
                                    coskeletal_by_dual_degree, hom_complex, is_n_coskeletal,
                                    simplicial_homology)
from cocalculus.tda.geometry import (HELLY_FAILURE, cech_codegree_bound, cech_function, meb_bruteforce,
                                     meb_welzl, random_cloud, verify_vr_identity)

from oracles import all_complexes, barcode_by_ranks

SEED = 20240601


def verdict(log, n, title, failures, elapsed, limit=None, detail=""):
    ok = not failures and (limit is None or elapsed < limit)
    budget = f"limit {limit:g}s" if limit is not None else "no limit"
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  [{elapsed:.2f}s, {budget}]"
    if detail:
        line += f"  {detail}"
    if failures:
        line += f"  first failure: {failures[0]}"
    log.append(line)
    print(line)
    return ok


def small_lattice(rng):
    """A grid up to 3×3×3 or a power set on at most four vertices."""
    if rng.random() < 0.6:
        return random_grid(rng, 3, 3)
    return PowerSetLattice(list("abcd"[:rng.randint(1, 4)]))


def test_criterion_01_pinned_examples(acceptance_log):
    t = time.perf_counter()
    checks = pinned.run_all(GF2)
    elapsed = time.perf_counter() - t
    names = {c.name for c in checks}
    failures = [f"{c.name}: {c.detail}" for c in checks if not c.ok]
    for needed in ("deg_2.T1_dim", "deg_2.T1_legs_basis", "chain_circle.T1_homology",
                   "M3.T1_dim", "M3.not_codegree1", "N5.not_codegree1", "cardinality.table"):
        if needed not in names:
            failures.append(f"{needed} was not run")
    assert verdict(acceptance_log, 1, "pinned examples over GF(2)", failures, elapsed, 5,
                   f"{len(checks)} checks")


def test_criterion_02_theorem_a(acceptance_log):
    rng = random.Random(SEED + 2)
    failures = []
    t = time.perf_counter()
    for i in range(200):
        L = small_lattice(rng)
        F = random_vect_diagram(rng, L, GF2, max_generators=3)
        for k in (0, 1, 2):
            res = is_codegree(taylor(F, k).approx, k)
            if not res.holds:
                failures.append(f"diagram {i} on {L!r}, k={k}: {res.detail}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 2, "T_k F is codegree k", failures, elapsed, 120,
                   "200 diagrams, k in {0,1,2}")


def test_criterion_03_theorem_b(acceptance_log):
    rng = random.Random(SEED + 3)
    failures = []
    t = time.perf_counter()
    for i in range(100):
        L = small_lattice(rng)
        G = random_vect_diagram(rng, L, GF2)
        n = rng.randint(0, 2)
        F = taylor(G, n).approx
        layer = taylor(F, n)
        bad = [x for x in L.elements if not layer.eps_is_equivalence(x)]
        if bad:
            failures.append(f"diagram {i} on {L!r}, n={n}: eps at {L.format_element(bad[0])}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 3, "eps_n of T_n(T_n G) is an isomorphism", failures, elapsed,
                   120, "100 diagrams")


def test_criterion_04_vr_identity(acceptance_log):
    rng = random.Random(SEED + 4)
    failures, subsets = [], 0
    t = time.perf_counter()
    for i in range(50):
        cloud = random_cloud(rng, rng.randint(1, 7), 2 + i % 2)
        rep = verify_vr_identity(cloud)
        subsets += rep.checked
        if not rep.holds:
            failures.append(f"cloud {i}: {rep.failures[0]}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 4, "4 T_2(cech^2) = diam^2", failures, elapsed, 60,
                   f"50 clouds, {subsets} subsets")


def test_criterion_05_helly(acceptance_log):
    rng = random.Random(SEED + 5)
    failures = []
    t = time.perf_counter()
    for i in range(25):
        cloud = random_cloud(rng, rng.randint(1, 6), 2)
        res = cech_codegree_bound(cloud)
        if not res.holds:
            failures.append(f"cloud {i}: {res.detail}")
    planar_failure = is_codegree(cech_function(HELLY_FAILURE), 2)
    if planar_failure.holds or planar_failure.witness is None:
        failures.append("the four-point fixture is codegree 2")
    elapsed = time.perf_counter() - t
    detail = "25 clouds"
    if planar_failure.witness is not None:
        detail += "; fixture fails codegree 2 at " + \
            planar_failure.witness.format(PowerSetLattice(HELLY_FAILURE.labels))
    assert verdict(acceptance_log, 5, "planar Cech is codegree 3", failures, elapsed, 120, detail)


def test_criterion_06_coskeletal(acceptance_log):
    failures, count = [], 0
    t = time.perf_counter()
    for size in range(1, 6):
        for X in all_complexes(list("abcde"[:size])):
            count += 1
            for n in range(size):
                a = is_n_coskeletal(X, n)
                b = coskeletal_by_dual_degree(X, n)
                c = coskeletal_by_covers(X, n)
                if not a == b == c:
                    failures.append(f"{X!r}, n={n}: direct {a}, dual degree {b}, covers {c}")
    elapsed = time.perf_counter() - t
    if count < 500:
        failures.append(f"corpus has only {count} complexes")
    assert verdict(acceptance_log, 6, "three coskeletal routes agree", failures, elapsed, 120,
                   f"every complex on <= 5 vertices ({count})")


def test_criterion_07_stability(acceptance_log):
    rng = random.Random(SEED + 7)
    failures = []
    t = time.perf_counter()
    for i in range(50):
        heights = [rng.randint(2, 3) for _ in range(rng.randint(1, 3))]
        ann = geometric_annotation(heights)
        gamma = lambda_translation(ann, math.log(2))
        F = random_vect_diagram(rng, ann.lattice, GF2)
        G, cert = shift_pair(F, gamma, rng)
        if not verify_certificate(F, G, gamma, cert).holds:
            failures.append(f"pair {i}: base certificate")
            continue
        for k in (1, 2):
            ind, TF, TG = induced_taylor_certificate(F, G, cert, k)
            res = verify_certificate(TF.approx, TG.approx, gamma, ind)
            if not res.holds:
                failures.append(f"pair {i}, k={k}: {res.violations[0]}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 7, "induced certificates verify at the same eps", failures,
                   elapsed, 120, "50 pairs, k in {1,2}")


def test_criterion_08_hom_complex(acceptance_log):
    rng = random.Random(SEED + 8)
    failures = []
    t = time.perf_counter()
    for i in range(20):
        size = rng.randint(1, 5)
        verts = list("abcde"[:size])
        faces = [c for r in range(1, size + 1) for c in itertools.combinations(verts, r)
                 if rng.random() < 0.7 / r]
        Y = SimplicialComplex(verts, faces)
        hy = simplicial_homology(Y, GF2)
        for n in (1, 2):
            H = hom_complex(SimplicialComplex.standard_simplex(n), Y, max_vertices=10**4)
            hh = simplicial_homology(H, GF2)
            if hh != hy:
                failures.append(f"{Y!r}, n={n}: {hh} vs {hy}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 8, "Hom(simplex, Y) has the homology of Y", failures, elapsed,
                   180, "20 complexes, n in {1,2}")


def test_criterion_09_convergence(acceptance_log):
    rng = random.Random(SEED + 9)
    lattices = [GridLattice(list(h)) for r in (1, 2, 3)
                for h in itertools.combinations_with_replacement((2, 3), r)]
    lattices += [PowerSetLattice(list("abcd"[:n])) for n in range(0, 5)]
    lattices += [random_downset_lattice(rng, rng.randint(2, 4)) for _ in range(6)]
    failures, cases = [], 0
    t = time.perf_counter()
    for L in lattices:
        for fld in (GF2, QQ):
            for _ in range(2):
                F = random_vect_diagram(rng, L, fld)
                cases += 1
                if not converges(F):
                    failures.append(f"Vect on {L!r}")
            if len(L.elements) <= 12:
                C = random_chain_diagram(rng, L, fld)
                cases += 1
                layer = taylor(C, max_jdim(L))
                if not all(layer.eps_is_equivalence(x) for x in L.elements):
                    failures.append(f"chain on {L!r}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 9, "T_k F ~ F at the largest join-dimension", failures, elapsed,
                   detail=f"{len(lattices)} lattices, {cases} diagrams")


def test_criterion_10_oracles(acceptance_log):
    rng = random.Random(SEED + 10)
    failures = []
    t = time.perf_counter()
    # bar construction against the plain colimit
    for i in range(50):
        L = small_lattice(rng)
        D = random_vect_diagram(rng, L, GF2, max_generators=3, max_relations=0)
        objs = rng.sample(L.elements, min(len(L.elements), rng.randint(1, 6)))
        C = as_chain_diagram(D)
        col = colim_vect(GF2, objs, D.dim, D.map, L.leq)
        bar = hocolim_chain(GF2, objs, L.leq, C.value, C.map)
        hom = bar.complex.homology()
        if hom != ({0: col.dim} if col.dim else {}):
            failures.append(f"bar vs colim, case {i}: {hom} vs {col.dim}")
    # minimal enclosing balls on every subset of every cloud used above
    clouds = [HELLY_FAILURE]
    crng = random.Random(SEED + 4)
    clouds += [random_cloud(crng, crng.randint(1, 7), 2 + i % 2) for i in range(50)]
    subsets = 0
    for ci, cloud in enumerate(clouds):
        for r in range(1, len(cloud) + 1):
            for sub in itertools.combinations(cloud.points, r):
                subsets += 1
                if meb_welzl(sub)[1] != meb_bruteforce(sub)[1]:
                    failures.append(f"meb, cloud {ci}: {sub}")
    # elder-rule barcodes against the rank invariant
    for i in range(50):
        F = random_line_module(rng, rng.randint(1, 7), GF2)
        bars = {}
        for b in barcode_1d(F):
            bars[(b.birth, b.death)] = bars.get((b.birth, b.death), 0) + 1
        if bars != dict(barcode_by_ranks(F)):
            failures.append(f"barcode, module {i}")
    elapsed = time.perf_counter() - t
    assert verdict(acceptance_log, 10, "oracle equivalences", failures, elapsed,
                   detail=f"50 colimits, {subsets} enclosing balls, 50 barcodes")
