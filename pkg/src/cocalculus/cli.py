"""``cocalc``: command-line access to codegree checks, Taylor layers and the TDA tools.

Exit codes: 0 when the checked property holds, 1 when it fails (a witness is
printed), 2 for unusable input. Every report ends with ``key=value`` lines
including a hash of the run configuration.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys
from dataclasses import asdict, dataclass

from . import pinned
from .decomposition import indecomposable_decomposition, jdim
from .diagram import DiagramError, PosetDiagram, codegree_lower_bound, is_codegree
from .homalg.field import Field
from .lattice import (GridLattice, LatticeError, PowerSetLattice, is_distributive,
                      parse_lattice_spec)
from .taylor import taylor, taylor_grid_fast

DEFAULT_SEED = 20240601

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    field: str = "2"
    tolerance: float = 1e-9
    seed: int = DEFAULT_SEED
    max_hom_vertices: int = 10**5
    exact: bool = True

    def __post_init__(self):
        Field.parse(self.field)
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_hom_vertices < 1:
            raise ValueError("max-hom-vertices must be positive")

    @property
    def fld(self) -> Field:
        return Field.parse(self.field)

    def digest(self, command: str, args: dict) -> str:
        blob = json.dumps({"config": asdict(self), "command": command, "args": args},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class Report:
    """Collects report lines and the trailing ``key=value`` summary."""

    def __init__(self, out=None):
        self.out = out or sys.stdout
        self.tail: list[tuple[str, object]] = []

    def line(self, text: str = ""):
        print(text, file=self.out)

    def kv(self, key: str, value):
        self.tail.append((key, value))

    def finish(self, cfg: RunConfig, command: str, args: dict, status: int) -> int:
        for k, v in self.tail:
            print(f"{k}={v}", file=self.out)
        print(f"status={status}", file=self.out)
        print(f"config_hash={cfg.digest(command, args)}", file=self.out)
        return status


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_diagram(path: str) -> PosetDiagram:
    D = PosetDiagram.loads(_read(path))
    problems = D.validate()
    if problems:
        raise DiagramError("invalid diagram: " + "; ".join(problems[:3]))
    return D


def _parse_lattice_and_element(spec: str, element: str):
    """``N4`` / ``nat:4`` means ``ℕ^4``, cut down to the smallest grid holding the element."""
    s = spec.strip()
    low = s.lower()
    if low.startswith("nat:") or (low.startswith("n") and low[1:].isdigit()):
        axes = int(low[4:] if low.startswith("nat:") else low[1:])
        coords = [int(c) for c in element.strip().strip("()").split(",") if c.strip()]
        if len(coords) != axes:
            raise LatticeError(f"element needs {axes} coordinates")
        L = GridLattice([c + 1 for c in coords])
        return L, tuple(coords)
    L = parse_lattice_spec(s)
    return L, L.parse_element(element)


# commands ----------------------------------------------------------------------------

def cmd_jdim(args, cfg: RunConfig, rep: Report) -> int:
    L, x = _parse_lattice_and_element(args.lattice, args.element)
    d = jdim(L, x)
    dec = indecomposable_decomposition(L, x)
    rep.line(f"lattice: {L!r}")
    rep.line(f"element: {L.format_element(x)}")
    for p in dec.parts:
        rep.line(f"  part {L.format_element(p)}")
    rep.kv("jdim", d)
    rep.kv("parts", ";".join(L.format_element(p) for p in dec.parts))
    rep.kv("distributive", str(is_distributive(L)[0]).lower())
    return EXIT_OK


def cmd_codegree(args, cfg: RunConfig, rep: Report) -> int:
    D = _load_diagram(args.diagram)
    res = is_codegree(D, args.n, allow_nondistributive=args.allow_nondistributive)
    rep.line(f"diagram: {D!r} digest {D.digest()}")
    rep.line(f"covers checked: {res.checked}")
    if not res.holds:
        rep.line(f"witness cover: {res.witness.format(D.lattice)}")
        rep.line(f"reason: {res.detail}")
        rep.kv("witness", ";".join(D.lattice.format_element(p) for p in res.witness.parts))
        rep.kv("witness_target", D.lattice.format_element(res.witness.target))
    rep.kv("n", args.n)
    rep.kv("codegree", str(res.holds).lower())
    if args.lower_bound:
        rep.kv("lower_bound", codegree_lower_bound(
            D, allow_nondistributive=args.allow_nondistributive))
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_taylor(args, cfg: RunConfig, rep: Report) -> int:
    D = _load_diagram(args.diagram)
    if args.fast:
        T = taylor_grid_fast(D, args.k)
    else:
        T = taylor(D, args.k, allow_nondistributive=args.allow_nondistributive)
    header = {"construction": "taylor", "k": args.k, "source_digest": D.digest()}
    text = T.approx.dumps(header)
    again = PosetDiagram.loads(text)
    problems = again.validate()
    if problems:
        rep.line("output failed validation: " + "; ".join(problems[:3]))
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        rep.line(f"wrote {args.out}")
    else:
        rep.line(text.rstrip("\n"))
    L = D.lattice
    for x in L.elements:
        rep.line(f"  {L.format_element(x)}: {T.approx.summary(x)}"
                 f"{'' if T.eps_is_equivalence(x) else '  (eps not an equivalence)'}")
    rep.kv("k", args.k)
    rep.kv("digest", again.digest())
    rep.kv("eps_equivalence", str(all(T.eps_is_equivalence(x) for x in L.elements)).lower())
    return EXIT_OK


def cmd_cech_vr(args, cfg: RunConfig, rep: Report) -> int:
    from .tda.geometry import cech_codegree_bound, load_point_cloud, verify_vr_identity
    cloud = load_point_cloud(args.cloud, exact=cfg.exact)
    if len(cloud) > args.max_points:
        raise ValueError(f"cloud has {len(cloud)} points, limit is {args.max_points}")
    res = verify_vr_identity(cloud, tolerance=cfg.tolerance)
    rep.line(f"points: {len(cloud)} in dimension {cloud.dimension}")
    rep.line(f"subsets checked: {res.checked}")
    for subset, lhs, rhs in res.failures:
        rep.line(f"  mismatch at {subset}: 4*T2(cech^2)={lhs} diam^2={rhs}")
    rep.kv("vr_identity", str(res.holds).lower())
    if args.helly:
        h = cech_codegree_bound(cloud, tolerance=cfg.tolerance)
        rep.kv("cech_codegree_d_plus_1", str(h.holds).lower())
        if not h.holds:
            rep.line(f"helly witness: {h.witness.format(PowerSetLattice(cloud.labels))}")
    return EXIT_OK if res.holds else EXIT_FAIL


def _load_complex(path: str):
    from .tda.complex import SimplicialComplex
    return SimplicialComplex.loads(_read(path))


def cmd_coskeletal(args, cfg: RunConfig, rep: Report) -> int:
    from .tda.complex import coskeletal_by_covers, coskeletal_by_dual_degree
    X = _load_complex(args.complex)
    direct = X.is_n_coskeletal(args.n)
    rep.line(f"complex: {X!r}")
    if args.cross_check:
        dual = coskeletal_by_dual_degree(X, args.n)
        covers = coskeletal_by_covers(X, args.n)
        rep.kv("dual_degree_route", str(dual).lower())
        rep.kv("cover_route", str(covers).lower())
        if not direct == dual == covers:
            rep.line("routes disagree")
            return EXIT_FAIL
    if not direct:
        missing = X.coskeleton(args.n)
        extra = [s for s in missing.maximal if s not in X]
        if extra:
            rep.line(f"witness: {''.join(str(v) for v in X.sorted_face(extra[0]))} "
                     f"has all small faces but is missing")
    rep.kv("n", args.n)
    rep.kv("coskeletal", str(direct).lower())
    return EXIT_OK if direct else EXIT_FAIL


def cmd_hom(args, cfg: RunConfig, rep: Report) -> int:
    from .tda.complex import SimplicialComplex, hom_complex
    X = SimplicialComplex.standard_simplex(args.simplex) if args.simplex is not None \
        else _load_complex(args.source)
    Y = _load_complex(args.target)
    H = hom_complex(X, Y, max_vertices=cfg.max_hom_vertices)
    hh = H.homology(cfg.fld)
    hy = Y.homology(cfg.fld)
    rep.line(f"hom vertices: {len(H.universe)}, maximal faces: {len(H.maximal)}")
    rep.kv("hom_homology", json.dumps(hh, sort_keys=True).replace(" ", ""))
    rep.kv("target_homology", json.dumps(hy, sort_keys=True).replace(" ", ""))
    return EXIT_OK


def cmd_stability(args, cfg: RunConfig, rep: Report) -> int:
    from .generators import random_vect_diagram
    from .interleave import (geometric_annotation, induced_taylor_certificate, lambda_translation,
                             shift_pair, verify_certificate)
    rng = random.Random(cfg.seed)
    fld = cfg.fld
    failures = 0
    for i in range(args.count):
        heights = [rng.randint(2, 3) for _ in range(rng.randint(1, 3))]
        ann = geometric_annotation(heights)
        gamma = lambda_translation(ann, math.log(2))
        F = random_vect_diagram(rng, ann.lattice, fld)
        G, cert = shift_pair(F, gamma, rng)
        base = verify_certificate(F, G, gamma, cert).holds
        layers = []
        for k in args.k:
            ind, TF, TG = induced_taylor_certificate(F, G, cert, k)
            layers.append(verify_certificate(TF.approx, TG.approx, gamma, ind).holds)
        ok = base and all(layers)
        failures += not ok
        rep.line(f"pair {i}: grid {'x'.join(map(str, heights))} base={base} "
                 + " ".join(f"T{k}={v}" for k, v in zip(args.k, layers)))
    rep.kv("pairs", args.count)
    rep.kv("failures", failures)
    return EXIT_OK if failures == 0 else EXIT_FAIL


def cmd_paper_examples(args, cfg: RunConfig, rep: Report) -> int:
    checks = pinned.run_all(cfg.fld)
    for c in checks:
        rep.line(f"{'PASS' if c.ok else 'FAIL'} {c.name}: {c.detail}")
    failed = [c.name for c in checks if not c.ok]
    rep.kv("checks", len(checks))
    rep.kv("failed", ",".join(failed) if failed else "none")
    return EXIT_OK if not failed else EXIT_FAIL


# entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cocalc", description=__doc__.splitlines()[0])
    p.add_argument("--field", default="2", help="prime p or QQ (default 2)")
    p.add_argument("--tolerance", type=float, default=1e-9, help="float comparison tolerance")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomised suites")
    p.add_argument("--max-hom-vertices", type=int, default=10**5)
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True,
                   help="read coordinates as exact rationals (default)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("jdim", help="join-dimension and decomposition of an element")
    s.add_argument("lattice", help="grid:3x3, powerset:a,b,c, {a,b,c}, N4 or a lattice file")
    s.add_argument("element")
    s.set_defaults(func=cmd_jdim)

    s = sub.add_parser("codegree", help="decide whether a diagram is codegree n")
    s.add_argument("diagram")
    s.add_argument("n", type=int)
    s.add_argument("--allow-nondistributive", action="store_true")
    s.add_argument("--lower-bound", action="store_true", help="also report the smallest codegree")
    s.set_defaults(func=cmd_codegree)

    s = sub.add_parser("taylor", help="write the k-th Taylor approximation of a diagram")
    s.add_argument("diagram")
    s.add_argument("k", type=int)
    s.add_argument("--out", "-o")
    s.add_argument("--fast", action="store_true", help="corner-indexed construction (grids, power sets)")
    s.add_argument("--allow-nondistributive", action="store_true")
    s.set_defaults(func=cmd_taylor)

    s = sub.add_parser("cech-vr", help="check diam = 2 T_2(Čech radius) on a point cloud")
    s.add_argument("cloud")
    s.add_argument("--helly", action="store_true", help="also check Čech codegree d+1")
    s.add_argument("--max-points", type=int, default=12)
    s.set_defaults(func=cmd_cech_vr)

    s = sub.add_parser("coskeletal", help="decide whether a complex is n-coskeletal")
    s.add_argument("complex")
    s.add_argument("n", type=int)
    s.add_argument("--cross-check", action="store_true",
                   help="also run the dual-degree and cover formulations")
    s.set_defaults(func=cmd_coskeletal)

    s = sub.add_parser("hom", help="homology of a Hom complex and of its target")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--simplex", type=int, help="use the standard n-simplex as source")
    src.add_argument("--source")
    s.add_argument("target")
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("stability", help="induced interleavings on Taylor layers for shifted pairs")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("-k", type=int, nargs="+", default=[1, 2])
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("paper-examples", aliases=["examples"],
                       help="recompute every pinned example")
    s.set_defaults(func=cmd_paper_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.field, args.tolerance, args.seed, args.max_hom_vertices, args.exact)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep = Report()
    skip = {"func", "field", "tolerance", "seed", "max_hom_vertices", "exact"}
    arg_record = {k: v for k, v in vars(args).items() if k not in skip}
    try:
        status = args.func(args, cfg, rep)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return rep.finish(cfg, args.command, arg_record, status)


if __name__ == "__main__":
    sys.exit(main())
