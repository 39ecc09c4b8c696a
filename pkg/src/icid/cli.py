"""Command-line front end.

Subcommands: ``identify`` (run a criterion and print certificates),
``verify`` (identify, then numerically check every certificate), ``gensat``
(emit the hardness gadget for a CNF formula), ``bench`` (random-instance
timing table).  Exit codes: 0 success, 1 verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .flowgraph import build_aux_flow_graph, build_flow_graph
from .graph import GraphError, KnownEdges, MixedGraph, parse_graph, serialize_graph
from .identify import (
    Certificate,
    IdentificationResult,
    avs,
    avsid,
    ic,
    icid,
    instrumental_subsets,
)
from .numeric import DegenerateDenominator, verify_certificate
from .randgen import random_mixed_graph
from .satgadget import (
    CnfError,
    TsivBudgetExceeded,
    brute_force_1in3sat,
    brute_force_tsiv,
    build_sat_graph,
    parse_cnf,
)

__all__ = ["main"]


def _load_graph(path: str) -> MixedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _parse_known(spec: str | None, g: MixedGraph) -> KnownEdges:
    if not spec:
        return KnownEdges()
    edges = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "->" not in part:
            raise GraphError(f"bad known-edge {part!r}; expected a->b")
        u, v = (s.strip() for s in part.split("->", 1))
        edges.append((u, v))
    known = KnownEdges(frozenset(edges))
    known.validate(g)
    return known


def _certificate_json(cert: Certificate) -> dict:
    return {
        "target": {"from": cert.target[0], "to": cert.target[1]},
        "method": cert.method,
        "S": [{"vertex": v, "role": role} for v, role in cert.sources],
        "T": list(cert.sinks),
        "corrections": [{"from": w, "to": y} for w, y in cert.corrections],
        "formula": cert.formula,
    }


def _run_method(g: MixedGraph, method: str, known: KnownEdges) -> IdentificationResult:
    if method == "icid":
        return icid(g, known)
    if method == "avs":
        return avsid(g, known)
    certs = []
    after = known
    for y in g.vertices:
        res = instrumental_subsets(g, y) if method == "is" else ic(g, y, known)
        certs.extend(res.certificates)
        after = after.union(c.target for c in res.certificates)
    return IdentificationResult(tuple(certs), after, 1)


def _emit_certificates(result: IdentificationResult, as_json: bool, out) -> None:
    if as_json:
        payload = {
            "identified": [_certificate_json(c) for c in result.certificates],
            "iterations": result.iterations,
        }
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    if not result.certificates:
        out.write("0 edges identified\n")
        return
    out.write(f"{len(result.certificates)} edges identified\n")
    for cert in result.certificates:
        out.write(f"  [{cert.method}] {cert.formula}\n")


def _cmd_identify(args) -> int:
    g = _load_graph(args.graph)
    known = _parse_known(args.known, g)
    if args.dot:
        fg = build_flow_graph(g) if args.method == "is" else build_aux_flow_graph(g, known)
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(fg.to_dot())
    result = _run_method(g, args.method, known)
    _emit_certificates(result, args.json, sys.stdout)
    return 0


def _cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    known = _parse_known(args.known, g)
    result = icid(g, known)
    failures = []
    for cert in result.certificates:
        try:
            check = verify_certificate(g, cert, trials=args.trials, tol=args.tol, seed=args.seed)
        except DegenerateDenominator as exc:
            failures.append((cert, float("inf"), str(exc)))
            continue
        if not check.passed:
            failures.append((cert, check.worst_rel_err, "relative error above tolerance"))
    print(f"{len(result.certificates)} certificates, {len(failures)} failures")
    for cert, err, why in failures:
        print(f"  FAIL {cert.formula}")
        print(f"       {why} (observed rel err {err:.3e}, tol {args.tol:.1e})")
    return 1 if failures else 0


def _cmd_gensat(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        formula = parse_cnf(fh.read()).preprocess()
    g = build_sat_graph(formula)
    text = serialize_graph(g)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.check:
        assignment = brute_force_1in3sat(formula)
        sat = assignment is not None
        try:
            witness = brute_force_tsiv(g, ("x1", "y"), max_k=args.max_k)
            exhausted = False
        except TsivBudgetExceeded:
            witness, exhausted = None, True
        if witness is not None:
            print(f"# tsIV witness found: S={list(witness.sources)} T={list(witness.sinks)}")
        elif exhausted:
            print("# no tsIV found (budget exhausted, consistent with UNSAT)")
        else:
            print(f"# no tsIV exists up to k={args.max_k}")
        print(f"# exactly-one-true satisfiable: {sat}")
        if sat != (witness is not None) and not exhausted:
            print("# MISMATCH between reduction sides", file=sys.stderr)
            return 1
    return 0


def _cmd_bench(args) -> int:
    writer = csv.writer(sys.stdout)
    writer.writerow(["method", "n", "seed", "identified", "seconds"])
    if args.n <= 0:
        return 0
    for i in range(args.instances):
        seed = args.seed + i
        g = random_mixed_graph(args.n, args.density, args.confounders, seed=seed)
        counts = {}
        for method in ("is", "avs", "icid"):
            t0 = time.perf_counter()
            result = _run_method(g, method, KnownEdges())
            dt = time.perf_counter() - t0
            counts[method] = len(result.certificates)
            writer.writerow([method, args.n, seed, len(result.certificates), f"{dt:.4f}"])
        if counts["avs"] > counts["icid"]:
            print("subsumption violated; this is a bug", file=sys.stderr)
            return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="icid",
        description="Generic identifiability of linear SCM coefficients via instrumental cutsets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_id = sub.add_parser("identify", help="identify coefficients and print certificates")
    p_id.add_argument("graph", help="graph file (a -> b / a <-> b lines)")
    p_id.add_argument("--method", choices=("is", "avs", "ic", "icid"), default="icid")
    p_id.add_argument("--known", help="seed identified edges, e.g. a->b,c->d")
    p_id.add_argument("--json", action="store_true", help="machine-readable output")
    p_id.add_argument("--dot", metavar="PATH", help="export the flow graph as DOT")
    p_id.set_defaults(func=_cmd_identify)

    p_vf = sub.add_parser("verify", help="identify, then verify every certificate numerically")
    p_vf.add_argument("graph")
    p_vf.add_argument("--known")
    p_vf.add_argument("--trials", type=int, default=3)
    p_vf.add_argument("--tol", type=float, default=1e-6)
    p_vf.add_argument("--seed", type=int, default=0)
    p_vf.set_defaults(func=_cmd_verify)

    p_gs = sub.add_parser("gensat", help="emit the hardness gadget graph for a CNF formula")
    p_gs.add_argument("cnf", help="CNF file, one clause per line, literals a / !a")
    p_gs.add_argument("-o", "--output", help="write the graph here instead of stdout")
    p_gs.add_argument("--check", action="store_true", help="compare tsIV search with satisfiability")
    p_gs.add_argument("--max-k", type=int, default=6)
    p_gs.set_defaults(func=_cmd_gensat)

    p_bn = sub.add_parser("bench", help="random-instance identification benchmark (CSV)")
    p_bn.add_argument("--n", type=int, required=True)
    p_bn.add_argument("--density", type=float, default=0.2)
    p_bn.add_argument("--confounders", type=float, default=0.1)
    p_bn.add_argument("--instances", type=int, default=1)
    p_bn.add_argument("--seed", type=int, default=0)
    p_bn.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, CnfError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
