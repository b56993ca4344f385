"""Command-line front end: ``treematch solve|oracle|verify|gen``.

Exit codes: 0 ok, 1 verification mismatch, 2 input error, 3 internal defect,
4 oracle guard exceeded.
"""

from __future__ import annotations

import argparse
import logging
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from . import generators, oracle
from .graph_core import Graph, GraphError, Tree, edge, validate_tree
from .graph_core import parse_edge_list
from .matching import GuardExceeded
from .reductions import NonExhaustiveCaseAnalysis
from .solver import SolverDefect, maxmax, minmax, verify

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_DEFECT, EXIT_GUARD = 0, 1, 2, 3, 4


@dataclass
class CliConfig:
    command: str
    path: str = "-"
    objective: str | None = None
    edge: tuple[int, int] | None = None
    guard: int | None = None
    seed: int = 0
    fmt: str = "human"
    extra: dict = field(default_factory=dict)


def _read(path: str, stdin: TextIO) -> Graph:
    if path == "-":
        return parse_edge_list(stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def parse_sizes(text: str) -> list[int]:
    """``4..14`` (inclusive range) or a comma list such as ``250,500``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


# solve ------------------------------------------------------------------------


def cmd_solve(cfg: CliConfig, out: TextIO, stdin: TextIO) -> int:
    try:
        t = validate_tree(_read(cfg.path, stdin))
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if cfg.objective == "min":
            report = minmax(t, value_mode=cfg.extra.get("values", "dp"))
        else:
            report = maxmax(t, cfg.edge, value_mode=cfg.extra.get("values", "dp"))
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NonExhaustiveCaseAnalysis, SolverDefect) as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT
    cert = verify(t, report, cfg.guard) if cfg.extra.get("certify") else None
    code = EXIT_MISMATCH if cert is not None and not cert.ok else EXIT_OK
    if cfg.fmt == "structured":
        out.write(report.serialize(timing=cfg.extra.get("timing", False)))
        return code
    print(f"value {report.value}", file=out)
    for u, v in report.witness.edges:
        print(f"{u} {v}", file=out)
    if cfg.extra.get("trace"):
        for step in report.trace:
            print(step.trace_line(), file=out)
    if cfg.extra.get("timing"):
        print(f"elapsed {report.stats.elapsed:.6f}", file=out)
    if cert is not None:
        for line in cert.lines():
            print(line, file=out)
    return code


# oracle -------------------------------------------------------------------------


def cmd_oracle(cfg: CliConfig, out: TextIO, stdin: TextIO) -> int:
    try:
        g = _read(cfg.path, stdin)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        spec = oracle.spectrum(g, cfg.guard)
        report = oracle.property_suite(g, cfg.guard)
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    achieved = ",".join(str(x) for x in sorted(spec.achieved))
    print(f"l={spec.l} L={spec.L} |M|={len(spec.matchings)} achieved={{{achieved}}}", file=out)
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.ok else EXIT_MISMATCH


# verify -------------------------------------------------------------------------


@dataclass
class InstanceResult:
    n: int
    seed: int
    ok: bool
    defect: str = ""
    detail: str = ""
    t_min: float = 0.0
    t_max: float = 0.0
    edges: tuple = ()


def instance_seed(base: int, n: int, i: int) -> int:
    return base * 1_000_003 + n * 10_007 + i


def run_instance(n: int, seed: int, guard: int) -> InstanceResult:
    t = generators.random_tree(n, seed)
    res = InstanceResult(n, seed, True, edges=t.edges)
    problems = []
    for objective, fn in (("min", minmax), ("max", maxmax)):
        began = time.perf_counter()
        try:
            report = fn(t, fallback_guard=guard)
        except (NonExhaustiveCaseAnalysis, SolverDefect) as exc:
            res.defect = f"{objective}: {exc}"
            res.ok = False
            continue
        elapsed = time.perf_counter() - began
        if objective == "min":
            res.t_min = elapsed
        else:
            res.t_max = elapsed
        if report.fallback:
            res.defect = f"{objective}: rule dispatch fell back to the oracle"
        cert = verify(t, report, guard)
        if not cert.ok:
            problems += [f"{objective} {line}" for line in cert.lines() if "FAIL" in line]
    if problems:
        res.ok = False
        res.detail = "; ".join(problems)
    return res


def cmd_verify(cfg: CliConfig, out: TextIO, stdin: TextIO) -> int:
    sizes = cfg.extra["sizes"]
    per = cfg.extra["per_size"]
    guard = cfg.guard if cfg.guard is not None else oracle.TREE_GUARD
    jobs = [(n, instance_seed(cfg.seed, n, i), guard) for n in sizes for i in range(per)]
    workers = cfg.extra.get("jobs", 1)
    began = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_instance, *zip(*jobs), chunksize=8))
    else:
        results = [run_instance(*job) for job in jobs]
    total = time.perf_counter() - began
    mismatches = [r for r in results if not r.ok and not r.defect]
    defects = [r for r in results if r.defect]
    print(f"instances {len(results)}", file=out)
    print(f"{len(mismatches)} mismatches", file=out)
    print(f"{len(defects)} defects", file=out)
    if cfg.extra.get("timing"):
        print("n median_min_s median_max_s", file=out)
        for n in sizes:
            rows = [r for r in results if r.n == n]
            print(
                f"{n} {statistics.median(r.t_min for r in rows):.4f} "
                f"{statistics.median(r.t_max for r in rows):.4f}",
                file=out,
            )
        print(f"total {total:.2f}s", file=out)
    for r in (mismatches + defects)[:5]:
        print(f"# n={r.n} seed={r.seed} {r.defect or r.detail}", file=out)
        print(Tree.from_edges(r.n, r.edges).to_edge_list(), file=out, end="")
    if mismatches:
        return EXIT_MISMATCH
    return EXIT_DEFECT if defects else EXIT_OK


# gen ----------------------------------------------------------------------------


def cmd_gen(cfg: CliConfig, out: TextIO, stdin: TextIO) -> int:
    x = cfg.extra
    fam = x["family"]
    try:
        if fam == "path":
            g = generators.make_path(x["n"])
        elif fam == "star":
            g = generators.make_star(x["n"])
        elif fam == "spider":
            g = generators.make_spider(x["legs"], x["leg_len"])
        elif fam == "caterpillar":
            pattern = [int(v) for v in x["leaves"].split(",")]
            g = generators.make_caterpillar(len(pattern), pattern)
        elif fam == "broom":
            g = generators.make_broom(x["handle"], x["bristles"])
        elif fam == "random":
            g = generators.random_tree(x["n"], cfg.seed)
        elif fam in generators.FAMILIES:
            g = generators.example_family(fam, x["k"]).graph
        else:
            print(f"error: unknown family {fam!r}", file=sys.stderr)
            return EXIT_INPUT
    except generators.FamilyUnavailable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except (GraphError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.write(g.to_edge_list())
    return EXIT_OK


# parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treematch", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve the min or max problem on a tree")
    s.add_argument("path", nargs="?", default="-")
    s.add_argument("--objective", choices=("min", "max"), required=True)
    s.add_argument("--edge", nargs=2, type=int, metavar=("U", "V"))
    s.add_argument("--format", choices=("human", "structured"), default="human")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--timing", action="store_true")
    s.add_argument("--certify", action="store_true", help="attach a verification certificate")
    s.add_argument("--guard", type=int)
    s.add_argument("--values", choices=("dp", "recursive"), default="dp")

    o = sub.add_parser("oracle", help="brute-force spectrum and property suite")
    o.add_argument("path", nargs="?", default="-")
    o.add_argument("--guard", type=int)

    v = sub.add_parser("verify", help="differential campaign against the oracle")
    v.add_argument("--sizes", type=parse_sizes, default=parse_sizes("4..14"))
    v.add_argument("--per-size", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--guard", type=int)
    v.add_argument("--timing", action="store_true")
    v.add_argument("--jobs", type=int, default=1)

    g = sub.add_parser("gen", help="emit a generated tree as an edge list")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--legs", type=int)
    g.add_argument("--leg-len", type=int)
    g.add_argument("--leaves", help="comma list of leaf counts per spine vertex")
    g.add_argument("--handle", type=int)
    g.add_argument("--bristles", type=int)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    return p


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(ns.command)
    cfg.path = getattr(ns, "path", "-")
    cfg.guard = getattr(ns, "guard", None)
    cfg.seed = getattr(ns, "seed", 0)
    if ns.command == "solve":
        cfg.objective = ns.objective
        cfg.edge = edge(*ns.edge) if ns.edge else None
        cfg.fmt = ns.format
        cfg.extra = {"trace": ns.trace, "timing": ns.timing, "certify": ns.certify, "values": ns.values}
    elif ns.command == "verify":
        cfg.extra = {"sizes": ns.sizes, "per_size": ns.per_size, "timing": ns.timing, "jobs": ns.jobs}
    elif ns.command == "gen":
        cfg.extra = {
            "family": ns.family,
            "n": ns.n,
            "legs": ns.legs,
            "leg_len": ns.leg_len,
            "leaves": ns.leaves,
            "handle": ns.handle,
            "bristles": ns.bristles,
            "k": ns.k,
        }
    return cfg


COMMANDS = {"solve": cmd_solve, "oracle": cmd_oracle, "verify": cmd_verify, "gen": cmd_gen}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, stdin: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING)
    cfg = config_from_args(ns)
    return COMMANDS[cfg.command](cfg, out or sys.stdout, stdin or sys.stdin)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
