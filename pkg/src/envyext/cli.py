"""Command line entry point.

Exit codes: 0 YES / pass, 3 NO / fail, 2 usage or input error, 4 resource limit.
"""
from __future__ import annotations

import argparse
import sys

from envyext import bench, io
from envyext.core import CHECKERS, Answer, envy_pairs
from envyext.errors import ExtensionError, ValuesTooLarge
from envyext.reductions import ColoredGraph, clique_to_allocation, is_to_refae, mcq_to_efae
from envyext.relaxed import CATALOG, ENGINES as EF1_ENGINES, extend_to_ef1
from envyext.select import select_algorithm

EXIT_OK, EXIT_USAGE, EXIT_NO, EXIT_LIMIT = 0, 2, 3, 4
_EXIT = {Answer.YES: EXIT_OK, Answer.NO: EXIT_NO, Answer.RESOURCE_LIMIT: EXIT_LIMIT}


def _emit(text: str, out=None):
    if out:
        io.write_text(out, text, newline=True)
    else:
        print(text)


def cmd_solve(args) -> int:
    inst = io.read_instance(args.file)
    engine, why = args.algorithm, "requested"
    if engine == "auto":
        engine, why = select_algorithm(inst)
    if not bench.applicable(engine, inst):
        print(f"error: {engine} does not solve {inst.query.variant}", file=sys.stderr)
        return EXIT_USAGE
    limit = None if args.timeout is None else args.timeout / 1000
    try:
        out = bench.run_engine(engine, inst, limit)
    except ValuesTooLarge as exc:
        print(exc, file=sys.stderr)
        return EXIT_LIMIT
    print(f"answer: {out.answer.value}")
    print(f"engine: {engine} ({why})")
    print(f"nodes: {out.stats.get('nodes', 0)}")
    if out.witness is not None:
        ext = {inst.items[a]: inst.agents[o] for a, o in sorted(out.witness.extension(inst).items())}
        print(f"extension: {io.canonical(ext)}")
        if args.witness:
            io.write_text(args.witness, io.serialize_allocation(inst, out.witness), newline=True)
    return _EXIT[out.answer]


def cmd_check(args) -> int:
    inst = io.read_instance(args.instance)
    alloc = io.parse_allocation(inst, io.read_text(args.allocation))
    ok = CHECKERS[args.notion](inst, alloc)
    print(f"{args.notion}: {'pass' if ok else 'fail'}")
    for i, j in envy_pairs(inst, alloc):
        print(f"envy: {inst.agents[i]} -> {inst.agents[j]}")
    return EXIT_OK if ok else EXIT_NO


def cmd_extend(args) -> int:
    inst = io.read_instance(args.instance)
    alloc = extend_to_ef1(inst, args.engine)
    _emit(io.serialize_allocation(inst, alloc), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "random":
        spec = io.GenSpec(
            seed=args.seed, n=args.n, m=args.m, n_t=args.nt, m_t=args.mt, vmax=args.vmax,
            open_fraction=args.open, variant=args.variant, p=args.p,
        )
        inst = io.gen_random(spec)
    elif args.kind == "mcq":
        g = io.parse_graph(io.read_text(args.graph))
        if not isinstance(g, ColoredGraph):
            print("error: graph has no color lines", file=sys.stderr)
            return EXIT_USAGE
        inst = mcq_to_efae(g)
        if args.clique:
            clique = [int(v) for v in args.clique.split(",")]
            alloc = clique_to_allocation(g, clique)
            _emit(io.serialize_allocation(inst, alloc), args.out)
            return EXIT_OK
    elif args.kind == "is":
        g = io.parse_graph(io.read_text(args.graph))
        if isinstance(g, ColoredGraph):
            print("error: expected an uncolored graph", file=sys.stderr)
            return EXIT_USAGE
        inst = is_to_refae(g, args.ell, fefae=args.fefae)
    else:
        inst = CATALOG[args.name]()
    _emit(io.serialize_instance(inst), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    engines = args.engines.split(",") if args.engines else None
    rows = bench.run_bench(args.dir, engines, args.timeout, args.jobs)
    io.write_text(args.out, bench.to_csv(rows))
    bad = [r for r in rows if r[1] == bench.DISAGREEMENT]
    files = len({r[0] for r in rows})
    print(f"instances: {files}")
    print(f"rows: {len(rows)}")
    for r in rows:
        print(f"{r[0]} {r[1] or '-'} {r[2]}")
    print(f"disagreements: {len(bad)}")
    return EXIT_NO if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="envyext", description="Envy-free allocation extension solvers")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance document")
    p.add_argument("file")
    p.add_argument("--algorithm", default="auto", choices=["auto", *bench.ENGINES])
    p.add_argument("--witness", help="write the extended allocation here on YES")
    p.add_argument("--timeout", type=int, help="milliseconds")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="test an allocation against a fairness notion")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--notion", default="ef", choices=sorted(CHECKERS))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend-ef1", help="complete an envy-free partial allocation to EF1")
    p.add_argument("instance")
    p.add_argument("--engine", default="round-robin", choices=sorted(EF1_ENGINES))
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("gen", help="generate instances")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--nt", type=int, default=2)
    g.add_argument("--mt", type=int, default=2)
    g.add_argument("--vmax", type=int, default=3)
    g.add_argument("--open", type=float, default=0.5)
    g.add_argument("--variant", default="EFAE", choices=["EFAE", "REFAE", "FEFAE"])
    g.add_argument("--p", type=int, default=2)
    g = gsub.add_parser("mcq", help="clique gadget from a colored graph file")
    g.add_argument("graph")
    g.add_argument("--clique", help="comma-separated vertices; emits the matching allocation instead")
    g = gsub.add_parser("is", help="independent-set gadget from a graph file")
    g.add_argument("graph")
    g.add_argument("--ell", type=int, required=True)
    g.add_argument("--fefae", action="store_true")
    g = gsub.add_parser("catalog")
    g.add_argument("name", choices=sorted(CATALOG))
    for g in gsub.choices.values():
        g.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run engines over a directory of documents")
    p.add_argument("dir")
    p.add_argument("--engines", help="comma-separated engine ids")
    p.add_argument("--timeout", type=int, help="milliseconds per engine run")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="bench.csv", help="CSV report path")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ExtensionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
