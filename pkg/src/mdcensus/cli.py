"""Command line entry point: ``mdcensus {gen-graphs,enumerate,verify,report}``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from . import census
from .multigraph import generate, write_graphs
from .oracle import BudgetExceeded, cross_check
from .search import VARIANTS, variant_config

log = logging.getLogger("mdcensus")


def cmd_gen_graphs(args) -> int:
    t0 = time.time()
    graphs = generate(args.n, connected=not args.disconnected)
    try:
        write_graphs(graphs, args.output)
    except OSError as exc:
        print(f"cannot write {args.output}: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %d graphs on %d nodes to %s in %.1fs", len(graphs), args.n, args.output, time.time() - t0)
    return 0


def cmd_enumerate(args) -> int:
    graphs, errors = census.read_graph_lines(args.graphs)
    for e in errors:
        print(e, file=sys.stderr)
    runs = census.run_census(graphs, args.variant, args.workers, args.min_walk)
    n = census.write_records(runs, args.output)
    if args.stats:
        census.write_stats(runs, args.stats)
    survivors = sum(r.stats.solutions for r in runs)
    log.info("%d graphs, %d records, %d surviving decompositions", len(runs), n, survivors)
    return 1 if errors else 0


def cmd_verify(args) -> int:
    graphs, errors = census.read_graph_lines(args.graphs)
    for e in errors:
        print(e, file=sys.stderr)
    overrides = {} if args.min_walk is None else {"min_walk_external": args.min_walk}
    cfg = variant_config(args.variant, **overrides)
    diffs = 0
    refused = []
    for idx, g in graphs:
        try:
            rep = cross_check(g, cfg, budget=args.budget)
        except BudgetExceeded as exc:
            refused.append(f"{idx}: {exc}")
            continue
        print(f"{idx}: {rep.summary()}")
        if not rep.ok:
            diffs += 1
            for d in rep.missing_from_search:
                print(f"    oracle only: {d}")
            for d in rep.missing_from_oracle:
                print(f"    search only: {d}")
    if refused:
        print(f"refused (over budget): {len(refused)}")
        for r in refused:
            print(f"  {r}")
    print(f"checked {len(graphs) - len(refused)} graphs, {diffs} with differences")
    return 1 if diffs else 0


def cmd_report(args) -> int:
    print(census.report(args.stats, top=args.top, percent=args.percent))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdcensus", description="1-vertex 3-manifold triangulation census via manifold decompositions")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-graphs", help="write all 4-regular multigraphs on N nodes")
    g.add_argument("n", type=int)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--disconnected", action="store_true", help="include disconnected graphs")
    g.set_defaults(func=cmd_gen_graphs)

    e = sub.add_parser("enumerate", help="search every graph in a file")
    e.add_argument("-g", "--graphs", required=True)
    e.add_argument("--variant", choices=sorted(VARIANTS), default="md")
    e.add_argument("-o", "--output", required=True, help="JSON-lines census records")
    e.add_argument("--stats", help="per-graph statistics CSV")
    e.add_argument("-j", "--workers", type=int, default=1)
    e.add_argument("--min-walk", type=int, default=None, help="minimum externals per walk (default 3)")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="cross-check the search against brute-force gluing")
    v.add_argument("-g", "--graphs", required=True)
    v.add_argument("--budget", type=int, default=6**6, help="largest number of gluing choices to try per graph")
    v.add_argument("--variant", choices=sorted(VARIANTS), default="md")
    v.add_argument("--min-walk", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="summarize stats CSVs; two files also get a ratio table")
    r.add_argument("stats", nargs="+")
    r.add_argument("--top", type=int, default=5)
    r.add_argument("--percent", type=float, default=1.0, help="share of slowest graphs to total up")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
