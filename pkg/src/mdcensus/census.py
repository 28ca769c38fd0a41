"""Census driver: per-graph enumeration, output records, stats and reports."""

from __future__ import annotations

import csv
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fatgraph import fatten
from .multigraph import MultiGraph
from .search import SearchStats, search, variant_config
from .tri import edge_classes, is_orientable, triangulation_to_decomposition, vertex_classes

STATS_HEADER = [
    "graph_index",
    "solutions",
    "nodes",
    "prune_budget",
    "prune_orient",
    "prune_canon",
    "prune_vertex",
    "cpu_seconds",
]


@dataclass(frozen=True)
class CensusRecord:
    graph_index: int
    graph: str
    variant: str
    decomposition: str
    gluings: str
    vertices: int
    edges: int
    orientable: bool
    survives: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CensusRecord":
        return cls(**json.loads(line))

    def sort_key(self):
        return (self.graph_index, self.decomposition)


@dataclass
class GraphRun:
    graph_index: int
    records: List[CensusRecord]
    stats: SearchStats
    cpu_seconds: float

    def stats_row(self) -> List[str]:
        s = self.stats
        return [
            str(self.graph_index),
            str(s.solutions),
            str(s.nodes),
            str(s.prune_budget),
            str(s.prune_orient),
            str(s.prune_canon),
            str(s.prune_vertex),
            f"{self.cpu_seconds:.6f}",
        ]


def read_graph_lines(path) -> Tuple[List[Tuple[int, MultiGraph]], List[str]]:
    """Graphs with their index (position among graph lines) plus per-line errors.

    A bad line keeps its index so the remaining graphs line up with the
    generator's order.
    """
    graphs = []
    errors = []
    index = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                g = MultiGraph.from_text(line)
                if not g.is_valid():
                    raise ValueError(f"not a 4-regular multigraph with 2n arcs: {line.strip()!r}")
                graphs.append((index, g))
            except ValueError as exc:
                errors.append(f"{path}:{lineno}: {exc}")
            index += 1
    return graphs, errors


def run_graph(graph_index: int, graph_text: str, variant: str, min_walk: Optional[int] = None) -> GraphRun:
    overrides = {} if min_walk is None else {"min_walk_external": min_walk}
    cfg = variant_config(variant, **overrides)
    g = MultiGraph.from_text(graph_text)
    fg = fatten(g)
    stats = SearchStats()
    start = time.process_time()
    results = search(fg, cfg, stats=stats)
    cpu = time.process_time() - start
    records = []
    for r in results:
        d, t = r.decomposition, r.triangulation
        back = triangulation_to_decomposition(t, fg)
        if back != d:
            raise RuntimeError(f"graph {graph_index}: round trip changed {d} into {back}")
        records.append(
            CensusRecord(
                graph_index=graph_index,
                graph=g.to_text(),
                variant=variant,
                decomposition=d.to_text(),
                gluings=t.to_text(),
                vertices=len(vertex_classes(t)),
                edges=len(edge_classes(t)),
                orientable=is_orientable(t),
                survives=r.survives,
            )
        )
    return GraphRun(graph_index, records, stats, cpu)


def _run_packed(args):
    return run_graph(*args)


def run_census(
    graphs: Sequence[Tuple[int, MultiGraph]],
    variant: str,
    workers: int = 1,
    min_walk: Optional[int] = None,
) -> List[GraphRun]:
    """Run every graph; results come back sorted by graph index whatever the pool did."""
    variant_config(variant)  # fail fast on a bad name
    jobs = [(i, g.to_text(), variant, min_walk) for i, g in graphs]
    if workers <= 1:
        runs = [_run_packed(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_packed, jobs, chunksize=1))
    runs.sort(key=lambda r: r.graph_index)
    for r in runs:
        r.records.sort(key=CensusRecord.sort_key)
    return runs


def write_records(runs: Iterable[GraphRun], path) -> int:
    count = 0
    with open(path, "w") as fh:
        for run in runs:
            for rec in run.records:
                fh.write(rec.to_json() + "\n")
                count += 1
    return count


def read_records(path) -> List[CensusRecord]:
    with open(path) as fh:
        return [CensusRecord.from_json(line) for line in fh if line.strip()]


def write_stats(runs: Iterable[GraphRun], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STATS_HEADER)
        for run in runs:
            w.writerow(run.stats_row())


# ---------------------------------------------------------------------------
# reports


def read_stats(path) -> List[Dict[str, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(STATS_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        rows = []
        for row in reader:
            parsed = {k: int(row[k]) for k in STATS_HEADER if k != "cpu_seconds"}
            parsed["cpu_seconds"] = float(row["cpu_seconds"])
            rows.append(parsed)
    return rows


@dataclass
class Summary:
    graphs: int
    solutions: int
    nodes: int
    total_cpu: float
    mean_cpu: float
    median_cpu: float
    max_cpu: float
    slowest: List[Tuple[int, float]]
    slow_fraction: float  # share of total time spent in the slowest p%


def summarize(rows: Sequence[Dict[str, float]], top: int = 5, percent: float = 1.0) -> Summary:
    if not rows:
        return Summary(0, 0, 0, 0.0, 0.0, 0.0, 0.0, [], 0.0)
    times = [r["cpu_seconds"] for r in rows]
    total = sum(times)
    ranked = sorted(rows, key=lambda r: (-r["cpu_seconds"], r["graph_index"]))
    k = max(1, round(len(rows) * percent / 100))
    slow = sum(r["cpu_seconds"] for r in ranked[:k])
    return Summary(
        graphs=len(rows),
        solutions=int(sum(r["solutions"] for r in rows)),
        nodes=int(sum(r["nodes"] for r in rows)),
        total_cpu=total,
        mean_cpu=total / len(rows),
        median_cpu=statistics.median(times),
        max_cpu=max(times),
        slowest=[(int(r["graph_index"]), r["cpu_seconds"]) for r in ranked[:top]],
        slow_fraction=slow / total if total > 0 else 0.0,
    )


def format_summary(name: str, s: Summary, percent: float = 1.0) -> str:
    lines = [
        f"== {name}",
        f"graphs {s.graphs}  solutions {s.solutions}  nodes {s.nodes}",
        f"cpu total {s.total_cpu:.3f}s  mean {s.mean_cpu:.4f}s  median {s.median_cpu:.4f}s  max {s.max_cpu:.4f}s",
        f"slowest {percent:g}% of graphs take {100 * s.slow_fraction:.1f}% of the time",
        "slowest graphs:",
    ]
    lines += [f"  {idx:>8}  {t:.4f}s" for idx, t in s.slowest]
    return "\n".join(lines)


def ratio_table(a: Sequence[Dict[str, float]], b: Sequence[Dict[str, float]], names=("A", "B"), top: int = 10) -> str:
    """Per-graph times of two runs side by side, slowest (in the first run) first."""
    tb = {int(r["graph_index"]): r for r in b}
    rows = []
    for r in a:
        idx = int(r["graph_index"])
        if idx in tb:
            ta, tbb = r["cpu_seconds"], tb[idx]["cpu_seconds"]
            rows.append((idx, ta, tbb, ta / tbb if tbb > 0 else float("inf")))
    rows.sort(key=lambda x: (-x[1], x[0]))
    out = [f"{'graph':>8}  {names[0]:>12}  {names[1]:>12}  {'ratio':>8}"]
    for idx, ta, tbb, ratio in rows[:top]:
        out.append(f"{idx:>8}  {ta:>12.4f}  {tbb:>12.4f}  {ratio:>8.3f}")
    return "\n".join(out)


def report(paths: Sequence[str], top: int = 5, percent: float = 1.0) -> str:
    tables = [(p, read_stats(p)) for p in paths]
    parts = [format_summary(p, summarize(rows, top, percent), percent) for p, rows in tables]
    if len(tables) == 2:
        (pa, ra), (pb, rb) = tables
        parts.append("== per-graph ratio")
        parts.append(ratio_table(ra, rb, (pa, pb), top))
    return "\n\n".join(parts)
