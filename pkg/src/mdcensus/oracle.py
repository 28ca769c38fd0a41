"""Brute-force face gluing enumerator, used as ground truth for the search.

Each arc of the face pairing graph glues two faces, through one of the six
bijections between their vertex triples.  Bijection ``c`` sends the ``i``-th
vertex (ascending) of the first face to vertex ``sigma[i]`` of the second,
where ``sigma = list(itertools.permutations(range(3)))[c]``.  Faces are
handed out as in :func:`mdcensus.fatgraph.fatten`, so oracle triangulations
share the labelling of the fattened graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .decomp import Decomposition, canonical_orbit_form
from .fatgraph import fatten
from .multigraph import MultiGraph
from .search import SearchConfig, enumerate as search_enumerate, relabellings_for
from .tri import (
    Triangulation,
    edge_classes,
    face_vertices,
    is_3manifold,
    is_orientable,
    triangulation_to_decomposition,
    vertex_classes,
    vertex_links,
)

SIGMAS = list(itertools.permutations(range(3)))
DEFAULT_BUDGET = 6**6

ALL = "all"
ONE_VERTEX_3MFLD = "one_vertex_3mfld"


class BudgetExceeded(RuntimeError):
    pass


def face_assignment(g: MultiGraph) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """((tet, face), (tet, face)) for each arc, matching :func:`fatten`."""
    fg = fatten(g)
    return [((t.tet, t.face), (h.tet, h.face)) for t, h in fg.triples]


def gluing_perm(f: int, g: int, choice: int) -> Tuple[int, int, int, int]:
    src, dst = face_vertices(f), face_vertices(g)
    sigma = SIGMAS[choice]
    p = [0] * 4
    p[f] = g
    for i, v in enumerate(src):
        p[v] = dst[sigma[i]]
    return tuple(p)


def build(g: MultiGraph, choices: Sequence[int], faces=None) -> Triangulation:
    """Triangulation for a (possibly partial) choice vector; later arcs stay unglued."""
    faces = faces or face_assignment(g)
    pairs = []
    for ((i, f), (j, h)), c in zip(faces, choices):
        pairs.append((i, f, j, h, gluing_perm(f, h, c)))
    return Triangulation.from_pairs(g.order, pairs)


def keep(t: Triangulation, filter: str) -> bool:
    if filter == ALL:
        return True
    if filter == ONE_VERTEX_3MFLD:
        return len(vertex_classes(t)) == 1 and is_3manifold(t)
    raise ValueError(f"unknown filter {filter!r}")


def _dead_end(t: Triangulation) -> bool:
    """A partial gluing that cannot finish as a one-vertex 3-manifold."""
    if any(e.reversed for e in edge_classes(t)):
        return True
    links = vertex_links(t)
    return len(links) > 1 and any(link.closed for link in links)


def choice_count(g: MultiGraph) -> int:
    return 6 ** len(g.arcs)


def enumerate_gluings(
    g: MultiGraph,
    filter: str = ALL,
    pruned: bool = True,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> List[Triangulation]:
    """Every labelled closed triangulation with face pairing graph ``g`` passing ``filter``.

    ``pruned`` cuts branches that already have a reversed edge or a closed
    link next to another vertex class; it only applies to the one-vertex
    filter and never changes the result.
    """
    if not g.is_valid():
        raise ValueError(f"not a 4-regular multigraph: {g}")
    total = choice_count(g)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} gluing choices exceed the budget of {budget}")
    faces = face_assignment(g)
    m = len(faces)
    if not pruned or filter == ALL:
        return [t for cs in itertools.product(range(6), repeat=m) if keep(t := build(g, cs, faces), filter)]
    out = []
    choices: List[int] = []

    def rec():
        if len(choices) == m:
            t = build(g, choices, faces)
            if keep(t, filter):
                out.append(t)
            return
        for c in range(6):
            choices.append(c)
            if not _dead_end(build(g, choices, faces)):
                rec()
            choices.pop()

    rec()
    return out


# ---------------------------------------------------------------------------
# comparison with the decomposition search


def admissible(t: Triangulation, d: Decomposition, cfg: SearchConfig) -> bool:
    """Does a one-vertex 3-manifold triangulation meet ``cfg``'s walk restrictions?

    Read off the triangulation rather than the walks where possible, so the
    check stays independent of the search.
    """
    for e in edge_classes(t):
        if e.degree < cfg.min_walk_external:
            return False
        if cfg.forbid_degree3_distinct and e.degree == 3 and len({m[0] for m in e.members}) == 3:
            return False
    if cfg.orientable_only:
        if not is_orientable(t):
            return False
        if any(-x in w for w in d.walks for x in w):
            return False
    return True


@dataclass
class CrossCheckReport:
    graph: MultiGraph
    oracle_labelled: int
    oracle_classes: int
    search_count: int
    search_labelled: int
    missing_from_search: List[Decomposition] = field(default_factory=list)
    missing_from_oracle: List[Decomposition] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            not self.missing_from_search
            and not self.missing_from_oracle
            and self.oracle_labelled == self.search_labelled
        )

    def summary(self) -> str:
        status = "ok" if self.ok else "DIFF"
        return (
            f"{status} {self.graph.to_text()}: search {self.search_count} "
            f"({self.search_labelled} labelled), oracle {self.oracle_classes} "
            f"({self.oracle_labelled} labelled), missing from search "
            f"{len(self.missing_from_search)}, missing from oracle {len(self.missing_from_oracle)}"
        )


def orbit_size(d: Decomposition, relabellings) -> int:
    """Number of distinct canonical images of ``d`` (identity included)."""
    images = {d.canonical()}
    for phi in relabellings:
        images.add(d.relabel(phi))
    return len(images)


def cross_check(
    g: MultiGraph,
    cfg: SearchConfig = SearchConfig(),
    budget: Optional[int] = DEFAULT_BUDGET,
    triangulations: Optional[Sequence[Triangulation]] = None,
) -> CrossCheckReport:
    """Compare the search on ``g`` with the filtered oracle.

    ``triangulations`` may carry a previous ``enumerate_gluings(g,
    ONE_VERTEX_3MFLD)`` result so several configurations share one brute
    force run.
    """
    fg = fatten(g)
    relabellings = relabellings_for(fg)
    if triangulations is None:
        triangulations = enumerate_gluings(g, ONE_VERTEX_3MFLD, budget=budget)
    oracle_set = set()
    labelled = 0
    for t in triangulations:
        d = triangulation_to_decomposition(t, fg)
        if not admissible(t, d, cfg):
            continue
        labelled += 1
        oracle_set.add(canonical_orbit_form(d, relabellings))
    found = list(search_enumerate(fg, cfg, relabellings))
    found_set = set(found)
    return CrossCheckReport(
        graph=g,
        oracle_labelled=labelled,
        oracle_classes=len(oracle_set),
        search_count=len(found),
        search_labelled=sum(orbit_size(d, relabellings) for d in found),
        missing_from_search=sorted(oracle_set - found_set, key=str),
        missing_from_oracle=sorted(found_set - oracle_set, key=str),
    )
