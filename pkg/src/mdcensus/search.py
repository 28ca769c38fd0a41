"""Backtracking enumeration of manifold decompositions.

Walks are built one external arc at a time.  A new walk always starts on the
lowest label that still has an unused member, traversed forwards; after each
external the search branches over the three internal arcs at the node it
arrives at, trying to close the walk before extending it.

Pruning switches (all sound, none changes the emitted set):

* ``budget_prune``: too few unused externals left for the walks still needed.
* ``use_degree3_preenumeration``: fix every admissible 3-external walk up
  front, subset by subset, and bar them from the main search so the budget
  per remaining walk rises from 3 to 4.  Only used with a minimum walk
  length of 3.
* ``orientable_prune``: with ``orientable_only``, refuse an external whose
  parallel member already appears in the current walk the other way round.
* ``track_one_vertex``: union-find over vertex links; prune when a link
  closes up before the decomposition is complete.
"""

from __future__ import annotations

import itertools
from builtins import enumerate as _enumerate
from dataclasses import dataclass, fields, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .decomp import (
    Decomposition,
    Walk,
    arrival,
    canonicalize_walk,
    decomposition_less,
    departure,
    internal_id,
    is_canonical_walk,
    relabel_walks,
    run_marking,
    sort_walks,
    survives_automorphisms,
    walk_key,
)
from .fatgraph import FatGraph, FatNode, SignedRelabelling, lift_automorphisms
from .frontier import CLOSED_EARLY, FrontierTracker
from .multigraph import automorphisms
from .tri import Triangulation, decomposition_to_triangulation, is_3manifold, is_orientable, vertex_classes

__all__ = [
    "SearchConfig",
    "SearchStats",
    "Result",
    "VARIANTS",
    "variant_config",
    "search",
    "enumerate",
    "prune_arc_budget",
    "orientable_prune",
    "pre_enumerate_degree3_walks",
    "walk_budget",
    "preenumerates",
    "canonicalize_walk",
    "decomposition_less",
    "survives_automorphisms",
]

EVERY_ARC = "every_arc"
WALK_COMPLETE = "walk_complete"


@dataclass(frozen=True)
class SearchConfig:
    min_walk_external: int = 3
    orientable_only: bool = False
    track_one_vertex: bool = True
    canonicity_granularity: str = WALK_COMPLETE
    use_degree3_preenumeration: bool = True
    budget_prune: bool = True
    orientable_prune: bool = True
    # bar 3-external walks whose internals lie in three distinct tetrahedra
    forbid_degree3_distinct: bool = True

    def __post_init__(self):
        if self.min_walk_external < 1:
            raise ValueError("min_walk_external must be at least 1")
        if self.canonicity_granularity not in (EVERY_ARC, WALK_COMPLETE):
            raise ValueError(f"unknown canonicity granularity {self.canonicity_granularity!r}")


VARIANTS = {
    "md": SearchConfig(),
    "md-star": SearchConfig(track_one_vertex=False),
    "md-o": SearchConfig(orientable_only=True),
    "md-star-o": SearchConfig(orientable_only=True, track_one_vertex=False),
}


def variant_config(name: str, **overrides) -> SearchConfig:
    try:
        cfg = VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}") from None
    return replace(cfg, **overrides)


@dataclass
class SearchStats:
    nodes: int = 0
    prune_budget: int = 0
    prune_orient: int = 0
    prune_canon: int = 0
    prune_vertex: int = 0
    prune_reverse: int = 0
    solutions: int = 0
    found: int = 0  # decompositions reaching the post-filters, survivors or not

    def as_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Result:
    decomposition: Decomposition
    triangulation: Triangulation
    survives: bool  # one vertex and a 3-manifold


def preenumerates(cfg: SearchConfig) -> bool:
    """Pre-enumeration only pays when 3 is the shortest walk length allowed.

    Below that the budget per walk does not rise and the subsets of fixed
    walks just multiply the search; above it there are no 3-walks.
    """
    return cfg.use_degree3_preenumeration and cfg.min_walk_external == 3


def walk_budget(cfg: SearchConfig) -> int:
    """Fewest externals any walk found by the main search can have."""
    return 4 if preenumerates(cfg) else cfg.min_walk_external


def prune_arc_budget(unused: int, completed: int, n: int, bound: int) -> bool:
    """True when ``unused`` externals cannot feed the ``n + 1 - completed`` walks still needed."""
    remaining = n + 1 - completed
    if remaining <= 0:
        return unused > 0
    return unused < bound * remaining


def orientable_prune(walk: Sequence[int], candidate: int) -> bool:
    return -candidate in walk


def _internal_tets(fg: FatGraph, w: Sequence[int]) -> List[int]:
    return [arrival(fg, x) >> 2 for x in w]


def _degree3_forbidden(fg: FatGraph, w: Sequence[int]) -> bool:
    return len(w) == 3 and len(set(_internal_tets(fg, w))) == 3


def pre_enumerate_degree3_walks(fg: FatGraph, forbid_distinct: bool = True) -> List[Walk]:
    """All closed walks with three externals, canonical and sorted."""
    signed = [s * l for l in fg.labels for s in (1, -1)]
    found = set()
    for w in itertools.product(signed, repeat=3):
        counts: Dict[int, int] = {}
        for x in w:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        if max(counts.values()) > 3:
            continue
        internals = []
        for p in range(3):
            a, b = arrival(fg, w[p]), departure(fg, w[(p + 1) % 3])
            if a >> 2 != b >> 2 or a == b:
                break
            internals.append(internal_id(a, b))
        else:
            if len(set(internals)) == 3 and not (forbid_distinct and _degree3_forbidden(fg, w)):
                found.add(canonicalize_walk(w))
    return sorted(found, key=walk_key)


def relabellings_for(fg: FatGraph) -> List[SignedRelabelling]:
    """Non-identity relabellings induced by automorphisms of the underlying graph."""
    lifted = lift_automorphisms(fg, automorphisms(fg.multigraph()))
    return [phi for phi in lifted if not phi.is_identity()]


class _Search:
    def __init__(self, fg: FatGraph, cfg: SearchConfig, relabellings: Sequence[SignedRelabelling]):
        self.fg = fg
        self.cfg = cfg
        self.n = n = fg.tet_count
        self.relabellings = list(relabellings)
        self.stats = SearchStats()
        self.used_members = [0] * (2 * n + 1)  # indexed by label
        self.internal_used = [False] * (6 * n)
        self.ext_int = [[-1, -1] for _ in range(6 * n)]
        self.int_ext: Dict[Tuple[int, int], int] = {}
        self.placed = 0
        self.fixed: List[Walk] = []  # pre-enumerated walks in force
        self.fixed_occs: List[List[Tuple[int, int]]] = []
        self.walks: List[Walk] = []  # walks found by the main search, increasing
        self.walk_occs: List[List[Tuple[int, int]]] = []
        self.frontier = FrontierTracker(4 * n) if cfg.track_one_vertex else None
        self.bound = walk_budget(cfg)
        self.results: Dict[Walk, Result] = {}
        # per-walk scratch
        self.cur: List[int] = []
        self.cur_occ: List[Tuple[int, int]] = []
        self.cur_next: List[int] = []  # node the internal after entry i leads to
        self.start_node = -1
        self.stabilizer: Optional[List[SignedRelabelling]] = None

    # -- placement primitives ------------------------------------------------

    def _place_external(self, x: int) -> int:
        label = abs(x)
        occ = 3 * (label - 1) + self.used_members[label]
        self.used_members[label] += 1
        self.placed += 1
        return occ

    def _unplace_external(self, x: int) -> None:
        self.used_members[abs(x)] -= 1
        self.placed -= 1

    def _pair(self, occ: int, sign: int, end_is_arrival: bool, iid: int, node: int) -> None:
        end = (1 if sign > 0 else 0) if end_is_arrival else (0 if sign > 0 else 1)
        self.ext_int[occ][end] = iid
        self.int_ext[iid, node] = occ

    def _unpair(self, occ: int, sign: int, end_is_arrival: bool, iid: int, node: int) -> None:
        end = (1 if sign > 0 else 0) if end_is_arrival else (0 if sign > 0 else 1)
        self.ext_int[occ][end] = -1
        del self.int_ext[iid, node]

    def _glue(self, x: int, prev_node: int, next_node: int) -> bool:
        """Frontier glue for one external in context; False if a link closed early."""
        if self.frontier is None:
            return True
        u, v = departure(self.fg, x), arrival(self.fg, x)
        a = 4 * (u >> 2) + (prev_node & 3)
        b = 4 * (v >> 2) + (next_node & 3)
        return self.frontier.glue(a, b) != CLOSED_EARLY

    # -- driver --------------------------------------------------------------

    def run(self) -> List[Result]:
        cfg = self.cfg
        if preenumerates(cfg):
            pool = pre_enumerate_degree3_walks(self.fg, cfg.forbid_degree3_distinct)
        else:
            pool = []
        self._subsets(pool, 0)
        return [self.results[k] for k in sorted(self.results, key=lambda ws: tuple(map(walk_key, ws)))]

    def _subsets(self, pool: List[Walk], i: int) -> None:
        if i == len(pool):
            self._next_walk()
            return
        w = pool[i]
        undo = self._place_fixed(w)
        if undo is not None:
            self._subsets(pool, i + 1)
            undo()
        self._subsets(pool, i + 1)

    def _place_fixed(self, w: Walk):
        """Place a whole pre-enumerated walk; returns an undo callback or None if it clashes."""
        fg = self.fg
        m = len(w)
        if len(self.fixed) + len(self.walks) >= self.n + 1:
            return None
        need: Dict[int, int] = {}
        for x in w:
            need[abs(x)] = need.get(abs(x), 0) + 1
        if any(self.used_members[l] + c > 3 for l, c in need.items()):
            return None
        nodes_after = [departure(fg, w[(p + 1) % m]) for p in range(m)]
        iids = [internal_id(arrival(fg, w[p]), nodes_after[p]) for p in range(m)]
        if any(self.internal_used[i] for i in iids):
            return None
        self.stats.nodes += 1
        occs = []
        for x in w:
            occs.append((self._place_external(x), 1 if x > 0 else -1))
        for p, x in _enumerate(w):
            self.internal_used[iids[p]] = True
            self._pair(occs[p][0], occs[p][1], True, iids[p], arrival(fg, x))
            nxt = (p + 1) % m
            self._pair(occs[nxt][0], occs[nxt][1], False, iids[p], nodes_after[p])
        mark = self.frontier.mark() if self.frontier else 0
        ok = True
        for p, x in _enumerate(w):
            if not self._glue(x, arrival(fg, w[p - 1]), nodes_after[p]):
                ok = False
                break
        self.fixed.append(w)
        self.fixed_occs.append(occs)

        def undo():
            self.fixed.pop()
            self.fixed_occs.pop()
            if self.frontier:
                self.frontier.rollback(mark)
            for p, x in _enumerate(w):
                nxt = (p + 1) % m
                self._unpair(occs[nxt][0], occs[nxt][1], False, iids[p], nodes_after[p])
                self._unpair(occs[p][0], occs[p][1], True, iids[p], arrival(fg, x))
                self.internal_used[iids[p]] = False
            for x in reversed(w):
                self._unplace_external(x)

        if not ok:
            self.stats.prune_vertex += 1
            undo()
            return None
        return undo

    def _next_walk(self) -> None:
        n = self.n
        k = len(self.fixed) + len(self.walks)
        unused = 6 * n - self.placed
        if unused == 0:
            if k == n + 1:
                self._emit()
            return
        if k >= n + 1:
            self.stats.prune_budget += 1
            return
        if self.cfg.budget_prune and prune_arc_budget(unused, k, n, self.bound):
            self.stats.prune_budget += 1
            return
        label = next(l for l in self.fg.labels if self.used_members[l] < 3)
        saved = (self.cur, self.cur_occ, self.cur_next, self.start_node, self.stabilizer)
        self.cur, self.cur_occ, self.cur_next = [label], [], []
        self.start_node = departure(self.fg, label)
        self.stabilizer = [None]
        if self.cfg.canonicity_granularity == EVERY_ARC:
            self.stabilizer = self._partial_stabilizer(label) or [None]
        self.stats.nodes += 1
        self.cur_occ.append((self._place_external(label), 1))
        self._extend()
        self._unplace_external(label)
        self.cur, self.cur_occ, self.cur_next, self.start_node, self.stabilizer = saved

    def _extend(self) -> None:
        fg = self.fg
        x = self.cur[-1]
        occ, sign = self.cur_occ[-1]
        a = arrival(fg, x)
        tet = a >> 2
        for face in range(4):
            b = 4 * tet + face
            if b == a:
                continue
            iid = internal_id(a, b)
            if self.internal_used[iid]:
                continue
            self.internal_used[iid] = True
            self._pair(occ, sign, True, iid, a)
            self.cur_next.append(b)
            mark = self.frontier.mark() if self.frontier else 0
            alive = True
            if len(self.cur) > 1:
                prev = arrival(fg, self.cur[-2])
                if not self._glue(x, prev, b):
                    self.stats.prune_vertex += 1
                    alive = False
            if alive:
                if b == self.start_node:
                    self._close(iid, a)
                self._continue_from(b)
            if self.frontier:
                self.frontier.rollback(mark)
            self.cur_next.pop()
            self._unpair(occ, sign, True, iid, a)
            self.internal_used[iid] = False

    def _continue_from(self, b: int) -> None:
        label, end = self.fg.triple_at(FatNode(b >> 2, b & 3))
        if self.used_members[label] >= 3:
            return
        y = label if end == 0 else -label
        if self.cfg.budget_prune:
            # the walks after the current one still need their share
            later = self.n - len(self.fixed) - len(self.walks)
            if 6 * self.n - self.placed - 1 < self.bound * later:
                self.stats.prune_budget += 1
                return
        if self.cfg.orientable_only and self.cfg.orientable_prune and orientable_prune(self.cur, y):
            self.stats.prune_orient += 1
            return
        iid = internal_id(arrival(self.fg, self.cur[-1]), b)
        occ = self._place_external(y)
        sign = 1 if y > 0 else -1
        self._pair(occ, sign, False, iid, b)
        self.cur.append(y)
        self.cur_occ.append((occ, sign))
        self.stats.nodes += 1
        if self._partial_rejected():
            self.stats.prune_canon += 1
        else:
            self._extend()
        self.cur.pop()
        self.cur_occ.pop()
        self._unpair(occ, sign, False, iid, b)
        self._unplace_external(y)

    def _close(self, iid: int, a: int) -> None:
        cfg = self.cfg
        fg = self.fg
        w = tuple(self.cur)
        m = len(w)
        if m < cfg.min_walk_external:
            return
        if m == 3:
            if preenumerates(cfg):
                return
            if cfg.forbid_degree3_distinct and _degree3_forbidden(fg, w):
                return
        first_occ, first_sign = self.cur_occ[0]
        self._pair(first_occ, first_sign, False, iid, self.start_node)
        mark = self.frontier.mark() if self.frontier else 0
        try:
            if not self._glue(w[0], a, self.cur_next[0]):
                self.stats.prune_vertex += 1
                return
            if not is_canonical_walk(w) or (self.walks and walk_key(w) <= walk_key(self.walks[-1])):
                self.stats.prune_canon += 1
                return
            prefix = sort_walks(self.walks + [w] + [s for s in self.fixed if walk_key(s) < walk_key(w)])
            if not survives_automorphisms(prefix, self.relabellings):
                self.stats.prune_canon += 1
                return
            marks = run_marking(fg, self.cur_occ, self.ext_int, self.int_ext)
            if marks is not None and any(len(v) != 1 for v in marks.values()):
                self.stats.prune_reverse += 1
                return
            self.walks.append(w)
            self.walk_occs.append(list(self.cur_occ))
            self._next_walk()
            self.walks.pop()
            self.walk_occs.pop()
        finally:
            if self.frontier:
                self.frontier.rollback(mark)
            self._unpair(first_occ, first_sign, False, iid, self.start_node)

    # -- canonicity on partial walks -----------------------------------------

    def _partial_stabilizer(self, label: int) -> Optional[List[SignedRelabelling]]:
        """Relabellings fixing every walk known to precede the walk starting on ``label``."""
        if any(s[0] == label for s in self.fixed):
            return None  # the new walk's rank among fixed walks is unknown
        prefix = sort_walks(self.walks + [s for s in self.fixed if s[0] < label])
        stab = [phi for phi in self.relabellings if relabel_walks(prefix, phi) == prefix]
        return [None] + stab  # None stands for the identity

    def _partial_rejected(self) -> bool:
        """Can the current partial walk no longer become the next canonical walk?

        True when it already sorts below the previous walk, or when some
        rotation of it (or of its image under a relabelling fixing the walks
        before it) provably sorts below it.  The identity is always tried;
        with every-arc canonicity the stabilizer of the earlier walks is too.
        """
        cur = self.cur
        m = len(cur)
        label = cur[0]
        ck = walk_key(cur)
        if self.walks:
            prev = walk_key(self.walks[-1])
            if ck[: len(prev)] < prev[:m]:
                return True
        for phi in self.stabilizer:
            img = cur if phi is None else [phi.apply(x) for x in cur]
            for i, y in _enumerate(img):
                if phi is None and i == 0:
                    continue
                if y == label:
                    cand = img[i:]
                elif y == -label:
                    cand = [-z for z in reversed(img[: i + 1])]
                else:
                    continue
                k = min(len(cand), m)
                if walk_key(cand[:k]) < ck[:k]:
                    return True
        return False

    # -- emission ------------------------------------------------------------

    def _emit(self) -> None:
        cfg = self.cfg
        walks = sort_walks(self.walks + self.fixed)
        if not survives_automorphisms(walks, self.relabellings):
            self.stats.prune_canon += 1
            return
        for occs in self.walk_occs + self.fixed_occs:
            marks = run_marking(self.fg, occs, self.ext_int, self.int_ext)
            if marks is None or any(len(v) != 1 for v in marks.values()):
                self.stats.prune_reverse += 1
                return
        d = Decomposition(walks)
        if cfg.orientable_only and any(-x in w for w in walks for x in w):
            self.stats.prune_orient += 1
            return
        t = decomposition_to_triangulation(d, self.fg)
        if cfg.orientable_only and not is_orientable(t):
            self.stats.prune_orient += 1
            return
        self.stats.found += 1
        survives = len(vertex_classes(t)) == 1 and is_3manifold(t)
        if survives:
            self.stats.solutions += 1
        self.results[walks] = Result(d, t, survives)


def search(
    fg: FatGraph,
    cfg: SearchConfig = SearchConfig(),
    relabellings: Optional[Sequence[SignedRelabelling]] = None,
    stats: Optional[SearchStats] = None,
) -> List[Result]:
    """Every canonical decomposition reaching the post-filters, sorted.

    With ``track_one_vertex`` off, decompositions whose triangulation has more
    than one vertex are returned too, flagged ``survives=False``.
    """
    if relabellings is None:
        relabellings = relabellings_for(fg)
    s = _Search(fg, cfg, relabellings)
    out = s.run()
    if stats is not None:
        for f in fields(SearchStats):
            setattr(stats, f.name, getattr(stats, f.name) + getattr(s.stats, f.name))
    return out


def enumerate(
    fg: FatGraph,
    cfg: SearchConfig = SearchConfig(),
    relabellings: Optional[Sequence[SignedRelabelling]] = None,
    stats: Optional[SearchStats] = None,
) -> Iterator[Decomposition]:
    """Canonical manifold decompositions of ``fg`` under ``cfg``, in increasing order."""
    for r in search(fg, cfg, relabellings, stats):
        if r.survives:
            yield r.decomposition
