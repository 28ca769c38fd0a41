"""Ordered decompositions of fattened face pairing graphs.

A walk is stored as the cyclic sequence of its external arcs, each written as
a signed triple label: ``+l`` when the arc is traversed from the triple's tail
to its head and ``-l`` otherwise.  The internal arc between two consecutive
externals is the unique K4 arc joining the node the first one arrives at and
the node the second one leaves from.

The three members of a triple are interchangeable, so member slots are not
stored: occurrences of a label are numbered 0, 1, 2 in walk-major order
whenever slot identities are needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .fatgraph import PAIR_INDEX, PAIRS, FatGraph, SignedRelabelling

Walk = Tuple[int, ...]


class InvalidDecomposition(ValueError):
    pass


# ---------------------------------------------------------------------------
# canonical walks and the walk order


def entry_key(x: int) -> int:
    """Sort key of one entry: smaller label first, ``+l`` before ``-l``."""
    return 2 * x if x > 0 else 1 - 2 * x


def walk_key(w: Sequence[int]) -> Tuple[int, ...]:
    """Walks compare entry by entry; a proper prefix is smaller."""
    return tuple([2 * x if x > 0 else 1 - 2 * x for x in w])


def reverse_walk(w: Sequence[int]) -> Walk:
    return tuple(-x for x in reversed(w))


def canonicalize_walk(w: Sequence[int]) -> Walk:
    """Rotation/reversal starting on the lowest label, used forwards.

    Ties on the first entry are broken by the second entry (smaller label,
    then forwards) and so on; the result is the least candidate under
    :func:`walk_key`.
    """
    w = tuple(w)
    if not w:
        return w
    low = min(abs(x) for x in w)
    m = len(w)
    rev = None
    best = None
    best_key = None
    for i, x in enumerate(w):
        if x == low:
            cand = w[i:] + w[:i]
        elif x == -low:
            if rev is None:
                rev = reverse_walk(w)
            j = m - 1 - i
            cand = rev[j:] + rev[:j]
        else:
            continue
        key = walk_key(cand)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def is_canonical_walk(w: Sequence[int]) -> bool:
    return tuple(w) == canonicalize_walk(w)


def sort_walks(walks) -> Tuple[Walk, ...]:
    return tuple(sorted(walks, key=walk_key))


def decomposition_key(walks: Sequence[Walk]):
    return tuple(walk_key(w) for w in walks)


def decomposition_less(d1, d2) -> bool:
    """Compare canonical decompositions walk by walk (then by walk count)."""
    w1 = d1.walks if isinstance(d1, Decomposition) else d1
    w2 = d2.walks if isinstance(d2, Decomposition) else d2
    return decomposition_key(w1) < decomposition_key(w2)


def relabel_walks(walks: Sequence[Walk], phi: SignedRelabelling) -> Tuple[Walk, ...]:
    """Image under ``phi``, canonicalized and sorted."""
    return sort_walks(canonicalize_walk([phi.apply(x) for x in w]) for w in walks)


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class Decomposition:
    """An ordered decomposition given by its walks of signed labels."""

    walks: Tuple[Walk, ...]

    def __post_init__(self):
        object.__setattr__(self, "walks", tuple(tuple(int(x) for x in w) for w in self.walks))

    def canonical(self) -> "Decomposition":
        return Decomposition(sort_walks(canonicalize_walk(w) for w in self.walks))

    def is_canonical(self) -> bool:
        return self == self.canonical()

    def relabel(self, phi: SignedRelabelling) -> "Decomposition":
        return Decomposition(relabel_walks(self.walks, phi))

    def to_text(self) -> str:
        return " ".join("(" + ",".join(str(x) for x in w) + ")" for w in self.walks)

    @classmethod
    def from_text(cls, text: str) -> "Decomposition":
        text = text.strip().strip("{}").strip()
        walks = []
        pos = 0
        for m in re.finditer(r"\(([^()]*)\)", text):
            if text[pos : m.start()].strip(" ,"):
                raise ValueError(f"unexpected text {text[pos:m.start()]!r}")
            body = m.group(1).replace("−", "-")
            walks.append(tuple(int(tok) for tok in body.split(",") if tok.strip()))
            pos = m.end()
        if text[pos:].strip(" ,"):
            raise ValueError(f"unexpected trailing text {text[pos:]!r}")
        return cls(tuple(walks))

    def __str__(self) -> str:
        return self.to_text()

    def __len__(self) -> int:
        return len(self.walks)


def external_length(w: Sequence[int]) -> int:
    """Number of external arcs in a walk (the degree of its edge)."""
    return len(w)


def canonical_orbit_form(d: Decomposition, relabellings: Sequence[SignedRelabelling]) -> Decomposition:
    """Least canonical image of ``d`` over the given relabellings."""
    best = d.canonical()
    best_key = decomposition_key(best.walks)
    for phi in relabellings:
        img = relabel_walks(d.walks, phi)
        key = decomposition_key(img)
        if key < best_key:
            best, best_key = Decomposition(img), key
    return best


def survives_automorphisms(d, relabellings: Sequence[SignedRelabelling]) -> bool:
    """False iff some relabelled image sorts strictly before ``d``.

    ``d`` may be a prefix of a larger decomposition: it must hold the smallest
    walks of that decomposition in sorted order.  A smaller image of the
    prefix already proves the whole decomposition non-canonical.
    """
    walks = d.walks if isinstance(d, Decomposition) else tuple(d)
    key = decomposition_key(walks)
    for phi in relabellings:
        if decomposition_key(relabel_walks(walks, phi)) < key:
            return False
    return True


# ---------------------------------------------------------------------------
# arc-level structure


def node_id(node) -> int:
    return 4 * node[0] + node[1]


def internal_id(n1: int, n2: int) -> int:
    """Id of the internal arc joining node ids ``n1`` and ``n2`` (same tet)."""
    return 6 * (n1 >> 2) + PAIR_INDEX[n1 & 3, n2 & 3]


def departure(fg: FatGraph, x: int) -> int:
    tail, head = fg.triples[abs(x) - 1]
    return node_id(tail if x > 0 else head)


def arrival(fg: FatGraph, x: int) -> int:
    tail, head = fg.triples[abs(x) - 1]
    return node_id(head if x > 0 else tail)


@dataclass
class ArcPairing:
    """Which internal arc each external occurrence meets at each of its ends.

    Occurrence ids are ``3 * (label - 1) + slot``.  ``ext_int[occ][end]`` is
    the internal arc id met at the triple's tail (end 0) or head (end 1);
    ``int_ext[(internal, node)]`` is the occurrence met there.
    """

    fg: FatGraph
    ext_int: List[List[int]]
    int_ext: Dict[Tuple[int, int], int]
    occ_walks: List[List[Tuple[int, int]]]  # per walk: (occ, sign)

    def marking(self, walk_index: int) -> Optional[Dict[int, List[int]]]:
        return run_marking(self.fg, self.occ_walks[walk_index], self.ext_int, self.int_ext)


def check(d: Decomposition, fg: FatGraph) -> None:
    """Raise :class:`InvalidDecomposition` naming the first violated condition."""
    n = fg.tet_count
    counts = [0] * (2 * n)
    internal_use = [0] * (6 * n)
    for wi, w in enumerate(d.walks):
        if not w:
            raise InvalidDecomposition(f"walk {wi}: empty")
        for x in w:
            if x == 0 or abs(x) > 2 * n:
                raise InvalidDecomposition(f"walk {wi}: label {x} out of range")
            counts[abs(x) - 1] += 1
        for p, x in enumerate(w):
            y = w[(p + 1) % len(w)]
            a, b = arrival(fg, x), departure(fg, y)
            if a >> 2 != b >> 2 or a == b:
                raise InvalidDecomposition(
                    f"walk {wi}: no internal arc between {x} and {y} (alternation fails)"
                )
            internal_use[internal_id(a, b)] += 1
    for idx, c in enumerate(counts):
        if c != 3:
            raise InvalidDecomposition(f"label {idx + 1} used {c} times, expected 3 (partition fails)")
    for idx, c in enumerate(internal_use):
        if c != 1:
            raise InvalidDecomposition(f"internal arc {idx} used {c} times (partition fails)")


def validate(d: Decomposition, fg: FatGraph) -> bool:
    try:
        check(d, fg)
    except InvalidDecomposition:
        return False
    return True


def arc_pairing(d: Decomposition, fg: FatGraph) -> ArcPairing:
    """Pair externals with internals at every node; ``d`` must be valid on ``fg``."""
    check(d, fg)
    next_slot = [0] * (2 * fg.tet_count)
    ext_int = [[-1, -1] for _ in range(6 * fg.tet_count)]
    int_ext: Dict[Tuple[int, int], int] = {}
    occ_walks = []
    for w in d.walks:
        occs = []
        for x in w:
            idx = abs(x) - 1
            occs.append((3 * idx + next_slot[idx], 1 if x > 0 else -1))
            next_slot[idx] += 1
        m = len(w)
        for p, x in enumerate(w):
            occ = occs[p][0]
            dep, arr = departure(fg, x), arrival(fg, x)
            before = internal_id(arrival(fg, w[p - 1]), dep)
            after = internal_id(arr, departure(fg, w[(p + 1) % m]))
            dep_end, arr_end = (0, 1) if x > 0 else (1, 0)
            ext_int[occ][dep_end] = before
            ext_int[occ][arr_end] = after
            int_ext[before, dep] = occ
            int_ext[after, arr] = occ
        occ_walks.append(occs)
    return ArcPairing(fg, ext_int, int_ext, occ_walks)


def run_marking(fg: FatGraph, walk, ext_int, int_ext) -> Optional[Dict[int, List[int]]]:
    """Mark arcs "above" the walk; returns position -> occurrences marked above it.

    ``walk`` lists (occurrence, sign) pairs.  Returns None when a pairing
    needed by the procedure is not yet known (partial decompositions).
    """
    m = len(walk)
    first_occ = walk[0][0]
    label_idx = first_occ // 3
    start = None
    for s in range(3):
        occ = 3 * label_idx + s
        if occ != first_occ and ext_int[occ][0] >= 0:
            start = occ
            break
    if start is None:
        return None
    marks: Dict[int, List[int]] = {0: [start]}
    pos_a, above = 0, start
    for _ in range(4 * m + 4):
        pos_b = (pos_a + 1) % m
        occ_a, sign_a = walk[pos_a]
        occ_b, sign_b = walk[pos_b]
        end_i = 1 if sign_a > 0 else 0
        i = node_id(fg.triples[occ_a // 3][end_i])
        j = node_id(fg.triples[occ_b // 3][0 if sign_b > 0 else 1])
        e_b_internal = ext_int[above][end_i]
        if e_b_internal < 0:
            return None
        k = _other_node(e_b_internal, i)
        e_d = int_ext.get((internal_id(k, j), j))
        if e_d is None:
            return None
        if pos_b == 0 and e_d in marks[0]:
            return marks
        got = marks.setdefault(pos_b, [])
        if e_d not in got:
            got.append(e_d)
        pos_a, above = pos_b, e_d
    raise RuntimeError("marking did not terminate")


def _other_node(internal: int, node: int) -> int:
    tet, idx = divmod(internal, 6)
    a, b = PAIRS[idx]
    face = node & 3
    return 4 * tet + (b if face == a else a)


@dataclass
class Marking:
    walk_index: int
    above: Dict[int, List[int]]  # walk position -> occurrence ids marked above it

    def is_non_reversing(self) -> bool:
        return all(len(v) == 1 for v in self.above.values())


def mark(d: Decomposition, walk_index: int, fg: FatGraph) -> Marking:
    pairing = arc_pairing(d, fg)
    above = pairing.marking(walk_index)
    if above is None:  # complete decompositions always have every pairing
        raise RuntimeError("incomplete pairing in a valid decomposition")
    return Marking(walk_index, above)


def is_non_reversing(d: Decomposition, walk_index: int, fg: FatGraph) -> bool:
    return mark(d, walk_index, fg).is_non_reversing()


# ---------------------------------------------------------------------------
# reading a fattened graph off the notation


def fatgraph_from_walks(d: Decomposition) -> FatGraph:
    """Rebuild the labelled fattened graph that the walks describe.

    The end where one external arrives and the end the next one leaves from
    lie in the same tetrahedron; grouping ends this way recovers the K4s.
    Tetrahedra are numbered by their smallest end and faces handed out in end
    order, with end ``2 * (label - 1)`` the tail of ``label``.
    """
    labels = sorted({abs(x) for w in d.walks for x in w})
    if not labels or labels != list(range(1, len(labels) + 1)):
        raise InvalidDecomposition("labels must be exactly 1..m")
    m = len(labels)
    parent = list(range(2 * m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def arr_end(x):
        return 2 * (abs(x) - 1) + (1 if x > 0 else 0)

    def dep_end(x):
        return 2 * (abs(x) - 1) + (0 if x > 0 else 1)

    for w in d.walks:
        for p, x in enumerate(w):
            a, b = find(arr_end(x)), find(dep_end(w[(p + 1) % len(w)]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: Dict[int, List[int]] = {}
    for e in range(2 * m):
        groups.setdefault(find(e), []).append(e)
    if any(len(g) != 4 for g in groups.values()) or 4 * len(groups) != 2 * m:
        raise InvalidDecomposition("ends do not group into tetrahedra of four faces")
    where = {}
    for tet, root in enumerate(sorted(groups)):
        for face, e in enumerate(sorted(groups[root])):
            where[e] = (tet, face)
    triples = tuple((where[2 * i], where[2 * i + 1]) for i in range(m))
    return FatGraph(len(groups), triples)
