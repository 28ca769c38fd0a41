"""Fattened face pairing graphs.

Each tetrahedron ``i`` becomes a K4 on the nodes ``(i, 0..3)``; node ``(i, f)``
stands for face ``f`` (the face opposite vertex ``f``).  Each face
identification becomes a triple of parallel external arcs, labelled
``1..2n`` and oriented from a tail node to a head node.  The internal arc
``{(i, a), (i, b)}`` is the edge of tetrahedron ``i`` shared by faces ``a``
and ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Sequence, Tuple

from .multigraph import ArcAutomorphism, MultiGraph

FACE_NAMES = "abcd"

PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
# index of the internal arc {a, b} within one K4
PAIR_INDEX = {}
for _i, (_a, _b) in enumerate(PAIRS):
    PAIR_INDEX[_a, _b] = PAIR_INDEX[_b, _a] = _i


class FatNode(NamedTuple):
    tet: int
    face: int

    def __str__(self):
        return f"({self.tet},{FACE_NAMES[self.face]})"


@dataclass(frozen=True)
class FatGraph:
    """Triple ``label`` joins ``triples[label - 1] = (tail, head)``."""

    tet_count: int
    triples: Tuple[Tuple[FatNode, FatNode], ...]

    def __post_init__(self):
        triples = tuple((FatNode(*t), FatNode(*h)) for t, h in self.triples)
        object.__setattr__(self, "triples", triples)
        n = self.tet_count
        if len(triples) != 2 * n:
            raise ValueError(f"expected {2 * n} triples, got {len(triples)}")
        seen = set()
        for tail, head in triples:
            for node in (tail, head):
                if not (0 <= node.tet < n and 0 <= node.face < 4):
                    raise ValueError(f"node {node} out of range")
                if node in seen:
                    raise ValueError(f"node {node} meets more than one triple")
                seen.add(node)
            if tail == head:
                raise ValueError(f"triple joins {tail} to itself")
        # (label index, end) for node id 4*tet + face; end 0 is the tail
        ends = [None] * (4 * n)
        for idx, (tail, head) in enumerate(triples):
            ends[4 * tail.tet + tail.face] = (idx, 0)
            ends[4 * head.tet + head.face] = (idx, 1)
        object.__setattr__(self, "_ends", tuple(ends))

    @property
    def labels(self) -> range:
        return range(1, 2 * self.tet_count + 1)

    def endpoints(self, label: int) -> Tuple[FatNode, FatNode]:
        return self.triples[label - 1]

    def triple_at(self, node: FatNode) -> Tuple[int, int]:
        """(label, end) of the triple meeting ``node``; end 0 is the tail."""
        idx, end = self._ends[4 * node.tet + node.face]
        return idx + 1, end

    def internal_arcs(self) -> List[Tuple[FatNode, FatNode]]:
        return [(FatNode(t, a), FatNode(t, b)) for t in range(self.tet_count) for a, b in PAIRS]

    def external_arcs(self) -> List[Tuple[int, int, FatNode, FatNode]]:
        """(label, member slot, tail, head) for all ``6n`` external arcs."""
        return [
            (label, slot, tail, head)
            for label, (tail, head) in zip(self.labels, self.triples)
            for slot in range(3)
        ]

    def multigraph(self) -> MultiGraph:
        """Collapse each K4; arc ``label - 1`` runs from the tail's tet to the head's."""
        return MultiGraph(self.tet_count, tuple((t.tet, h.tet) for t, h in self.triples))

    def dump(self) -> str:
        lines = [f"{label}: {t}->{h}" for label, (t, h) in zip(self.labels, self.triples)]
        for tet in range(self.tet_count):
            for f in range(4):
                nbrs = " ".join(str(FatNode(tet, g)) for g in range(4) if g != f)
                lines.append(f"{FatNode(tet, f)}: {nbrs}")
        return "\n".join(lines)


def fatten(g: MultiGraph) -> FatGraph:
    """Fatten ``g``: node ``u`` hands out faces 0..3 to its arc slots in (arc, slot) order.

    Triple ``k + 1`` comes from arc ``k`` and its tail is the slot-0 endpoint.
    """
    if not g.is_valid():
        raise ValueError(f"not a 4-regular multigraph with 2n arcs: {g}")
    next_face = [0] * g.order
    triples = []
    for u, v in g.arcs:
        ends = []
        for x in (u, v):
            ends.append(FatNode(x, next_face[x]))
            next_face[x] += 1
        triples.append(tuple(ends))
    return FatGraph(g.order, tuple(triples))


def default_labelling(fg: FatGraph) -> FatGraph:
    """Relabel triples in order of their sorted endpoint pairs; tails are the smaller ends."""
    triples = sorted(tuple(sorted(pair)) for pair in fg.triples)
    return FatGraph(fg.tet_count, tuple(triples))


@dataclass(frozen=True)
class SignedRelabelling:
    """Label ``l`` becomes ``label_map[l-1]``, reversed when ``sign_map[l-1]`` is set."""

    label_map: Tuple[int, ...]
    sign_map: Tuple[bool, ...]
    node_map: Tuple[FatNode, ...]  # image of node 4*tet + face

    def apply(self, x: int) -> int:
        idx = abs(x) - 1
        y = self.label_map[idx]
        neg = (x < 0) != self.sign_map[idx]
        return -y if neg else y

    def is_identity(self) -> bool:
        return all(m == i + 1 for i, m in enumerate(self.label_map)) and not any(self.sign_map)


def lift_automorphisms(fg: FatGraph, autos: Sequence[ArcAutomorphism]) -> List[SignedRelabelling]:
    """Lift automorphisms of ``fg.multigraph()`` to relabellings of the triples."""
    g = fg.multigraph()
    out = []
    for a in autos:
        if not a.is_automorphism_of(g):
            raise ValueError("automorphism inconsistent with the fattened graph")
        labels = []
        signs = []
        node_map: Dict[FatNode, FatNode] = {}
        for k, (tail, head) in enumerate(fg.triples):
            img = a.arc_map[k]
            flip = a.endpoint_flip[k]
            labels.append(img + 1)
            signs.append(flip)
            img_ends = fg.triples[img]
            node_map[tail] = img_ends[1 if flip else 0]
            node_map[head] = img_ends[0 if flip else 1]
        nodes = tuple(node_map[FatNode(t, f)] for t in range(fg.tet_count) for f in range(4))
        out.append(SignedRelabelling(tuple(labels), tuple(signs), nodes))
    return out
