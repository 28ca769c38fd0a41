"""Triangulations as gluing tables, and the passage to and from decompositions.

Tetrahedron vertices are 0..3 and face ``f`` is the face opposite vertex
``f``.  A gluing of face ``f`` of tet ``i`` is ``(j, g, perm)`` where ``perm``
is a permutation of 0..3 with ``perm[f] == g`` carrying the vertices of face
``f`` onto those of face ``g`` of tet ``j``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .decomp import Decomposition, arrival, check, departure
from .fatgraph import PAIRS, FatGraph, FatNode, default_labelling

Perm = Tuple[int, int, int, int]
Gluing = Tuple[int, int, Perm]

PERMS4 = list(itertools.permutations(range(4)))


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_sign(p: Sequence[int]) -> int:
    inv = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
    return -1 if inv % 2 else 1


def face_vertices(f: int) -> Tuple[int, int, int]:
    return tuple(v for v in range(4) if v != f)


@dataclass(frozen=True)
class Triangulation:
    tet_count: int
    gluings: Tuple[Tuple[Optional[Gluing], ...], ...]

    def __post_init__(self):
        if len(self.gluings) != self.tet_count or any(len(row) != 4 for row in self.gluings):
            raise ValueError("gluing table must have four entries per tetrahedron")
        for t, row in enumerate(self.gluings):
            for f, g in enumerate(row):
                if g is None:
                    continue
                j, h, p = g
                if p[f] != h or sorted(p) != [0, 1, 2, 3]:
                    raise ValueError(f"bad vertex map at ({t},{f})")
                if (j, h) == (t, f):
                    raise ValueError(f"face ({t},{f}) glued to itself")
                back = self.gluings[j][h]
                if back is None or back[0] != t or back[1] != f or tuple(back[2]) != inverse(p):
                    raise ValueError(f"gluing at ({t},{f}) is not involutive")

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[Tuple[int, int, int, int, Sequence[int]]]):
        """Build from ``(i, f, j, g, perm)`` entries, filling in the reverse gluings."""
        table: List[List[Optional[Gluing]]] = [[None] * 4 for _ in range(n)]
        for i, f, j, g, p in pairs:
            p = tuple(p)
            for (a, b), entry in (((i, f), (j, g, p)), ((j, g), (i, f, inverse(p)))):
                if table[a][b] is not None and table[a][b] != entry:
                    raise ValueError(f"face ({a},{b}) glued twice")
                table[a][b] = entry
        return cls(n, tuple(tuple(row) for row in table))

    def is_closed(self) -> bool:
        return all(g is not None for row in self.gluings for g in row)

    def glued_pairs(self) -> int:
        return sum(g is not None for row in self.gluings for g in row) // 2

    def to_text(self) -> str:
        lines = []
        for t, row in enumerate(self.gluings):
            entries = []
            for f, g in enumerate(row):
                if g is None:
                    entries.append("-")
                else:
                    j, h, p = g
                    word = "".join(str(p[v]) for v in face_vertices(f))
                    entries.append(f"({j}, {h}, {word})")
            lines.append(" ".join(entries))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "Triangulation":
        rows = []
        for t, line in enumerate(l for l in text.splitlines() if l.strip()):
            tokens = re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*,\s*([0-3]{3})\s*\)|(-)", line)
            if len(tokens) != 4:
                raise ValueError(f"line {t}: expected four entries, got {line!r}")
            row = []
            for f, (j, h, word, dash) in enumerate(tokens):
                if dash:
                    row.append(None)
                    continue
                p = [0] * 4
                p[f] = int(h)
                for v, img in zip(face_vertices(f), word):
                    p[v] = int(img)
                row.append((int(j), int(h), tuple(p)))
            rows.append(tuple(row))
        return cls(len(rows), tuple(rows))


# ---------------------------------------------------------------------------
# classes, links, invariants


@dataclass
class EdgeClass:
    members: List[Tuple[int, int, int]]  # (tet, u, v) with u < v
    degree: int
    reversed: bool


@dataclass
class VertexClass:
    members: List[Tuple[int, int]]  # (tet, vertex)


@dataclass
class LinkSurface:
    triangles: List[Tuple[int, int]]
    euler: int
    closed: bool

    def is_sphere(self) -> bool:
        return self.closed and self.euler == 2

    def is_disc(self) -> bool:
        return not self.closed and self.euler == 1


def edge_classes(t: Triangulation) -> List[EdgeClass]:
    seen = set()
    out = []
    for tet in range(t.tet_count):
        for u, v in PAIRS:
            if (tet, u, v) in seen:
                continue
            directed = {(tet, u, v)}
            stack = [(tet, u, v)]
            while stack:
                a, x, y = stack.pop()
                for f in range(4):
                    if f in (x, y) or t.gluings[a][f] is None:
                        continue
                    b, _, p = t.gluings[a][f]
                    nxt = (b, p[x], p[y])
                    if nxt not in directed:
                        directed.add(nxt)
                        stack.append(nxt)
            members = sorted({(a, min(x, y), max(x, y)) for a, x, y in directed})
            seen.update(members)
            rev = any((a, y, x) in directed for a, x, y in directed)
            out.append(EdgeClass(members, len(members), rev))
    return out


def _vertex_find(t: Triangulation):
    parent = {(tet, v): (tet, v) for tet in range(t.tet_count) for v in range(4)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tet, row in enumerate(t.gluings):
        for f, g in enumerate(row):
            if g is None:
                continue
            j, _, p = g
            for v in face_vertices(f):
                a, b = find((tet, v)), find((j, p[v]))
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return find


def vertex_classes(t: Triangulation) -> List[VertexClass]:
    find = _vertex_find(t)
    groups: Dict = {}
    for tet in range(t.tet_count):
        for v in range(4):
            groups.setdefault(find((tet, v)), []).append((tet, v))
    return [VertexClass(sorted(m)) for _, m in sorted(groups.items())]


def vertex_links(t: Triangulation) -> List[LinkSurface]:
    """One link surface per vertex class, with its Euler characteristic."""
    out = []
    for cls in vertex_classes(t):
        tris = cls.members
        sides = 0
        free = 0
        corner_parent = {}

        def find(x):
            while corner_parent[x] != x:
                corner_parent[x] = corner_parent[corner_parent[x]]
                x = corner_parent[x]
            return x

        for tet, v in tris:
            for w in range(4):
                if w != v:
                    corner_parent[tet, v, w] = (tet, v, w)
        for tet, v in tris:
            for f in range(4):
                if f == v:
                    continue
                sides += 1
                g = t.gluings[tet][f]
                if g is None:
                    free += 1
                    continue
                j, _, p = g
                for w in face_vertices(f):
                    if w == v:
                        continue
                    a, b = find((tet, v, w)), find((j, p[v], p[w]))
                    if a != b:
                        corner_parent[max(a, b)] = min(a, b)
        vertices = len({find(c) for c in corner_parent})
        edges = (sides - free) // 2 + free
        out.append(LinkSurface(tris, vertices - edges + len(tris), free == 0))
    return out


def is_connected(t: Triangulation) -> bool:
    if t.tet_count == 0:
        return False
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for g in t.gluings[a]:
            if g is not None and g[0] not in seen:
                seen.add(g[0])
                stack.append(g[0])
    return len(seen) == t.tet_count


def euler_characteristic(t: Triangulation) -> int:
    faces = 4 * t.tet_count - t.glued_pairs()
    return len(vertex_classes(t)) - len(edge_classes(t)) + faces - t.tet_count


def is_3manifold(t: Triangulation, allow_boundary: bool = False) -> bool:
    """Connected, no edge identified with itself in reverse, every link a sphere.

    With ``allow_boundary`` unglued faces are permitted and links may also be
    discs.
    """
    if not allow_boundary and not t.is_closed():
        return False
    if not is_connected(t):
        return False
    if any(e.reversed for e in edge_classes(t)):
        return False
    for link in vertex_links(t):
        if not (link.is_sphere() or (allow_boundary and link.is_disc())):
            return False
    return True


def is_orientable(t: Triangulation) -> bool:
    orient = [0] * t.tet_count
    for root in range(t.tet_count):
        if orient[root]:
            continue
        orient[root] = 1
        stack = [root]
        while stack:
            a = stack.pop()
            for g in t.gluings[a]:
                if g is None:
                    continue
                b, _, p = g
                want = -orient[a] * perm_sign(p)
                if orient[b] == 0:
                    orient[b] = want
                    stack.append(b)
                elif orient[b] != want:
                    return False
    return True


def isomorphic(t1: Triangulation, t2: Triangulation) -> bool:
    """Combinatorial isomorphism: a tet bijection with a vertex map per tet."""
    if t1.tet_count != t2.tet_count or t1.glued_pairs() != t2.glued_pairs():
        return False
    n = t1.tet_count
    tet_map: List[Optional[int]] = [None] * n
    vmap: List[Optional[Perm]] = [None] * n
    used = [False] * n

    def propagate(start, image, perm):
        """Extend the map through gluings; return the tets added or None."""
        added = []
        queue = [(start, image, perm)]
        while queue:
            a, b, s = queue.pop()
            if tet_map[a] is not None:
                if tet_map[a] != b or vmap[a] != s:
                    return added, False
                continue
            if used[b]:
                return added, False
            tet_map[a], vmap[a], used[b] = b, s, True
            added.append(a)
            for f in range(4):
                g1 = t1.gluings[a][f]
                g2 = t2.gluings[b][s[f]]
                if (g1 is None) != (g2 is None):
                    return added, False
                if g1 is None:
                    continue
                a2, f2, p = g1
                b2, h2, q = g2
                # a2 -> b2 with s2 = q . s . p^-1
                pinv = inverse(p)
                s2 = tuple(q[s[pinv[x]]] for x in range(4))
                if s2[f2] != h2:
                    return added, False
                queue.append((a2, b2, s2))
        return added, True

    def undo(added):
        for a in added:
            used[tet_map[a]] = False
            tet_map[a] = vmap[a] = None

    def rec():
        try:
            a = tet_map.index(None)
        except ValueError:
            return True
        for b in range(n):
            if used[b]:
                continue
            for s in PERMS4:
                added, ok = propagate(a, b, s)
                if ok and rec():
                    return True
                undo(added)
        return False

    return rec()


# ---------------------------------------------------------------------------
# decompositions <-> triangulations


class InconsistentTriple(ValueError):
    pass


def decomposition_to_triangulation(d: Decomposition, fg: FatGraph) -> Triangulation:
    """Read each face gluing off the three arcs of its triple."""
    check(d, fg)
    maps: List[Dict[int, int]] = [dict() for _ in range(2 * fg.tet_count)]
    for w in d.walks:
        m = len(w)
        for p, x in enumerate(w):
            before = arrival(fg, w[p - 1]) & 3
            after = departure(fg, w[(p + 1) % m]) & 3
            tail_v, head_v = (before, after) if x > 0 else (after, before)
            got = maps[abs(x) - 1]
            if got.get(tail_v, head_v) != head_v:
                raise InconsistentTriple(f"triple {abs(x)} maps vertex {tail_v} twice")
            got[tail_v] = head_v
    pairs = []
    for idx, (tail, head) in enumerate(fg.triples):
        got = maps[idx]
        if sorted(got) != list(face_vertices(tail.face)) or sorted(got.values()) != list(
            face_vertices(head.face)
        ):
            raise InconsistentTriple(f"triple {idx + 1} does not give a bijection of faces")
        perm = [0] * 4
        perm[tail.face] = head.face
        for v, img in got.items():
            perm[v] = img
        pairs.append((tail.tet, tail.face, head.tet, head.face, perm))
    return Triangulation.from_pairs(fg.tet_count, pairs)


def fatgraph_of(t: Triangulation) -> FatGraph:
    """Default-labelled fattened face pairing graph of a closed triangulation."""
    if not t.is_closed():
        raise ValueError("triangulation has unglued faces")
    triples = set()
    for tet, row in enumerate(t.gluings):
        for f, (j, h, _) in enumerate(row):
            triples.add(tuple(sorted((FatNode(tet, f), FatNode(j, h)))))
    return default_labelling(FatGraph(t.tet_count, tuple(sorted(triples))))


def triangulation_to_decomposition(t: Triangulation, fg: Optional[FatGraph] = None) -> Decomposition:
    """Trace the ring of tetrahedra around every edge; returns the canonical form."""
    if fg is None:
        fg = fatgraph_of(t)
    if not t.is_closed():
        raise ValueError("triangulation has unglued faces")
    for tail, head in fg.triples:
        j, h, _ = t.gluings[tail.tet][tail.face]
        if (j, h) != tuple(head):
            raise ValueError(f"fattened graph does not match the gluing at {tail}")
    used = set()
    walks = []
    for tet in range(t.tet_count):
        for a, b in PAIRS:
            if (tet, a, b) in used:
                continue
            state = start = (tet, a, b)
            walk = []
            while True:
                cur, frm, to = state
                used.add((cur, min(frm, to), max(frm, to)))
                label, end = fg.triple_at(FatNode(cur, to))
                walk.append(label if end == 0 else -label)
                j, _, p = t.gluings[cur][to]
                state = (j, p[to], p[frm])
                if state == start:
                    break
            walks.append(walk)
    return Decomposition(tuple(walks)).canonical()
