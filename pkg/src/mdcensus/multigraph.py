"""Connected 4-regular multigraphs: the face pairing graphs of closed triangulations.

Graphs carry loops and parallel arcs.  Every arc has two endpoint slots
(slot 0 is the first listed endpoint), so that a loop can be flipped by an
automorphism and so that fattening can attach each slot to its own K4 node.

Canonical forms use the column-major upper-triangular adjacency string
``A[0][0], A[0][1], A[1][1], A[0][2], ...`` and pick the lexicographically
largest string over all vertex orderings.  Leading principal submatrices of a
maximal matrix are themselves maximal, which is what makes the vertex-by-vertex
orderly generator in :func:`generate` correct.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

Arc = Tuple[int, int]

DEGREE = 4


@dataclass(frozen=True)
class MultiGraph:
    """A multigraph on nodes ``0..order-1``; arc ``k`` is ``arcs[k]``."""

    order: int
    arcs: Tuple[Arc, ...]

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs))
        for u, v in self.arcs:
            if not (0 <= u < self.order and 0 <= v < self.order):
                raise ValueError(f"arc {u}-{v} out of range for order {self.order}")

    @classmethod
    def from_adjacency(cls, adj: Sequence[Sequence[int]]) -> "MultiGraph":
        """Build a graph with sorted arcs; ``adj[i][i]`` counts loops at ``i``."""
        n = len(adj)
        arcs = []
        for i in range(n):
            arcs.extend([(i, i)] * adj[i][i])
            for j in range(i + 1, n):
                arcs.extend([(i, j)] * adj[i][j])
        arcs.sort()
        return cls(n, tuple(arcs))

    def adjacency(self) -> List[List[int]]:
        adj = [[0] * self.order for _ in range(self.order)]
        for u, v in self.arcs:
            if u == v:
                adj[u][u] += 1
            else:
                adj[u][v] += 1
                adj[v][u] += 1
        return adj

    def degrees(self) -> List[int]:
        deg = [0] * self.order
        for u, v in self.arcs:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_regular(self, degree: int = DEGREE) -> bool:
        return all(d == degree for d in self.degrees())

    def is_valid(self) -> bool:
        """True iff 4-regular with exactly ``2n`` arcs (connectivity is separate)."""
        return self.order >= 1 and len(self.arcs) == 2 * self.order and self.is_regular()

    def normalized(self) -> "MultiGraph":
        return MultiGraph.from_adjacency(self.adjacency())

    def relabel(self, perm: Sequence[int]) -> "MultiGraph":
        """Node ``i`` becomes ``perm[i]``; arcs are re-sorted."""
        arcs = sorted(tuple(sorted((perm[u], perm[v]))) for u, v in self.arcs)
        return MultiGraph(self.order, tuple(arcs))

    def to_text(self) -> str:
        return f"{self.order}; " + ",".join(f"{u}-{v}" for u, v in self.arcs)

    @classmethod
    def from_text(cls, line: str) -> "MultiGraph":
        m = re.fullmatch(r"\s*(\d+)\s*;\s*(.*?)\s*", line)
        if not m:
            raise ValueError(f"malformed graph line: {line!r}")
        order = int(m.group(1))
        body = m.group(2)
        arcs = []
        if body:
            for tok in body.split(","):
                parts = tok.strip().split("-")
                if len(parts) != 2:
                    raise ValueError(f"malformed arc {tok!r} in {line!r}")
                arcs.append((int(parts[0]), int(parts[1])))
        return cls(order, tuple(arcs))

    def __str__(self) -> str:
        return self.to_text()


def read_graphs(path) -> Iterator[Tuple[int, MultiGraph]]:
    """Yield ``(line_number, graph)``; raises ValueError with the line number."""
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                yield lineno, MultiGraph.from_text(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None


def write_graphs(graphs, path) -> None:
    with open(path, "w") as fh:
        for g in graphs:
            fh.write(g.to_text() + "\n")


def is_connected(g: MultiGraph) -> bool:
    if g.order == 0:
        return False
    nbrs = [set() for _ in range(g.order)]
    for u, v in g.arcs:
        nbrs[u].add(v)
        nbrs[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == g.order


# ---------------------------------------------------------------------------
# canonical form


def _column(adj, order, k):
    """Column ``k`` of the relabelled matrix whose i-th vertex is ``order[i]``."""
    vk = order[k]
    return tuple(adj[order[i]][vk] for i in range(k + 1))


def _max_order(adj: List[List[int]]) -> Tuple[Tuple[int, ...], List[int]]:
    """Return (maximal column-major string, an ordering achieving it)."""
    n = len(adj)
    best: List = [None, None]

    def rec(order, remaining, prefix):
        k = len(order)
        if k == n:
            if best[0] is None or prefix > best[0]:
                best[0] = prefix
                best[1] = list(order)
            return
        cols = {}
        for v in remaining:
            order.append(v)
            cols[v] = _column(adj, order, k)
            order.pop()
        top = max(cols.values())
        # Only extensions with the largest column can reach the maximum.
        for v in remaining:
            if cols[v] != top:
                continue
            new_prefix = prefix + top
            if best[0] is not None and new_prefix < best[0][: len(new_prefix)]:
                continue
            order.append(v)
            remaining.remove(v)
            rec(order, remaining, new_prefix)
            remaining.add(v)
            order.pop()

    rec([], set(range(n)), ())
    return best[0], best[1]


def canonical_form(g: MultiGraph) -> bytes:
    """Byte string equal for two graphs iff they are isomorphic."""
    if g.order == 0:
        return b"\x00"
    string, _ = _max_order(g.adjacency())
    return bytes([g.order]) + bytes(string)


def canonical_relabelling(g: MultiGraph) -> MultiGraph:
    """The isomorphic copy of ``g`` whose adjacency string is the maximal one."""
    if g.order == 0:
        return g
    _, order = _max_order(g.adjacency())
    perm = [0] * g.order
    for new, old in enumerate(order):
        perm[old] = new
    return g.relabel(perm)


def _is_max(adj: List[List[int]], k: int) -> bool:
    """Is the leading ``k x k`` block of ``adj`` maximal under relabelling?"""
    target = [tuple(adj[i][j] for i in range(j + 1)) for j in range(k)]

    def rec(order, remaining):
        level = len(order)
        if level == k:
            return True
        want = target[level]
        for v in list(remaining):
            order.append(v)
            col = _column(adj, order, level)
            if col > want:
                order.pop()
                return False
            if col == want:
                remaining.remove(v)
                ok = rec(order, remaining)
                remaining.add(v)
                if not ok:
                    order.pop()
                    return False
            order.pop()
        return True

    return rec([], set(range(k)))


# ---------------------------------------------------------------------------
# orderly generation


def _columns(k: int, deg: List[int]) -> Iterator[Tuple[int, ...]]:
    """Candidate columns for vertex ``k``: arcs to ``0..k-1`` then loop count."""
    out = [0] * (k + 1)

    def rec(j, budget):
        if j == k:
            for loops in range(budget // 2, -1, -1):
                out[k] = loops
                yield tuple(out)
            return
        top = min(budget, DEGREE - deg[j])
        for a in range(top, -1, -1):
            out[j] = a
            yield from rec(j + 1, budget - a)
        out[j] = 0

    yield from rec(0, DEGREE)


def generate(n: int, connected: bool = True) -> List[MultiGraph]:
    """One representative per isomorphism class of 4-regular multigraphs on ``n`` nodes.

    With ``connected=False`` disconnected graphs are included as well.  The
    output order is deterministic.
    """
    if n <= 0:
        return []
    adj = [[0] * n for _ in range(n)]
    deg = [0] * n
    found: List[MultiGraph] = []

    def rec(k):
        if k == n:
            found.append(MultiGraph.from_adjacency([row[:] for row in adj]))
            return
        prev = None
        if k >= 1:
            prev = tuple(adj[i][k - 1] for i in range(k - 1)) + (adj[k - 1][k - 1],)
        for col in _columns(k, deg):
            if connected and k >= 1 and not any(col[:k]):
                continue
            if prev is not None:
                # Swapping vertices k-1 and k must not increase the string.
                if col[: k - 1] + (col[k],) > prev:
                    continue
            for j in range(k):
                adj[j][k] = adj[k][j] = col[j]
                deg[j] += col[j]
            adj[k][k] = col[k]
            deg[k] = sum(col[:k]) + 2 * col[k]
            deficiency = sum(DEGREE - deg[i] for i in range(k + 1))
            remaining = n - k - 1
            feasible = deficiency % 2 == 0 and deficiency <= DEGREE * remaining
            if remaining == 0:
                feasible = deficiency == 0
            elif connected and deficiency == 0:
                feasible = False
            if feasible and _is_max(adj, k + 1):
                rec(k + 1)
            for j in range(k):
                deg[j] -= col[j]
                adj[j][k] = adj[k][j] = 0
            adj[k][k] = 0
            deg[k] = 0

    rec(0)
    if connected:
        found = [g for g in found if is_connected(g)]
    return found


# ---------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class ArcAutomorphism:
    """Arc ``k`` goes to ``arc_map[k]``; its slot ``s`` goes to slot ``s ^ endpoint_flip[k]``."""

    node_map: Tuple[int, ...]
    arc_map: Tuple[int, ...]
    endpoint_flip: Tuple[bool, ...]

    @classmethod
    def identity(cls, g: MultiGraph) -> "ArcAutomorphism":
        m = len(g.arcs)
        return cls(tuple(range(g.order)), tuple(range(m)), (False,) * m)

    def then(self, other: "ArcAutomorphism") -> "ArcAutomorphism":
        """Apply ``self`` first, then ``other``."""
        return ArcAutomorphism(
            tuple(other.node_map[x] for x in self.node_map),
            tuple(other.arc_map[a] for a in self.arc_map),
            tuple(f ^ other.endpoint_flip[a] for f, a in zip(self.endpoint_flip, self.arc_map)),
        )

    def inverse(self) -> "ArcAutomorphism":
        nodes = [0] * len(self.node_map)
        for i, x in enumerate(self.node_map):
            nodes[x] = i
        arcs = [0] * len(self.arc_map)
        flips = [False] * len(self.arc_map)
        for k, a in enumerate(self.arc_map):
            arcs[a] = k
            flips[a] = self.endpoint_flip[k]
        return ArcAutomorphism(tuple(nodes), tuple(arcs), tuple(flips))

    def is_automorphism_of(self, g: MultiGraph) -> bool:
        if sorted(self.arc_map) != list(range(len(g.arcs))):
            return False
        if sorted(self.node_map) != list(range(g.order)):
            return False
        for k, (u, v) in enumerate(g.arcs):
            img = g.arcs[self.arc_map[k]]
            ends = (self.node_map[u], self.node_map[v])
            if self.endpoint_flip[k]:
                ends = ends[::-1]
            if ends != img:
                return False
        return True


def node_automorphisms(g: MultiGraph) -> List[Tuple[int, ...]]:
    """All node permutations preserving arc multiplicities (loops included)."""
    adj = g.adjacency()
    n = g.order
    sig = [(adj[i][i], tuple(sorted(adj[i][j] for j in range(n) if j != i))) for i in range(n)]
    result = []
    image = [-1] * n
    used = [False] * n

    def rec(i):
        if i == n:
            result.append(tuple(image))
            return
        for c in range(n):
            if used[c] or sig[c] != sig[i]:
                continue
            if any(adj[i][j] != adj[c][image[j]] for j in range(i)):
                continue
            if adj[i][i] != adj[c][c]:
                continue
            image[i] = c
            used[c] = True
            rec(i + 1)
            used[c] = False
        image[i] = -1

    rec(0)
    return result


def automorphisms(g: MultiGraph) -> List[ArcAutomorphism]:
    """The full arc-level automorphism group, identity first."""
    classes = {}
    for k, (u, v) in enumerate(g.arcs):
        classes.setdefault(frozenset((u, v)), []).append(k)
    keys = sorted(classes, key=lambda s: sorted(s))
    out = []
    for sigma in node_automorphisms(g):
        per_class = []
        for key in keys:
            src = classes[key]
            dst = classes[frozenset(sigma[x] for x in key)]
            options = []
            for perm in itertools.permutations(dst):
                if len(key) == 1:
                    for flips in itertools.product((False, True), repeat=len(src)):
                        options.append(list(zip(src, perm, flips)))
                else:
                    opt = []
                    for a, b in zip(src, perm):
                        opt.append((a, b, sigma[g.arcs[a][0]] != g.arcs[b][0]))
                    options.append(opt)
            per_class.append(options)
        for combo in itertools.product(*per_class):
            arc_map = [0] * len(g.arcs)
            flip = [False] * len(g.arcs)
            for part in combo:
                for a, b, f in part:
                    arc_map[a] = b
                    flip[a] = f
            out.append(ArcAutomorphism(tuple(sigma), tuple(arc_map), tuple(flip)))
    ident = ArcAutomorphism.identity(g)
    out.sort(key=lambda a: (a != ident, a.node_map, a.arc_map, a.endpoint_flip))
    return out
