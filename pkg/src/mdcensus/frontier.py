"""Frontier-edge bookkeeping for the one-vertex prune.

Every tetrahedron vertex starts with a link made of one triangle, so three
frontier edges.  Each external arc placed in a walk glues one frontier edge
of one link to one frontier edge of another (or the same) link.  A union-find
without path compression keeps the links, so every change can be undone from
a journal.
"""

from __future__ import annotations

from typing import List, Tuple

MERGED = "merged"
OK = "ok"
CLOSED_EARLY = "closed_early"


class FrontierTracker:
    def __init__(self, vertex_count: int):
        self.parent = list(range(vertex_count))
        self.size = [1] * vertex_count
        self.count = [3] * vertex_count
        self.total = 3 * vertex_count
        # (kind, a, b): kind 0 = same root (a), 1 = b hung under a
        self.journal: List[Tuple[int, int, int]] = []

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def glue(self, a: int, b: int) -> str:
        ra, rb = self.find(a), self.find(b)
        self.total -= 2
        if ra == rb:
            self.count[ra] -= 2
            self.journal.append((0, ra, -1))
            root, status = ra, OK
        else:
            if self.size[ra] < self.size[rb]:
                ra, rb = rb, ra
            self.parent[rb] = ra
            self.size[ra] += self.size[rb]
            self.count[ra] += self.count[rb] - 2
            self.journal.append((1, ra, rb))
            root, status = ra, MERGED
        if self.count[root] == 0 and self.total > 0:
            return CLOSED_EARLY
        return status

    def mark(self) -> int:
        return len(self.journal)

    def rollback(self, mark: int) -> None:
        while len(self.journal) > mark:
            kind, ra, rb = self.journal.pop()
            self.total += 2
            if kind == 0:
                self.count[ra] += 2
            else:
                self.count[ra] -= self.count[rb] - 2
                self.size[ra] -= self.size[rb]
                self.parent[rb] = rb

    def roots(self) -> List[int]:
        return [x for x in range(len(self.parent)) if self.parent[x] == x]

    def snapshot(self):
        return (tuple(self.parent), tuple(self.size), tuple(self.count), self.total)


def frontier_glue(ft: FrontierTracker, vertex_a: int, vertex_b: int) -> str:
    return ft.glue(vertex_a, vertex_b)
