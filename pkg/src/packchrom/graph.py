"""Immutable undirected graphs and all-pairs BFS distances."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import Disconnected, DuplicateLabel, SelfLoop, UnknownVertex

# Strictly larger than any distance a graph can realise.
INFINITE = int(np.iinfo(np.int32).max)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph over dense 0-based vertex indices.

    Labels are kept only for I/O and for the semantics of generated
    families; every algorithm works on indices.
    """

    vertex_labels: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int
    _index: dict[str, int] = field(repr=False, compare=False, hash=False, default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.vertex_labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownVertex(label) from None

    def label(self, v: int) -> str:
        return self.vertex_labels[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted index pairs ``(u, v)`` with ``u < v``."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


def build_graph(labels: Sequence[str], edges: Iterable[tuple[str, str]]) -> Graph:
    labels = tuple(labels)
    index: dict[str, int] = {}
    for i, lab in enumerate(labels):
        if lab in index:
            raise DuplicateLabel(lab)
        index[lab] = i
    nbrs: list[set[int]] = [set() for _ in labels]
    for a, b in edges:
        if a not in index:
            raise UnknownVertex(a)
        if b not in index:
            raise UnknownVertex(b)
        if a == b:
            raise SelfLoop(a)
        u, v = index[a], index[b]
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    edge_count = sum(len(s) for s in nbrs) // 2
    return Graph(labels, adjacency, edge_count, index)


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    dist: np.ndarray  # (n, n) int32, INFINITE for disconnected pairs

    def __call__(self, u: int, v: int) -> int:
        return int(self.dist[u, v])


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [INFINITE] * g.n
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in adj[x]:
            if dist[y] == INFINITE:
                dist[y] = dx
                queue.append(y)
    return dist


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    dist = np.empty((g.n, g.n), dtype=np.int32)
    for s in range(g.n):
        dist[s] = bfs_distances(g, s)
    dist.setflags(write=False)
    return DistanceMatrix(g.n, dist)


def diameter(g: Graph, dm: DistanceMatrix | None = None) -> int:
    if g.n == 0:
        return 0
    dm = dm if dm is not None else all_pairs_distances(g)
    top = int(dm.dist.max())
    if top == INFINITE:
        raise Disconnected("graph is not connected")
    return top


def is_connected(g: Graph) -> bool:
    return g.n == 0 or INFINITE not in bfs_distances(g, 0)
