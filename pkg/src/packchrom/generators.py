"""Graph families: base-3 Sierpinski graphs S^k, their closures T^k, H-graphs.

Sierpinski vertices are ternary strings of length ``k`` in lexicographic
order, so the three copies ``0S^{k-1}``, ``1S^{k-1}``, ``2S^{k-1}`` occupy
consecutive index blocks.

H-graph vertices are labelled ``"u:i"``, ``"v:i"``, ``"w:i"`` and ordered
column-major: column ``c`` holds indices ``2c`` and ``2c + 1`` of every row,
listed as ``u:2c, u:2c+1, v:2c, v:2c+1, w:2c, w:2c+1``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .errors import BadParam, ColumnOutOfRange, ParamTooSmall
from .graph import Graph, build_graph

ROLES = ("u", "v", "w")


@lru_cache(maxsize=None)
def _sierpinski_edges(k: int) -> tuple[tuple[str, str], ...]:
    if k == 0:
        return ()
    inner = _sierpinski_edges(k - 1)
    edges = [(i + s, i + t) for i in "012" for s, t in inner]
    # connectors {i j^{k-1}, j i^{k-1}} for i != j
    for i, j in (("0", "1"), ("0", "2"), ("1", "2")):
        edges.append((i + j * (k - 1), j + i * (k - 1)))
    return tuple(edges)


def sierpinski_labels(k: int) -> list[str]:
    return ["".join(p) for p in product("012", repeat=k)]


def extreme_vertices(k: int) -> list[str]:
    return [c * k for c in "012"]


def gen_sierpinski(k: int) -> Graph:
    if k < 0:
        raise BadParam(f"k must be >= 0, got {k}")
    return build_graph(sierpinski_labels(k), _sierpinski_edges(k))


def gen_t(k: int) -> Graph:
    """S^k with the three extreme vertices joined into a triangle."""
    if k < 1:
        raise BadParam(f"k must be >= 1, got {k}")
    a, b, c = extreme_vertices(k)
    return build_graph(sierpinski_labels(k), _sierpinski_edges(k) + ((a, b), (c, b), (a, c)))


def h_label(role: str, i: int) -> str:
    return f"{role}:{i}"


def parse_h_label(label: str) -> tuple[str, int]:
    role, _, idx = label.partition(":")
    return role, int(idx)


def _h_labels(columns: int) -> list[str]:
    return [h_label(role, 2 * c + j) for c in range(columns) for role in ROLES for j in (0, 1)]


def _h_edges(columns: int, cyclic: bool) -> list[tuple[str, str]]:
    m = 2 * columns
    edges = []
    for i in range(m):
        if i + 1 < m or cyclic:
            edges.append((h_label("u", i), h_label("u", (i + 1) % m)))
            edges.append((h_label("w", i), h_label("w", (i + 1) % m)))
        edges.append((h_label("u", i), h_label("v", i)))
        edges.append((h_label("v", i), h_label("w", i)))
    for i in range(columns):
        edges.append((h_label("v", 2 * i), h_label("v", 2 * i + 1)))
    return edges


def gen_h(r: int) -> Graph:
    """The cubic H-graph H(r) on 6r vertices."""
    if r < 2:
        raise ParamTooSmall(f"H(r) needs r >= 2, got {r}")
    return build_graph(_h_labels(r), _h_edges(r, cyclic=True))


def gen_hp(c: int) -> Graph:
    """H_P(c): H(c) with the wrap-around edges u_0u_{2c-1} and w_0w_{2c-1} removed."""
    if c < 2:
        raise ParamTooSmall(f"H_P(c) needs c >= 2, got {c}")
    return build_graph(_h_labels(c), _h_edges(c, cyclic=False))


def column(i: int, r: int) -> frozenset[str]:
    """Labels of column ``i`` of an H-graph with ``r`` columns."""
    if not 0 <= i < r:
        raise ColumnOutOfRange(f"column {i} not in [0, {r - 1}]")
    return frozenset(h_label(role, 2 * i + j) for role in ROLES for j in (0, 1))


def column_indices(i: int) -> range:
    """Vertex indices of column ``i`` under the column-major ordering."""
    return range(6 * i, 6 * i + 6)
