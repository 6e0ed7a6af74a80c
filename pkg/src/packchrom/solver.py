"""Exact S-packing coloring search: decision, minimisation, enumeration, LP export.

The search is chronological backtracking over a vertex order with
forward checking: giving color ``c`` to ``v`` removes ``c`` from the domain
of every unassigned ``u`` with ``d(u, v) <= s_c``. Colors with the same
threshold are interchangeable, so with symmetry breaking a fresh color of
such a group is only tried once all lower colors of the group are in use.
"""

from __future__ import annotations

import enum
import multiprocessing
import sys
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BadParam, PackchromError
from .graph import INFINITE, DistanceMatrix, Graph, all_pairs_distances
from .packing import Coloring, PackingSequence, packing_sequence, verify_coloring

UNLIMITED = None


class Status(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    TIMEOUT = "Timeout"


class VertexOrder(str, enum.Enum):
    DEGREE_DESC = "DegreeDesc"
    BFS_FROM_CENTER = "BfsFromCenter"
    NATURAL = "Natural"
    MIN_DOMAIN = "MinDomain"


@dataclass(frozen=True)
class SearchConfig:
    budget_ms: int | None = UNLIMITED
    vertex_order: VertexOrder = VertexOrder.DEGREE_DESC
    symmetry_breaking: bool = True
    parallel_width: int = 1

    def __post_init__(self):
        if self.parallel_width < 1:
            raise BadParam("parallel_width must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    status: Status
    coloring: Coloring | None
    nodes_explored: int
    elapsed_ms: int

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


class _Timeout(Exception):
    pass


def vertex_order(g: Graph, dm: DistanceMatrix, how: VertexOrder) -> list[int]:
    how = VertexOrder(how)
    if how is VertexOrder.NATURAL:
        return list(range(g.n))
    if how in (VertexOrder.DEGREE_DESC, VertexOrder.MIN_DOMAIN):
        # ties by index, which is the generators' canonical label order
        return sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    # BFS from a minimum-eccentricity vertex, one component after another
    ecc = np.where(dm.dist == INFINITE, -1, dm.dist).max(axis=1)
    seen = [False] * g.n
    order: list[int] = []
    for root in sorted(range(g.n), key=lambda v: (ecc[v], v)):
        if seen[root]:
            continue
        seen[root] = True
        frontier = [root]
        while frontier:
            order.extend(frontier)
            nxt = []
            for x in frontier:
                for y in g.adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        nxt.append(y)
            frontier = nxt
    return order


class _Search:
    """One backtracking search.

    Vertices are taken in ``order``, or, when ``dynamic``, smallest remaining
    domain first with ``order`` breaking ties. ``conflicts[c][v]`` lists the
    vertices that may not share color ``c`` with ``v``; lists are shared
    between colors with equal thresholds.
    """

    def __init__(self, g: Graph, dm: DistanceMatrix, s: PackingSequence, order: list[int],
                 symmetry_breaking: bool, deadline: float | None, dynamic: bool = False):
        k = len(s)
        self.n = g.n
        self.k = k
        self.order = order
        self.dynamic = dynamic
        self.symmetry_breaking = symmetry_breaking
        self.deadline = deadline
        self.nodes = 0
        by_threshold: dict[int, list[list[int]]] = {}
        for t in sorted(set(s.entries)):
            close = (dm.dist <= t)
            np.fill_diagonal(close, False)
            by_threshold[t] = [np.flatnonzero(row).tolist() for row in close]
        self.conflicts = [None] + [by_threshold[s.s(c)] for c in range(1, k + 1)]
        # color groups with equal thresholds are consecutive runs
        self.group_of = [0] * (k + 1)
        self.group_start: list[int] = []
        self.group_end: list[int] = []
        for c in range(1, k + 1):
            if c == 1 or s.s(c) != s.s(c - 1):
                self.group_start.append(c)
                self.group_end.append(c)
            self.group_of[c] = len(self.group_start) - 1
            self.group_end[-1] = c
        self.opened = [0] * len(self.group_start)
        self.uses = [0] * (k + 1)
        self.domain = [(1 << (k + 1)) - 2] * self.n
        self.color = [0] * self.n

    def _allowed(self, v: int) -> Iterator[int]:
        dom = self.domain[v]
        for c in range(1, self.k + 1):
            if not dom >> c & 1:
                continue
            if self.symmetry_breaking:
                gi = self.group_of[c]
                if c > self.group_start[gi] + self.opened[gi]:
                    continue
            yield c

    def _assign(self, v: int, c: int, trail: list[int]) -> bool:
        self.color[v] = c
        self.uses[c] += 1
        if self.uses[c] == 1:
            self.opened[self.group_of[c]] += 1
        bit = 1 << c
        domain, color = self.domain, self.color
        ok = True
        for u in self.conflicts[c][v]:
            if color[u] == 0 and domain[u] & bit:
                domain[u] ^= bit
                trail.append(u)
                if not domain[u]:
                    ok = False
                    break
        return ok

    def _unassign(self, v: int, c: int, trail: list[int]) -> None:
        bit = 1 << c
        for u in trail:
            self.domain[u] |= bit
        self.color[v] = 0
        self.uses[c] -= 1
        if self.uses[c] == 0:
            self.opened[self.group_of[c]] -= 1

    def _tick(self) -> None:
        self.nodes += 1
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _Timeout

    def _next_vertex(self, depth: int) -> int:
        if not self.dynamic:
            return self.order[depth]
        best, best_size = -1, self.k + 1
        color, domain = self.color, self.domain
        for v in self.order:
            if color[v] == 0:
                size = domain[v].bit_count()
                if size < best_size:
                    best, best_size = v, size
                    if size <= 1:
                        break
        return best

    def solutions(self, depth: int = 0) -> Iterator[list[int]]:
        """Yield every complete assignment reachable below ``depth`` (shared buffer)."""
        if depth == self.n:
            yield self.color
            return
        v = self._next_vertex(depth)
        for c in list(self._allowed(v)):
            self._tick()
            trail: list[int] = []
            if self._assign(v, c, trail):
                yield from self.solutions(depth + 1)
            self._unassign(v, c, trail)

    def first(self, prefix: tuple[int, ...] = ()) -> list[int] | None:
        """First solution whose leading vertices take the colors in ``prefix``."""
        trails = []
        for depth, c in enumerate(prefix):
            v = self._next_vertex(depth)
            if c not in self._allowed(v):
                return None
            trail: list[int] = []
            trails.append(trail)
            if not self._assign(v, c, trail):
                return None
        for sol in self.solutions(len(prefix)):
            return list(sol)
        return None


def _check_sequence(s: PackingSequence) -> None:
    if len(s) == 0:
        raise BadParam("empty packing sequence")


def _deadline(budget_ms: int | None, start: float) -> float | None:
    return None if budget_ms is None else start + budget_ms / 1000.0


def _ensure_recursion(n: int) -> None:
    need = n + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def _run_subtree(args) -> tuple[str, list[int] | None, int]:
    g, dm, s, order, sym, budget_ms, prefix, dynamic = args
    _ensure_recursion(g.n)
    start = time.monotonic()
    search = _Search(g, dm, s, order, sym, _deadline(budget_ms, start), dynamic)
    try:
        sol = search.first(prefix)
    except _Timeout:
        return Status.TIMEOUT.value, None, search.nodes
    return (Status.FEASIBLE.value if sol else Status.INFEASIBLE.value), sol, search.nodes


def solve_decision(g: Graph, s: PackingSequence, cfg: SearchConfig = SearchConfig(),
                   dm: DistanceMatrix | None = None) -> SolveResult:
    """Decide whether ``g`` has an S-packing ``len(s)``-coloring."""
    _check_sequence(s)
    start = time.monotonic()
    dm = dm if dm is not None else all_pairs_distances(g)
    if g.n == 0:
        return SolveResult(Status.FEASIBLE, Coloring((), len(s)), 0, 0)
    order = vertex_order(g, dm, cfg.vertex_order)
    if cfg.parallel_width == 1:
        status, sol, nodes = _run_subtree((g, dm, s, order, cfg.symmetry_breaking, cfg.budget_ms, (),
                                           cfg.vertex_order == VertexOrder.MIN_DOMAIN))
    else:
        status, sol, nodes = _solve_parallel(g, dm, s, order, cfg)
    elapsed = int((time.monotonic() - start) * 1000)
    coloring = None
    if sol is not None:
        coloring = Coloring(tuple(sol), len(s))
        if verify_coloring(g, dm, s, coloring):
            raise PackchromError("search produced an invalid coloring")
    return SolveResult(Status(status), coloring, nodes, elapsed)


def _solve_parallel(g, dm, s, order, cfg):
    root = _Search(g, dm, s, order, cfg.symmetry_breaking, None)
    dynamic = cfg.vertex_order == VertexOrder.MIN_DOMAIN
    jobs = [(g, dm, s, order, cfg.symmetry_breaking, cfg.budget_ms, (c,), dynamic)
            for c in root._allowed(order[0])]
    nodes = 0
    statuses = []
    # first feasible subtree wins; the pool is torn down to stop the rest
    with multiprocessing.Pool(min(cfg.parallel_width, len(jobs))) as pool:
        for status, sol, n_nodes in pool.imap_unordered(_run_subtree, jobs):
            nodes += n_nodes
            statuses.append(status)
            if status == Status.FEASIBLE.value:
                pool.terminate()
                return status, sol, nodes
    if Status.TIMEOUT.value in statuses:
        return Status.TIMEOUT.value, None, nodes
    return Status.INFEASIBLE.value, None, nodes


def iter_colorings(g: Graph, s: PackingSequence, b: int | None = None,
                   dm: DistanceMatrix | None = None) -> Iterator[tuple[int, ...]]:
    """All S-packing colorings with colors ``1..b``, lexicographic by color tuple.

    Colors need not all be used. No symmetry breaking is applied.
    """
    b = len(s) if b is None else b
    if b > len(s):
        raise BadParam(f"b={b} exceeds sequence length {len(s)}")
    dm = dm if dm is not None else all_pairs_distances(g)
    _ensure_recursion(g.n)
    search = _Search(g, dm, s.truncate(b), list(range(g.n)), False, None)
    for sol in search.solutions():
        yield tuple(sol)


def lower_bound(g: Graph, d: int, n: int, dm: DistanceMatrix | None = None) -> int:
    """Pigeonhole bound: vertices pairwise within distance ``d`` need distinct colors.

    Every ball of radius ``d // 2`` is such a set; if ``d`` reaches the
    diameter the whole vertex set is.
    """
    if g.n == 0:
        return 0
    dm = dm if dm is not None else all_pairs_distances(g)
    if int(dm.dist.max()) <= d:
        return g.n
    radius = d // 2
    return max(1, int((dm.dist <= radius).sum(axis=1).max()))


def solve_min_colors(g: Graph, d: int, n: int, k_max: int | None = None,
                     cfg: SearchConfig = SearchConfig(),
                     dm: DistanceMatrix | None = None) -> tuple[int | None, SolveResult]:
    """Smallest ``k <= k_max`` with a (d, n)-packing k-coloring.

    Returns ``(k, result)`` with a Feasible result on success, ``(None,
    result)`` with the last Infeasible result when no ``k <= k_max`` works,
    or ``(None, result)`` with a Timeout result. The budget in ``cfg`` covers
    the whole sweep.
    """
    start = time.monotonic()
    dm = dm if dm is not None else all_pairs_distances(g)
    k_max = g.n if k_max is None else k_max
    if k_max < 1:
        raise BadParam("k_max must be >= 1")
    nodes = 0
    last = SolveResult(Status.INFEASIBLE, None, 0, 0)
    for k in range(max(1, lower_bound(g, d, n, dm)), k_max + 1):
        budget = cfg.budget_ms
        if budget is not None:
            budget = budget - int((time.monotonic() - start) * 1000)
            if budget <= 0:
                return None, SolveResult(Status.TIMEOUT, None, nodes, int((time.monotonic() - start) * 1000))
        res = solve_decision(g, packing_sequence(d, n, k), _with_budget(cfg, budget), dm)
        nodes += res.nodes_explored
        elapsed = int((time.monotonic() - start) * 1000)
        last = SolveResult(res.status, res.coloring, nodes, elapsed)
        if res.status is Status.FEASIBLE:
            return k, last
        if res.status is Status.TIMEOUT:
            return None, last
    return None, last


def _with_budget(cfg: SearchConfig, budget_ms: int | None) -> SearchConfig:
    return SearchConfig(budget_ms, cfg.vertex_order, cfg.symmetry_breaking, cfg.parallel_width)


def lp_name(label: str) -> str:
    return label.replace(":", ".") or "e"


def export_ilp(g: Graph, s: PackingSequence, k: int, dm: DistanceMatrix | None = None) -> str:
    """Assignment-model ILP in CPLEX LP format.

    Binaries ``x_<label>_<c>``; one assignment row per vertex; one conflict
    row ``x_u_c + x_v_c <= 1`` per pair ``u < v`` and color ``c`` with
    ``d(u, v) <= s_c``. The objective is the constant 0.
    """
    if k > len(s):
        raise BadParam(f"k={k} exceeds sequence length {len(s)}")
    dm = dm if dm is not None else all_pairs_distances(g)
    names = [[f"x_{lp_name(lab)}_{c}" for c in range(1, k + 1)] for lab in g.vertex_labels]
    lines = ["\\ S-packing coloring feasibility model", "Minimize", " obj: 0 " + names[0][0] if g.n else " obj:",
             "Subject To"]
    for v in range(g.n):
        lines.append(f" assign_{v}: " + " + ".join(names[v]) + " = 1")
    row = 0
    for c in range(1, k + 1):
        iu, iv = np.nonzero(np.triu(dm.dist <= s.s(c), k=1))
        for u, v in zip(iu.tolist(), iv.tolist()):
            lines.append(f" conflict_{row}: {names[u][c - 1]} + {names[v][c - 1]} <= 1")
            row += 1
    lines.append("Binary")
    lines.extend(" " + name for per_vertex in names for name in per_vertex)
    lines.append("End")
    return "\n".join(lines) + "\n"
