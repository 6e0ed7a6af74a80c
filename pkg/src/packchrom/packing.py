"""Packing sequences, colorings and exact verification of the packing property."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadParam, ColorOutOfRange
from .graph import DistanceMatrix, Graph


@dataclass(frozen=True)
class PackingSequence:
    """Nondecreasing distance thresholds ``s_1 <= s_2 <= ...``.

    Color ``i`` (1-based) requires its vertices to be pairwise at distance
    strictly greater than ``entries[i - 1]``. ``d`` and ``n`` are set when
    the sequence comes from the (d, n) family.
    """

    entries: tuple[int, ...]
    d: int | None = None
    n: int | None = None

    def __post_init__(self):
        if any(s < 1 for s in self.entries):
            raise BadParam(f"sequence entries must be >= 1: {self.entries}")
        if any(a > b for a, b in zip(self.entries, self.entries[1:])):
            raise BadParam(f"sequence must be nondecreasing: {self.entries}")

    @property
    def is_dn(self) -> bool:
        return self.d is not None

    def __len__(self) -> int:
        return len(self.entries)

    def s(self, color: int) -> int:
        return self.entries[color - 1]

    def truncate(self, k: int) -> PackingSequence:
        return PackingSequence(self.entries[:k], self.d, self.n)


def packing_sequence(d: int, n: int, k: int) -> PackingSequence:
    if d < 1 or n < 1 or k < 1:
        raise BadParam(f"d, n, k must be positive, got d={d} n={n} k={k}")
    return PackingSequence(tuple(d + (i - 1) // n for i in range(1, k + 1)), d, n)


def explicit_sequence(entries: Sequence[int]) -> PackingSequence:
    return PackingSequence(tuple(int(s) for s in entries))


@dataclass(frozen=True)
class Coloring:
    """Total map vertex index -> color in ``1..k``."""

    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        bad = [c for c in self.assignment if not 1 <= c <= self.k]
        if bad:
            raise ColorOutOfRange(f"colors {sorted(set(bad))} outside 1..{self.k}")

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __len__(self) -> int:
        return len(self.assignment)

    def colors_used(self) -> int:
        return len(set(self.assignment))


def color_classes(c: Coloring) -> list[set[int]]:
    classes: list[set[int]] = [set() for _ in range(c.k)]
    for v, col in enumerate(c.assignment):
        classes[col - 1].add(v)
    return classes


@dataclass(frozen=True, order=True)
class Violation:
    color: int
    u: int
    v: int
    required_gt: int
    actual: int


def verify_coloring(g: Graph, dm: DistanceMatrix, s: PackingSequence, c: Coloring) -> list[Violation]:
    """Every pair of same-colored vertices closer than their color allows.

    Sorted by ``(color, u, v)`` with ``u < v``. An empty list means ``c`` is
    an S-packing coloring of ``g``.
    """
    if len(c) != g.n:
        raise BadParam(f"coloring has {len(c)} entries, graph has {g.n} vertices")
    if c.k > len(s):
        raise ColorOutOfRange(f"coloring uses k={c.k} but sequence has {len(s)} entries")
    out = []
    for col, members in enumerate(color_classes(c), start=1):
        if len(members) < 2:
            continue
        idx = np.array(sorted(members))
        sub = dm.dist[np.ix_(idx, idx)]
        bound = s.s(col)
        us, vs = np.nonzero(np.triu(sub <= bound, k=1))
        for a, b in zip(us.tolist(), vs.tolist()):
            out.append(Violation(col, int(idx[a]), int(idx[b]), bound, int(sub[a, b])))
    return out


def is_packing_coloring(g: Graph, dm: DistanceMatrix, s: PackingSequence, c: Coloring) -> bool:
    return not verify_coloring(g, dm, s, c)
