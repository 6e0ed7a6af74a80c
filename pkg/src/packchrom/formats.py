"""Line-oriented text formats for graphs, colorings and reports.

Graph file::

    g <num_vertices> <num_edges>
    n <index> <label>
    e <label1> <label2>

Coloring file::

    c <k> <d> <n>            or    c <k> explicit s_1 ... s_k
    <label> <color>

The empty label (the single vertex of S^0) is written as ``-``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .errors import FormatError
from .graph import Graph, build_graph
from .packing import Coloring, PackingSequence, explicit_sequence, packing_sequence

EMPTY = "-"


def _out(label: str) -> str:
    return label if label else EMPTY


def _in(token: str) -> str:
    return "" if token == EMPTY else token


def format_graph(g: Graph) -> str:
    lines = [f"g {g.n} {g.edge_count}"]
    lines.extend(f"n {i} {_out(lab)}" for i, lab in enumerate(g.vertex_labels))
    lines.extend(f"e {_out(g.label(u))} {_out(g.label(v))}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][0] != "g" or len(lines[0]) != 3:
        raise FormatError("graph file must start with 'g <num_vertices> <num_edges>'")
    try:
        nv, ne = int(lines[0][1]), int(lines[0][2])
    except ValueError:
        raise FormatError(f"bad header {lines[0]}") from None
    labels: list[str] = [None] * nv
    edges = []
    for parts in lines[1:]:
        if parts[0] == "n" and len(parts) == 3:
            i = int(parts[1])
            if not 0 <= i < nv:
                raise FormatError(f"vertex index {i} out of range")
            labels[i] = _in(parts[2])
        elif parts[0] == "e" and len(parts) == 3:
            edges.append((_in(parts[1]), _in(parts[2])))
        else:
            raise FormatError(f"unrecognised line: {' '.join(parts)}")
    if any(lab is None for lab in labels):
        raise FormatError("missing vertex lines")
    g = build_graph(labels, edges)
    if g.edge_count != ne:
        raise FormatError(f"header says {ne} edges, found {g.edge_count}")
    return g


def format_coloring(g: Graph, c: Coloring, s: PackingSequence) -> str:
    if s.is_dn:
        header = f"c {c.k} {s.d} {s.n}"
    else:
        header = f"c {c.k} explicit " + " ".join(map(str, s.entries[:c.k]))
    lines = [header]
    lines.extend(f"{_out(lab)} {col}" for lab, col in zip(g.vertex_labels, c.assignment))
    return "\n".join(lines) + "\n"


def parse_coloring(text: str, g: Graph) -> tuple[Coloring, PackingSequence]:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][0] != "c":
        raise FormatError("coloring file must start with 'c <k> ...'")
    head = lines[0]
    try:
        k = int(head[1])
        if len(head) >= 3 and head[2] == "explicit":
            s = explicit_sequence([int(x) for x in head[3:]])
            if len(s) != k:
                raise FormatError(f"explicit sequence has {len(s)} entries, k={k}")
        elif len(head) == 4:
            s = packing_sequence(int(head[2]), int(head[3]), k)
        else:
            raise FormatError(f"bad header {' '.join(head)}")
    except ValueError:
        raise FormatError(f"bad header {' '.join(head)}") from None
    colors: dict[str, int] = {}
    for parts in lines[1:]:
        if len(parts) != 2:
            raise FormatError(f"bad coloring line: {' '.join(parts)}")
        lab = _in(parts[0])
        if lab in colors:
            raise FormatError(f"label {lab!r} colored twice")
        colors[lab] = int(parts[1])
    missing = set(g.vertex_labels) - colors.keys()
    extra = colors.keys() - set(g.vertex_labels)
    if missing or extra:
        raise FormatError(f"labels do not match graph: missing={sorted(missing)[:5]} extra={sorted(extra)[:5]}")
    return Coloring(tuple(colors[lab] for lab in g.vertex_labels), k), s


def format_report(items: Iterable[tuple[str, object]]) -> str:
    """Flat ``key: value`` document; order is the caller's."""
    out = []
    for key, value in items:
        if isinstance(value, (list, tuple)):
            value = " ".join(map(str, value))
        elif isinstance(value, bool):
            value = str(value).lower()
        out.append(f"{key}: {value}")
    return "\n".join(out) + "\n"


def parse_report(text: str) -> dict[str, str]:
    report = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition(": ")
            report[key] = value
    return report


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
