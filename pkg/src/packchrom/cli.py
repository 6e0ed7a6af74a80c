"""Command-line entry points.

Exit codes: 0 success/feasible, 1 infeasible/invalid, 2 timeout,
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import formats
from .errors import PackchromError
from .generators import gen_h, gen_hp, gen_sierpinski, gen_t, sierpinski_labels
from .graph import all_pairs_distances
from .htransfer import (cached_transfer_digraph, decide_h, exists_odd_closed_walk, format_digraph,
                        odd_closed_walk)
from .lift import lift_coloring, make_certificate
from .packing import explicit_sequence, packing_sequence, verify_coloring
from .solver import SearchConfig, Status, VertexOrder, export_ilp, solve_decision, solve_min_colors

EXIT_OK, EXIT_FAIL, EXIT_TIMEOUT, EXIT_USAGE = 0, 1, 2, 3

GENERATORS = {"sierpinski": gen_sierpinski, "t": gen_t, "h": gen_h, "hp": gen_hp}


class UsageError(Exception):
    pass


def _emit(report: list[tuple[str, object]], out: str | None) -> None:
    text = formats.format_report(report)
    sys.stdout.write(text)
    if out:
        formats.write_text(out, text)


def _read_graph(path: str):
    try:
        return formats.read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _sequence(args, k: int | None):
    if args.seq:
        entries = [int(x) for x in args.seq.split(",")]
        seq = explicit_sequence(entries)
        return seq if k is None else seq.truncate(k)
    if args.d is None or args.n is None:
        raise UsageError("give --d and --n, or --seq")
    if k is None:
        raise UsageError("--k is required with --d/--n here")
    return packing_sequence(args.d, args.n, k)


def cmd_gen(args) -> int:
    if args.family not in GENERATORS:
        raise UsageError(f"unknown family {args.family!r}")
    g = GENERATORS[args.family](args.param)
    if args.out:
        formats.write_text(args.out, formats.format_graph(g))
    else:
        sys.stdout.write(formats.format_graph(g))
        return EXIT_OK
    _emit([("command", "gen"), ("family", args.family), ("param", args.param),
           ("vertices", g.n), ("edges", g.edge_count), ("out", args.out)], None)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    coloring, s = formats.parse_coloring(Path(args.coloring).read_text(), g)
    bad = verify_coloring(g, all_pairs_distances(g), s, coloring)
    report = [("command", "verify"), ("graph", args.graph), ("coloring", args.coloring),
              ("k", coloring.k), ("sequence", s.entries), ("status", "Invalid" if bad else "Valid"),
              ("violations", len(bad))]
    for i, x in enumerate(bad, start=1):
        report.append((f"violation_{i}", f"color={x.color} u={g.label(x.u)} v={g.label(x.v)} "
                                         f"required_gt={x.required_gt} actual={x.actual}"))
    _emit(report, args.out)
    return EXIT_FAIL if bad else EXIT_OK


def _certificate_path(args) -> Path:
    if args.out:
        return Path(args.out).with_suffix(".coloring")
    tag = f"seq{args.seq.replace(',', '-')}" if args.seq else f"d{args.d}n{args.n}"
    return Path(args.graph).with_suffix(f".{tag}.coloring")


def cmd_solve(args) -> int:
    g = _read_graph(args.graph)
    dm = all_pairs_distances(g)
    cfg = SearchConfig(args.budget_ms, VertexOrder(args.order), not args.no_symmetry, args.threads)
    report = [("command", "solve"), ("graph", args.graph), ("vertices", g.n)]
    if args.k is not None or args.seq:
        s = _sequence(args, args.k)
        res = solve_decision(g, s, cfg, dm)
        k = len(s) if res.feasible else None
        report += [("mode", "decision"), ("sequence", s.entries)]
    else:
        if args.d is None or args.n is None:
            raise UsageError("minimisation needs --d and --n")
        k, res = solve_min_colors(g, args.d, args.n, args.k_max, cfg, dm)
        s = packing_sequence(args.d, args.n, k) if k else None
        report += [("mode", "minimize"), ("d", args.d), ("n", args.n)]
    report += [("status", res.status.value), ("k", k if k is not None else "none"),
               ("runtime_ms", res.elapsed_ms), ("nodes_explored", res.nodes_explored)]
    if res.feasible:
        path = _certificate_path(args)
        formats.write_text(path, formats.format_coloring(g, res.coloring, s))
        reread, s2 = formats.parse_coloring(path.read_text(), g)
        ok = not verify_coloring(g, dm, s2, reread)
        report += [("certificate", str(path)), ("certificate_verified", ok)]
    _emit(report, args.out)
    if res.status is Status.TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_OK if res.feasible else EXIT_FAIL


def cmd_lift(args) -> int:
    t = gen_t(args.ell)
    base, s = formats.parse_coloring(Path(args.base).read_text(), t)
    if not s.is_dn:
        raise UsageError("lifting needs a (d, n) coloring header")
    cert = make_certificate(base, args.ell, s.d, s.n)
    report = [("command", "lift"), ("base", args.base), ("ell", args.ell), ("k", args.k),
              ("b", cert.b), ("d", s.d), ("n", s.n), ("condition_ok", cert.condition_ok),
              ("base_verified", cert.base_verified)]
    if not cert.condition_ok or not cert.base_verified:
        report.append(("status", "Rejected"))
        _emit(report, None)
        return EXIT_FAIL
    start = time.monotonic()
    lifted = lift_coloring(cert, args.k)
    sk = gen_sierpinski(args.k)
    bad = verify_coloring(sk, all_pairs_distances(sk), packing_sequence(s.d, s.n, cert.b), lifted)
    out = Path(args.out) if args.out else Path(args.base).with_name(f"S{args.k}_lift.coloring")
    formats.write_text(out, formats.format_coloring(sk, lifted, packing_sequence(s.d, s.n, cert.b)))
    report += [("status", "Verified" if not bad else "Invalid"), ("vertices", sk.n),
               ("violations", len(bad)), ("runtime_ms", int((time.monotonic() - start) * 1000)),
               ("certificate", str(out))]
    _emit(report, None)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_hgraph(args) -> int:
    start = time.monotonic()
    s = _sequence(args, args.b) if args.seq else packing_sequence(1, 1, args.b)
    dg = cached_transfer_digraph(args.b, s.entries)
    report = [("command", "hgraph"), ("b", args.b), ("sequence", s.entries),
              ("vertices", dg.num_vertices), ("arcs", dg.num_arcs), ("sccs", dg.num_sccs),
              ("nontrivial_sccs", sum(1 for p in dg.scc_period.values() if p)),
              ("periods", sorted({p for p in dg.scc_period.values() if p})),
              ("odd_closed_walk", exists_odd_closed_walk(dg))]
    if exists_odd_closed_walk(dg):
        report.append(("odd_walk_witness", odd_closed_walk(dg)))
    if args.dump:
        formats.write_text(args.dump, format_digraph(dg))
        report.append(("dump", args.dump))
    code = EXIT_OK
    if args.r is not None:
        decision = decide_h(args.r, args.b, s, dg=dg if args.r >= 4 else None)
        report.append(("r", args.r))
        report.append(("status", decision.status))
        seen = {key for key, _ in report}
        report.extend((key, val) for key, val in sorted(decision.diagnostics.items()) if key not in seen)
        if decision.status == "Colorable":
            cert = decision.certificate
            coloring = getattr(cert, "reconstructed", cert)
            h = gen_h(args.r)
            path = Path(args.out) if args.out else Path(f"H{args.r}_b{args.b}.coloring")
            formats.write_text(path, formats.format_coloring(h, coloring, s))
            reread, s2 = formats.parse_coloring(path.read_text(), h)
            report += [("certificate", str(path)),
                       ("certificate_verified", not verify_coloring(h, all_pairs_distances(h), s2, reread))]
        else:
            code = EXIT_FAIL
    report.append(("runtime_ms", int((time.monotonic() - start) * 1000)))
    _emit(report, None)
    return code


def cmd_export_lp(args) -> int:
    g = _read_graph(args.graph)
    s = _sequence(args, args.k)
    text = export_ilp(g, s, len(s))
    formats.write_text(args.out, text)
    conflicts = sum(1 for line in text.splitlines() if line.startswith(" conflict_"))
    _emit([("command", "export-lp"), ("graph", args.graph), ("sequence", s.entries),
           ("variables", g.n * len(s)), ("assignment_rows", g.n), ("conflict_rows", conflicts),
           ("out", args.out)], None)
    return EXIT_OK


def _add_seq(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seq", help="explicit sequence s_1,...,s_k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="packchrom", description="Exact S-packing colorings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("--family", required=True, choices=sorted(GENERATORS))
    p.add_argument("--param", required=True, type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check a coloring file against a graph file")
    p.add_argument("graph")
    p.add_argument("coloring")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="decide (with --k or --seq) or minimise colors")
    p.add_argument("graph")
    _add_seq(p)
    p.add_argument("--k", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--budget-ms", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--order", default=VertexOrder.DEGREE_DESC.value, choices=[o.value for o in VertexOrder])
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--out", help="report path; the certificate goes next to it")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("lift", help="lift a T^ell coloring to S^k")
    p.add_argument("base")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("hgraph", help="transfer digraph analysis for H-graphs")
    p.add_argument("--b", type=int, default=6)
    p.add_argument("--r", type=int)
    p.add_argument("--seq")
    p.add_argument("--dump")
    p.add_argument("--out", help="certificate path when colorable")
    p.set_defaults(func=cmd_hgraph, d=None, n=None)

    p = sub.add_parser("export-lp", help="write the assignment ILP in LP format")
    p.add_argument("graph")
    _add_seq(p)
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_lp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, PackchromError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
