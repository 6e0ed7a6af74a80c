"""Lifting a coloring of T^l to every Sierpinski graph S^k with k >= l.

Each vertex of S^k takes the color of its length-``l`` label suffix in the
base coloring. This is valid whenever the base is a (d, n)-packing
b-coloring of T^l and ``d + (b - 1) // n < 2**l``.

The bound is strict: ``i j^l`` and ``j j^l`` share their suffix and lie at
distance exactly ``2**l`` in S^(l+1), so a color with threshold ``2**l``
can be repeated too closely.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import BadParam, InvalidBase, LiftConditionViolated
from .formats import format_coloring, parse_coloring, write_text
from .generators import gen_t, sierpinski_labels
from .graph import all_pairs_distances
from .packing import Coloring, packing_sequence, verify_coloring
from .solver import SearchConfig, Status, solve_decision

log = logging.getLogger(__name__)


def check_lift_condition(ell: int, b: int, d: int, n: int) -> bool:
    if min(ell, b, d, n) < 1:
        raise BadParam("lift parameters must be >= 1")
    return d + (b - 1) // n < 2 ** ell


@dataclass(frozen=True)
class LiftCertificate:
    ell: int
    b: int
    d: int
    n: int
    base: Coloring
    condition_ok: bool
    base_verified: bool


def make_certificate(base: Coloring, ell: int, d: int, n: int) -> LiftCertificate:
    """Bundle a T^ell coloring with its side condition and verification status."""
    b = base.k
    t = gen_t(ell)
    if len(base) != t.n:
        raise InvalidBase(f"base has {len(base)} colors, T^{ell} has {t.n} vertices")
    ok = not verify_coloring(t, all_pairs_distances(t), packing_sequence(d, n, b), base)
    return LiftCertificate(ell, b, d, n, base, check_lift_condition(ell, b, d, n), ok)


def _check(cert: LiftCertificate, k: int) -> None:
    if k < cert.ell:
        raise BadParam(f"k={k} smaller than ell={cert.ell}")
    if not cert.condition_ok:
        raise LiftConditionViolated(
            f"{cert.d} + ({cert.b} - 1) // {cert.n} >= 2**{cert.ell}")
    if not cert.base_verified:
        raise InvalidBase("base coloring is not a packing coloring of T^ell")


def lift_coloring(cert: LiftCertificate, k: int) -> Coloring:
    _check(cert, k)
    # lexicographic labels: the suffix index of vertex i is i mod 3**ell
    period = 3 ** cert.ell
    base = cert.base.assignment
    return Coloring(tuple(base[i % period] for i in range(3 ** k)), cert.b)


def lift_recursive_oracle(cert: LiftCertificate, k: int) -> Coloring:
    """Same lift built copy by copy on labels: f_k(jx) = f_{k-1}(x)."""
    _check(cert, k)
    f = dict(zip(sierpinski_labels(cert.ell), cert.base.assignment))
    for _ in range(cert.ell, k):
        f = {j + x: col for j in "012" for x, col in f.items()}
    return Coloring(tuple(f[lab] for lab in sierpinski_labels(k)), cert.b)


def find_base_coloring(ell: int, d: int, n: int, b: int, cfg: SearchConfig = SearchConfig(),
                       cache_dir: str | Path | None = None) -> Coloring | None:
    """Search (or load from cache) a (d, n)-packing b-coloring of T^ell.

    Cached files use the coloring format and are re-verified on load.
    Returns None when the search is infeasible or runs out of budget.
    """
    t = gen_t(ell)
    dm = all_pairs_distances(t)
    s = packing_sequence(d, n, b)
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"T{ell}_d{d}_n{n}_b{b}.coloring"
        if path.exists():
            cached, _ = parse_coloring(path.read_text(), t)
            if not verify_coloring(t, dm, s, cached):
                return cached
            log.warning("ignoring invalid cached base coloring %s", path)
    res = solve_decision(t, s, cfg, dm)
    if res.status is not Status.FEASIBLE:
        return None
    if path is not None:
        write_text(path, format_coloring(t, res.coloring, s))
    return res.coloring
