from __future__ import annotations

import hashlib

import numpy as np
import pytest
from scipy.sparse import csr_matrix

from packchrom.errors import BadParam, InvalidWalk
from packchrom.generators import gen_h, gen_hp
from packchrom.graph import all_pairs_distances
from packchrom.htransfer import (build_transfer_digraph, cached_transfer_digraph, check_window_width,
                                 decide_h, digraph_from_arcs, enumerate_window_colorings,
                                 exists_odd_closed_walk, format_digraph, has_closed_walk_of_length,
                                 merged_coloring, odd_closed_walk, scc_periods, walk_to_coloring)
from packchrom.packing import Coloring, packing_sequence, verify_coloring
from packchrom.solver import SearchConfig, Status, VertexOrder, solve_decision

from oracles import (closed_walk_by_matrix_power, colorings_by_extension, floyd_warshall,
                     has_odd_simple_cycle, random_digraph)

S6 = (1, 2, 3, 4, 5, 6)
D_SHA256 = "7aa944c0a0604853e5f98cdee1202407c0a825aedc31425e5df58d26ae492735"


@pytest.fixture(scope="module")
def dg():
    return cached_transfer_digraph(6)


def _adjacency(dg):
    n = dg.num_vertices
    return csr_matrix((np.ones(dg.num_arcs, dtype=np.int64), dg.indices, dg.indptr), shape=(n, n))


# windows and arcs

def test_window_count_matches_extension_oracle(dg):
    oracle = colorings_by_extension(floyd_warshall(gen_hp(3)), S6, 6)
    assert dg.num_vertices == len(oracle) == 8336
    assert np.array_equal(dg.vertices, oracle)


def test_every_window_verifies(dg):
    hp = gen_hp(3)
    dm = all_pairs_distances(hp)
    s = packing_sequence(1, 1, 6)
    for row in dg.vertices.tolist():
        assert not verify_coloring(hp, dm, s, Coloring(tuple(row), 6))


def test_windows_need_not_use_every_color(dg):
    used = [len(set(row)) for row in dg.vertices.tolist()]
    assert min(used) < 6
    assert sum(u == 6 for u in used) == 8288


def test_one_color_has_no_windows():
    assert enumerate_window_colorings(1) == []


def test_arc_count_matches_extension_oracle(dg):
    oracle = colorings_by_extension(floyd_warshall(gen_hp(4)), S6, 6)
    assert dg.num_arcs == len(oracle) == 20356
    src, dst = dg.arcs()
    merged = np.hstack([dg.vertices[src], dg.vertices[dst, -6:]])
    order = np.lexsort(merged.T[::-1])
    assert np.array_equal(merged[order], oracle)


def test_sampled_arcs_verify(dg):
    hp4 = gen_hp(4)
    dm = all_pairs_distances(hp4)
    s = packing_sequence(1, 1, 6)
    src, dst = dg.arcs()
    for i in range(0, dg.num_arcs, 97):
        u, v = int(src[i]), int(dst[i])
        assert np.array_equal(dg.vertices[u, 6:], dg.vertices[v, :12])
        assert not verify_coloring(hp4, dm, s, Coloring(merged_coloring(dg, u, v), 6))


def test_arcs_sorted_and_consistent(dg):
    for u in range(0, dg.num_vertices, 131):
        succ = dg.successors(u)
        assert list(succ) == sorted(succ)
        for v in succ.tolist():
            assert dg.has_arc(u, v)


@pytest.mark.parametrize("r", [4, 5, 6, 7, 8])
def test_closed_walks_count_h_colorings(dg, r):
    a = _adjacency(dg)
    p = a.copy()
    for _ in range(r - 1):
        p = p @ a
    oracle = colorings_by_extension(floyd_warshall(gen_h(r)), S6, 6)
    assert int(p.diagonal().sum()) == len(oracle)


def test_small_palette_digraph():
    small = build_transfer_digraph(5)
    assert small.num_vertices == 32
    assert small.num_vertices == len(colorings_by_extension(floyd_warshall(gen_hp(3)), S6, 5))


def test_width_two_rejected():
    with pytest.raises(BadParam):
        check_window_width(2, packing_sequence(1, 1, 6))
    check_window_width(3, packing_sequence(1, 1, 6))


def test_width_one_rejected():
    with pytest.raises(BadParam):
        check_window_width(1, packing_sequence(1, 1, 2))


# components and periods

@pytest.mark.parametrize("n, arcs, periods", [
    (2, [(0, 1), (1, 0)], {0: 2}),
    (3, [(0, 1), (1, 2), (2, 0)], {0: 3}),
    (3, [(0, 1), (1, 0), (0, 2), (2, 0)], {0: 2}),
    (5, [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 4), (4, 0)], {0: 1}),
    (1, [(0, 0)], {0: 1}),
    (3, [(0, 1), (1, 2)], {0: 0, 1: 0, 2: 0}),
])
def test_toy_periods(n, arcs, periods):
    assert scc_periods(digraph_from_arcs(n, arcs)) == periods


def test_transfer_digraph_components(dg):
    assert dg.num_sccs == 7774
    nontrivial = {c: p for c, p in dg.scc_period.items() if p}
    assert len(nontrivial) == 2
    assert set(nontrivial.values()) == {2}


def test_no_odd_closed_walk(dg):
    assert not exists_odd_closed_walk(dg)
    assert odd_closed_walk(dg) is None


@pytest.mark.parametrize("seed", range(40))
def test_odd_walk_matches_cycle_oracle(seed):
    n = 3 + seed % 10
    arcs = random_digraph(n, 0.08 + 0.01 * (seed % 7), seed)
    toy = digraph_from_arcs(n, arcs)
    expected = has_odd_simple_cycle(n, arcs)
    assert exists_odd_closed_walk(toy) == expected
    walk = odd_closed_walk(toy)
    assert (walk is not None) == expected
    if walk:
        assert len(walk) % 2 == 1
        assert all(toy.has_arc(a, b) for a, b in zip(walk, walk[1:] + walk[:1]))


@pytest.mark.parametrize("seed", range(25))
def test_closed_walk_length_matches_matrix_power(seed):
    n = 5 + (seed * 7) % 46
    arcs = random_digraph(n, 1.5 / n, 100 + seed)
    toy = digraph_from_arcs(n, arcs)
    for L in range(1, 21):
        found, walk = has_closed_walk_of_length(toy, L)
        assert found == closed_walk_by_matrix_power(n, arcs, L), L
        if found:
            assert len(walk) == L
            assert all(toy.has_arc(a, b) for a, b in zip(walk, walk[1:] + walk[:1]))


def test_two_cycle_walk_lengths():
    toy = digraph_from_arcs(2, [(0, 1), (1, 0)])
    assert has_closed_walk_of_length(toy, 4)[0]
    assert not has_closed_walk_of_length(toy, 3)[0]
    with pytest.raises(BadParam):
        has_closed_walk_of_length(toy, 0)


def test_walk_lengths_on_transfer_digraph(dg):
    for L in range(1, 22, 2):
        assert not has_closed_walk_of_length(dg, L)[0]
    for L in (4, 6, 8):
        found, walk = has_closed_walk_of_length(dg, L)
        assert found and len(walk) == L


# reconstruction

def test_walk_to_coloring_rejects_bad_length(dg):
    _, walk = has_closed_walk_of_length(dg, 4)
    with pytest.raises(InvalidWalk):
        walk_to_coloring(dg, walk[:3], 4)


def test_walk_to_coloring_rejects_missing_arc(dg):
    u = 0
    v = next(x for x in range(dg.num_vertices) if not dg.has_arc(u, x))
    with pytest.raises(InvalidWalk):
        walk_to_coloring(dg, [u, v, u, v], 4)


@pytest.mark.parametrize("r", [4, 6, 8, 10])
def test_reconstruction_verifies(dg, r):
    _, walk = has_closed_walk_of_length(dg, r)
    cert = walk_to_coloring(dg, walk, r)
    assert cert.verified and cert.violations == 0
    h = gen_h(r)
    assert not verify_coloring(h, all_pairs_distances(h), packing_sequence(1, 1, 6), cert.reconstructed)


# decisions

@pytest.mark.parametrize("r, status", [(4, "Colorable"), (5, "NotColorable"), (6, "Colorable"),
                                       (7, "NotColorable"), (8, "Colorable")])
def test_decide_h(dg, r, status):
    dec = decide_h(r, 6, dg=dg)
    assert dec.status == status
    if status == "Colorable":
        assert dec.certificate.verified
        assert dec.diagnostics["walk_r_reconstruction_verified"] is True
    else:
        assert dec.certificate is None
        assert dec.diagnostics["walk_r_exists"] is False


def test_decide_h_reports_short_walk(dg):
    diag = decide_h(6, 6, dg=dg).diagnostics
    assert diag["walk_r_minus_2_exists"] is True
    assert "walk_r_minus_2_reconstruction_verified" in diag


@pytest.mark.parametrize("b, status", [(5, "Colorable"), (4, "NotColorable")])
def test_decide_h2(b, status):
    dec = decide_h(2, b)
    assert dec.status == status
    if dec.certificate is not None:
        h = gen_h(2)
        assert not verify_coloring(h, all_pairs_distances(h), packing_sequence(1, 1, b), dec.certificate)


@pytest.mark.parametrize("r", [4, 5, 6, 7])
def test_decide_h_agrees_with_solver(dg, r):
    res = solve_decision(gen_h(r), packing_sequence(1, 1, 6),
                         SearchConfig(vertex_order=VertexOrder.MIN_DOMAIN, budget_ms=120_000))
    assert res.status is not Status.TIMEOUT
    assert (res.status is Status.FEASIBLE) == (decide_h(r, 6, dg=dg).status == "Colorable")


def test_decide_h_rejects_small_r():
    with pytest.raises(BadParam):
        decide_h(1, 6)


# serialization

def test_toy_dump_exact():
    toy = digraph_from_arcs(3, [(2, 0), (0, 1), (1, 2)])
    assert format_digraph(toy) == "D 3 3 0\n\n\n\n0 1\n1 2\n2 0\n"


def test_dump_golden_hash(dg):
    text = format_digraph(dg)
    assert text.startswith("D 8336 20356 6\n")
    assert hashlib.sha256(text.encode()).hexdigest() == D_SHA256


def test_dump_deterministic():
    a = format_digraph(build_transfer_digraph(5))
    b = format_digraph(build_transfer_digraph(5))
    assert a == b
