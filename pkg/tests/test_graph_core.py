import io

import numpy as np
import pytest

from errors import CoverError, ParseError
from graph_core import (Cover, CoverFormat, Graph, compute_tie_strengths, parse_cover_file,
                        parse_edge_list, write_cover, write_edge_list)
from tests.conftest import random_graph


def parse(text, **kwargs):
    return parse_edge_list(io.StringIO(text), **kwargs)


# ═══════════════════════════════════════════════════════════════════════════════
# EDGE LISTS
# ═══════════════════════════════════════════════════════════════════════════════

def test_parse_one_indexed_path():
    graph = parse("1 2\n2 3\n", one_indexed=True)
    assert graph.n == 3
    assert graph.edge_u.tolist() == [0, 1]
    assert graph.edge_v.tolist() == [1, 2]
    assert graph.edge_w.tolist() == [1.0, 1.0]
    assert graph.labels.tolist() == [1, 2, 3]


def test_duplicates_merge_by_summing_weights():
    graph = parse("1 2 2.5\n2 1 1.5\n", weighted=True)
    assert graph.m == 1
    assert graph.edge_w[0] == pytest.approx(4.0)


def test_self_loops_dropped_and_counted():
    graph = parse("1 1\n1 2\n")
    assert graph.m == 1
    assert graph.self_loops_dropped == 1


def test_comments_and_blank_lines_skipped():
    graph = parse("# header\n\n10 20\n# mid\n20 30\n")
    assert graph.m == 2
    assert graph.labels.tolist() == [10, 20, 30]


def test_sparse_labels_remapped_in_sorted_order():
    graph = parse("100 7\n7 42\n")
    assert graph.labels.tolist() == [7, 42, 100]
    assert graph.find_edge(0, 2) >= 0
    assert graph.find_edge(1, 2) == -1


def test_one_indexed_keeps_isolated_vertices():
    graph = parse("1 3\n", one_indexed=True)
    assert graph.n == 3
    assert graph.degree(1) == 0


def test_unweighted_parse_ignores_third_column():
    graph = parse("1 2 5.0\n")
    assert graph.edge_w.tolist() == [1.0]


@pytest.mark.parametrize("text, line", [
    ("1 2\n1 2 3 4\n", 2),
    ("1 x\n", 1),
    ("1 2\n\n2 3 -1\n", 3),
    ("1 2 0\n", 1),
    ("1 2 abc\n", 1),
])
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(ParseError) as info:
        parse(text, weighted=True)
    assert info.value.line_number == line
    assert f"line {line}:" in str(info.value)


def test_one_indexed_rejects_zero_label():
    with pytest.raises(ParseError):
        parse("0 1\n", one_indexed=True)


@pytest.mark.parametrize("text", ["", "# only a comment\n", "3 3\n"])
def test_empty_graph_rejected(text):
    with pytest.raises(ParseError, match="empty graph"):
        parse(text)


def test_undecodable_bytes_report_line_number():
    with pytest.raises(ParseError) as info:
        parse_edge_list(io.BytesIO(b"1 2\n2 \xff\xfe3\n"))
    assert info.value.line_number == 2
    assert "UTF-8" in str(info.value)


def test_undecodable_text_stream_is_a_parse_error():
    stream = io.TextIOWrapper(io.BytesIO(b"1 2\n2 \xff\xfe3\n"), encoding="utf-8")
    with pytest.raises(ParseError, match="UTF-8"):
        parse_edge_list(stream)


def test_binary_stream_parses_like_text():
    graph = parse_edge_list(io.BytesIO(b"# header\r\n10 20\r\n20 30\n"))
    assert graph.labels.tolist() == [10, 20, 30]
    assert graph.m == 2


@pytest.mark.parametrize("text", ["1 2\n2 99999999999999999999\n",
                                  "1 2\n-99999999999999999999 2\n"])
def test_labels_outside_int64_rejected(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line_number == 2
    assert "64 bits" in str(info.value)


def test_largest_int64_label_accepted():
    graph = parse(f"1 {2 ** 63 - 1}\n")
    assert graph.labels.tolist() == [1, 2 ** 63 - 1]


def test_adjacency_is_symmetric():
    graph = random_graph(60, 0.1, seed=3, weighted=True)
    for u in range(graph.n):
        neighbors, weights = graph.neighbors(u)
        assert np.all(np.diff(neighbors) > 0)
        for v, w in zip(neighbors.tolist(), weights.tolist()):
            back, back_w = graph.neighbors(v)
            pos = np.searchsorted(back, u)
            assert back[pos] == u
            assert back_w[pos] == w


def test_graph_arrays_are_read_only(triangle):
    with pytest.raises(ValueError):
        triangle.edge_w[0] = 2.0


def test_write_edge_list_round_trips_through_parse():
    graph = parse("5 9 1.5\n9 12 2.0\n5 12 0.25\n", weighted=True)
    out = io.StringIO()
    write_edge_list(graph, out)
    again = parse(out.getvalue(), weighted=True)
    assert again.labels.tolist() == graph.labels.tolist()
    assert again.edge_u.tolist() == graph.edge_u.tolist()
    assert again.edge_w.tolist() == graph.edge_w.tolist()


# ═══════════════════════════════════════════════════════════════════════════════
# TIE-STRENGTH
# ═══════════════════════════════════════════════════════════════════════════════

def brute_force_ties(graph: Graph) -> np.ndarray:
    """Dense-matrix evaluation of w(u,v) + sum over common k of w(u,k) + w(v,k)"""
    dense = np.zeros((graph.n, graph.n))
    dense[graph.edge_u, graph.edge_v] = graph.edge_w
    dense[graph.edge_v, graph.edge_u] = graph.edge_w
    t = []
    for u, v, w in zip(graph.edge_u.tolist(), graph.edge_v.tolist(), graph.edge_w.tolist()):
        total = w
        for k in range(graph.n):
            if dense[u, k] > 0 and dense[v, k] > 0:
                total += dense[u, k] + dense[v, k]
        t.append(total)
    return np.asarray(t)


def test_unit_triangle_tie_strength(triangle):
    ties = compute_tie_strengths(triangle)
    assert ties.t_edge.tolist() == [3.0, 3.0, 3.0]


def test_edge_without_common_neighbors_keeps_weight():
    graph = Graph.from_edges(2, [(0, 1, 2.5)], weighted=True)
    assert compute_tie_strengths(graph).t_edge.tolist() == [2.5]


def test_weighted_triangle_tie_strengths():
    a, b, c = 0, 1, 2
    graph = Graph.from_edges(3, [(a, b, 1.0), (b, c, 1.0), (a, c, 2.0)], weighted=True)
    ties = compute_tie_strengths(graph)
    assert ties.t_edge[graph.find_edge(a, c)] == pytest.approx(4.0)
    assert ties.t_edge[graph.find_edge(a, b)] == pytest.approx(4.0)
    assert ties.t_vertex[a] == pytest.approx(8.0)


@pytest.mark.parametrize("seed", range(5))
def test_tie_strengths_match_brute_force(seed):
    graph = random_graph(35, 0.2, seed=seed, weighted=True)
    ties = compute_tie_strengths(graph)
    np.testing.assert_allclose(ties.t_edge, brute_force_ties(graph), rtol=1e-12)
    assert np.all(ties.t_edge >= graph.edge_w)


def test_tie_totals(small_random_graphs):
    for graph in small_random_graphs:
        ties = compute_tie_strengths(graph)
        assert ties.W == pytest.approx(2.0 * ties.W_edge, rel=1e-9)
        for v in range(graph.n):
            start, end = graph.indptr[v], graph.indptr[v + 1]
            assert ties.t_vertex[v] == pytest.approx(ties.t_slot[start:end].sum(), rel=1e-9)


# ═══════════════════════════════════════════════════════════════════════════════
# COVERS
# ═══════════════════════════════════════════════════════════════════════════════

def test_parse_community_per_line():
    cover = parse_cover_file(io.StringIO("1 2 3\n4 5\n"))
    assert cover.as_sorted_tuples() == [(1, 2, 3), (4, 5)]


def test_parse_vertex_memberships():
    cover = parse_cover_file(io.StringIO("1 7\n2 7\n3 7 9\n"), CoverFormat.VERTEX_MEMBERSHIPS)
    assert cover.communities == [frozenset({1, 2, 3}), frozenset({3})]
    assert len(cover.membership_of(3)) == 2


def test_vertex_memberships_needs_a_community():
    with pytest.raises(ParseError, match="line 2"):
        parse_cover_file(io.StringIO("1 7\n2\n"), CoverFormat.VERTEX_MEMBERSHIPS)


@pytest.mark.parametrize("fmt", list(CoverFormat))
def test_cover_file_undecodable_bytes(fmt):
    with pytest.raises(ParseError, match="line 2"):
        parse_cover_file(io.BytesIO(b"1 7\n2 \xff7\n"), fmt)


def test_cover_label_outside_int64_rejected():
    with pytest.raises(ParseError, match="64 bits"):
        parse_cover_file(io.StringIO("1 2\n3 99999999999999999999\n"))


def test_cover_against_graph_maps_labels_to_ids():
    graph = parse("10 20\n20 30\n")
    cover = parse_cover_file(io.StringIO("10 20\n30\n"), graph=graph)
    assert cover.as_sorted_tuples() == [(0, 1), (2,)]
    with pytest.raises(ParseError, match="unknown vertex label 99"):
        parse_cover_file(io.StringIO("10 99\n"), graph=graph)


@pytest.mark.parametrize("fmt", list(CoverFormat))
def test_write_cover_canonical_round_trip(fmt):
    cover = Cover([[5, 4], [1, 2, 3], [3, 4], [2, 1, 3]])
    out = io.StringIO()
    write_cover(cover, out, fmt)
    again = parse_cover_file(io.StringIO(out.getvalue()), fmt)
    assert again == cover.canonical()
    assert len(again) == 3


def test_write_cover_orders_by_smallest_label():
    out = io.StringIO()
    write_cover(Cover([[4, 5], [3, 1]]), out)
    assert out.getvalue() == "1 3\n4 5\n"


def test_cover_edits_delete_empty_communities():
    cover = Cover([[0, 1], [2]])
    cid = cover.membership_of(2).copy().pop()
    cover.join(2, 0)
    cover.leave(2, cid)
    assert len(cover) == 1
    assert cover.membership_of(2) == {0}
    assert cover.is_disjoint()
    assert cover.covers(range(3))


def test_cover_rejects_empty_community():
    with pytest.raises(CoverError):
        Cover([[1], []])
