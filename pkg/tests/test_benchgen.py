import io

import networkx as nx
import pytest

from benchgen import PlantedParams, audit_mixing, generate_planted
from errors import ConfigError, InfeasibleParamsError
from graph_core import parse_edge_list, write_cover, write_edge_list


def files_of(params):
    graph, truth = generate_planted(params)
    edges, cover = io.StringIO(), io.StringIO()
    write_edge_list(graph, edges)
    write_cover(truth, cover, labels=graph.labels)
    return edges.getvalue(), cover.getvalue()


@pytest.mark.parametrize("kwargs", [
    {"n": 0}, {"n": 100, "n_comm": 2, "comm_size": 10}, {"mu": 0.6}, {"on_fraction": 0.7},
    {"om": 1}, {"avg_degree": 0}, {"seed": -3},
])
def test_invalid_params(kwargs):
    with pytest.raises(ConfigError):
        PlantedParams(**kwargs)


def test_zero_mixing_keeps_every_edge_inside():
    params = PlantedParams(n=200, n_comm=8, comm_size=25, mu=0.0, on_fraction=0.0, avg_degree=10)
    graph, truth = generate_planted(params)
    assert truth.is_disjoint()
    community = {v: next(iter(truth.membership_of(v))) for v in range(graph.n)}
    for u, v in zip(graph.edge_u.tolist(), graph.edge_v.tolist()):
        assert community[u] == community[v]
    components = sorted(tuple(sorted(c)) for c in nx.connected_components(graph.to_networkx()))
    assert components == truth.as_sorted_tuples()
    assert audit_mixing(graph, truth).max == 0.0


def test_overlapping_vertex_count():
    params = PlantedParams(n=100, n_comm=2, comm_size=55, mu=0.0, on_fraction=0.1, om=2,
                           avg_degree=10)
    _, truth = generate_planted(params)
    sizes = [len(truth.membership_of(v)) for v in range(100)]
    assert sizes.count(2) == 10
    assert sizes.count(1) == 90


def test_community_sizes_spread_memberships_evenly():
    # comm_size only bounds capacity; 180 + 20*2 memberships over 8 communities
    params = PlantedParams(n=200, n_comm=8, comm_size=25, mu=0.0, on_fraction=0.1, om=2,
                           avg_degree=10, seed=3)
    _, truth = generate_planted(params)
    sizes = sorted(len(members) for members in truth.communities)
    assert sizes == [27] * 4 + [28] * 4
    assert sum(sizes) == 220


@pytest.mark.parametrize("seed", range(3))
def test_realized_mixing_within_slack(seed):
    params = PlantedParams(n=1000, n_comm=40, comm_size=25, mu=0.1, on_fraction=0.1, om=2,
                           avg_degree=20, seed=seed)
    graph, truth = generate_planted(params)
    audit = audit_mixing(graph, truth)
    assert audit.fractions.size == 900
    assert audit.max <= params.mu + 1.0 / params.avg_degree
    assert "max=" in audit.summary()
    assert truth.covers(range(graph.n))


def test_same_seed_same_files():
    params = PlantedParams(n=300, n_comm=12, comm_size=25, mu=0.2, avg_degree=12, seed=5)
    assert files_of(params) == files_of(params)
    other = PlantedParams(n=300, n_comm=12, comm_size=25, mu=0.2, avg_degree=12, seed=6)
    assert files_of(params) != files_of(other)


def test_generated_graph_round_trips():
    graph, _ = generate_planted(PlantedParams(n=200, n_comm=8, comm_size=25, avg_degree=10))
    out = io.StringIO()
    write_edge_list(graph, out)
    again = parse_edge_list(io.StringIO(out.getvalue()), one_indexed=True)
    assert again.n == graph.n
    assert again.edge_u.tolist() == graph.edge_u.tolist()
    assert again.edge_v.tolist() == graph.edge_v.tolist()


def test_community_too_small_for_intra_degree():
    params = PlantedParams(n=40, n_comm=8, comm_size=5, mu=0.0, on_fraction=0.0, avg_degree=10)
    with pytest.raises(InfeasibleParamsError):
        generate_planted(params)
