"""Shared graphs and an isolated configuration for every test."""

import itertools

import networkx as nx
import numpy as np
import pytest

from config import CONFIG_ENV_VAR, reset_config
from graph_core import Graph, compute_tie_strengths


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point the global config at an empty per-test file"""
    path = tmp_path / "config.json"
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    reset_config()
    yield path
    reset_config()


def clique_edges(members):
    return list(itertools.combinations(members, 2))


def two_clique_graph(size: int = 10) -> Graph:
    """Two K_size cliques joined by one bridge (size-1, size), labels 1..2*size"""
    left = clique_edges(range(size))
    right = clique_edges(range(size, 2 * size))
    return Graph.from_edges(2 * size, left + right + [(size - 1, size)],
                            labels=range(1, 2 * size + 1))


def random_graph(n: int, p: float, seed: int, weighted: bool = False) -> Graph:
    g = nx.gnp_random_graph(n, p, seed=seed)
    rng = np.random.default_rng(seed)
    if weighted:
        edges = [(u, v, float(rng.uniform(0.5, 3.0))) for u, v in g.edges()]
    else:
        edges = list(g.edges())
    return Graph.from_edges(n, edges, weighted=weighted)


def edge_list_text(graph: Graph) -> str:
    labels = graph.labels
    return "".join(f"{labels[u]} {labels[v]}\n"
                   for u, v in zip(graph.edge_u.tolist(), graph.edge_v.tolist()))


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_cliques():
    return two_clique_graph(10)


@pytest.fixture
def two_cliques_ties(two_cliques):
    return compute_tie_strengths(two_cliques)


@pytest.fixture
def small_random_graphs():
    return [random_graph(40 + 5 * i, 0.15, seed=i, weighted=bool(i % 2)) for i in range(6)]
