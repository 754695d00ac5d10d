"""
NashOverlap - Planted benchmark generator
Desk-scale graphs with known overlapping ground truth: uniform community
sizes, near-regular degrees, and an auditable mixing factor.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

import networkx as nx
import numpy as np

from errors import ConfigError, InfeasibleParamsError
from graph_core import Cover, Graph

MAX_PAIRING_RETRIES = 200


@dataclass
class PlantedParams:
    """
    Planted-benchmark parameters.

    comm_size is a capacity bound, not the realized size: it only has to
    satisfy n_comm * comm_size >= n. The n - n_over + n_over * om
    memberships are spread evenly, so each community gets
    floor or ceil of that total / n_comm members. With the defaults that
    is 1100 / 40, i.e. 27 or 28 members.
    """
    n: int = 1000
    n_comm: int = 40
    comm_size: int = 25
    mu: float = 0.1
    on_fraction: float = 0.1
    om: int = 2
    avg_degree: int = 20
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "n_comm", "comm_size", "avg_degree"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_comm * self.comm_size < self.n:
            raise ConfigError(f"n_comm*comm_size={self.n_comm * self.comm_size} < n={self.n}")
        if not 0.0 <= self.mu <= 0.5:
            raise ConfigError(f"mu must lie in [0, 0.5], got {self.mu}")
        if not 0.0 <= self.on_fraction <= 0.5:
            raise ConfigError(f"on_fraction must lie in [0, 0.5], got {self.on_fraction}")
        if self.om < 2:
            raise ConfigError(f"om must be >= 2, got {self.om}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")

    @property
    def n_overlapping(self) -> int:
        return int(round(self.on_fraction * self.n))

    @property
    def intra_degree(self) -> int:
        return math.ceil((1.0 - self.mu) * self.avg_degree - 1e-9)

    @property
    def inter_degree(self) -> int:
        return math.floor(self.mu * self.avg_degree + 1e-9)


@dataclass
class MixingAudit:
    """External-degree fraction of every non-overlapping vertex"""
    fractions: np.ndarray

    @property
    def max(self) -> float:
        return float(self.fractions.max()) if self.fractions.size else 0.0

    @property
    def mean(self) -> float:
        return float(self.fractions.mean()) if self.fractions.size else 0.0

    @property
    def min(self) -> float:
        return float(self.fractions.min()) if self.fractions.size else 0.0

    def summary(self) -> str:
        return (f"realized mu over {self.fractions.size} non-overlapping vertices: "
                f"min={self.min:.4f} mean={self.mean:.4f} max={self.max:.4f}")


def _assign_memberships(params: PlantedParams, rng: np.random.Generator) -> List[List[int]]:
    """Community lists per vertex; overlapping vertices get om distinct communities"""
    n, n_comm, om = params.n, params.n_comm, params.om
    n_over = params.n_overlapping
    if n_over and om > n_comm:
        raise InfeasibleParamsError(f"om={om} exceeds the {n_comm} communities")
    total = n - n_over + n_over * om
    capacity = np.full(n_comm, total // n_comm, dtype=np.int64)
    capacity[: total % n_comm] += 1

    vertices = rng.permutation(n)
    overlapping = set(vertices[:n_over].tolist())
    memberships: List[List[int]] = [[] for _ in range(n)]
    for v in vertices.tolist():
        want = om if v in overlapping else 1
        tiebreak = rng.random(n_comm)
        ranked = np.lexsort((tiebreak, -capacity))
        chosen = ranked[:want]
        if np.any(capacity[chosen] <= 0):
            raise InfeasibleParamsError("community capacity exhausted")
        capacity[chosen] -= 1
        memberships[v] = sorted(int(c) for c in chosen)
    return memberships


def _intra_quotas(params: PlantedParams, memberships: List[List[int]],
                  rng: np.random.Generator) -> Dict[int, Dict[int, int]]:
    """Per community, the intra degree each member owes it"""
    quotas: Dict[int, Dict[int, int]] = {}
    intra = params.intra_degree
    for v, comms in enumerate(memberships):
        share, extra = divmod(intra, len(comms))
        bonus = set(rng.permutation(comms)[:extra].tolist())
        for c in comms:
            quotas.setdefault(c, {})[v] = share + (1 if c in bonus else 0)
    return quotas


def _realize_community(members_quota: Dict[int, int], rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Simple graph on the members with the requested degrees"""
    members = sorted(members_quota)
    size = len(members)
    degrees = [members_quota[v] for v in members]
    if max(degrees, default=0) > size - 1:
        raise InfeasibleParamsError(
            f"community of {size} members cannot host intra degree {max(degrees)}")
    if sum(degrees) % 2:
        # parity fix: one member with spare room takes an extra edge endpoint
        spare = [i for i in rng.permutation(size).tolist() if degrees[i] < size - 1]
        if not spare:
            raise InfeasibleParamsError(f"odd degree sum in a saturated community of {size}")
        degrees[spare[0]] += 1
    if not nx.is_graphical(degrees):
        raise InfeasibleParamsError(f"intra degree sequence not realizable in a community of {size}")

    g = nx.havel_hakimi_graph(degrees)
    n_edges = g.number_of_edges()
    if n_edges >= 2:
        try:
            nx.double_edge_swap(g, nswap=n_edges, max_tries=20 * n_edges,
                                seed=int(rng.integers(2 ** 31)))
        except nx.NetworkXException as e:
            logging.debug(f"Edge swaps stopped early in a community of {size}: {e}")
    return [(members[a], members[b]) for a, b in g.edges()]


def _pair_inter_stubs(stubs: List[int], memberships: List[Set[int]], existing: Set[Tuple[int, int]],
                      rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Random matching of stubs into edges between vertices sharing no community"""
    accepted: List[Tuple[int, int]] = []
    accepted_set: Set[Tuple[int, int]] = set()
    pool = list(stubs)
    for _ in range(MAX_PAIRING_RETRIES):
        if not pool:
            return accepted
        order = rng.permutation(len(pool))
        shuffled = [pool[i] for i in order.tolist()]
        leftover: List[int] = []
        for a, b in zip(shuffled[0::2], shuffled[1::2]):
            edge = (min(a, b), max(a, b))
            if a == b or memberships[a] & memberships[b] or edge in existing or edge in accepted_set:
                leftover.extend((a, b))
                continue
            accepted.append(edge)
            accepted_set.add(edge)
        if len(shuffled) % 2:
            leftover.append(shuffled[-1])
        if leftover and accepted:
            # release a few accepted edges so stuck stubs get new partners
            release = min(len(accepted), max(1, len(leftover) // 2))
            for idx in sorted(rng.choice(len(accepted), size=release, replace=False).tolist(), reverse=True):
                edge = accepted.pop(idx)
                accepted_set.discard(edge)
                leftover.extend(edge)
        pool = leftover
    if not pool:
        return accepted
    raise InfeasibleParamsError(f"could not place {len(pool)} inter-community edge endpoints "
                                f"after {MAX_PAIRING_RETRIES} retries")


def generate_planted(params: PlantedParams) -> Tuple[Graph, Cover]:
    """
    Planted overlapping benchmark.

    Each vertex gets ceil((1-mu)*d) intra endpoints, split evenly across its
    communities, and floor(mu*d) endpoints towards vertices it shares no
    community with. Vertices are labelled 1..n.
    """
    rng = np.random.default_rng(params.seed)
    memberships = _assign_memberships(params, rng)
    quotas = _intra_quotas(params, memberships, rng)

    for c, members_quota in quotas.items():
        if len(members_quota) - 1 < max(members_quota.values()):
            raise InfeasibleParamsError(
                f"community {c} has {len(members_quota)} members, too few for intra degree "
                f"{max(members_quota.values())}")

    edges: Set[Tuple[int, int]] = set()
    for c in sorted(quotas):
        for u, v in _realize_community(quotas[c], rng):
            edges.add((min(u, v), max(u, v)))

    member_sets = [set(m) for m in memberships]
    inter = params.inter_degree
    stubs = [v for v in range(params.n) for _ in range(inter)]
    if len(stubs) % 2:
        stubs.pop(int(rng.integers(len(stubs))))
    edges.update(_pair_inter_stubs(stubs, member_sets, edges, rng))

    graph = Graph.from_edges(params.n, sorted(edges), labels=range(1, params.n + 1))
    truth = Cover([v for v in range(params.n) if c in member_sets[v]] for c in sorted(quotas))
    logging.info(f"Planted graph: n={graph.n}, m={graph.m}, communities={len(truth)}, "
                 f"overlapping={params.n_overlapping}")
    return graph, truth


def audit_mixing(graph: Graph, truth: Cover) -> MixingAudit:
    """Fraction of each non-overlapping vertex's degree leaving its community"""
    fractions = []
    for v in range(graph.n):
        comms = truth.membership_of(v)
        if len(comms) != 1:
            continue
        (cid,) = comms
        members = truth.community(cid)
        neighbors, _ = graph.neighbors(v)
        degree = neighbors.size
        if degree == 0:
            continue
        outside = sum(1 for j in neighbors.tolist() if j not in members)
        fractions.append(outside / degree)
    return MixingAudit(fractions=np.asarray(fractions, dtype=np.float64))


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    graph, truth = generate_planted(PlantedParams())
    print(f"n={graph.n} m={graph.m} communities={len(truth)}")
    print(audit_mixing(graph, truth).summary())
