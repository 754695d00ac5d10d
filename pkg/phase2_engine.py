"""
NashOverlap - Phase 2
Refines the intermediate partition into a stable overlapping cover by
letting each vertex join every adjacent community whose closeness is at
least alpha times its best one, whenever that raises its utility.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Set, Tuple

import numpy as np

from errors import ConfigError
from graph_core import Cover, Graph
from phase1_engine import PHASE2_STREAM, EdgeCloseness, IntermediatePartition, mix_seed

# relative slack on the strict utility comparison; absorbs summation-order noise
GAIN_TOLERANCE = 1e-12


@dataclass
class Phase2Config:
    """Parameters of the community-closeness game"""
    alpha: float = 0.5
    master_seed: int = 0
    max_rounds: int = 1000

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass
class Phase2Result:
    cover: Cover
    passes: int
    accepted_moves: int
    converged: bool


def community_closeness(vertex: int, community: Iterable[int], closeness: EdgeCloseness,
                        graph: Graph) -> float:
    """p(i,C): sum of p(i,j) over neighbors j of i inside C"""
    members = community if isinstance(community, (set, frozenset)) else set(community)
    p = closeness.p
    start, end = graph.indptr[vertex], graph.indptr[vertex + 1]
    total = 0.0
    for j, e in zip(graph.indices[start:end].tolist(), graph.edge_ids[start:end].tolist()):
        if j in members:
            total += p[e]
    return float(total)


def adjacent_closeness(vertex: int, cover: Cover, p_slot: np.ndarray, graph: Graph) -> Dict[int, float]:
    """p(vertex, C) for every community C holding a neighbor, in O(d(vertex))"""
    acc: Dict[int, float] = {}
    start, end = int(graph.indptr[vertex]), int(graph.indptr[vertex + 1])
    for j, p in zip(graph.indices[start:end].tolist(), p_slot[start:end].tolist()):
        for cid in cover.membership_of(j):
            acc[cid] = acc.get(cid, 0.0) + p
    return acc


def candidate_communities(acc: Dict[int, float], alpha: float) -> Set[int]:
    """Adjacent communities whose closeness is at least alpha times the best"""
    if not acc:
        return set()
    best = max(acc.values())
    if best <= 0.0:
        return set()
    if alpha >= 1.0:
        # exact ties at the max would otherwise overlap; keep the smallest id
        return {min(cid for cid, value in acc.items() if value == best)}
    threshold = alpha * best
    return {cid for cid, value in acc.items() if value >= threshold}


def _utility(acc: Dict[int, float], cids: Iterable[int]) -> float:
    return sum(acc.get(cid, 0.0) for cid in sorted(cids))


def _step(vertex: int, cover: Cover, p_slot: np.ndarray, graph: Graph,
          alpha: float) -> Tuple[Set[int], bool]:
    current = set(cover.membership_of(vertex))
    acc = adjacent_closeness(vertex, cover, p_slot, graph)
    candidate = candidate_communities(acc, alpha)
    if not candidate:
        return current, False
    new_utility = _utility(acc, candidate)
    old_utility = _utility(acc, current)
    if new_utility <= old_utility + GAIN_TOLERANCE * max(1.0, abs(old_utility)):
        return current, False
    for cid in current - candidate:
        cover.leave(vertex, cid)
    for cid in candidate - current:
        cover.join(vertex, cid)
    return candidate, True


def phase2_step(vertex: int, cover: Cover, closeness: EdgeCloseness, graph: Graph,
                alpha: float) -> Tuple[Set[int], bool]:
    """
    One turn of the community-closeness game for a vertex.

    Returns the vertex's membership after the turn and whether it changed.
    Communities emptied by the move are deleted from the cover.
    """
    p_slot = closeness.p[graph.edge_ids]
    return _step(vertex, cover, p_slot, graph, alpha)


def cover_from_partition(partition: IntermediatePartition) -> Cover:
    return Cover(component.tolist() for component in partition.components)


def run_phase2(graph: Graph, closeness: EdgeCloseness, partition: IntermediatePartition,
               config: Phase2Config) -> Phase2Result:
    """Play the community-closeness game from the intermediate partition to a local optimum"""
    cover = cover_from_partition(partition)
    p_slot = closeness.p[graph.edge_ids]
    rng = np.random.default_rng(mix_seed(config.master_seed, PHASE2_STREAM))
    order = rng.permutation(graph.n).tolist()

    passes = 0
    moves = 0
    converged = False
    while passes < config.max_rounds:
        changes = 0
        for v in order:
            _, accepted = _step(v, cover, p_slot, graph, config.alpha)
            if accepted:
                changes += 1
        passes += 1
        moves += changes
        logging.debug(f"Phase 2 pass {passes}: {changes} changes")
        if changes == 0:
            converged = True
            break

    if not converged:
        logging.warning(f"Phase 2 hit max_rounds={config.max_rounds} before equilibrium")
    result = cover.canonical(lambda v: int(graph.labels[v]))
    logging.info(f"Phase 2: alpha={config.alpha}, {passes} passes, {moves} moves, "
                 f"{len(result)} communities, {result.total_memberships() - graph.n} extra memberships")
    return Phase2Result(cover=result, passes=passes, accepted_moves=moves, converged=converged)


def potential_phi2(cover: Cover, closeness: EdgeCloseness, graph: Graph) -> float:
    """Half the sum over vertices i and C in C_i of p(i,C)"""
    p = closeness.p
    total = 0.0
    for e, (u, v) in enumerate(zip(graph.edge_u.tolist(), graph.edge_v.tolist())):
        shared = len(cover.membership_of(u) & cover.membership_of(v))
        if shared:
            total += shared * p[e]
    return float(total)
