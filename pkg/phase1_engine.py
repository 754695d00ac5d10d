"""
NashOverlap - Phase 1
Runs k independent r-strategy graph coordination games to equilibrium,
aggregates per-edge agreement into edge-closeness, and extracts the
intermediate partition.
"""

import logging
import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

from disjoint_set import DisjointSet
from errors import ConfigError, ParseError
from game_kernels import (agreement_kernel, best_response_kernel,
                          improving_vertices_kernel, play_game_kernel)
from graph_core import Graph, LineSource, TieStrengthTable, numbered_lines

# seed stream reserved for phase 2; games use streams 0..k-1
PHASE2_STREAM = 2 ** 32


@dataclass
class Phase1Config:
    """Parameters of the k coordination games"""
    r: int = 40
    k: int = 100
    beta: float = 0.95
    epsilon: float = 0.0
    master_seed: int = 0
    max_rounds: int = 1000

    def __post_init__(self):
        if self.r < 2:
            raise ConfigError(f"r must be >= 2, got {self.r}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")
        if self.epsilon < 0.0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")


@dataclass
class StrategyProfile:
    """
    One game's strategy assignment with cached agreement weights.

    agreement_weight[i] = sum of t(i,j) over neighbors j with s_j == s_i,
    so u_i = agreement_weight[i] / t_i. phi1 is maintained alongside.
    """
    strategy: np.ndarray
    agreement_weight: np.ndarray
    r: int
    phi1: float
    passes: int = 0
    accepted_moves: int = 0
    converged: bool = True

    @classmethod
    def from_strategies(cls, graph: Graph, ties: TieStrengthTable, strategy: np.ndarray,
                        r: int) -> 'StrategyProfile':
        strategy = np.ascontiguousarray(strategy, dtype=np.int64)
        agreement = agreement_kernel(graph.indptr, graph.indices, ties.t_slot, strategy)
        profile = cls(strategy=strategy, agreement_weight=agreement, r=r, phi1=0.0)
        profile.phi1 = potential_phi1(profile, ties)
        return profile

    def utility(self, vertex: int, ties: TieStrengthTable) -> float:
        t_i = ties.t_vertex[vertex]
        return float(self.agreement_weight[vertex] / t_i) if t_i > 0 else 0.0

    def caches_consistent(self, graph: Graph, ties: TieStrengthTable, rel_tol: float = 1e-9) -> bool:
        fresh = agreement_kernel(graph.indptr, graph.indices, ties.t_slot, self.strategy)
        return bool(np.allclose(self.agreement_weight, fresh, rtol=rel_tol, atol=rel_tol))

    def distinct_strategies(self) -> int:
        return int(np.unique(self.strategy).size)


@dataclass
class EdgeCloseness:
    """Per-edge agreement counts over k games, plus per-game convergence records"""
    agree_count: np.ndarray
    k: int
    game_passes: List[int] = field(default_factory=list)
    game_moves: List[int] = field(default_factory=list)
    game_converged: List[bool] = field(default_factory=list)
    game_distinct: List[int] = field(default_factory=list)

    @property
    def p(self) -> np.ndarray:
        return self.agree_count / self.k

    @property
    def non_converged(self) -> int:
        return sum(1 for c in self.game_converged if not c)


@dataclass
class IntermediatePartition:
    """Connected components over edges with p > beta"""
    component_id: np.ndarray
    components: List[np.ndarray]

    def __len__(self) -> int:
        return len(self.components)


# ═══════════════════════════════════════════════════════════════════════════════
# SEEDS
# ═══════════════════════════════════════════════════════════════════════════════

def mix_seed(master_seed: int, stream: int) -> int:
    """Independent 64-bit seed for a stream, independent of scheduling"""
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _draw_strategies(rng: np.random.Generator, n: int, r: int) -> np.ndarray:
    return rng.integers(0, r, size=n, dtype=np.int64)


# ═══════════════════════════════════════════════════════════════════════════════
# GAME
# ═══════════════════════════════════════════════════════════════════════════════

def init_profile(graph: Graph, ties: TieStrengthTable, r: int, game_seed: int) -> StrategyProfile:
    """Uniform random strategy per vertex from a stream seeded by game_seed"""
    if r < 2:
        raise ConfigError(f"r must be >= 2, got {r}")
    rng = np.random.default_rng(game_seed)
    return StrategyProfile.from_strategies(graph, ties, _draw_strategies(rng, graph.n, r), r)


def best_response(profile: StrategyProfile, graph: Graph, ties: TieStrengthTable, vertex: int,
                  epsilon: float = 0.0) -> Tuple[int, bool]:
    """
    Best-response turn for one vertex.

    The candidate maximizes agreement weight; the current strategy wins ties,
    otherwise the smallest index does. With epsilon > 0 the move is accepted
    only if the gain exceeds (2*epsilon/n) * phi1.
    """
    scratch = np.zeros(profile.r, dtype=np.float64)
    candidate, _, accepted, phi1 = best_response_kernel(
        vertex, graph.indptr, graph.indices, ties.t_slot, profile.strategy,
        profile.agreement_weight, scratch, float(epsilon), profile.phi1)
    profile.phi1 = phi1
    if accepted:
        profile.accepted_moves += 1
    return int(candidate), bool(accepted)


def run_game(graph: Graph, ties: TieStrengthTable, config: Phase1Config, game_index: int) -> StrategyProfile:
    """One coordination game to equilibrium (or to max_rounds)"""
    rng = np.random.default_rng(mix_seed(config.master_seed, game_index))
    strategy = _draw_strategies(rng, graph.n, config.r)
    order = rng.permutation(graph.n).astype(np.int64)
    profile = StrategyProfile.from_strategies(graph, ties, strategy, config.r)

    passes, moves, converged, phi1 = play_game_kernel(
        graph.indptr, graph.indices, ties.t_slot, profile.strategy, profile.agreement_weight,
        order, config.r, float(config.epsilon), config.max_rounds, profile.phi1)
    profile.phi1 = phi1
    profile.passes = int(passes)
    profile.accepted_moves = int(moves)
    profile.converged = bool(converged)
    if not converged:
        logging.warning(f"Game {game_index} hit max_rounds={config.max_rounds} before equilibrium")
    logging.debug(f"Game {game_index}: {passes} passes, {moves} moves, "
                  f"{profile.distinct_strategies()} strategies")
    return profile


def _play_and_score(graph: Graph, ties: TieStrengthTable, config: Phase1Config,
                    game_index: int) -> Tuple[np.ndarray, int, int, bool, int]:
    profile = run_game(graph, ties, config, game_index)
    agree = profile.strategy[graph.edge_u] == profile.strategy[graph.edge_v]
    return (agree, profile.passes, profile.accepted_moves, profile.converged,
            profile.distinct_strategies())


def run_phase1(graph: Graph, ties: TieStrengthTable, config: Phase1Config,
               executor: Optional[Executor] = None) -> EdgeCloseness:
    """
    Run k independent games and count per-edge agreement at equilibrium.

    Game g uses seed mix_seed(master_seed, g); results are merged in game
    order, so the output does not depend on the executor.
    """
    closeness = EdgeCloseness(agree_count=np.zeros(graph.m, dtype=np.int64), k=config.k)
    own_executor = executor is None
    if own_executor:
        executor = ThreadPoolExecutor(max_workers=1)
    try:
        results = executor.map(lambda g: _play_and_score(graph, ties, config, g), range(config.k))
        for agree, passes, moves, converged, distinct in results:
            closeness.agree_count += agree
            closeness.game_passes.append(passes)
            closeness.game_moves.append(moves)
            closeness.game_converged.append(converged)
            closeness.game_distinct.append(distinct)
    finally:
        if own_executor:
            executor.shutdown()

    if closeness.non_converged:
        logging.warning(f"Phase 1: {closeness.non_converged}/{config.k} games did not converge")
    logging.info(f"Phase 1: {config.k} games, r={config.r}, "
                 f"max passes={max(closeness.game_passes, default=0)}")
    return closeness


def intermediate_partition(graph: Graph, closeness: EdgeCloseness, beta: float) -> IntermediatePartition:
    """Connected components of the subgraph of edges with p > beta"""
    p = closeness.p
    if p.size != graph.m:
        raise ValueError(f"closeness covers {p.size} edges, graph has {graph.m}")
    dsu = DisjointSet(graph.n)
    for e in np.flatnonzero(p > beta).tolist():
        dsu.merge(int(graph.edge_u[e]), int(graph.edge_v[e]))
    component_id = dsu.get_components()
    order = np.argsort(component_id, kind="stable")
    bounds = np.flatnonzero(np.diff(component_id[order])) + 1
    components = np.split(order, bounds) if graph.n else []
    logging.info(f"Intermediate partition: {len(components)} components at beta={beta}")
    return IntermediatePartition(component_id=component_id, components=components)


# ═══════════════════════════════════════════════════════════════════════════════
# POTENTIAL AND AUDITS
# ═══════════════════════════════════════════════════════════════════════════════

def potential_phi1(profile: StrategyProfile, ties: TieStrengthTable) -> float:
    """Sum of t(i,j) over edges whose endpoints share a strategy"""
    s = profile.strategy
    return float(ties.t_edge[s[ties.edge_u] == s[ties.edge_v]].sum())


def nash_deviations(profile: StrategyProfile, graph: Graph, ties: TieStrengthTable,
                    rel_tol: float = 1e-9) -> np.ndarray:
    """Vertices that have a strictly improving unilateral deviation"""
    mask = improving_vertices_kernel(graph.indptr, graph.indices, ties.t_slot,
                                     profile.strategy, profile.r, rel_tol)
    return np.flatnonzero(mask)


def phi1_lower_bound(ties: TieStrengthTable, r: int) -> float:
    """Every equilibrium keeps at least a 1/r share of the total tie-strength"""
    return ties.W_edge / r


def move_bound(ties: TieStrengthTable, n: int, epsilon: float) -> float:
    """Cap on accepted moves under good-enough improvements"""
    return 10.0 / epsilon * n * math.log2(1.0 + ties.W_edge)


def unique_coloring_probability(r: int, c: int) -> float:
    """Probability that c monochromatic communities get pairwise distinct colors"""
    if c > r:
        return 0.0
    return math.comb(r, c) * math.factorial(c) / r ** c


def coloring_is_unique(profile: StrategyProfile, groups: Sequence[Sequence[int]]) -> bool:
    """Every group monochromatic, and no two groups share a color"""
    colors = []
    for group in groups:
        values = np.unique(profile.strategy[np.asarray(group, dtype=np.int64)])
        if values.size != 1:
            return False
        colors.append(int(values[0]))
    return len(set(colors)) == len(colors)


# ═══════════════════════════════════════════════════════════════════════════════
# CLOSENESS CSV
# ═══════════════════════════════════════════════════════════════════════════════

def write_closeness_csv(graph: Graph, ties: TieStrengthTable, closeness: EdgeCloseness, stream: TextIO):
    """One "u,v,w,t,p" row per edge, original labels"""
    labels = graph.labels
    stream.write("u,v,w,t,p\n")
    for u, v, w, t, p in zip(graph.edge_u.tolist(), graph.edge_v.tolist(), graph.edge_w.tolist(),
                             ties.t_edge.tolist(), closeness.p.tolist()):
        stream.write(f"{labels[u]},{labels[v]},{w!r},{t!r},{p!r}\n")


def read_closeness_csv(graph: Graph, stream: LineSource) -> np.ndarray:
    """Per-edge p values in the graph's edge order, from a "u,v,w,t,p" dump"""
    p = np.full(graph.m, np.nan)
    lookup = graph.label_index
    for line_number, raw in numbered_lines(stream):
        line = raw.strip()
        if not line or line.startswith('#') or line.startswith('u,'):
            continue
        fields = line.split(',')
        if len(fields) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields)}", line_number)
        try:
            u, v = lookup[int(fields[0])], lookup[int(fields[1])]
            value = float(fields[4])
        except (KeyError, ValueError):
            raise ParseError(f"bad closeness row {line!r}", line_number) from None
        e = graph.find_edge(u, v)
        if e < 0:
            raise ParseError(f"edge {fields[0]},{fields[1]} not in graph", line_number)
        if not 0.0 <= value <= 1.0:
            raise ParseError(f"closeness {value} outside [0, 1]", line_number)
        p[e] = value
    missing = int(np.isnan(p).sum())
    if missing:
        raise ParseError(f"closeness missing for {missing} edges")
    return p
