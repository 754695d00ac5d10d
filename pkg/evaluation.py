"""
NashOverlap - Evaluation
Overlapping NMI between covers, weighted modularity of disjoint partitions,
and edge-closeness analytics (Pearson correlation with tie-strength,
histogram, scatter rows).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np

from errors import ConfigError, CoverError
from graph_core import Cover, Graph, TieStrengthTable
from phase1_engine import EdgeCloseness


@dataclass
class NmiReport:
    value: float
    h_x_given_y: float   # normalized H(X|Y)
    h_y_given_x: float   # normalized H(Y|X)


@dataclass
class ClosenessStats:
    pearson_r: Optional[float]
    bin_edges: np.ndarray
    histogram: np.ndarray
    scatter: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def pearson_undefined(self) -> bool:
        return self.pearson_r is None

    def fraction_between(self, lo: float, hi: float) -> float:
        """Share of edges with lo < p < hi"""
        if not self.scatter:
            return 0.0
        p = np.fromiter((row[1] for row in self.scatter), dtype=np.float64)
        return float(((p > lo) & (p < hi)).mean())


# ═══════════════════════════════════════════════════════════════════════════════
# OVERLAPPING NMI
# ═══════════════════════════════════════════════════════════════════════════════

def _h(p: np.ndarray) -> np.ndarray:
    """-p log2 p with 0 log 0 = 0"""
    out = np.zeros_like(p, dtype=np.float64)
    mask = p > 0
    out[mask] = -p[mask] * np.log2(p[mask])
    return out


def _membership_matrix(cover: Cover, index: dict) -> np.ndarray:
    matrix = np.zeros((len(cover), len(index)), dtype=np.int64)
    for row, members in enumerate(cover.communities):
        matrix[row, [index[v] for v in members]] = 1
    return matrix


def _normalized_conditional(x: np.ndarray, y: np.ndarray, n: int) -> float:
    """Mean over communities X_k of H(X_k|Y)/H(X_k)"""
    both = x @ y.T
    size_x = x.sum(axis=1)[:, None]
    size_y = y.sum(axis=1)[None, :]
    p11 = both / n
    p10 = (size_x - both) / n
    p01 = (size_y - both) / n
    p00 = 1.0 - p11 - p10 - p01
    p00 = np.clip(p00, 0.0, 1.0)

    px = size_x[:, 0] / n
    py = size_y[0, :] / n
    h_x = _h(px) + _h(1.0 - px)
    h_y = _h(py) + _h(1.0 - py)

    h11, h10, h01, h00 = _h(p11), _h(p10), _h(p01), _h(p00)
    h_joint = h11 + h10 + h01 + h00
    conditional = h_joint - h_y[None, :]
    admitted = (h11 + h00) >= (h01 + h10)
    conditional = np.where(admitted, conditional, h_x[:, None])
    best = conditional.min(axis=1) if conditional.shape[1] else h_x

    ratios = np.zeros_like(h_x)
    nonzero = h_x > 0
    ratios[nonzero] = np.clip(best[nonzero] / h_x[nonzero], 0.0, 1.0)
    return float(ratios.mean())


def nmi_overlapping(cover_x: Cover, cover_y: Cover, universe: Iterable[int]) -> NmiReport:
    """
    Overlapping-cover NMI: each community is a binary variable over the
    universe, matched to its least-uncertain counterpart in the other cover.
    """
    universe = sorted(set(universe))
    if not universe:
        raise CoverError("empty universe")
    if len(cover_x) == 0 or len(cover_y) == 0:
        raise CoverError("both covers must be nonempty")
    index = {v: i for i, v in enumerate(universe)}
    for name, cover in (("first", cover_x), ("second", cover_y)):
        outside = cover.vertices() - index.keys()
        if outside:
            raise CoverError(f"{name} cover references {len(outside)} vertices outside the universe")

    n = len(universe)
    x = _membership_matrix(cover_x, index)
    y = _membership_matrix(cover_y, index)
    h_xy = _normalized_conditional(x, y, n)
    h_yx = _normalized_conditional(y, x, n)
    value = 1.0 - 0.5 * (h_xy + h_yx)
    return NmiReport(value=float(min(1.0, max(0.0, value))), h_x_given_y=h_xy, h_y_given_x=h_yx)


# ═══════════════════════════════════════════════════════════════════════════════
# MODULARITY
# ═══════════════════════════════════════════════════════════════════════════════

def modularity(graph: Graph, partition: Cover) -> float:
    """Weighted Newman modularity of a disjoint cover over internal ids"""
    if not partition.is_disjoint():
        raise CoverError("modularity needs a disjoint partition; the cover overlaps")
    community = np.full(graph.n, -1, dtype=np.int64)
    for row, members in enumerate(partition.communities):
        community[list(members)] = row
    if np.any(community < 0):
        raise CoverError(f"{int((community < 0).sum())} vertices are in no community")

    w_total = float(graph.edge_w.sum())
    if w_total == 0:
        return 0.0
    m_comm = len(partition)
    intra = community[graph.edge_u] == community[graph.edge_v]
    w_in = np.bincount(community[graph.edge_u[intra]], graph.edge_w[intra], m_comm)
    w_deg = np.bincount(community, graph.weighted_degree, m_comm)
    return float(np.sum(w_in / w_total - (w_deg / (2.0 * w_total)) ** 2))


# ═══════════════════════════════════════════════════════════════════════════════
# CLOSENESS ANALYTICS
# ═══════════════════════════════════════════════════════════════════════════════

def histogram_edges(bin_width: float) -> np.ndarray:
    """Bin edges 0, w, 2w, ..., 1; w must divide 1"""
    if not 0.0 < bin_width <= 1.0:
        raise ConfigError(f"bin_width must lie in (0, 1], got {bin_width}")
    bins = int(round(1.0 / bin_width))
    if not math.isclose(bins * bin_width, 1.0, rel_tol=1e-9):
        raise ConfigError(f"bin_width must divide 1 evenly, got {bin_width}")
    return np.linspace(0.0, 1.0, bins + 1)



def pearson(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Pearson r, or None when either side has zero variance"""
    if x.size < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))


def closeness_stats(graph: Graph, ties: TieStrengthTable, closeness: Union[EdgeCloseness, np.ndarray],
                    bin_width: float = 0.05) -> ClosenessStats:
    """
    Correlation of p with tie-strength, and the distribution of p.
    closeness may be an EdgeCloseness or per-edge p values read from a dump.
    """
    p = closeness.p if isinstance(closeness, EdgeCloseness) else closeness
    p = np.asarray(p, dtype=np.float64)
    if p.size != graph.m:
        raise ValueError(f"closeness covers {p.size} edges, graph has {graph.m}")
    t = np.asarray(ties.t_edge, dtype=np.float64)
    edges = histogram_edges(bin_width)
    counts, _ = np.histogram(p, bins=edges)
    r = pearson(t, p)
    if r is None:
        logging.warning("Pearson correlation undefined: zero variance")
    return ClosenessStats(pearson_r=r, bin_edges=edges, histogram=counts,
                          scatter=list(zip(t.tolist(), p.tolist())))


def write_scatter_csv(stats: ClosenessStats, stream: TextIO):
    stream.write("t,p\n")
    for t, p in stats.scatter:
        stream.write(f"{t!r},{p!r}\n")


def write_histogram_csv(stats: ClosenessStats, stream: TextIO):
    stream.write("bin_low,bin_high,count\n")
    for low, high, count in zip(stats.bin_edges[:-1], stats.bin_edges[1:], stats.histogram):
        stream.write(f"{low:.4f},{high:.4f},{int(count)}\n")


def format_pearson(stats: ClosenessStats) -> str:
    if stats.pearson_undefined:
        return "pearson_r=undefined"
    return f"pearson_r={stats.pearson_r:.6f}"
