"""
NashOverlap - Graph core
Weighted undirected graph in CSR form, edge-list and cover ingestion, and
tie-strength computation shared by both phases.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import (IO, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, TextIO,
                    Tuple, Union)

import networkx as nx
import numpy as np

from errors import CoverError, ParseError
from game_kernels import tie_strength_kernel


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Weighted undirected graph with contiguous internal ids 0..n-1.

    Edges are stored once with edge_u < edge_v, sorted; the CSR adjacency
    (indptr, indices, weights) holds both directions with sorted neighbor
    lists, and edge_ids maps every adjacency slot back to its edge.
    """
    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    edge_ids: np.ndarray
    labels: np.ndarray
    self_loops_dropped: int = 0
    weighted: bool = False

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple], labels: Optional[Iterable[int]] = None,
                   weighted: bool = False) -> 'Graph':
        """
        Build a graph from (u, v) or (u, v, w) tuples over internal ids.
        Duplicates are merged by summing weights; self-loops are dropped.
        """
        us, vs, ws = [], [], []
        for edge in edges:
            us.append(edge[0])
            vs.append(edge[1])
            ws.append(float(edge[2]) if len(edge) > 2 else 1.0)
        return cls._build(n, np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64),
                          np.asarray(ws, dtype=np.float64), labels, weighted)

    @classmethod
    def _build(cls, n: int, us: np.ndarray, vs: np.ndarray, ws: np.ndarray,
               labels: Optional[Iterable[int]], weighted: bool) -> 'Graph':
        if us.size and (us.min() < 0 or vs.min() < 0 or us.max() >= n or vs.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        if np.any(ws <= 0):
            raise ValueError("edge weights must be positive")

        loops = us == vs
        dropped = int(loops.sum())
        us, vs, ws = us[~loops], vs[~loops], ws[~loops]

        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys, inverse = np.unique(lo * n + hi, return_inverse=True)
        edge_w = np.bincount(inverse, weights=ws, minlength=keys.size).astype(np.float64)
        edge_u = (keys // n).astype(np.int64)
        edge_v = (keys % n).astype(np.int64)
        m = edge_u.size

        rows = np.concatenate([edge_u, edge_v])
        cols = np.concatenate([edge_v, edge_u])
        order = np.lexsort((cols, rows))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        eids = np.concatenate([np.arange(m, dtype=np.int64), np.arange(m, dtype=np.int64)])

        if labels is None:
            label_array = np.arange(n, dtype=np.int64)
        else:
            label_array = np.asarray(list(labels), dtype=np.int64)
            if label_array.size != n:
                raise ValueError(f"expected {n} labels, got {label_array.size}")

        return cls(
            n=n,
            edge_u=_readonly(edge_u),
            edge_v=_readonly(edge_v),
            edge_w=_readonly(edge_w),
            indptr=_readonly(indptr),
            indices=_readonly(cols[order].astype(np.int64)),
            weights=_readonly(np.concatenate([edge_w, edge_w])[order]),
            edge_ids=_readonly(eids[order]),
            labels=_readonly(label_array),
            self_loops_dropped=dropped,
            weighted=weighted,
        )

    @property
    def m(self) -> int:
        return int(self.edge_u.size)

    def degree(self, vertex: int) -> int:
        return int(self.indptr[vertex + 1] - self.indptr[vertex])

    def neighbors(self, vertex: int) -> Tuple[np.ndarray, np.ndarray]:
        """(neighbor ids, edge weights) of a vertex, sorted by neighbor id"""
        start, end = self.indptr[vertex], self.indptr[vertex + 1]
        return self.indices[start:end], self.weights[start:end]

    def find_edge(self, u: int, v: int) -> int:
        """Edge index of (u, v), or -1"""
        start, end = self.indptr[u], self.indptr[u + 1]
        pos = start + int(np.searchsorted(self.indices[start:end], v))
        if pos < end and self.indices[pos] == v:
            return int(self.edge_ids[pos])
        return -1

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        return (np.bincount(self.edge_u, self.edge_w, self.n)
                + np.bincount(self.edge_v, self.edge_w, self.n))

    @cached_property
    def label_index(self) -> Dict[int, int]:
        """Original label -> internal id"""
        return {int(label): i for i, label in enumerate(self.labels)}

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()))
        return g


@dataclass(frozen=True, eq=False)
class TieStrengthTable:
    """Per-edge t(i,j), per-vertex t_i, and their totals"""
    t_edge: np.ndarray
    t_vertex: np.ndarray
    W: float
    W_edge: float
    t_slot: np.ndarray   # t(i,j) per CSR adjacency slot
    edge_u: np.ndarray
    edge_v: np.ndarray


class CoverFormat(str, Enum):
    """Text layouts for cover files"""
    COMMUNITY_PER_LINE = "community-per-line"
    VERTEX_MEMBERSHIPS = "vertex-memberships"


class Cover:
    """
    Overlapping community structure: a family of nonempty vertex sets.

    Community ids are stable handles while the cover is edited; empty
    communities are deleted as soon as their last member leaves.
    canonical() renumbers ids 0..m-1 in a deterministic order.
    """

    def __init__(self, communities: Iterable[Iterable[int]] = ()):
        self._communities: Dict[int, Set[int]] = {}
        self._memberships: Dict[int, Set[int]] = {}
        self._next_id = 0
        for members in communities:
            self.add_community(members)

    def add_community(self, members: Iterable[int]) -> int:
        members = {int(v) for v in members}
        if not members:
            raise CoverError("empty community")
        cid = self._next_id
        self._next_id += 1
        self._communities[cid] = members
        for v in members:
            self._memberships.setdefault(v, set()).add(cid)
        return cid

    def join(self, vertex: int, cid: int):
        self._communities[cid].add(vertex)
        self._memberships.setdefault(vertex, set()).add(cid)

    def leave(self, vertex: int, cid: int):
        members = self._communities[cid]
        members.discard(vertex)
        self._memberships[vertex].discard(cid)
        if not members:
            del self._communities[cid]

    def community(self, cid: int) -> Set[int]:
        return self._communities[cid]

    def community_ids(self) -> List[int]:
        return sorted(self._communities)

    @property
    def communities(self) -> List[FrozenSet[int]]:
        return [frozenset(self._communities[cid]) for cid in self.community_ids()]

    @property
    def memberships(self) -> Dict[int, FrozenSet[int]]:
        return {v: frozenset(cids) for v, cids in self._memberships.items() if cids}

    def membership_of(self, vertex: int) -> Set[int]:
        return self._memberships.get(vertex, set())

    def vertices(self) -> Set[int]:
        return {v for v, cids in self._memberships.items() if cids}

    def __len__(self) -> int:
        return len(self._communities)

    def total_memberships(self) -> int:
        return sum(len(c) for c in self._communities.values())

    def is_disjoint(self) -> bool:
        return all(len(cids) <= 1 for cids in self._memberships.values())

    def covers(self, universe: Iterable[int]) -> bool:
        return all(self._memberships.get(v) for v in universe)

    def canonical(self, label_of: Optional[Callable[[int], int]] = None) -> 'Cover':
        """Copy with duplicate communities merged, ordered by smallest member label"""
        label_of = label_of or (lambda v: v)
        unique = {frozenset(c) for c in self._communities.values()}
        ordered = sorted(unique, key=lambda c: sorted(label_of(v) for v in c))
        return Cover(ordered)

    def relabel(self, mapping: Callable[[int], int]) -> 'Cover':
        return Cover([{mapping(v) for v in self._communities[cid]} for cid in self.community_ids()])

    def as_sorted_tuples(self) -> List[Tuple[int, ...]]:
        return sorted(tuple(sorted(c)) for c in {frozenset(c) for c in self._communities.values()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cover):
            return NotImplemented
        return self.as_sorted_tuples() == other.as_sorted_tuples()

    def __repr__(self) -> str:
        return f"Cover({len(self)} communities, {len(self.vertices())} vertices)"


# ═══════════════════════════════════════════════════════════════════════════════
# EDGE LISTS
# ═══════════════════════════════════════════════════════════════════════════════

LABEL_MIN = int(np.iinfo(np.int64).min)
LABEL_MAX = int(np.iinfo(np.int64).max)

# text or binary stream; binary lines are decoded one at a time
LineSource = Union[TextIO, IO[bytes]]


def numbered_lines(stream: LineSource) -> Iterator[Tuple[int, str]]:
    """Yield (line_number, line) from 1, raising ParseError on undecodable input"""
    lines = iter(stream)
    line_number = 0
    while True:
        try:
            raw = next(lines)
        except StopIteration:
            return
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc.reason}", line_number + 1) from None
        line_number += 1
        if isinstance(raw, bytes):
            try:
                raw = raw.decode('utf-8')
            except UnicodeDecodeError as exc:
                raise ParseError(f"input is not valid UTF-8: {exc.reason}", line_number) from None
        yield line_number, raw


def _parse_int(token: str, line_number: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"vertex label {token!r} is not an integer", line_number) from None
    if not LABEL_MIN <= value <= LABEL_MAX:
        raise ParseError(f"vertex label {token} does not fit in 64 bits", line_number)
    return value


def parse_edge_list(stream: LineSource, weighted: bool = False, one_indexed: bool = False) -> Graph:
    """
    Parse "u v" / "u v w" lines; '#' starts a comment line.

    one_indexed: labels are 1..n and map to ids label-1. Otherwise the sorted
    distinct labels are remapped to 0..n-1.
    """
    us: List[int] = []
    vs: List[int] = []
    ws: List[float] = []
    ignored_weights = 0
    for line_number, raw in numbered_lines(stream):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ParseError(f"expected 'u v' or 'u v w', got {line!r}", line_number)
        u = _parse_int(tokens[0], line_number)
        v = _parse_int(tokens[1], line_number)
        w = 1.0
        if len(tokens) == 3:
            if weighted:
                try:
                    w = float(tokens[2])
                except ValueError:
                    raise ParseError(f"weight {tokens[2]!r} is not a number", line_number) from None
                if not math.isfinite(w) or w <= 0:
                    raise ParseError(f"weight must be positive, got {tokens[2]}", line_number)
            else:
                ignored_weights += 1
        if one_indexed and (u < 1 or v < 1):
            raise ParseError(f"one-indexed labels must be >= 1, got {u} {v}", line_number)
        us.append(u)
        vs.append(v)
        ws.append(w)

    if not us:
        raise ParseError("empty graph: no edge lines")
    if ignored_weights:
        logging.info(f"Unweighted parse ignored the third column on {ignored_weights} lines")

    u_arr = np.asarray(us, dtype=np.int64)
    v_arr = np.asarray(vs, dtype=np.int64)
    if one_indexed:
        n = int(max(u_arr.max(initial=0), v_arr.max(initial=0)))
        labels = np.arange(1, n + 1, dtype=np.int64)
        u_ids, v_ids = u_arr - 1, v_arr - 1
    else:
        labels = np.unique(np.concatenate([u_arr, v_arr]))
        n = int(labels.size)
        u_ids = np.searchsorted(labels, u_arr)
        v_ids = np.searchsorted(labels, v_arr)

    graph = Graph._build(n, u_ids, v_ids, np.asarray(ws, dtype=np.float64), labels, weighted)
    if graph.self_loops_dropped:
        logging.warning(f"Dropped {graph.self_loops_dropped} self-loops")
    if graph.m == 0:
        raise ParseError("empty graph: no edges after dropping self-loops")
    logging.info(f"Parsed graph: n={graph.n}, m={graph.m}, weighted={weighted}")
    return graph


def write_edge_list(graph: Graph, stream: TextIO, weighted: Optional[bool] = None):
    """Write one "u v" (or "u v w") line per edge with original labels"""
    weighted = graph.weighted if weighted is None else weighted
    labels = graph.labels
    for u, v, w in zip(graph.edge_u.tolist(), graph.edge_v.tolist(), graph.edge_w.tolist()):
        if weighted:
            stream.write(f"{labels[u]} {labels[v]} {w!r}\n")
        else:
            stream.write(f"{labels[u]} {labels[v]}\n")


# ═══════════════════════════════════════════════════════════════════════════════
# TIE-STRENGTH
# ═══════════════════════════════════════════════════════════════════════════════

def compute_tie_strengths(graph: Graph) -> TieStrengthTable:
    """t(i,j) via sorted-adjacency intersection, t_i as the sum over i's edges"""
    t_edge = tie_strength_kernel(graph.indptr, graph.indices, graph.weights,
                                 graph.edge_u, graph.edge_v, graph.edge_w)
    t_vertex = (np.bincount(graph.edge_u, t_edge, graph.n)
                + np.bincount(graph.edge_v, t_edge, graph.n))
    table = TieStrengthTable(
        t_edge=_readonly(t_edge),
        t_vertex=_readonly(t_vertex),
        W=float(t_vertex.sum()),
        W_edge=float(t_edge.sum()),
        t_slot=_readonly(t_edge[graph.edge_ids]),
        edge_u=graph.edge_u,
        edge_v=graph.edge_v,
    )
    logging.debug(f"Tie-strengths: W_edge={table.W_edge}, W={table.W}")
    return table


# ═══════════════════════════════════════════════════════════════════════════════
# COVER FILES
# ═══════════════════════════════════════════════════════════════════════════════

def parse_cover_file(stream: LineSource, fmt: CoverFormat = CoverFormat.COMMUNITY_PER_LINE,
                     graph: Optional[Graph] = None) -> Cover:
    """
    Parse a cover in either text layout.

    Without a graph the cover is over original labels. With a graph every
    label is validated and the cover is returned over internal ids.
    """
    fmt = CoverFormat(fmt)
    lookup = graph.label_index if graph is not None else None

    def resolve(token: str, line_number: int) -> int:
        label = _parse_int(token, line_number)
        if lookup is None:
            return label
        if label not in lookup:
            raise ParseError(f"unknown vertex label {label}", line_number)
        return lookup[label]

    if fmt is CoverFormat.COMMUNITY_PER_LINE:
        communities = []
        for line_number, raw in numbered_lines(stream):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            communities.append([resolve(tok, line_number) for tok in line.split()])
        return Cover(communities)

    by_comm: Dict[int, List[int]] = {}
    for line_number, raw in numbered_lines(stream):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError(f"vertex {tokens[0]} has no community", line_number)
        vertex = resolve(tokens[0], line_number)
        for tok in tokens[1:]:
            by_comm.setdefault(_parse_int(tok, line_number), []).append(vertex)
    return Cover(by_comm[c] for c in sorted(by_comm))


def write_cover(cover: Cover, stream: TextIO, fmt: CoverFormat = CoverFormat.COMMUNITY_PER_LINE,
                labels: Optional[np.ndarray] = None):
    """Write a cover in canonical order, vertices as original labels"""
    fmt = CoverFormat(fmt)
    label_of = (lambda v: int(labels[v])) if labels is not None else (lambda v: v)
    canonical = cover.canonical(label_of)
    if fmt is CoverFormat.COMMUNITY_PER_LINE:
        for members in canonical.communities:
            stream.write(" ".join(str(x) for x in sorted(label_of(v) for v in members)) + "\n")
        return
    rows = sorted((label_of(v), sorted(cids)) for v, cids in canonical.memberships.items())
    for label, cids in rows:
        stream.write(f"{label} " + " ".join(str(c + 1) for c in cids) + "\n")
