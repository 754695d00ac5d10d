"""
NashOverlap - Compiled kernels
Inner loops over the CSR adjacency: tie-strength intersection and
best-response dynamics. No randomness lives here; callers pass in the
initial strategies and the vertex ordering.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def tie_strength_kernel(indptr, indices, weights, edge_u, edge_v, edge_w):
    """t(u,v) = w(u,v) + sum over common neighbors k of w(u,k) + w(v,k)"""
    m = edge_u.shape[0]
    t = np.empty(m, dtype=np.float64)
    for e in range(m):
        u = edge_u[e]
        v = edge_v[e]
        total = edge_w[e]
        a = indptr[u]
        a_end = indptr[u + 1]
        b = indptr[v]
        b_end = indptr[v + 1]
        while a < a_end and b < b_end:
            x = indices[a]
            y = indices[b]
            if x == y:
                total += weights[a] + weights[b]
                a += 1
                b += 1
            elif x < y:
                a += 1
            else:
                b += 1
        t[e] = total
    return t


@njit(cache=True, nogil=True)
def agreement_kernel(indptr, indices, t_slot, strategy):
    """Per-vertex sum of t(i,j) over neighbors j sharing i's strategy"""
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    for v in range(n):
        s = strategy[v]
        acc = 0.0
        for a in range(indptr[v], indptr[v + 1]):
            if strategy[indices[a]] == s:
                acc += t_slot[a]
        out[v] = acc
    return out


@njit(cache=True, nogil=True)
def _strategy_sums(v, indptr, indices, t_slot, strategy, scratch):
    start = indptr[v]
    end = indptr[v + 1]
    # only entries touched by v's neighborhood are reset
    for a in range(start, end):
        scratch[strategy[indices[a]]] = 0.0
    scratch[strategy[v]] = 0.0
    for a in range(start, end):
        scratch[strategy[indices[a]]] += t_slot[a]


@njit(cache=True, nogil=True)
def best_response_kernel(v, indptr, indices, t_slot, strategy, agreement,
                         scratch, epsilon, phi1):
    """
    One best-response turn for vertex v.

    Returns (candidate, gain, accepted, phi1). On acceptance the strategy,
    the agreement caches of v and its neighbors, and phi1 are updated.
    """
    n = strategy.shape[0]
    r = scratch.shape[0]
    _strategy_sums(v, indptr, indices, t_slot, strategy, scratch)
    start = indptr[v]
    end = indptr[v + 1]
    current = strategy[v]
    best = scratch[current]
    for a in range(start, end):
        value = scratch[strategy[indices[a]]]
        if value > best:
            best = value

    if scratch[current] >= best:
        candidate = current
    else:
        candidate = r
        for a in range(start, end):
            c = strategy[indices[a]]
            if scratch[c] == best and c < candidate:
                candidate = c

    gain = best - scratch[current]
    threshold = 0.0
    if epsilon > 0.0:
        threshold = (2.0 * epsilon / n) * phi1
    accepted = candidate != current and gain > threshold
    if accepted:
        strategy[v] = candidate
        agreement[v] = best
        for a in range(start, end):
            sj = strategy[indices[a]]
            if sj == current:
                agreement[indices[a]] -= t_slot[a]
            elif sj == candidate:
                agreement[indices[a]] += t_slot[a]
        phi1 += gain
    return candidate, gain, accepted, phi1


@njit(cache=True, nogil=True)
def play_game_kernel(indptr, indices, t_slot, strategy, agreement, order, r,
                     epsilon, max_rounds, phi1):
    """
    Repeat best-response passes over a fixed ordering until a pass accepts
    nothing or max_rounds passes have run.

    Returns (passes, accepted_moves, converged, phi1).
    """
    scratch = np.zeros(r, dtype=np.float64)
    passes = 0
    moves = 0
    converged = False
    while passes < max_rounds:
        changes = 0
        for i in range(order.shape[0]):
            _, _, accepted, phi1 = best_response_kernel(
                order[i], indptr, indices, t_slot, strategy, agreement,
                scratch, epsilon, phi1)
            if accepted:
                changes += 1
        passes += 1
        moves += changes
        if changes == 0:
            converged = True
            break
    return passes, moves, converged, phi1


@njit(cache=True, nogil=True)
def improving_vertices_kernel(indptr, indices, t_slot, strategy, r, rel_tol):
    """Mask of vertices having a strictly improving unilateral deviation"""
    n = strategy.shape[0]
    scratch = np.zeros(r, dtype=np.float64)
    mask = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        _strategy_sums(v, indptr, indices, t_slot, strategy, scratch)
        own = scratch[strategy[v]]
        best = own
        for a in range(indptr[v], indptr[v + 1]):
            value = scratch[strategy[indices[a]]]
            if value > best:
                best = value
        if best > own + rel_tol * (1.0 + best):
            mask[v] = True
    return mask
