"""numba kernels behind the growth engine and the Monte Carlo harness.

The storage layout is shared with :mod:`pagrow.graph`: edge e occupies
positions 2e and 2e+1 of the edge-end array, so the other endpoint of the
slot at position p is ``eea[p ^ 1]``.  Per-vertex slots are a linked list of
positions (``head``/``prev``), newest first.  Vertex ids are 1-based.

Slot sampling is reservoir sampling over the chain walked newest to oldest;
the Python-level operations in :mod:`pagrow.graph` call the same compiled
functions, which is what makes the slow path and the fused kernels produce
bit-identical graphs from one stream.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

from .rng import next_u64, rand_below, seed_state


@njit(cache=True, nogil=True, inline="always")
def _add_edge(eea, prev, head, deg, e, u, v):
    p = 2 * e
    eea[p] = u
    prev[p] = head[u]
    head[u] = p
    deg[u] += 1
    p += 1
    eea[p] = v
    prev[p] = head[v]
    head[v] = p
    deg[v] += 1


@njit(cache=True, nogil=True, inline="always")
def _sample_pref(eea, n_ends, state):
    return eea[int64(rand_below(state, uint64(n_ends)))]


@njit(cache=True, nogil=True)
def _reservoir_slots(prev, head, w, r, state, chosen):
    """Pick r distinct slot positions of w uniformly without replacement.

    Walks the chain newest to oldest; r = 0 consumes no randomness.
    """
    if r == 0:
        return
    pos = head[w]
    i = int64(0)
    while pos != -1:
        if i < r:
            chosen[i] = pos
        else:
            j = int64(rand_below(state, uint64(i + 1)))
            if j < r:
                chosen[j] = pos
        pos = prev[pos]
        i += 1


@njit(cache=True, nogil=True)
def _grow_kneighbour(eea, prev, head, deg, e0, t0, n, k, state, trace_vertex, trace):
    """Run the k-neighbour process from t0+1 to n over pre-seeded arrays.

    Returns the final edge count, or -t on the (seed-violating) step t where
    the first-choice vertex had fewer than k-1 slots.
    """
    e = e0
    r = k - 1
    chosen = np.empty(max(r, 1), dtype=np.int64)
    if trace.size:
        trace[t0] = deg[trace_vertex]
    for t in range(t0 + 1, n + 1):
        w = _sample_pref(eea, 2 * e, state)
        if deg[w] < r:
            return -t
        _reservoir_slots(prev, head, w, r, state, chosen)
        _add_edge(eea, prev, head, deg, e, t, w)
        e += 1
        for q in range(r):
            u = eea[chosen[q] ^ 1]
            _add_edge(eea, prev, head, deg, e, t, u)
            e += 1
        if trace.size:
            trace[t] = deg[trace_vertex]
    return e


@njit(cache=True, nogil=True)
def _grow_kneighbour_distinct(eea, prev, head, deg, e0, t0, n, k, state, trace_vertex, trace):
    """Sensitivity variant: k-1 distinct neighbours of w instead of slots.

    Neighbours are the distinct other-endpoints of w's slots (w itself when
    it has loops).  When fewer than k-1 exist, the remainder is drawn with
    replacement; no exactness is claimed for this mode.
    """
    e = e0
    r = k - 1
    if trace.size:
        trace[t0] = deg[trace_vertex]
    for t in range(t0 + 1, n + 1):
        w = _sample_pref(eea, 2 * e, state)
        d = deg[w]
        buf = np.empty(d, dtype=np.int64)
        pos = head[w]
        i = 0
        while pos != -1:
            buf[i] = eea[pos ^ 1]
            pos = prev[pos]
            i += 1
        buf.sort()
        nu = 0
        for q in range(d):
            if q == 0 or buf[q] != buf[nu - 1]:
                buf[nu] = buf[q]
                nu += 1
        _add_edge(eea, prev, head, deg, e, t, w)
        e += 1
        if nu >= r:
            # reservoir over the nu unique neighbours
            take = np.empty(max(r, 1), dtype=np.int64)
            for q in range(r):
                take[q] = buf[q]
            for q in range(r, nu):
                j = int64(rand_below(state, uint64(q + 1)))
                if j < r:
                    take[j] = buf[q]
            for q in range(r):
                _add_edge(eea, prev, head, deg, e, t, take[q])
                e += 1
        else:
            for q in range(r):
                u = buf[int64(rand_below(state, uint64(nu)))]
                _add_edge(eea, prev, head, deg, e, t, u)
                e += 1
        if trace.size:
            trace[t] = deg[trace_vertex]
    return e


@njit(cache=True, nogil=True)
def _lcd_ends(ends, kn, state):
    """Single-edge preferential process with self-loops, 2*kn edge ends.

    Step t attaches vertex t to an earlier end with probability proportional
    to current degree and to itself with the residual 1/(2t-1) mass.
    """
    for t in range(1, kn + 1):
        u = int64(rand_below(state, uint64(2 * t - 1)))
        if u < 2 * (t - 1):
            target = ends[u]
        else:
            target = t
        ends[2 * t - 2] = t
        ends[2 * t - 1] = target


@njit(cache=True, nogil=True)
def _build_from_pairs(us, vs, eea, prev, head, deg):
    for e in range(us.size):
        _add_edge(eea, prev, head, deg, e, us[e], vs[e])


@njit(cache=True, nogil=True)
def _final_degree_batch(seed_us, seed_vs, t0, n, k, trace_vertex, master_seed, s0, s1, out):
    """Grow one replica per stream id in [s0, s1); record d_n(trace_vertex)."""
    cap = 2 * (seed_us.size + k * (n - t0))
    eea = np.empty(cap, dtype=np.int64)
    prev = np.empty(cap, dtype=np.int64)
    head = np.empty(n + 1, dtype=np.int64)
    deg = np.empty(n + 1, dtype=np.int64)
    state = np.empty(4, dtype=np.uint64)
    no_trace = np.empty(0, dtype=np.int64)
    for stream in range(s0, s1):
        seed_state(state, uint64(master_seed), uint64(stream))
        head[:] = -1
        deg[:] = 0
        _build_from_pairs(seed_us, seed_vs, eea, prev, head, deg)
        e = _grow_kneighbour(eea, prev, head, deg, seed_us.size, t0, n, k, state, 0, no_trace)
        if e < 0:
            out[stream - s0] = e
            return
        out[stream - s0] = deg[trace_vertex]


@njit(cache=True, nogil=True)
def _lcd_block_degree_batch(k, n, block, master_seed, s0, s1, out):
    """LCD replicas; record the degree of contracted block `block` (1-based)."""
    kn = k * n
    ends = np.empty(2 * kn, dtype=np.int64)
    state = np.empty(4, dtype=np.uint64)
    lo = (block - 1) * k + 1
    hi = block * k
    for stream in range(s0, s1):
        seed_state(state, uint64(master_seed), uint64(stream))
        _lcd_ends(ends, kn, state)
        d = 0
        for p in range(2 * kn):
            if lo <= ends[p] <= hi:
                d += 1
        out[stream - s0] = d


@njit(cache=True, nogil=True)
def _step_increment_trials(
    eea, prev, head, deg, n_ends, k, trials, state, d_sorted, gain1, gain_multi, birth_not_k
):
    """Simulate `trials` candidate growth steps against a frozen graph.

    For each requested degree d (sorted), counts how many (vertex, trial)
    pairs with deg(vertex) = d gained exactly one edge and how many gained
    two or more.  Also counts trials whose new vertex would not be born with
    degree exactly k.  The graph is never mutated.
    """
    r = k - 1
    chosen = np.empty(max(r, 1), dtype=np.int64)
    targets = np.empty(k, dtype=np.int64)
    for _ in range(trials):
        w = _sample_pref(eea, n_ends, state)
        _reservoir_slots(prev, head, w, r, state, chosen)
        targets[0] = w
        n_targets = 1
        for q in range(r):
            targets[q + 1] = eea[chosen[q] ^ 1]
            n_targets += 1
        if n_targets != k:
            birth_not_k[0] += 1
        for a in range(k):
            v = targets[a]
            seen = False
            for b in range(a):
                if targets[b] == v:
                    seen = True
                    break
            if seen:
                continue
            mult = 1
            for b in range(a + 1, k):
                if targets[b] == v:
                    mult += 1
            d = deg[v]
            idx = np.searchsorted(d_sorted, d)
            if idx < d_sorted.size and d_sorted[idx] == d:
                if mult == 1:
                    gain1[idx] += 1
                else:
                    gain_multi[idx] += 1
