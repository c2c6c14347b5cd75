"""Growth processes: the k-neighbour model, the LCD comparison model,
seed-graph construction, and an exhaustive small-instance oracle.

One growth step of the k-neighbour model, from t-1 to t vertices: pick an
existing vertex w with probability deg(w)/total degree, pick k-1 of w's
slots uniformly without replacement, then add vertex t with one edge to w
and one to each chosen slot's other endpoint.  All choices are made against
the pre-step graph; the new vertex never attaches to itself.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, TextIO

import numpy as np

from . import _kernels
from .errors import InsufficientDegree, ParameterOutOfRange, StateSpaceTooLarge
from .graph import MultiGraph, sample_neighbour_slots, sample_preferential
from .pmf import DegreePmf, pmf_from_dict
from .rng import RngStream

K_LOOPS = "k-loops"
COMPLETE = "complete"
CUSTOM = "custom"

ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True)
class SeedGraph:
    """Initial graph for the growth process.

    Variants: one vertex with k loops; the complete graph on j >= k+1
    vertices; or a custom edge list with minimum degree >= k.
    """

    variant: str
    k: int
    j: int | None = None
    edges: tuple | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ParameterOutOfRange(f"k must be >= 1, got {self.k}")
        if self.variant == K_LOOPS:
            pass
        elif self.variant == COMPLETE:
            if self.j is None or self.j < self.k + 1:
                raise ParameterOutOfRange(
                    f"complete seed needs j >= k+1 = {self.k + 1}, got {self.j}"
                )
        elif self.variant == CUSTOM:
            if not self.edges:
                raise ParameterOutOfRange("custom seed needs a nonempty edge list")
            n0 = max(max(u, v) for u, v in self.edges)
            deg = [0] * (n0 + 1)
            for u, v in self.edges:
                if min(u, v) < 1:
                    raise ParameterOutOfRange("custom seed ids are 1-based")
                deg[u] += 1
                deg[v] += 1
            if min(deg[1:]) < self.k:
                raise ParameterOutOfRange(
                    f"custom seed minimum degree {min(deg[1:])} is below k = {self.k}"
                )
        else:
            raise ParameterOutOfRange(f"unknown seed variant {self.variant!r}")

    @classmethod
    def k_loops(cls, k: int) -> "SeedGraph":
        return cls(K_LOOPS, k)

    @classmethod
    def complete_kj(cls, k: int, j: int) -> "SeedGraph":
        return cls(COMPLETE, k, j=j)

    @classmethod
    def custom(cls, k: int, edges: Iterable[tuple[int, int]]) -> "SeedGraph":
        return cls(CUSTOM, k, edges=tuple((int(u), int(v)) for u, v in edges))

    def edge_pairs(self) -> list[tuple[int, int]]:
        if self.variant == K_LOOPS:
            return [(1, 1)] * self.k
        if self.variant == COMPLETE:
            return list(combinations(range(1, self.j + 1), 2))
        return list(self.edges)

    @property
    def n_vertices(self) -> int:
        if self.variant == K_LOOPS:
            return 1
        if self.variant == COMPLETE:
            return self.j
        return max(max(u, v) for u, v in self.edges)


@dataclass
class GrowthConfig:
    """Parameters of one growth run."""

    k: int
    n: int
    rng: RngStream
    seed: SeedGraph | None = None
    trace_vertex: int | None = None
    neighbour_mode: str = "slots"  # "distinct" is a sensitivity variant

    def __post_init__(self):
        if self.seed is None:
            self.seed = SeedGraph.k_loops(self.k)
        if self.seed.k != self.k:
            raise ParameterOutOfRange("seed graph was built for a different k")
        if self.n < self.seed.n_vertices:
            raise ParameterOutOfRange(
                f"n = {self.n} is below the seed vertex count {self.seed.n_vertices}"
            )
        if self.neighbour_mode not in ("slots", "distinct"):
            raise ParameterOutOfRange(f"unknown neighbour mode {self.neighbour_mode!r}")
        if self.trace_vertex is not None and not 1 <= self.trace_vertex <= self.n:
            raise ParameterOutOfRange(f"trace vertex {self.trace_vertex} not in 1..{self.n}")


@dataclass
class GrowthResult:
    graph: MultiGraph
    trace: np.ndarray | None = None  # trace[t] = degree after step t, t0..n
    trace_start: int | None = None


def _seeded_arrays(seed: SeedGraph, n: int, k: int):
    pairs = seed.edge_pairs()
    t0 = seed.n_vertices
    cap_edges = len(pairs) + k * (n - t0)
    g = MultiGraph.from_edges(pairs, t0, max_vertices=n, capacity_edges=cap_edges)
    return g, t0, len(pairs)


def grow_kneighbour(cfg: GrowthConfig) -> GrowthResult:
    """Grow to n vertices; with a k-loop seed the result has k*n edges."""
    g, t0, e0 = _seeded_arrays(cfg.seed, cfg.n, cfg.k)
    tv = cfg.trace_vertex or 0
    trace = np.zeros(cfg.n + 1, dtype=np.int64) if tv else np.empty(0, dtype=np.int64)
    kernel = (
        _kernels._grow_kneighbour
        if cfg.neighbour_mode == "slots"
        else _kernels._grow_kneighbour_distinct
    )
    e = kernel(g._eea, g._prev, g._head, g._deg, e0, t0, cfg.n, cfg.k, cfg.rng.state, tv, trace)
    if e < 0:
        raise InsufficientDegree(f"first-choice vertex at step {-e} has fewer than k-1 slots")
    g._n = cfg.n
    g._e = e
    return GrowthResult(g, trace if tv else None, t0 if tv else None)


def grow_kneighbour_reference(cfg: GrowthConfig) -> GrowthResult:
    """Slow path composed of the public sampling operations.

    Consumes the stream exactly like the fused kernel, so both paths produce
    bit-identical graphs; used to cross-check the kernel.
    """
    if cfg.neighbour_mode != "slots":
        raise ParameterOutOfRange("reference grower implements the slot model only")
    t0 = cfg.seed.n_vertices
    g = MultiGraph.from_edges(cfg.seed.edge_pairs(), t0, max_vertices=cfg.n)
    tv = cfg.trace_vertex
    trace = np.zeros(cfg.n + 1, dtype=np.int64) if tv else None
    if tv:
        trace[t0] = g._deg[tv]
    for t in range(t0 + 1, cfg.n + 1):
        w = sample_preferential(g, cfg.rng)
        targets = [w] + sample_neighbour_slots(g, w, cfg.k - 1, cfg.rng)
        g.add_vertex_with_edges(targets)
        if tv:
            trace[t] = g._deg[tv]
    return GrowthResult(g, trace, t0 if tv else None)


def grow_lcd(k: int, n: int, rng: RngStream) -> MultiGraph:
    """Single-edge self-loop process on k*n vertices, contracted k at a time.

    The result has n vertices and k*n edges; intra-block edges survive as
    loops, so contraction preserves the edge count and total degree 2*k*n.
    """
    if k < 1 or n < 1:
        raise ParameterOutOfRange(f"grow_lcd needs k >= 1 and n >= 1, got k={k} n={n}")
    kn = k * n
    ends = np.empty(2 * kn, dtype=np.int64)
    _kernels._lcd_ends(ends, kn, rng.state)
    blocks = (ends - 1) // k + 1
    g = MultiGraph(n, capacity_edges=kn)
    _kernels._build_from_pairs(blocks[0::2].copy(), blocks[1::2].copy(), g._eea, g._prev, g._head, g._deg)
    g._e = kn
    return g


def write_degree_trace(result: GrowthResult, fh: TextIO) -> None:
    """CSV rows `t,degree` from the seed time to n (0 before birth)."""
    if result.trace is None:
        raise ValueError("growth run was not traced")
    fh.write("t,degree\n")
    for t in range(result.trace_start, result.trace.size):
        fh.write(f"{t},{int(result.trace[t])}\n")


# -- exhaustive oracle -------------------------------------------------------


def enumerate_process_distribution(
    k: int, i: int, n: int, seed: SeedGraph, budget: int = ENUMERATION_BUDGET
) -> DegreePmf:
    """Exact distribution of d_n(v_i) by enumerating every attachment history.

    Works on k-loop and complete seeds only, merges histories that reach the
    same labelled edge multiset, and aborts once the expansion budget of
    10^7 (state, branch) pairs is exceeded.  Multi-edge increments are part
    of the process and are fully included.
    """
    if seed.variant not in (K_LOOPS, COMPLETE):
        raise ParameterOutOfRange("enumeration supports k-loop and complete seeds")
    if seed.k != k:
        raise ParameterOutOfRange("seed graph was built for a different k")
    t0 = seed.n_vertices
    if not 1 <= i <= n:
        raise ParameterOutOfRange(f"vertex index {i} not in 1..{n}")
    if n < t0:
        raise ParameterOutOfRange(f"n = {n} is below the seed vertex count {t0}")

    start = tuple(sorted(tuple(sorted(e)) for e in seed.edge_pairs()))
    states: dict[tuple, Fraction] = {start: Fraction(1)}
    expansions = 0
    for t in range(t0 + 1, n + 1):
        nxt: dict[tuple, Fraction] = defaultdict(Fraction)
        for edges, p in states.items():
            deg, slot_sets = _degrees_and_slots(edges)
            total = 2 * len(edges)
            for w, dw in deg.items():
                p_w = p * Fraction(dw, total)
                n_subsets = comb(dw, k - 1)
                for endpoints, ways in _endpoint_multisets(slot_sets[w], k - 1):
                    expansions += 1
                    if expansions > budget:
                        raise StateSpaceTooLarge(
                            f"enumeration exceeded {budget} expansions"
                        )
                    new_edges = [(w, t)] + [(u, t) for u in endpoints]
                    key = tuple(sorted(edges + tuple(new_edges)))
                    nxt[key] += p_w * Fraction(ways, n_subsets)
        states = dict(nxt)

    dist: dict[int, Fraction] = defaultdict(Fraction)
    for edges, p in states.items():
        deg, _ = _degrees_and_slots(edges)
        dist[deg.get(i, 0)] += p
    return pmf_from_dict(dict(dist), exact=True)


def _degrees_and_slots(edges):
    deg: dict[int, int] = defaultdict(int)
    slots: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
        if u == v:
            slots[u][u] += 2
        else:
            slots[u][v] += 1
            slots[v][u] += 1
    return deg, slots


def _endpoint_multisets(slot_counts: dict[int, int], r: int):
    """(endpoint multiset, number of slot subsets producing it) pairs."""
    endpoints = sorted(slot_counts)

    def rec(idx, remaining, ways, chosen):
        if remaining == 0:
            yield tuple(chosen), ways
            return
        if idx == len(endpoints):
            return
        u = endpoints[idx]
        avail = slot_counts[u]
        for c in range(min(avail, remaining) + 1):
            yield from rec(idx + 1, remaining - c, ways * comb(avail, c), chosen + [u] * c)

    yield from rec(0, r, 1, [])
