"""Mutable undirected multigraph tuned for degree-proportional sampling.

Degrees, loops and parallel edges follow multigraph conventions: a loop adds
2 to its vertex's degree and contributes two slots, each recording the vertex
itself as the other endpoint.  Sampling a uniform entry of the edge-end array
is therefore exactly degree-proportional vertex sampling, and selecting r of
a vertex's d slots uniformly without replacement picks each slot with
probability r/d.

A MultiGraph instance is single-writer; distinct instances may be grown in
parallel, and a frozen instance may be shared read-only across threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence, TextIO

import numpy as np

from . import _kernels
from .errors import EmptyGraph, InsufficientDegree, UnknownVertex
from .rng import RngStream


class MultiGraph:
    """Growing multigraph with O(1) amortized edge insertion.

    Storage: edge e occupies positions 2e and 2e+1 of ``edge_end_array``;
    the other endpoint of the slot at position p is position p ^ 1.  Slots of
    a vertex form a linked list over positions (newest first).  Vertex ids
    are dense and 1-based in arrival order.
    """

    def __init__(self, n_vertices: int = 0, capacity_edges: int = 0, max_vertices: int | None = None):
        cap_v = max(n_vertices, max_vertices or 0, 1)
        cap_e = max(capacity_edges, 1)
        self._eea = np.zeros(2 * cap_e, dtype=np.int64)
        self._prev = np.zeros(2 * cap_e, dtype=np.int64)
        self._head = np.full(cap_v + 1, -1, dtype=np.int64)
        self._deg = np.zeros(cap_v + 1, dtype=np.int64)
        self._n = n_vertices
        self._e = 0

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n_vertices: int,
                   max_vertices: int | None = None, capacity_edges: int | None = None) -> "MultiGraph":
        """Build from (u, v) pairs in insertion order; loops as (u, u)."""
        edges = list(edges)
        g = cls(n_vertices, capacity_edges or len(edges), max_vertices)
        for u, v in edges:
            g._check_vertex(u)
            g._check_vertex(v)
        if edges:
            us = np.array([u for u, _ in edges], dtype=np.int64)
            vs = np.array([v for _, v in edges], dtype=np.int64)
            g._ensure_edge_capacity(len(edges))
            _kernels._build_from_pairs(us, vs, g._eea, g._prev, g._head, g._deg)
            g._e = len(edges)
        return g

    # -- invariant-preserving mutation ------------------------------------

    def add_vertex_with_edges(self, targets: Sequence[int]) -> int:
        """Append a new vertex with one edge per target; return its id.

        Repeated targets create parallel edges.  An empty target list adds an
        isolated vertex.
        """
        for u in targets:
            self._check_vertex(u)
        v = self._n + 1
        self._ensure_vertex_capacity(v)
        self._ensure_edge_capacity(self._e + len(targets))
        self._n = v
        for u in targets:
            _kernels._add_edge(self._eea, self._prev, self._head, self._deg, self._e, v, int(u))
            self._e += 1
        return v

    # -- accessors ---------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return self._e

    @property
    def edge_end_array(self) -> np.ndarray:
        """The filled prefix, one entry per edge end (read-only view)."""
        view = self._eea[: 2 * self._e]
        view.flags.writeable = False
        return view

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self._deg[v])

    def degrees(self) -> np.ndarray:
        """Degrees of vertices 1..n as an array of length n."""
        return self._deg[1 : self._n + 1].copy()

    def slots(self, v: int) -> list[int]:
        """Other-endpoint ids of v's slots, oldest first."""
        self._check_vertex(v)
        out = []
        pos = int(self._head[v])
        while pos != -1:
            out.append(int(self._eea[pos ^ 1]))
            pos = int(self._prev[pos])
        out.reverse()
        return out

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (u, v) pairs in insertion order; loops as (u, u)."""
        return [
            (int(self._eea[2 * e]), int(self._eea[2 * e + 1])) for e in range(self._e)
        ]

    # -- integrity ----------------------------------------------------------

    def audit(self) -> None:
        """Debug-mode consistency check of slots, degrees and edge ends."""
        eea = self._eea[: 2 * self._e]
        counts = np.bincount(eea, minlength=self._n + 1)
        if not np.array_equal(counts[1 : self._n + 1], self._deg[1 : self._n + 1]):
            raise AssertionError("edge-end counts disagree with stored degrees")
        if int(self._deg[1 : self._n + 1].sum()) != 2 * self._e:
            raise AssertionError("handshake identity violated")
        for v in range(1, self._n + 1):
            if len(self.slots(v)) != self._deg[v]:
                raise AssertionError(f"slot count of vertex {v} disagrees with degree")

    # -- serialization -------------------------------------------------------

    def dump_edge_list(self, fh: TextIO) -> None:
        """One `u v` pair per line, 1-based ids, insertion order, loops as `u u`."""
        for u, v in self.edges():
            fh.write(f"{u} {v}\n")

    # -- internals -----------------------------------------------------------

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self._n:
            raise UnknownVertex(f"vertex {v} not in 1..{self._n}")

    def _ensure_vertex_capacity(self, v: int) -> None:
        if v < self._head.size:
            return
        new = max(2 * self._head.size, v + 1)
        head = np.full(new, -1, dtype=np.int64)
        head[: self._head.size] = self._head
        deg = np.zeros(new, dtype=np.int64)
        deg[: self._deg.size] = self._deg
        self._head, self._deg = head, deg

    def _ensure_edge_capacity(self, n_edges: int) -> None:
        if 2 * n_edges <= self._eea.size:
            return
        new = max(2 * self._eea.size, 2 * n_edges)
        eea = np.zeros(new, dtype=np.int64)
        eea[: self._eea.size] = self._eea
        prev = np.zeros(new, dtype=np.int64)
        prev[: self._prev.size] = self._prev
        self._eea, self._prev = eea, prev


def sample_preferential(g: MultiGraph, rng: RngStream) -> int:
    """A vertex drawn with probability degree/total degree, in O(1).

    Implemented as a uniform draw from the edge-end array.
    """
    if g.num_edges == 0:
        raise EmptyGraph("preferential sampling needs at least one edge end")
    return int(_kernels._sample_pref(g._eea, 2 * g.num_edges, rng.state))


def sample_neighbour_slots(g: MultiGraph, w: int, r: int, rng: RngStream) -> list[int]:
    """Other-endpoints of r distinct slots of w, uniform without replacement.

    Duplicates are possible through parallel edges, and w itself through loop
    slots.  Each specific slot is selected with probability r/degree(w).
    """
    g._check_vertex(w)
    d = g.degree(w)
    if r > d:
        raise InsufficientDegree(f"vertex {w} has {d} slots, requested {r}")
    if r == 0:
        return []
    chosen = np.empty(r, dtype=np.int64)
    _kernels._reservoir_slots(g._prev, g._head, w, r, rng.state, chosen)
    return [int(g._eea[int(p) ^ 1]) for p in chosen]


def degree_histogram(g: MultiGraph) -> dict[int, int]:
    """Occupied-degree counts; values sum to the vertex count."""
    if g.vertex_count == 0:
        return {}
    counts = np.bincount(g.degrees())
    return {int(d): int(c) for d, c in enumerate(counts) if c > 0}
