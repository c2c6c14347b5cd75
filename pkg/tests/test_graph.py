import io
import math

import numpy as np
import pytest

from pagrow.errors import EmptyGraph, InsufficientDegree, UnknownVertex
from pagrow.graph import (
    MultiGraph,
    degree_histogram,
    sample_neighbour_slots,
    sample_preferential,
)
from pagrow.rng import RngStream


def loop_graph(k):
    return MultiGraph.from_edges([(1, 1)] * k, 1, max_vertices=10)


def test_loop_contributes_two_slots_and_degree_two():
    g = loop_graph(1)
    assert g.degree(1) == 2
    assert g.slots(1) == [1, 1]
    assert list(g.edge_end_array) == [1, 1]
    g.audit()


def test_add_vertex_with_edges_updates_everything():
    g = loop_graph(2)
    v = g.add_vertex_with_edges([1, 1])
    assert v == 2
    assert g.degree(1) == 6 and g.degree(2) == 2
    assert g.slots(2) == [1, 1]
    assert sorted(g.slots(1)) == [1, 1, 1, 1, 2, 2]
    assert int(g.degrees().sum()) == 2 * g.num_edges
    g.audit()


def test_add_isolated_vertex():
    g = loop_graph(2)
    before = int(g.degrees().sum())
    v = g.add_vertex_with_edges([])
    assert g.degree(v) == 0
    assert int(g.degrees().sum()) == before


def test_handshake_after_every_mutation():
    g = loop_graph(3)
    rng = RngStream(5)
    for _ in range(40):
        w = sample_preferential(g, rng)
        targets = [w] + sample_neighbour_slots(g, w, 2, rng)
        g.add_vertex_with_edges(targets)
        assert int(g.degrees().sum()) == 2 * g.num_edges
    g.audit()


def test_unknown_vertex_errors():
    g = loop_graph(2)
    with pytest.raises(UnknownVertex):
        g.add_vertex_with_edges([7])
    with pytest.raises(UnknownVertex):
        g.degree(0)


def test_sample_preferential_single_vertex():
    g = loop_graph(2)
    rng = RngStream(1)
    assert all(sample_preferential(g, rng) == 1 for _ in range(20))


def test_sample_preferential_empty_graph():
    with pytest.raises(EmptyGraph):
        sample_preferential(MultiGraph.from_edges([], 1), RngStream(0))


def test_sample_preferential_frequency():
    # degrees {v1: 6, v2: 2}: P(v1) = 3/4; binomial 4-sigma band at 1e6 draws
    g = loop_graph(2)
    g.add_vertex_with_edges([1, 1])
    rng = RngStream(42)
    draws = 1_000_000
    hits = sum(sample_preferential(g, rng) == 1 for _ in range(draws))
    p = 0.75
    band = 4 * math.sqrt(p * (1 - p) / draws)
    assert abs(hits / draws - p) <= band


def test_sample_neighbour_slots_forced_and_loops():
    g = MultiGraph.from_edges([(1, 2), (1, 3)], 3)
    rng = RngStream(9)
    assert sorted(sample_neighbour_slots(g, 1, 2, rng)) == [2, 3]
    gl = loop_graph(2)
    assert sample_neighbour_slots(gl, 1, 1, RngStream(3)) == [1]
    assert sample_neighbour_slots(gl, 1, 0, RngStream(3)) == []


def test_sample_neighbour_slots_insufficient_degree():
    g = MultiGraph.from_edges([(1, 2)], 2)
    with pytest.raises(InsufficientDegree):
        sample_neighbour_slots(g, 1, 2, RngStream(0))


def test_sample_neighbour_slots_parallel_edge_bias():
    # slots of w point to {a, a, b}: drawing one should hit a with rate 2/3
    g = MultiGraph.from_edges([(1, 2), (1, 2), (1, 3)], 3)
    rng = RngStream(7)
    draws = 1_000_000
    hits = sum(sample_neighbour_slots(g, 1, 1, rng)[0] == 2 for _ in range(draws))
    p = 2 / 3
    band = 4 * math.sqrt(p * (1 - p) / draws)
    assert abs(hits / draws - p) <= band


def test_slot_selection_probability_is_r_over_d():
    # each specific slot of a degree-4 vertex is chosen with rate r/d = 1/2
    g = MultiGraph.from_edges([(1, 2), (1, 3), (1, 4), (1, 5)], 5)
    rng = RngStream(11)
    draws = 200_000
    counts = {v: 0 for v in (2, 3, 4, 5)}
    for _ in range(draws):
        for v in sample_neighbour_slots(g, 1, 2, rng):
            counts[v] += 1
    for v, c in counts.items():
        band = 4 * math.sqrt(0.5 * 0.5 / draws)
        assert abs(c / draws - 0.5) <= band


def test_degree_histogram():
    g = loop_graph(2)
    g.add_vertex_with_edges([1, 1])
    assert degree_histogram(g) == {6: 1, 2: 1}
    gl = loop_graph(3)
    assert degree_histogram(gl) == {6: 1}
    total = sum(d * c for d, c in degree_histogram(g).items())
    assert total == 2 * g.num_edges


def test_determinism_same_stream_same_graph():
    def build(seed):
        g = loop_graph(2)
        rng = RngStream(seed, 3)
        for _ in range(30):
            w = sample_preferential(g, rng)
            g.add_vertex_with_edges([w] + sample_neighbour_slots(g, w, 1, rng))
        return list(g.edge_end_array)

    assert build(123) == build(123)
    assert build(123) != build(124)


def test_distinct_stream_ids_differ():
    a = [RngStream(5, 0).next_u64() for _ in range(8)]
    b = [RngStream(5, 1).next_u64() for _ in range(8)]
    assert a != b


def test_edge_list_dump_format():
    g = loop_graph(2)
    g.add_vertex_with_edges([1, 1])
    buf = io.StringIO()
    g.dump_edge_list(buf)
    assert buf.getvalue() == "1 1\n1 1\n2 1\n2 1\n"


def test_edge_end_array_is_readonly_view():
    g = loop_graph(1)
    view = g.edge_end_array
    with pytest.raises(ValueError):
        view[0] = 9


def test_capacity_growth():
    g = MultiGraph.from_edges([(1, 1)], 1, capacity_edges=1)
    for _ in range(50):
        g.add_vertex_with_edges([1])
    assert g.num_edges == 51
    g.audit()
