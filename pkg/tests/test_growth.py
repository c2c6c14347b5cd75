import io
from fractions import Fraction

import numpy as np
import pytest

from pagrow.errors import ParameterOutOfRange, StateSpaceTooLarge
from pagrow.graph import degree_histogram
from pagrow.growth import (
    GrowthConfig,
    SeedGraph,
    enumerate_process_distribution,
    grow_kneighbour,
    grow_kneighbour_reference,
    grow_lcd,
    write_degree_trace,
)
from pagrow.rng import RngStream
from pagrow.urn import expected_degree


def test_seed_graph_validation():
    assert SeedGraph.k_loops(2).n_vertices == 1
    assert SeedGraph.complete_kj(2, 5).n_vertices == 5
    with pytest.raises(ParameterOutOfRange):
        SeedGraph.complete_kj(3, 3)  # needs j >= k+1
    with pytest.raises(ParameterOutOfRange):
        SeedGraph.custom(3, [(1, 2), (2, 3), (1, 3)])  # min degree 2 < k
    custom = SeedGraph.custom(2, [(1, 2), (2, 3), (1, 3)])
    assert custom.n_vertices == 3


def test_growth_config_validation():
    with pytest.raises(ParameterOutOfRange):
        GrowthConfig(k=2, n=3, rng=RngStream(0), seed=SeedGraph.complete_kj(2, 5))
    with pytest.raises(ParameterOutOfRange):
        GrowthConfig(k=2, n=10, rng=RngStream(0), trace_vertex=11)
    with pytest.raises(ParameterOutOfRange):
        GrowthConfig(k=2, n=10, rng=RngStream(0), neighbour_mode="nope")


def test_first_step_is_forced():
    res = grow_kneighbour(GrowthConfig(k=2, n=2, rng=RngStream(7)))
    assert degree_histogram(res.graph) == {6: 1, 2: 1}
    assert res.graph.edges() == [(1, 1), (1, 1), (2, 1), (2, 1)]


def test_total_degree_is_2kn():
    res = grow_kneighbour(GrowthConfig(k=3, n=100, rng=RngStream(1)))
    assert res.graph.num_edges == 300
    assert int(res.graph.degrees().sum()) == 600


def test_birth_degree_is_exactly_k():
    res = grow_kneighbour(GrowthConfig(k=4, n=200, rng=RngStream(9)))
    first_endpoint = res.graph.edge_end_array[0::2]
    for t in range(2, 201):
        assert int((first_endpoint == t).sum()) == 4


def test_kernel_matches_reference_bit_for_bit():
    for seed in (0, 1, 77, 4096):
        for k, n in ((2, 50), (3, 40), (5, 25)):
            a = grow_kneighbour(GrowthConfig(k=k, n=n, rng=RngStream(seed)))
            b = grow_kneighbour_reference(GrowthConfig(k=k, n=n, rng=RngStream(seed)))
            assert a.graph.edges() == b.graph.edges()
            assert np.array_equal(a.graph.edge_end_array, b.graph.edge_end_array)


def test_identical_stream_identical_graph():
    a = grow_kneighbour(GrowthConfig(k=2, n=300, rng=RngStream(5, 9)))
    b = grow_kneighbour(GrowthConfig(k=2, n=300, rng=RngStream(5, 9)))
    assert np.array_equal(a.graph.edge_end_array, b.graph.edge_end_array)


def test_complete_seed_edge_bookkeeping():
    j, k, n = 5, 2, 40
    res = grow_kneighbour(GrowthConfig(k=k, n=n, rng=RngStream(3), seed=SeedGraph.complete_kj(k, j)))
    assert res.graph.num_edges == j * (j - 1) // 2 + k * (n - j)
    res.graph.audit()


def test_custom_seed_growth():
    seed = SeedGraph.custom(2, [(1, 2), (2, 3), (1, 3)])
    res = grow_kneighbour(GrowthConfig(k=2, n=30, rng=RngStream(4), seed=seed))
    assert res.graph.num_edges == 3 + 2 * 27


def test_trace_records_every_step():
    cfg = GrowthConfig(k=2, n=50, rng=RngStream(12), trace_vertex=4)
    res = grow_kneighbour(cfg)
    assert res.trace_start == 1
    assert res.trace[4] == 2  # birth degree
    assert res.trace[50] == res.graph.degree(4)
    assert (np.diff(res.trace[4:]) >= 0).all()  # degrees never shrink
    buf = io.StringIO()
    write_degree_trace(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,degree"
    assert lines[1] == "1,0"
    assert lines[-1] == f"50,{res.graph.degree(4)}"


def test_distinct_neighbour_variant_grows_valid_graphs():
    cfg = GrowthConfig(k=3, n=100, rng=RngStream(8), neighbour_mode="distinct")
    res = grow_kneighbour(cfg)
    assert res.graph.num_edges == 300
    assert int(res.graph.degrees().sum()) == 600
    res.graph.audit()


def test_k1_growth_is_pure_preferential():
    res = grow_kneighbour(GrowthConfig(k=1, n=50, rng=RngStream(2)))
    assert res.graph.num_edges == 50
    # no vertex except the seed ever gets a loop
    for u, v in res.graph.edges()[1:]:
        assert u != v


# -- LCD model ----------------------------------------------------------------


def test_lcd_forced_small_cases():
    g = grow_lcd(1, 1, RngStream(3))
    assert g.edges() == [(1, 1)]
    g = grow_lcd(2, 1, RngStream(3))
    assert g.degree(1) == 4 and g.num_edges == 2


def test_lcd_edge_count_any_parameters():
    for k, n, seed in ((1, 80, 0), (2, 50, 1), (3, 33, 2)):
        g = grow_lcd(k, n, RngStream(seed))
        assert g.vertex_count == n
        assert g.num_edges == k * n
        assert int(g.degrees().sum()) == 2 * k * n
        g.audit()


def test_lcd_rejects_bad_parameters():
    with pytest.raises(ParameterOutOfRange):
        grow_lcd(0, 5, RngStream(0))


# -- exhaustive oracle ----------------------------------------------------------


def test_enumeration_hand_values_n3():
    pmf = enumerate_process_distribution(2, 2, 3, SeedGraph.k_loops(2))
    assert pmf.as_dict() == {2: Fraction(1, 2), 3: Fraction(1, 2)}


def test_enumeration_point_mass_at_birth():
    pmf = enumerate_process_distribution(2, 4, 4, SeedGraph.k_loops(2))
    assert pmf.as_dict() == {2: Fraction(1)}


def test_enumeration_mean_matches_product():
    pmf = enumerate_process_distribution(2, 2, 4, SeedGraph.k_loops(2))
    assert pmf.mean() == Fraction(35, 12)
    assert pmf.mean() == expected_degree(2, 2, 4)
    assert pmf.total() == 1


def test_enumeration_expectation_identity_holds_for_all_i():
    # exact increment identity: E[d_n(v_i)] = k prod (1 + 1/2t) for i >= 2
    for i in (2, 3, 4):
        pmf = enumerate_process_distribution(2, i, 5, SeedGraph.k_loops(2))
        assert pmf.mean() == expected_degree(2, i, 5)


def test_enumeration_seed_vertex_mean():
    # v_1 starts at 2k; the same increment recursion applies from t = 1
    pmf = enumerate_process_distribution(2, 1, 4, SeedGraph.k_loops(2))
    expected = Fraction(4)
    for t in range(1, 4):
        expected *= 1 + Fraction(1, 2 * t)
    assert pmf.mean() == expected


def test_enumeration_k3_has_multi_increment_support():
    # with k = 3 a step can add two parallel edges to the same target
    pmf = enumerate_process_distribution(3, 2, 4, SeedGraph.k_loops(3))
    assert pmf.total() == 1
    assert max(pmf.as_dict()) == 3 + 4  # two steps, gain up to 2 each


def test_enumeration_complete_seed():
    pmf = enumerate_process_distribution(2, 3, 6, SeedGraph.complete_kj(2, 5))
    assert pmf.total() == 1
    assert min(pmf.as_dict()) == 4  # degree j-1 at seed time, never shrinks


def test_enumeration_budget_guard():
    with pytest.raises(StateSpaceTooLarge):
        enumerate_process_distribution(2, 2, 12, SeedGraph.k_loops(2), budget=10_000)


def test_enumeration_rejects_custom_seed():
    with pytest.raises(ParameterOutOfRange):
        enumerate_process_distribution(
            2, 1, 4, SeedGraph.custom(2, [(1, 2), (2, 3), (1, 3), (1, 2)])
        )
