import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rigidline.cliques import (
    check_rigidity_necessary,
    corradi_bound,
    extract_clique,
    guaranteed_clique_size,
    independence_upper_bound,
    is_clique,
    max_nonadjacent_common,
    meets_edge_threshold,
    prune_min_degree,
    reconstruct_dense,
    swap_optimal_independent_set,
    union_lower_bound,
    unique_neighbor_sets,
)
from rigidline.constructions import blow_up, gen_incidence_c4free, gen_T
from rigidline.core import Graph, PointConfig, Space, all_distances, measurements_from_pairs, sample_measurements
from oracles import improving_swap_exists, naive_prune


def cycle(n):
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def disjoint_cliques(*sizes):
    edges, off = [], 0
    for s in sizes:
        edges += [(off + a, off + b) for a, b in itertools.combinations(range(1, s + 1), 2)]
        off += s
    return Graph.from_edges(off, edges)


@st.composite
def graphs(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    density = draw(st.floats(0, 1))
    seed = draw(st.integers(0, 2**32))
    rng = random.Random(seed)
    return Graph.from_edges(n, [p for p in pairs if rng.random() < density])


class TestPrune:
    def test_complete(self):
        assert prune_min_degree(Graph.complete(5)) == frozenset(range(1, 6))

    def test_star_keeps_everything(self):
        star = Graph.from_edges(10, [(1, v) for v in range(2, 11)])
        assert prune_min_degree(star) == frozenset(range(1, 11))

    def test_k4_with_pendant(self):
        g = Graph.from_edges(5, list(itertools.combinations(range(1, 5), 2)) + [(4, 5)])
        assert prune_min_degree(g) == frozenset(range(1, 5))

    def test_no_edges(self):
        with pytest.raises(ValueError):
            prune_min_degree(Graph.from_edges(3, []))

    @given(graphs(max_n=50), st.integers(0, 2**32))
    def test_confluent_and_guaranteed(self, g, seed):
        if g.num_edges == 0:
            return
        kept = prune_min_degree(g)
        assert kept == prune_min_degree(g, order_seed=seed)
        order = list(g.vertices())
        random.Random(seed).shuffle(order)
        assert kept == naive_prune(g, order)
        for v in kept:
            assert len(g.neighbors(v) & kept) * g.n >= g.num_edges


class TestIndependentSet:
    def test_complete(self):
        assert len(swap_optimal_independent_set(Graph.complete(7), seed=3)) == 1

    def test_edgeless(self):
        assert swap_optimal_independent_set(Graph.from_edges(6, []), seed=3) == list(range(1, 7))

    def test_c5(self):
        ind = swap_optimal_independent_set(cycle(5), seed=0)
        assert len(ind) == 2
        assert not improving_swap_exists(cycle(5), ind)

    def test_deterministic(self):
        g = cycle(30)
        assert swap_optimal_independent_set(g, seed=9) == swap_optimal_independent_set(g, seed=9)

    @given(graphs(), st.one_of(st.none(), st.integers(0, 2**32)))
    def test_independent_maximal_swap_optimal(self, g, seed):
        ind = swap_optimal_independent_set(g, seed)
        assert all(not g.has_edge(a, b) for a, b in itertools.combinations(ind, 2))
        assert all(v in ind or g.neighbors(v) & set(ind) for v in g.vertices())
        assert not improving_swap_exists(g, ind)


class TestUniqueNeighborSets:
    def test_star_leaves(self):
        star = Graph.from_edges(5, [(1, v) for v in range(2, 6)])
        assert unique_neighbor_sets(star, [2, 3, 4, 5]) == {s: frozenset() for s in (2, 3, 4, 5)}

    def test_path(self):
        g = Graph.from_edges(3, [(1, 2), (2, 3)])
        assert unique_neighbor_sets(g, [1, 3]) == {1: frozenset(), 3: frozenset()}

    def test_two_edges(self):
        g = Graph.from_edges(4, [(1, 2), (3, 4)])
        assert unique_neighbor_sets(g, [1, 3]) == {1: frozenset({2}), 3: frozenset({4})}

    def test_rejects_dependent_set(self):
        with pytest.raises(ValueError):
            unique_neighbor_sets(Graph.from_edges(2, [(1, 2)]), [1, 2])

    @given(graphs(), st.integers(0, 2**32))
    def test_disjoint_inside_neighbourhood_and_cliques(self, g, seed):
        ind = swap_optimal_independent_set(g, seed)
        b = unique_neighbor_sets(g, ind)
        seen = set()
        for s, bs in b.items():
            assert bs <= g.neighbors(s)
            assert not (bs & seen)
            seen |= bs
            assert is_clique(g, bs | {s})


class TestExtractClique:
    def test_two_cliques(self):
        g = disjoint_cliques(30, 30)
        cert = extract_clique(g, k=1, seed=0)
        assert cert.size == 30
        assert is_clique(g, cert.clique)

    def test_edgeless(self):
        cert = extract_clique(Graph.from_edges(4, []), k=0)
        assert cert.size == 1

    def test_certificate_fields(self):
        g = disjoint_cliques(5, 2)  # the lone edge falls below 11/7
        cert = extract_clique(g, k=0, seed=1)
        assert cert.pruned_vertices == frozenset(range(1, 6))
        assert cert.min_degree == 4
        assert set(cert.b_sets) == set(cert.independent_set)

    @given(graphs(max_n=25), st.integers(0, 2**32))
    def test_always_verified_and_conditional_bound(self, g, seed):
        if g.n == 0:
            return
        cert = extract_clique(g, k=max_nonadjacent_common(g), seed=seed)
        assert is_clique(g, cert.clique)
        if meets_edge_threshold(g.num_edges, g.n, cert.k):
            assert cert.size >= guaranteed_clique_size(g.num_edges, g.n)

    @pytest.mark.parametrize("q,k", [(2, 2), (3, 3), (5, 2)])
    def test_bounded_intersection_checks(self, q, k):
        g = blow_up(gen_incidence_c4free(q), k)
        kk = max_nonadjacent_common(g)
        assert kk <= 2 * k
        cert = extract_clique(g, kk, seed=0)
        kept = cert.pruned_vertices
        alpha = len(cert.independent_set)
        union = sum(len(b) for b in cert.b_sets.values())
        assert union >= union_lower_bound(cert.min_degree, alpha, kk)
        if cert.min_degree**2 >= 2 * len(kept) * kk:
            assert alpha <= independence_upper_bound(g.n, cert.min_degree)


class TestThresholdHelpers:
    def test_edge_threshold_exact(self):
        assert meets_edge_threshold(512000, 1600, 1)
        assert not meets_edge_threshold(511999, 1600, 1)

    def test_guarantee_rounds_up(self):
        assert guaranteed_clique_size(639200, 1600) == 100
        assert guaranteed_clique_size(9, 2) == 2


class TestCorradi:
    @pytest.mark.parametrize("r,count,k,expected", [(2, 1, 0, 2), (3, 3, 1, Fraction(27, 5)), (5, 2, 5, 5)])
    def test_values(self, r, count, k, expected):
        assert corradi_bound(r, count, k) == expected

    @given(st.lists(st.frozensets(st.integers(0, 30), min_size=1), min_size=1, max_size=8))
    def test_is_a_lower_bound(self, sets):
        r = min(len(s) for s in sets)
        k = max((len(a & b) for a, b in itertools.combinations(sets, 2)), default=0)
        union = frozenset().union(*sets)
        assert len(union) >= corradi_bound(r, len(sets), k)


class TestRigidityCheck:
    def test_c4(self):
        rep = check_rigidity_necessary(cycle(4))
        assert not rep.degree2_independent
        assert rep.certified_not_rigid

    def test_k4(self):
        rep = check_rigidity_necessary(Graph.complete(4))
        assert rep.min_degree_ok and rep.degree2_independent and rep.average_degree_ok

    def test_t_of_triangle(self):
        g = gen_T(Graph.complete(3))
        assert (g.n, g.num_edges) == (12, 18)
        rep = check_rigidity_necessary(g)
        assert rep.min_degree_ok and rep.degree2_independent and rep.average_degree_ok

    def test_small(self):
        with pytest.raises(ValueError):
            check_rigidity_necessary(Graph.complete(3))


class TestReconstructDense:
    def test_complete(self):
        cfg = PointConfig(Space.LINE, tuple(Fraction(x) for x in (0, 3, 4, 9, 10, 15, 21, 22, 30, 31)))
        out = reconstruct_dense(measurements_from_pairs(cfg, itertools.combinations(range(1, 11), 2)))
        assert out.vertices == list(range(1, 11))

    def test_matching(self):
        cfg = PointConfig(Space.LINE, tuple(Fraction(x) for x in range(8)))
        out = reconstruct_dense(measurements_from_pairs(cfg, [(1, 2), (3, 4), (5, 6), (7, 8)]))
        assert len(out.vertices) == 2

    def test_planted_grid_256_is_sound(self):
        n = 256
        # even the complete measurement set is below 8 n sqrt(3n) here
        assert not meets_edge_threshold(n * (n - 1) // 2, n, 3)
        cfg = PointConfig(Space.LINE, tuple(Fraction(x) for x in range(1, n + 1)))
        m = sample_measurements(cfg, 0.3, seed=4)
        out = reconstruct_dense(m, Space.LINE, seed=0)
        truth = all_distances(cfg)
        assert len(out.vertices) >= 2
        assert all(truth[k] == v for k, v in out.distances.items())

    def test_planted_grid_meets_guarantee(self):
        n = 800
        cfg = PointConfig(Space.LINE, tuple(Fraction(x) for x in range(1, n + 1)))
        m = sample_measurements(cfg, 0.99, seed=4)
        assert meets_edge_threshold(len(m), n, 3)
        out = reconstruct_dense(m, Space.LINE, seed=0)
        assert len(out.vertices) >= guaranteed_clique_size(len(m), n)
        truth = all_distances(cfg)
        assert all(truth[k] == v for k, v in out.distances.items())

    def test_circle(self):
        cfg = PointConfig(Space.CIRCLE, tuple(Fraction(x, 41) for x in range(0, 41, 2)))
        out = reconstruct_dense(sample_measurements(cfg, 0.8, seed=2), Space.CIRCLE)
        truth = all_distances(cfg)
        assert len(out.vertices) >= 2
        assert all(truth[k] == v for k, v in out.distances.items())
