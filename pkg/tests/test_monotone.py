import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rigidline.core import Graph, make_rng, sample_pair_indices
from rigidline.monotone import (
    LabelledTree,
    all_far_pairs_connected,
    complete_binary_tree,
    count_monotone_paths,
    first_moment_bound,
    galton_watson_tree,
    has_monotone_path,
    labelled_tree_monotone_mean,
    monotone_reach,
    monotone_reach_count,
    pair_coverage,
    random_recursive_tree,
    star_tree,
    threshold_sweep,
)
from oracles import increasing_paths


@st.composite
def small_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    rng = random.Random(draw(st.integers(0, 2**32)))
    density = draw(st.floats(0, 1))
    return Graph.from_edges(n, [p for p in itertools.combinations(range(1, n + 1), 2) if rng.random() < density])


class TestMonotonePath:
    def test_path(self):
        assert has_monotone_path(Graph.from_edges(3, [(1, 2), (2, 3)]), 1, 3)

    def test_detour_breaks_monotonicity(self):
        assert not has_monotone_path(Graph.from_edges(3, [(1, 3), (2, 3)]), 1, 2)

    def test_complete(self):
        g = Graph.complete(7)
        assert all(has_monotone_path(g, i, j) for i, j in itertools.combinations_with_replacement(range(1, 8), 2))

    def test_source_after_target(self):
        with pytest.raises(ValueError):
            has_monotone_path(Graph.complete(3), 3, 1)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            has_monotone_path(Graph.complete(3), 1, 4)

    @given(small_graphs())
    def test_matches_enumeration(self, g):
        for i in g.vertices():
            for j in range(i, g.n + 1):
                paths = increasing_paths(g, i, j)
                assert count_monotone_paths(g, i, j) == paths
                assert has_monotone_path(g, i, j) == (paths > 0)

    @given(small_graphs(), st.integers(0, 2**32))
    def test_monotone_under_edge_addition(self, g, seed):
        rng = random.Random(seed)
        extra = [p for p in itertools.combinations(g.vertices(), 2) if rng.random() < 0.3]
        h = Graph.from_edges(g.n, list(g.edges()) + extra)
        for i, j in itertools.combinations(g.vertices(), 2):
            if has_monotone_path(g, i, j):
                assert has_monotone_path(h, i, j)


class TestReachCount:
    def test_edgeless(self):
        assert monotone_reach_count(Graph.from_edges(5, []), 2) == 1

    def test_complete(self):
        assert monotone_reach_count(Graph.complete(9), 4) == 6

    def test_path(self):
        assert monotone_reach_count(Graph.from_edges(4, [(1, 2), (2, 3), (3, 4)]), 1) == 4

    @given(small_graphs())
    def test_matches_enumeration(self, g):
        for s in g.vertices():
            assert monotone_reach_count(g, s) == sum(increasing_paths(g, s, t) > 0 for t in range(s, g.n + 1))


class TestFirstMoment:
    def test_zero(self):
        assert first_moment_bound(10, 0) == 0

    def test_two_vertices(self):
        assert first_moment_bound(2, Fraction(3, 7)) == Fraction(3, 7)

    def test_four(self):
        assert first_moment_bound(4, Fraction(1, 2)) == Fraction(9, 8)

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_equals_expected_path_count(self, n):
        # E[#paths] = sum over subsets of the n-2 middle vertices of p^(|S|+1)
        p = Fraction(1, 3)
        direct = sum(math.comb(n - 2, i) * p ** (i + 1) for i in range(n - 1))
        assert first_moment_bound(n, p) == direct

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            first_moment_bound(5, Fraction(3, 2))


class TestSweep:
    def test_zero_probability(self):
        sweep = threshold_sweep(50, [-1.0], 20, seed=0)
        assert sweep.fraction(-1.0) == 0

    def test_clipped(self, caplog):
        sweep = threshold_sweep(10, [10.0], 3, seed=0)
        assert sweep.p(10.0) == 1.0
        assert sweep.fraction(10.0) == 1
        assert "clipped" in caplog.text

    def test_reproducible_and_schedule_free(self):
        a = threshold_sweep(300, [-0.2, 0.3], 12, seed=4, workers=1)
        b = threshold_sweep(300, [-0.2, 0.3], 12, seed=4, workers=2)
        assert a.successes == b.successes

    def test_non_decreasing(self):
        eps = [-0.5, -0.25, 0.0, 0.25, 0.5]
        trials = 60
        sweep = threshold_sweep(2000, eps, trials, seed=2)
        fr = [sweep.fraction(e) for e in eps]
        assert all(b >= a - 2 / math.sqrt(trials) for a, b in zip(fr, fr[1:]))

    @pytest.mark.parametrize("n,trials", [(5, 3), (50, 0)])
    def test_preconditions(self, n, trials):
        with pytest.raises(ValueError):
            threshold_sweep(n, [0.0], trials)


class TestCoverage:
    def test_far_pairs_matches_single_source(self):
        rng = make_rng(3)
        n = 60
        lo, hi = sample_pair_indices(n, 0.15, rng)
        g = Graph.from_edges(n, zip(lo.tolist(), hi.tolist()))
        gap = 8
        expected = all(monotone_reach(g, i)[j] for i in range(1, n + 1) for j in range(i + gap, n + 1))
        assert all_far_pairs_connected(n, lo, hi, gap) == expected

    def test_full_probability(self):
        assert pair_coverage(40, 1e6, 3) == 1

    def test_supercritical(self):
        assert pair_coverage(500, 20, 50, seed=0) >= Fraction(95, 100)

    def test_subcritical(self):
        assert pair_coverage(500, 0.1, 50, seed=0) <= Fraction(5, 100)

    def test_rejects_bad_c(self):
        with pytest.raises(ValueError):
            pair_coverage(40, 0, 3)


class TestLabelledTree:
    def test_single_vertex(self):
        est = labelled_tree_monotone_mean(LabelledTree((-1,)), 100, seed=0)
        assert est.exact == 1 and est.mean == 1

    def test_star(self):
        est = labelled_tree_monotone_mean(star_tree(3), 500, seed=0)
        assert est.exact == 4 and est.mean == 4 and est.stderr == 0

    def test_binary_depth_two(self):
        tree = complete_binary_tree(2)
        assert tree.level_sizes == [1, 2, 4]
        est = labelled_tree_monotone_mean(tree, 10**5, seed=1)
        assert est.exact == 5
        assert abs(est.z_score) <= 3

    def test_path_tree(self):
        # only the identity-like labelling counts the whole path: sum 1/i!
        tree = LabelledTree((-1, 0, 1, 2))
        assert tree.expected_monotone() == 1 + 1 + Fraction(1, 2) + Fraction(1, 6)

    def test_exact_by_enumeration(self):
        tree = LabelledTree((-1, 0, 0, 1, 1, 2))
        total = 0
        perms = list(itertools.permutations(range(2, 7)))
        for perm in perms:
            label = (1,) + perm
            good = [True] * 6
            for v in range(1, 6):
                u = tree.parent[v]
                good[v] = good[u] and label[v] > label[u]
            total += sum(good)
        assert tree.expected_monotone() == Fraction(total, len(perms))

    def test_invalid(self):
        with pytest.raises(ValueError):
            LabelledTree((0, -1))

    @pytest.mark.parametrize("seed", range(10))
    def test_random_trees_converge(self, seed):
        tree = random_recursive_tree(random.Random(seed).randint(2, 40), seed=seed)
        est = labelled_tree_monotone_mean(tree, 10**5, seed=seed)
        assert abs(est.z_score) <= 4

    def test_branching_process_total_expectation(self):
        mu, depth, trees = 1.5, 6, 3000
        values = [float(galton_watson_tree(mu, depth, seed=s).expected_monotone()) for s in range(trees)]
        target = sum(mu**i / math.factorial(i) for i in range(depth + 1))
        se = np.std(values, ddof=1) / math.sqrt(trees)
        assert abs(np.mean(values) - target) <= 4 * se
