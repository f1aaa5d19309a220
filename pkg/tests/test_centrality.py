"""centrality module: exact Brandes, pivot sampling, argmax selection, persistence."""

import numpy as np
import pytest

from wikinav.centrality import (
    CentralityScores,
    _accumulate_from_sources,
    betweenness_exact,
    betweenness_sampled,
    load_scores,
    save_scores,
    top_neighbor_by_centrality,
)

from helpers import brute_betweenness, er_digraph, make_graph


class TestExact:
    def test_chain_single_mediated_pair(self):
        g = make_graph([(0, 1), (1, 2)], n=3)
        assert betweenness_exact(g).scores.tolist() == [0.0, 1.0, 0.0]

    def test_three_cycle_symmetry(self):
        g = make_graph([(0, 1), (1, 2), (2, 0)], n=3)
        assert betweenness_exact(g).scores.tolist() == [1.0, 1.0, 1.0]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_enumeration_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 13))
        edges = er_digraph(rng, n, 0.3)
        g = make_graph(edges, n=n)
        expected = brute_betweenness(n, edges)
        np.testing.assert_allclose(betweenness_exact(g).scores, expected, atol=1e-9)

    def test_path_graph_interior_scores_match_oracle(self):
        n = 7
        edges = [(i, i + 1) for i in range(n - 1)]
        g = make_graph(edges, n=n)
        np.testing.assert_allclose(
            betweenness_exact(g).scores, brute_betweenness(n, edges), atol=1e-12
        )


class TestSampled:
    def test_full_pivot_degeneracy(self):
        rng = np.random.default_rng(2)
        g = make_graph(er_digraph(rng, 40, 0.1), n=40)
        exact = betweenness_exact(g).scores
        sampled = betweenness_sampled(g, pivot_count=40, seed=123).scores
        np.testing.assert_allclose(sampled, exact, atol=1e-9)

    def test_single_source_dependency_scaled(self):
        # hand-run accumulation from source 0 on the chain 0->1->2:
        # delta(1) = 1, scaled by node_count/pivot_count = 3
        g = make_graph([(0, 1), (1, 2)], n=3)
        scores = _accumulate_from_sources(g, [0], scale=3.0)
        assert scores.tolist() == [0.0, 3.0, 0.0]

    def test_deterministic_for_fixed_inputs(self):
        rng = np.random.default_rng(3)
        g = make_graph(er_digraph(rng, 60, 0.08), n=60)
        a = betweenness_sampled(g, 16, seed=7)
        b = betweenness_sampled(g, 16, seed=7)
        assert np.array_equal(a.scores, b.scores)
        c = betweenness_sampled(g, 16, seed=8)
        assert not np.array_equal(a.scores, c.scores)

    def test_pivot_count_bounds(self):
        g = make_graph([(0, 1), (1, 0)], n=2)
        with pytest.raises(ValueError):
            betweenness_sampled(g, 0, seed=1)
        with pytest.raises(ValueError):
            betweenness_sampled(g, 3, seed=1)

    def test_rank_correlation_with_exact(self):
        from scipy.stats import spearmanr

        rng = np.random.default_rng(10)
        g = make_graph(er_digraph(rng, 200, 0.02), n=200)
        exact = betweenness_exact(g).scores
        correlations = []
        for seed in range(10):
            sampled = betweenness_sampled(g, 64, seed=seed).scores
            rho, _ = spearmanr(exact, sampled)
            correlations.append(rho)
        assert float(np.mean(correlations)) >= 0.8

    def test_unbiased_in_expectation(self):
        rng = np.random.default_rng(11)
        g = make_graph(er_digraph(rng, 50, 0.15), n=50)
        exact = betweenness_exact(g).scores
        total = np.zeros(50)
        n_seeds = 200
        for seed in range(n_seeds):
            total += betweenness_sampled(g, 40, seed=seed).scores
        mean = total / n_seeds
        nonzero = exact > 0
        rel_err = np.abs(mean[nonzero] - exact[nonzero]) / exact[nonzero]
        assert float(rel_err.max()) < 0.05


class TestTopNeighbor:
    def build(self):
        g = make_graph([(0, 3), (0, 7), (3, 0), (7, 0)], n=8)
        scores = np.zeros(8)
        scores[3], scores[7] = 0.5, 0.9
        return g, CentralityScores(scores, "exact")

    def test_direct_argmax(self):
        g, scores = self.build()
        assert top_neighbor_by_centrality(g, scores, 0, set()) == 7

    def test_tie_breaks_to_lowest_id(self):
        g, _ = self.build()
        tied = np.zeros(8)
        tied[3] = tied[7] = 0.5
        assert top_neighbor_by_centrality(g, CentralityScores(tied, "exact"), 0, set()) == 3

    def test_exclusion_and_empty(self):
        g, scores = self.build()
        assert top_neighbor_by_centrality(g, scores, 0, {7}) == 3
        assert top_neighbor_by_centrality(g, scores, 0, {3, 7}) is None

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_linear_scan(self, seed):
        rng = np.random.default_rng(500 + seed)
        g = make_graph(er_digraph(rng, 30, 0.2), n=30)
        values = rng.random(30)
        scores = CentralityScores(values, "exact")
        for v in range(30):
            nbrs = g.out_neighbors(v).tolist()
            excluded = set(rng.choice(30, size=5).tolist())
            got = top_neighbor_by_centrality(g, scores, v, excluded)
            remaining = [w for w in nbrs if w not in excluded]
            if not remaining:
                assert got is None
            else:
                best = max(remaining, key=lambda w: (values[w], -w))
                assert got == best

    def test_scale_invariance_of_argmax(self):
        rng = np.random.default_rng(33)
        g = make_graph(er_digraph(rng, 25, 0.2), n=25)
        values = rng.random(25)
        for factor in (0.001, 1.0, 4096.0):
            scaled = CentralityScores(values * factor, "exact")
            base = CentralityScores(values, "exact")
            for v in range(25):
                assert (top_neighbor_by_centrality(g, base, v, set())
                        == top_neighbor_by_centrality(g, scaled, v, set()))


class TestPersistence:
    def test_round_trip_exact(self, tmp_path):
        scores = CentralityScores(np.array([0.0, 1.5, 2.25]), "exact")
        path = tmp_path / "scores.bin"
        save_scores(scores, path)
        loaded = load_scores(path)
        assert loaded.method == "exact"
        assert np.array_equal(loaded.scores, scores.scores)

    def test_round_trip_sampled_metadata(self, tmp_path):
        scores = CentralityScores(np.array([3.0, 0.0]), "sampled", pivot_count=7, seed=42)
        path = tmp_path / "scores.bin"
        save_scores(scores, path)
        loaded = load_scores(path)
        assert (loaded.method, loaded.pivot_count, loaded.seed) == ("sampled", 7, 42)

    def test_byte_fixpoint(self, tmp_path):
        rng = np.random.default_rng(6)
        scores = CentralityScores(rng.random(100) * 10, "sampled", pivot_count=64, seed=1)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save_scores(scores, p1)
        save_scores(load_scores(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_magic_and_truncation(self, tmp_path):
        from wikinav.errors import FormatError

        path = tmp_path / "scores.bin"
        path.write_bytes(b"XXXX")
        with pytest.raises(FormatError):
            load_scores(path)
        scores = CentralityScores(np.array([1.0]), "exact")
        save_scores(scores, path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError):
            load_scores(path)


def test_scores_validation():
    with pytest.raises(ValueError):
        CentralityScores(np.array([-1.0]), "exact")
    with pytest.raises(ValueError):
        CentralityScores(np.array([np.inf]), "exact")
    with pytest.raises(ValueError):
        CentralityScores(np.array([1.0]), "bogus")
