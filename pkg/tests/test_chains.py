"""Markov kernels, samplers, and exact small-space diagnostics."""

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from mtshapes import (
    ChainSpec,
    ChainState,
    TreeShape,
    covers,
    deg_minus,
    deg_plus,
    exact_bottleneck,
    exact_gap,
    exact_kernel,
    generate_all,
    max_degree,
    mixing_bounds,
    refinements_below,
    run_chains,
    semi_random_fmatrix,
    semi_random_init,
    stationary_distribution,
    step_mh_uniform,
    step_random_walk,
    step_symmetric,
    uniform_neighbor,
    validate_fmatrix,
)
from mtshapes.chains import neighbor_by_rank, random_below


def rng_from(seed):
    return np.random.Generator(np.random.PCG64(seed))


class TestRandomBelow:
    def test_range_and_determinism(self):
        r1 = [random_below(rng_from(3), 10) for _ in range(50)]
        r2 = [random_below(rng_from(3), 10) for _ in range(50)]
        assert r1 == r2
        assert all(0 <= x < 10 for x in r1)

    def test_big_integers(self):
        n = 3 * 2**200 + 7
        xs = [random_below(rng_from(i), n) for i in range(40)]
        assert all(0 <= x < n for x in xs)
        assert any(x > 2**150 for x in xs)

    def test_uniform_ish(self):
        rng = rng_from(0)
        counts = Counter(random_below(rng, 3) for _ in range(30000))
        for v in counts.values():
            assert abs(v - 10000) < 400

    def test_domain(self):
        with pytest.raises(ValueError):
            random_below(rng_from(0), 0)


class TestNeighborEnumeration:
    @pytest.mark.parametrize("n", range(3, 7))
    def test_ranks_cover_all_neighbors_once(self, n):
        for s in generate_all(n):
            expect = covers(s) | refinements_below(s)
            got = [
                neighbor_by_rank(s, r)
                for r in range(deg_plus(s) + deg_minus(s))
            ]
            assert len(got) == len(set(got))
            assert set(got) == expect

    def test_rank_out_of_range(self):
        s = TreeShape((0, 1), (2, 2))
        with pytest.raises(ValueError):
            neighbor_by_rank(s, deg_plus(s) + deg_minus(s))

    def test_uniform_neighbor_returns_degree(self):
        s = TreeShape((0, 1), (2, 2))
        nbr, deg = uniform_neighbor(rng_from(1), s)
        assert deg == 3
        assert nbr in covers(s) | refinements_below(s)


class TestSteps:
    def test_symmetric_empirical_matches_kernel(self, hasse):
        g = hasse[5]
        p = exact_kernel(g, "symmetric")
        m = max_degree(5)
        rng = rng_from(7)
        state = ChainState(g.vertices[0])
        counts = np.zeros((g.n_vertices, g.n_vertices))
        prev = 0
        steps = 200_000
        for _ in range(steps):
            step_symmetric(state, rng, m)
            cur = g.index[state.shape]
            counts[prev, cur] += 1
            prev = cur
        emp = counts / np.maximum(counts.sum(axis=1, keepdims=True), 1)
        # every row is visited thousands of times; 1.5e-2 is ~5 sigma
        assert np.abs(emp - p).max() < 1.5e-2

    def test_symmetric_self_loop_masses(self, hasse):
        g = hasse[5]
        p = exact_kernel(g, "symmetric")
        m = max_degree(5)
        for i, v in enumerate(g.vertices):
            deg = deg_plus(v) + deg_minus(v)
            assert p[i, i] == pytest.approx(1 - deg / m)
        # the maximum-degree shape never holds; a degree-1 shape almost always does
        from mtshapes import max_degree_tree

        top, m5 = max_degree_tree(5)
        assert p[g.index[top], g.index[top]] == pytest.approx(0)
        deg1 = [v for v in g.vertices if deg_plus(v) + deg_minus(v) == 1]
        assert p[g.index[deg1[0]], g.index[deg1[0]]] == pytest.approx(1 - 1 / m5)

    def test_random_walk_reflects(self):
        star = TreeShape((0,), (6,))
        binary = next(iter(generate_all(6, 5)))
        rng = rng_from(2)
        for _ in range(25):
            assert step_random_walk(ChainState(star), rng).shape.n_internal == 2
            assert step_random_walk(ChainState(binary), rng).shape.n_internal == 4

    def test_random_walk_stationary_proportional_to_degree(self, hasse):
        g = hasse[5]
        pi = stationary_distribution(g, "random-walk")
        rng = rng_from(11)
        state = ChainState(g.vertices[0])
        visits = np.zeros(g.n_vertices)
        for _ in range(200_000):
            step_random_walk(state, rng)
            visits[g.index[state.shape]] += 1
        assert np.abs(visits / visits.sum() - pi).max() < 5e-3

    def test_mh_uniform_close_to_uniform(self, hasse):
        g = hasse[5]
        rng = rng_from(3)
        state = ChainState(g.vertices[0])
        visits = Counter()
        steps = 200_000
        for _ in range(steps):
            step_mh_uniform(state, rng)
            visits[state.shape] += 1
        target = 1 / g.n_vertices
        se = math.sqrt(target * (1 - target) / steps)
        for v in g.vertices:
            assert abs(visits[v] / steps - target) < 6 * se
        assert 0 < state.acceptance_rate < 1
        assert state.proposed == steps

    def test_mh_acceptance_rule(self):
        # from the 4-tip star (degree 2): neighbor "0,1|1,3" also has
        # degree 2 (ratio 1, always accepted), neighbor "0,1|2,2" has
        # degree 3 (accepted w.p. 2/3); staying thus has mass 1/6
        star = TreeShape((0,), (4,))
        rng = rng_from(0)
        landed = Counter(
            step_mh_uniform(ChainState(star), rng).shape for _ in range(9000)
        )
        assert landed[TreeShape((0, 1), (1, 3))] / 9000 == pytest.approx(1 / 2, abs=0.02)
        assert landed[TreeShape((0, 1), (2, 2))] / 9000 == pytest.approx(1 / 3, abs=0.02)
        assert landed[star] / 9000 == pytest.approx(1 / 6, abs=0.02)
        # from the degree-1 binary the unique proposal has degree 3:
        # moves happen with probability 1/3, never deterministically
        s = TreeShape((0, 1, 1), (0, 2, 2))
        moved = sum(
            step_mh_uniform(ChainState(s), rng).shape != s for _ in range(900)
        )
        assert moved / 900 == pytest.approx(1 / 3, abs=0.06)


class TestSemiRandom:
    def test_validity_bulk(self):
        rng = rng_from(8)
        for _ in range(2000):
            n = int(rng.integers(2, 41))
            k = int(rng.integers(1, n))
            f = semi_random_fmatrix(n, k, rng)
            assert validate_fmatrix(f, n=n) is None

    def test_star_and_forced_binary(self):
        rng = rng_from(0)
        assert semi_random_init(6, 1, rng) == TreeShape((0,), (6,))
        assert semi_random_init(4, 3, rng) == TreeShape((0, 1, 1), (0, 2, 2))

    def test_exact_internal_count(self):
        rng = rng_from(4)
        for k in range(1, 8):
            s = semi_random_init(8, k, rng)
            assert s.n_internal == k and s.n_tips == 8

    def test_domain(self):
        rng = rng_from(0)
        with pytest.raises(ValueError):
            semi_random_fmatrix(5, 5, rng)
        with pytest.raises(ValueError):
            semi_random_fmatrix(1, 1, rng)


class TestRunChains:
    def test_deterministic_and_thread_invariant(self):
        kw = dict(n_chains=4, n_steps=150, seed=99)
        a = run_chains(7, "mh-uniform", **kw)
        b = run_chains(7, "mh-uniform", **kw)
        c = run_chains(7, "mh-uniform", threads=4, **kw)
        assert a.samples == b.samples == c.samples
        assert a.acceptance_rates == c.acceptance_rates

    def test_pooled_size_with_thinning(self):
        r = run_chains(6, "random-walk", n_chains=3, n_steps=100, seed=1, thin=10)
        assert [len(s) for s in r.samples] == [10, 10, 10]
        assert len(r.pooled()) == 30

    def test_semi_random_init_cycles_k(self):
        r = run_chains(6, "random-walk", n_chains=5, n_steps=1, seed=5)
        assert len(r.samples) == 5

    def test_explicit_init(self):
        star = TreeShape((0,), (6,))
        r = run_chains(6, "symmetric", n_chains=2, n_steps=5, seed=0, init=star)
        assert all(len(chain) == 5 for chain in r.samples)
        bad = TreeShape((0,), (5,))
        with pytest.raises(ValueError):
            run_chains(6, "symmetric", n_chains=1, n_steps=1, seed=0, init=bad)

    def test_acceptance_rates_only_for_mh(self):
        r = run_chains(6, "random-walk", n_chains=2, n_steps=10, seed=3)
        assert all(math.isnan(x) for x in r.acceptance_rates)
        r = run_chains(6, "mh-uniform", n_chains=2, n_steps=50, seed=3)
        assert all(0 <= x <= 1 for x in r.acceptance_rates)

    def test_bad_sampler(self):
        with pytest.raises(ValueError):
            run_chains(6, "bogus", n_chains=1, n_steps=1, seed=0)


class TestExactKernels:
    @pytest.mark.parametrize("n", [4, 5])
    @pytest.mark.parametrize("kind", ["symmetric", "random-walk"])
    def test_stochastic_and_stationary(self, n, kind, hasse):
        g = hasse[n]
        p = exact_kernel(g, kind)
        pi = stationary_distribution(g, kind)
        assert np.allclose(p.sum(axis=1), 1, atol=1e-14)
        assert np.abs(pi @ p - pi).max() < 1e-12

    @pytest.mark.parametrize("n", [4, 5])
    def test_symmetric_kernel_is_symmetric_doubly_stochastic(self, n, hasse):
        p = exact_kernel(hasse[n], "symmetric")
        assert np.array_equal(p, p.T)
        assert np.allclose(p.sum(axis=0), 1, atol=1e-14)

    @pytest.mark.parametrize("n", [4, 5])
    def test_random_walk_detailed_balance(self, n, hasse):
        g = hasse[n]
        p = exact_kernel(g, "random-walk")
        pi = stationary_distribution(g, "random-walk")
        q = pi[:, None] * p
        assert np.abs(q - q.T).max() < 1e-15

    @pytest.mark.parametrize("kind", ["symmetric", "random-walk"])
    def test_irreducible(self, kind, hasse):
        g = hasse[5]
        p = exact_kernel(g, kind)
        reach = np.linalg.matrix_power(p + np.eye(g.n_vertices), g.n_vertices)
        assert np.all(reach > 0)

    def test_single_shape_space_rejected(self, hasse):
        with pytest.raises(ValueError, match="isolated"):
            exact_kernel(hasse[2], "random-walk")

    def test_lazy_halves_off_diagonal(self, hasse):
        g = hasse[4]
        p = exact_kernel(g, "random-walk")
        lazy = exact_kernel(g, "random-walk", lazy=True)
        assert np.allclose(lazy, (np.eye(g.n_vertices) + p) / 2)

    def test_chain_spec_validation(self):
        with pytest.raises(ValueError):
            ChainSpec("bogus", 5)
        assert ChainSpec("symmetric", 5).lazy is False

    def test_chain_spec_accepted_everywhere(self, hasse):
        g = hasse[4]
        spec = ChainSpec("random-walk", 4, lazy=True)
        p = exact_kernel(g, spec)
        assert np.allclose(p, exact_kernel(g, "random-walk", lazy=True))
        assert exact_gap(g, spec).gamma == exact_gap(g, "random-walk", lazy=True).gamma
        assert exact_bottleneck(g, spec).phi_star == Fraction(1, 2)
        pi = stationary_distribution(g, ChainSpec("symmetric", 4))
        assert np.allclose(pi, 1 / g.n_vertices)


class TestBottleneck:
    # Exhaustively computed minima.  The singleton containing the unique
    # degree-1 binary shape attains 1/M_N (symmetric) and 1 (random
    # walk), but larger subsets do better from N = 4 (walk) / 5 (both).
    def test_exact_values(self, hasse):
        assert exact_bottleneck(hasse[4], "symmetric").phi_star == Fraction(1, 3)
        assert exact_bottleneck(hasse[4], "random-walk").phi_star == Fraction(1, 2)
        assert exact_bottleneck(hasse[5], "symmetric").phi_star == Fraction(4, 35)
        assert exact_bottleneck(hasse[5], "random-walk").phi_star == Fraction(1, 5)

    def test_n4_symmetric_minimizers_include_degree_one_singleton(self, hasse):
        g = hasse[4]
        res = exact_bottleneck(g, "symmetric")
        deg1 = [v for v in g.vertices if deg_plus(v) + deg_minus(v) == 1]
        assert (deg1[0],) in [tuple(m) for m in res.minimizers]

    @pytest.mark.parametrize("n", [4, 5])
    def test_degree_one_singleton_ratios(self, n, hasse):
        # the ratio of the singleton cut itself, for both kernels
        g = hasse[n]
        deg1 = [
            i
            for i, v in enumerate(g.vertices)
            if len(g.up[i]) + len(g.down[i]) == 1
        ]
        assert len(deg1) == 1
        m_n = max_degree(n)
        assert Fraction(1, m_n * 1) <= Fraction(1, 2)  # eligible singleton
        # symmetric: cut = 1 edge, pi uniform -> 1 / M_N; walk: cut/vol = 1
        assert exact_bottleneck(g, "symmetric").phi_star <= Fraction(1, m_n)
        assert exact_bottleneck(g, "random-walk").phi_star <= 1

    def test_refuses_large_spaces(self, hasse):
        with pytest.raises(ValueError):
            exact_bottleneck(hasse[6], "symmetric")


class TestGapAndBounds:
    @pytest.mark.parametrize("n", [4, 5])
    @pytest.mark.parametrize("kind", ["symmetric", "random-walk"])
    def test_cheeger_sandwich_lazy(self, n, kind, hasse):
        g = hasse[n]
        phi_lazy = exact_bottleneck(g, kind).phi_star / 2
        gap = exact_gap(g, kind, lazy=True)
        assert float(phi_lazy**2 / 2) <= gap.gamma + 1e-12
        assert gap.gamma <= float(2 * phi_lazy) + 1e-12

    @pytest.mark.parametrize("kind", ["symmetric", "random-walk"])
    def test_lazy_eigenvalues_nonnegative(self, kind, hasse):
        gap = exact_gap(hasse[5], kind, lazy=True)
        assert gap.eigenvalues.min() >= -1e-12
        assert gap.gamma == pytest.approx(gap.gamma_star)

    def test_nonlazy_walk_is_periodic(self, hasse):
        # the covering graph is bipartite by K, so -1 is an eigenvalue
        gap = exact_gap(hasse[5], "random-walk")
        assert gap.eigenvalues.min() == pytest.approx(-1)
        assert gap.gamma_star == pytest.approx(0, abs=1e-10)
        assert gap.t_rel == math.inf

    def test_bound_values(self):
        b5 = mixing_bounds(5)
        assert b5.symmetric_lower == 1.25
        assert b5.m_n == 5 and b5.g_n == 15
        assert mixing_bounds(10).random_walk_lower == 7

    @pytest.mark.parametrize("n", range(4, 21))
    def test_lower_below_upper(self, n):
        b = mixing_bounds(n)
        assert b.symmetric_lower <= b.symmetric_lazy_upper
        assert b.random_walk_lower <= b.random_walk_lazy_upper

    def test_include_exact(self):
        b = mixing_bounds(5, include_exact=True)
        assert b.exact["diameter"] == 5
        sym = b.exact["symmetric"]
        assert sym["phi_star"] == pytest.approx(4 / 35)
        assert sym["lazy_gamma"] > 0
