import math

import numpy as np
import pytest
from scipy import stats

from localhit.exact import hitting_time
from localhit.generators import complete_graph, generate_er, path_graph, star_graph
from localhit.graph import GraphError, from_edges, largest_component, stationary
from localhit.walks import (
    advance_ensemble,
    endpoint_distribution,
    new_ensemble,
    sample_endpoints,
    sample_hitting_times,
    step,
    walk_until_hit,
)


def test_step_on_edge():
    rng = np.random.default_rng(0)
    assert all(step(complete_graph(2), 0, rng) == 1 for _ in range(20))


def test_step_consumes_one_draw():
    G = generate_er(30, 0.3, seed=1)
    a, b = np.random.default_rng(7), np.random.default_rng(7)
    step(G, 3, a)
    b.random()
    assert a.random() == b.random()


def test_step_isolated_node():
    with pytest.raises(GraphError):
        step(from_edges(3, [(0, 1)]), 2, np.random.default_rng(0))


def test_step_triangle_chi_square():
    rng = np.random.default_rng(1)
    draws = [step(complete_graph(3), 0, rng) for _ in range(100_000)]
    counts = np.bincount(draws, minlength=3)
    assert counts[0] == 0
    assert stats.chisquare(counts[1:]).pvalue > 0.01


def test_step_star_center_frequencies():
    rng = np.random.default_rng(2)
    G = star_graph(8)
    counts = np.bincount([step(G, 0, rng) for _ in range(40_000)], minlength=9)
    assert counts[0] == 0
    assert stats.chisquare(counts[1:]).pvalue > 0.01


def test_one_step_kernel_matches_P():
    G = largest_component(generate_er(40, 0.15, seed=3))
    P = G.transition_matrix().toarray()
    for node in (0, 5, 17):
        ends = sample_endpoints(G, node, 1, 100_000, seed=node)
        counts = np.bincount(ends, minlength=G.n)
        support = P[node] > 0
        assert counts[~support].sum() == 0
        assert stats.chisquare(counts[support], 100_000 * P[node][support]).pvalue > 0.01


def test_walk_until_hit_trivial_and_cap():
    rng = np.random.default_rng(0)
    rec = walk_until_hit(path_graph(5), 2, 2, 10, rng)
    assert (rec.hit, rec.steps) == (True, 0)
    rec = walk_until_hit(path_graph(50), 0, 49, 5, rng)
    assert (rec.hit, rec.steps, rec.truncated_at) == (False, 5, 5)


@pytest.mark.parametrize("G,u,v,H,tol", [
    (complete_graph(3), 0, 1, 2.0, 0.05),
    (path_graph(3), 0, 2, 4.0, 0.1),
])
def test_walk_until_hit_mean(G, u, v, H, tol):
    rng = np.random.default_rng(3)
    steps = [walk_until_hit(G, u, v, 10**6, rng).steps for _ in range(100_000)]
    assert abs(np.mean(steps) - H) <= tol


def test_sample_hitting_times_mean_and_truncation():
    G = path_graph(3)
    t = sample_hitting_times(G, 0, 2, 200_000, 10**6, seed=1)
    assert t.min() >= 2 and abs(t.mean() - 4.0) < 0.03
    t = sample_hitting_times(path_graph(30), 0, 29, 100, 3, seed=1)
    assert np.all(t == -1)


def test_ensemble_empty_and_determinism():
    G = complete_graph(5)
    ens = new_ensemble(0, 4, seed=1).kill([0, 1, 2, 3])
    nxt = advance_ensemble(G, ens)
    assert nxt.t == 1 and np.array_equal(nxt.positions, ens.positions)
    a = new_ensemble(2, 1000, seed=9)
    b = new_ensemble(2, 1000, seed=9)
    for _ in range(5):
        a, b = advance_ensemble(G, a), advance_ensemble(G, b)
    assert np.array_equal(a.positions, b.positions)


def test_ensemble_one_step_on_triangle():
    ens = advance_ensemble(complete_graph(3), new_ensemble(0, 10_000, seed=4))
    c = np.bincount(ens.positions, minlength=3)
    assert c[0] == 0 and abs(c[1] - 5000) <= 3 * math.sqrt(10_000 * 0.25)


def test_ensemble_dead_never_move_and_occupancy():
    G = generate_er(30, 0.3, seed=5)
    G = largest_component(G)
    ens = new_ensemble(0, 300, seed=2)
    rng = np.random.default_rng(0)
    alive_before = ens.alive.sum()
    for _ in range(10):
        ens = ens.kill(rng.choice(ens.size, size=10))
        frozen = ens.positions[~ens.alive].copy()
        ens2 = advance_ensemble(G, ens)
        assert np.array_equal(ens2.positions[~ens.alive], frozen)
        assert ens2.alive.sum() <= alive_before
        assert np.all((ens2.positions >= 0) & (ens2.positions < G.n))
        alive_before = ens2.alive.sum()
        ens = ens2


def test_ensemble_walker_streams_are_independent_of_others():
    # Walker i's trajectory does not depend on which other walkers are alive.
    G = complete_graph(6)
    full = new_ensemble(0, 50, seed=3)
    part = full.kill(np.arange(1, 50, 2))
    for _ in range(4):
        full, part = advance_ensemble(G, full), advance_ensemble(G, part)
    assert np.array_equal(full.positions[::2], part.positions[::2])


def test_endpoint_distribution_examples():
    G = complete_graph(3)
    assert endpoint_distribution(G, 1, 0, 10).tolist() == [0.0, 1.0, 0.0]
    d = endpoint_distribution(G, 0, 1, 100_000, rng=1)
    assert np.abs(d - [0, 0.5, 0.5]).max() <= 0.01
    K10 = complete_graph(10)
    d = endpoint_distribution(K10, 0, 20, 100_000, rng=2)
    assert np.abs(d - stationary(K10).pi).sum() < 0.1


def test_sampled_hit_mean_matches_solver():
    G = largest_component(generate_er(25, 0.25, seed=8))
    h = hitting_time(G, 0, G.n - 1)
    t = sample_hitting_times(G, 0, G.n - 1, 200_000, 10**7, seed=3)
    assert abs(t.mean() - h) <= 4 * t.std() / math.sqrt(len(t))
