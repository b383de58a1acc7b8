import math

import numpy as np
import pytest

from localhit.generators import complete_graph, generate_er, star_graph
from localhit.graph import largest_component
from localhit.pairs import STRATEGIES, PairSampler, pair_weights, sample_pairs


def _center_rate(strategy, count=1000):
    pairs = sample_pairs(star_graph(9), PairSampler(strategy, seed=11), count)
    return np.mean([0 in p for p in pairs])


def test_uniform_on_triangle():
    pairs = sample_pairs(complete_graph(3), PairSampler("uniform", seed=0), 3)
    assert len(pairs) == 3 and all(u != v for u, v in pairs)


def test_degree_prop_star():
    # w(center) = 1/2. Rejecting u == v leaves Pr[center in pair] = 2w(1-w)/(1 - sum w^2) = 9/13.
    p = 2 * 0.5 * 0.5 / (1 - 0.25 - 9 / 324)
    assert p == pytest.approx(162 / 234)
    rate = _center_rate("degree-prop")
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / 1000)


def test_degree_invprop_star():
    assert _center_rate("degree-invprop") <= 0.25


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_pairs_distinct_and_deterministic(strategy):
    G = largest_component(generate_er(80, 0.1, seed=1))
    a = sample_pairs(G, PairSampler(strategy, seed=5), 200)
    assert a == sample_pairs(G, PairSampler(strategy, seed=5), 200)
    assert all(u != v for u, v in a)
    assert np.all(pair_weights(G, strategy) > 0)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        PairSampler("degree")
