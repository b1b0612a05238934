from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optce.aggregative import AggregativeGame, CongestionPayoff, LinearPayoff
from optce.errors import CapacityError
from optce.game import welfare
from optce.generators import aggregative_congestion, aggregative_linear, random_explicit
from optce.lp import optimal_equilibrium
from optce.mwmp import (AggregativeDPOracle, BruteForceOracle, aggregative_dp_mwmp,
                        brute_force_mwmp, delta_for_tolerance, discretize_aggregative,
                        lipschitz_budget, make_oracle, modified_utility, modified_welfare,
                        modified_welfare_table, on_grid)
from optce.regret import RegretSpace, ScalingVector, build_regret_vector


def yvec(game, values, mode="ce"):
    return ScalingVector(RegretSpace.parse(game.action_counts, mode), np.asarray(values))


def welfare_only(game, mode="ce"):
    space = RegretSpace.parse(game.action_counts, mode)
    v = space.zeros()
    v[space.n_deviation:] = 1
    return ScalingVector(space, v)


def test_welfare_weight_only():
    g = random_explicit(3, 2, 1)
    y = welfare_only(g)
    for a in g.profiles():
        assert modified_welfare(g, y, a) == pytest.approx(welfare(g, a))
    a, v = brute_force_mwmp(g, y)
    assert v == pytest.approx(max(welfare(g, b) for b in g.profiles()))


def test_zero_y():
    g = random_explicit(2, 3, 1)
    y = yvec(g, np.zeros(RegretSpace(g.action_counts).dim))
    assert modified_welfare(g, y, (1, 2)) == 0
    assert brute_force_mwmp(g, y) == ((0, 0), 0)


def test_modified_utility_formula():
    g = random_explicit(2, 3, 5)
    space = RegretSpace(g.action_counts)
    rng = np.random.default_rng(0)
    y = ScalingVector(space, rng.random(space.dim))
    a = (1, 2)
    p = 0
    expect = y.values[-1] * g.utility(p, a)
    for j in range(3):
        if j != a[p]:
            expect += y.values[space.index(p, a[p], j)] * (g.utility(p, a) - g.utility(p, (j, 2)))
    assert modified_utility(g, y, a, p) == pytest.approx(expect)


@pytest.mark.parametrize("mode", ["ce", "cce", "egal", "pareto:0"])
def test_table_matches_pointwise(mode):
    g = random_explicit(3, 2, 6)
    space = RegretSpace.parse(g.action_counts, mode)
    y = ScalingVector(space, np.random.default_rng(1).random(space.dim) * 3)
    table = modified_welfare_table(g, y)
    for a in g.profiles():
        assert table[a] == pytest.approx(modified_welfare(g, y, a))


def test_brute_force_matches_enumeration():
    rng = np.random.default_rng(2)
    for seed in range(20):
        g = random_explicit(3, 2, seed)
        space = RegretSpace(g.action_counts)
        y = ScalingVector(space, rng.random(space.dim) * rng.integers(1, 4))
        vals = {a: modified_welfare(g, y, a) for a in g.profiles()}
        best = max(vals.values())
        first = min(a for a, v in vals.items() if v == best)
        a, v = brute_force_mwmp(g, y)
        assert v == pytest.approx(best)
        assert vals[a] == pytest.approx(best)
        assert a == first or vals[first] - vals[a] < 1e-12


def test_brute_force_cap():
    g = random_explicit(3, 2, 0)
    with pytest.raises(CapacityError):
        brute_force_mwmp(g, welfare_only(g), cap=4)
    with pytest.raises(CapacityError):
        BruteForceOracle(g, cap=4)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), mode=st.sampled_from(["ce", "cce", "egal", "pareto:1"]),
       target=st.floats(0, 3))
def test_identity(seed, mode, target):
    rng = np.random.default_rng(seed)
    g = random_explicit(3, 2, seed)
    space = RegretSpace.parse(g.action_counts, mode)
    y = ScalingVector(space, rng.random(space.dim) * 3)
    a = tuple(int(v) for v in rng.integers(0, 2, size=3))
    r = build_regret_vector(g, a, target, space)
    lhs = modified_welfare(g, y, a)
    assert lhs == pytest.approx(space.objective_mass(y.values) * target - y.values @ r.values, abs=1e-9)


def test_blackwell_feasibility_small():
    rng = np.random.default_rng(4)
    for seed in range(15):
        g = random_explicit(2, 3, seed)
        w_star = float(optimal_equilibrium(g).objective_value)
        space = RegretSpace(g.action_counts)
        y = ScalingVector(space, rng.random(space.dim) * 2)
        _, v = brute_force_mwmp(g, y)
        assert v >= y.y_d * w_star - 1e-9


def one_dim(values):
    return AggregativeGame([[(v,) for v in values]], LinearPayoff([[0.5] * len(values)],
                                                                  [[[0.0]] * len(values)]), 2, 1)


def test_rounding_rule():
    g = discretize_aggregative(one_dim([0.74, 0.76, 0.25, -0.25]), 0.5)
    assert [v[0] for v in g.f[0]] == [0.5, 1.0, 0.5, -0.5]
    assert g.lattice[1][0] == [(1,), (2,), (1,), (-1,)]


def test_discretization_moves_aggregates_little():
    for seed in range(10):
        g = aggregative_linear(3, 3, 2, seed)
        delta = F(1, 7)
        d = discretize_aggregative(g, delta)
        for a in g.profiles():
            gap = max(abs(x - z) for x, z in zip(g.aggregator_value(a), d.aggregator_value(a)))
            assert gap <= 3 * delta / 2


def test_dp_toy_congestion_matches_brute():
    g = aggregative_congestion(2, 2, 1, seed=0)
    y = welfare_only(g)
    d = discretize_aggregative(g, 1)
    a, v = aggregative_dp_mwmp(g, y, 1)
    b, w = brute_force_mwmp(d, y)
    assert (a, v) == (b, w)


def test_dp_single_player():
    pay = LinearPayoff([[F(1, 5), F(3, 5), F(2, 5)]], [[[F(1, 2)], [F(-1, 2)], [F(0)]]])
    g = AggregativeGame([[(F(0),), (F(1, 2),), (F(-1, 3),)]], pay, 1, 1)
    space = RegretSpace(g.action_counts)
    y = ScalingVector(space, np.array([F(1, 3)] * space.dim, dtype=object))
    delta = F(1, 6)
    a, v = aggregative_dp_mwmp(g, y, delta)
    d = discretize_aggregative(g, delta)
    vals = [modified_welfare(d, y, (i,)) for i in range(3)]
    assert v == max(vals) and a == (vals.index(max(vals)),)


def exact_y(game, rng, scale=None, mode="ce"):
    space = RegretSpace.parse(game.action_counts, mode)
    scale = scale or game.n
    vals = np.empty(space.dim, dtype=object)
    vals[:] = [F(int(rng.integers(0, 8 * scale + 1)), 8) for _ in range(space.dim)]
    return ScalingVector(space, vals)


@pytest.mark.parametrize("mode", ["ce", "cce", "egal", "pareto:0"])
def test_dp_equals_brute_force_exactly(mode):
    rng = np.random.default_rng(9)
    for seed in range(8):
        n, m, k = int(rng.integers(1, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 3))
        g = aggregative_linear(n, m, k, seed)
        y = exact_y(g, rng, mode=mode)
        delta = F(1, int(rng.integers(2, 9)))
        a, v = aggregative_dp_mwmp(g, y, delta)
        b, w = brute_force_mwmp(discretize_aggregative(g, delta), y)
        assert v - w == 0
        assert a == b


def test_discretization_error_bound():
    rng = np.random.default_rng(5)
    for seed in range(10):
        g = aggregative_linear(3, 2, 1, seed)
        y = exact_y(g, rng)
        delta = F(1, 5)
        d = discretize_aggregative(g, delta)
        L = lipschitz_budget(y)
        for a in g.profiles():
            gap = abs(modified_welfare(d, y, a) - modified_welfare(g, y, a))
            assert gap <= L * g.n * delta


def test_dp_guards():
    g = aggregative_linear(3, 2, 1, 0)
    space = RegretSpace(g.action_counts)
    with pytest.raises(ValueError):
        aggregative_dp_mwmp(g, ScalingVector(space, np.full(space.dim, 4.0)), F(1, 4))
    with pytest.raises(CapacityError):
        aggregative_dp_mwmp(g, welfare_only(g), F(1, 1000), grid_cap=5)


def test_float_dp_agrees_with_brute_force():
    rng = np.random.default_rng(6)
    for seed in range(10):
        g = aggregative_congestion(4, 3, 2, seed)
        space = RegretSpace(g.action_counts)
        y = ScalingVector(space, rng.random(space.dim) * 4)
        a, v = aggregative_dp_mwmp(g, y, 1)
        b, w = brute_force_mwmp(g, y)
        assert v == pytest.approx(w, abs=1e-12)
        assert modified_welfare(g, y, a) == pytest.approx(w, abs=1e-12)


def test_oracles():
    g = aggregative_congestion(3, 3, 1, 2)
    assert on_grid(g, 1) and not on_grid(aggregative_linear(2, 2, 1, 0), F(1, 2))
    dp = make_oracle(g)
    assert isinstance(dp, AggregativeDPOracle)
    assert make_oracle(g, "aggdp", delta=1).tolerance == 0
    assert isinstance(make_oracle(g, "brute"), BruteForceOracle)
    with pytest.raises(ValueError):
        make_oracle(random_explicit(2, 2, 0), "aggdp")
    y = welfare_only(g)
    dp.adapt(1e-12)
    assert dp.tolerance == 1e-12
    assert delta_for_tolerance(g, y, 1e-12) == pytest.approx(1e-12 / (2 * 3 * 3))
    a = dp(y)
    assert welfare(g, a) == pytest.approx(brute_force_mwmp(g, y)[1])
