from fractions import Fraction as F

import numpy as np
import pytest

from optce.errors import CapacityError
from optce.game import CorrelatedDistribution, ExplicitGame, expected_utility, expected_welfare
from optce.gadgets import build_gadget
from optce.generators import max_welfare, random_explicit
from optce.lp import equilibrium_lp, optimal_equilibrium, worst_equilibrium
from optce.regret import max_cce_regret, max_ce_regret

from conftest import identical_interest


def test_chicken_by_hand(chicken):
    # x(DC) = x(CD) = x(CC) = 1/3; the CE constraint p >= r binds
    sol = optimal_equilibrium(chicken)
    assert sol.exact and sol.objective_value == F(4, 3)
    assert expected_welfare(chicken, sol.distribution) == F(4, 3)
    assert max_ce_regret(chicken, sol.distribution) <= 0
    assert optimal_equilibrium(chicken, objective="egalitarian").objective_value == F(2, 3)
    assert optimal_equilibrium(chicken, objective="player:0").objective_value == 1


def test_identical_interest_optimum():
    vals = np.array([[[0.1, 0.8], [0.3, 0.5]], [[0.2, 0.6], [0.9, 0.4]]])
    g = identical_interest(vals)
    sol = optimal_equilibrium(g)
    assert float(sol.objective_value) == pytest.approx(3 * 0.9)
    assert float(sol.distribution[(1, 1, 0)]) == pytest.approx(1)


def test_dominant_profile_is_unique_equilibrium(prisoners):
    for concept in ("ce", "cce"):
        best = optimal_equilibrium(prisoners, concept)
        worst = worst_equilibrium(prisoners, concept)
        assert best.distribution.support == [(1, 1)] == worst.distribution.support
        assert best.objective_value == worst.objective_value == F(2, 3)


def test_zero_game():
    g = ExplicitGame(np.zeros((2, 2, 3)))
    assert worst_equilibrium(g).objective_value == 0
    assert optimal_equilibrium(g, "cce").objective_value == 0


def test_gadget_best_and_worst():
    for seed in range(5):
        base = random_explicit(2, 2, seed, denominator=10)
        opt = max_welfare(base)
        g = build_gadget(base, opt)
        best = optimal_equilibrium(g, "cce")
        worst = worst_equilibrium(g, "cce")
        assert best.exact and worst.exact
        assert best.objective_value >= opt
        assert worst.objective_value == g.eps


def test_gadget_opt_from_lp():
    base = random_explicit(2, 2, 3, denominator=10)
    g = build_gadget(base, "lp")
    assert g.opt == optimal_equilibrium(base, "cce").objective_value
    assert g.eps == g.opt / 2


@pytest.mark.parametrize("seed", range(12))
def test_polytope_relations(seed):
    n, m = (2, 3) if seed % 2 else (3, 2)
    g = random_explicit(n, m, seed)
    ce_best = optimal_equilibrium(g, "ce")
    ce_worst = worst_equilibrium(g, "ce")
    cce_best = optimal_equilibrium(g, "cce")
    cce_worst = worst_equilibrium(g, "cce")
    assert ce_worst.objective_value <= ce_best.objective_value + 1e-9
    assert ce_best.objective_value <= cce_best.objective_value + 1e-9
    assert cce_worst.objective_value <= ce_worst.objective_value + 1e-9
    for sol in (ce_best, ce_worst):
        assert max_ce_regret(g, sol.distribution) <= 1e-9
        assert max_cce_regret(g, sol.distribution) <= 1e-9  # a CE is a CCE
    for sol in (cce_best, cce_worst):
        assert max_cce_regret(g, sol.distribution) <= 1e-9
    for sol in (ce_best, ce_worst, cce_best, cce_worst):
        assert len(sol.distribution) <= sol.n_constraints + 1
        assert expected_welfare(g, sol.distribution) == pytest.approx(float(sol.objective_value), abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_other_objectives(seed):
    g = random_explicit(2, 3, seed)
    egal = optimal_equilibrium(g, objective="egalitarian")
    x = egal.distribution
    assert min(expected_utility(g, x, p) for p in range(2)) == pytest.approx(float(egal.objective_value), abs=1e-9)
    egal_min = worst_equilibrium(g, objective="egalitarian")
    assert egal_min.objective_value <= egal.objective_value + 1e-9
    for q in range(2):
        sol = optimal_equilibrium(g, objective=f"player:{q}")
        assert expected_utility(g, sol.distribution, q) == pytest.approx(float(sol.objective_value), abs=1e-9)
        assert sol.objective_value >= egal.objective_value - 1e-9


def test_exact_and_float_agree():
    for seed in range(10):
        g = random_explicit(3, 2, seed, denominator=12)
        a = optimal_equilibrium(g, exact=True).objective_value
        b = optimal_equilibrium(g, exact=False).objective_value
        assert isinstance(a, F)
        assert float(a) == pytest.approx(b, abs=1e-9)


def test_cap_and_bad_objective():
    g = random_explicit(3, 3, 0)
    with pytest.raises(CapacityError):
        optimal_equilibrium(g, cap=10)
    with pytest.raises(ValueError):
        optimal_equilibrium(g, objective="utilitarian")
    with pytest.raises(ValueError):
        equilibrium_lp(g, direction="sideways")


def test_solution_dict():
    g = random_explicit(2, 2, 1, denominator=5)
    d = optimal_equilibrium(g).to_dict()
    assert d["exact"] and d["objective_value_exact"] is not None
    total = sum(e["p"] for e in d["entries"])
    assert total == pytest.approx(1)


def test_slack_relaxes_polytope():
    for seed in range(6):
        g = random_explicit(2, 3, seed)
        tight = optimal_equilibrium(g).objective_value
        loose = optimal_equilibrium(g, slack=0.1)
        assert loose.objective_value >= tight - 1e-9
        assert max_ce_regret(g, loose.distribution) <= 0.1 + 1e-9
    chicken_like = random_explicit(2, 2, 0, denominator=4)
    sol = optimal_equilibrium(chicken_like, slack=F(1, 10))
    assert sol.exact
