"""Modified-welfare maximization (MWMP) oracles.

For a scaling vector y over a regret index space, the modified utility of
player p at profile a is

    u~_p(a) = c_p u_p(a) + sum_j Y_p[a_p, j] (u_p(a) - u_p(j, a_-p))

where ``c_p`` is the weight the objective components put on u_p and
``Y_p`` the player's deviation block. The modified welfare is the sum over
players and satisfies ``y.r(a) = (sum of objective weights) * T - w~(a)``.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .aggregative import AggregativeGame
from .errors import CapacityError, DimensionError
from .game import ExplicitGame, Game, deviate
from .regret import RegretSpace, ScalingVector

BRUTE_FORCE_CAP = 10**6
GRID_CAP = 2 * 10**6


def _check_space(game: Game, y: ScalingVector):
    if y.space.action_counts != tuple(game.action_counts):
        raise DimensionError("scaling vector does not match the game's action counts")


def modified_utility(game: Game, y: ScalingVector, a, p: int):
    _check_space(game, y)
    a = game.check_profile(a)
    block = y.blocks()[p]
    weight = y.objective_weights()[p]
    ua = game.utility(p, a)
    total = weight * ua
    for j in range(game.action_counts[p]):
        yj = block[a[p], j]
        if yj:
            total = total + yj * (ua - game.utility(p, deviate(a, p, j)))
    return total


def modified_welfare(game: Game, y: ScalingVector, a):
    return sum(modified_utility(game, y, a, p) for p in range(game.n))


def modified_welfare_table(game: ExplicitGame, y: ScalingVector) -> np.ndarray:
    """Modified welfare of every profile of an explicit game, as a dense array."""
    _check_space(game, y)
    blocks = y.blocks()
    weights = y.objective_weights()
    total = np.zeros(game.action_counts, dtype=game.table.dtype)
    n = game.n
    for p in range(n):
        total = total + weights[p] * game.table[p]
        gains = game.deviation_gains(p)  # gains[j] = u_p(j, a_-p) - u_p(a)
        Y = blocks[p]
        if not Y.any():
            continue
        shape = [1] * n
        shape[p] = game.action_counts[p]
        for j in range(game.action_counts[p]):
            col = Y[:, j]
            if col.any():
                total = total - col.reshape(shape) * gains[j]
    return total


def brute_force_mwmp(game: Game, y: ScalingVector, cap: int = BRUTE_FORCE_CAP):
    """Exact MWMP by enumeration; ties go to the lexicographically smallest profile."""
    if game.num_profiles > cap:
        raise CapacityError(f"{game.num_profiles} profiles exceed the brute-force cap {cap}")
    if isinstance(game, ExplicitGame):
        table = modified_welfare_table(game, y)
        flat = table.ravel()
        k = int(np.argmax(flat)) if flat.dtype != object else _first_argmax(flat)
        a = tuple(int(v) for v in np.unravel_index(k, game.action_counts))
        return a, flat[k]
    best, best_a = None, None
    for a in game.profiles():
        v = modified_welfare(game, y, a)
        if best is None or v > best:
            best, best_a = v, a
    return best_a, best


def _first_argmax(flat):
    best, k = flat[0], 0
    for i in range(1, len(flat)):
        if flat[i] > best:
            best, k = flat[i], i
    return k


def _round_half_away(q) -> int:
    if isinstance(q, Fraction):
        fl = math.floor(abs(q) + Fraction(1, 2))
    else:
        fl = math.floor(abs(q) + 0.5)
    return int(fl) if q >= 0 else -int(fl)


def discretize_aggregative(game: AggregativeGame, delta) -> AggregativeGame:
    """Round every component of every f_p(a_p) to the nearest multiple of ``delta``.

    Ties round away from zero. The returned game carries the integer lattice
    coordinates so its aggregates are computed exactly on the grid. Bounds
    widen by the rounding slack: W' to the next multiple of delta, W by
    n * delta / 2.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    coords = [[tuple(_round_half_away(c / delta) for c in vec) for vec in row] for row in game.f]
    f = [[tuple(g * delta for g in vec) for vec in row] for row in coords]
    W_prime = math.ceil(game.W_prime / delta) * delta
    W = game.W + game.n * delta / 2
    return AggregativeGame(f, game.payoff, W, W_prime, lattice=(delta, coords))


def lipschitz_budget(y: ScalingVector) -> float:
    """``sum_p (c_p + 2 max_{a_p} sum_j Y_p[a_p, j])``.

    Scales the bounded-influence constant into a bound on how much the
    modified welfare can move when every aggregate moves by one unit.
    """
    weights = y.objective_weights()
    total = 0.0
    for p, block in enumerate(y.blocks()):
        total += float(weights[p]) + 2 * float(block.sum(axis=1).max())
    return total


def delta_for_tolerance(game: AggregativeGame, y: ScalingVector, alpha: float) -> float:
    """Grid step giving an additive MWMP error of at most ``alpha``."""
    L = lipschitz_budget(y)
    if L == 0:
        return float(game.W_prime) or 1.0
    return alpha / (2 * game.n * L)


def _grid_coords(game: AggregativeGame, delta):
    if game.lattice is not None and game.lattice[0] == delta:
        return game.lattice[1]
    return [[tuple(_round_half_away(c / delta) for c in vec) for vec in row] for row in game.f]


def on_grid(game: AggregativeGame, delta) -> bool:
    """True when every contribution is already a multiple of delta (no rounding loss)."""
    coords = _grid_coords(game, delta)
    return all(g * delta == c for row_g, row_f in zip(coords, game.f)
               for vg, vf in zip(row_g, row_f) for g, c in zip(vg, vf))


def aggregative_dp_mwmp(game: AggregativeGame, y: ScalingVector, delta,
                        grid_cap: int = GRID_CAP, check_range: bool = True):
    """Maximize modified welfare over the delta-discretized game by dynamic programming.

    For each reachable final aggregate s, per-player modified utilities
    v~_p(a_p, s) are tabulated and a table ``M[p][g]`` (best total of
    players p..n-1 whose contributions sum to grid point g) is filled from the
    last player backwards, so reconstruction from player 0 picks the smallest
    action at each step. Across aggregates ties go to the lexicographically
    smallest profile. Returns ``(profile, value)`` where value is the
    modified welfare on the discretized game.
    """
    _check_space(game, y)
    n = game.n
    if check_range and (np.asarray(y.values) > n + 1e-9).any():
        raise ValueError("the DP oracle covers scaling vectors in [0, n]^d only")
    coords = _grid_coords(game, delta)
    k = game.k
    zero = (0,) * k

    def add(u, v):
        return tuple(x + z for x, z in zip(u, v))

    def sub(u, v):
        return tuple(x - z for x, z in zip(u, v))

    # suffix grids: sums of contributions of players p..n-1
    suffix = [None] * (n + 1)
    suffix[n] = {zero}
    cells = 1
    for p in range(n - 1, -1, -1):
        suffix[p] = {add(c, g) for c in set(coords[p]) for g in suffix[p + 1]}
        cells += len(suffix[p])
        if cells > grid_cap:
            raise CapacityError(f"aggregator grid exceeds {grid_cap} cells")

    blocks = y.blocks()
    weights = y.objective_weights()
    payoff = game.payoff
    active = [[[j for j in range(game.action_counts[p]) if blocks[p][i, j]]
               for i in range(game.action_counts[p])] for p in range(n)]

    best_val, best_a = None, None
    for s in sorted(suffix[0]):
        s_val = tuple(c * delta for c in s)
        vt = []
        for p in range(n):
            row = []
            for i in range(game.action_counts[p]):
                v_own = payoff.value(p, i, s_val)
                total = weights[p] * v_own
                for j in active[p][i]:
                    shifted = tuple(c * delta for c in add(sub(s, coords[p][i]), coords[p][j]))
                    total = total + blocks[p][i, j] * (v_own - payoff.value(p, j, shifted))
                row.append(total)
            vt.append(row)
        # M[p][g]: best sum over players p..n-1 with contributions summing to g
        M = [None] * (n + 1)
        M[n] = {zero: 0}
        for p in range(n - 1, -1, -1):
            layer = {}
            nxt = M[p + 1]
            for g_next, val in nxt.items():
                for i, c in enumerate(coords[p]):
                    g = add(c, g_next)
                    cand = vt[p][i] + val
                    if g not in layer or cand > layer[g]:
                        layer[g] = cand
            M[p] = layer
        if s not in M[0]:
            continue
        value = M[0][s]
        # forward reconstruction, smallest action first
        a, g = [], s
        for p in range(n):
            for i, c in enumerate(coords[p]):
                rest = sub(g, c)
                if rest in M[p + 1] and vt[p][i] + M[p + 1][rest] == M[p][g]:
                    a.append(i)
                    g = rest
                    break
        a = tuple(a)
        if best_val is None or value > best_val or (value == best_val and a < best_a):
            best_val, best_a = value, a
    return best_a, best_val


class BruteForceOracle:
    """Exact MWMP oracle by enumeration (additive tolerance 0)."""

    tolerance = 0.0

    def __init__(self, game: Game, cap: int = BRUTE_FORCE_CAP):
        if game.num_profiles > cap:
            raise CapacityError(f"{game.num_profiles} profiles exceed the brute-force cap {cap}")
        self.game = game
        self.cap = cap

    def __call__(self, y: ScalingVector):
        return brute_force_mwmp(self.game, y, self.cap)[0]


class AggregativeDPOracle:
    """DP oracle on the discretized game.

    With ``delta=None`` the step is chosen per call from the requested
    additive tolerance ``alpha`` and the Lipschitz budget of y. Contributions
    already lying on the chosen grid lose nothing to discretization.
    """

    def __init__(self, game: AggregativeGame, alpha: float = 1e-9, delta=None,
                 grid_cap: int = GRID_CAP):
        self.game = game
        self.delta = delta
        self.grid_cap = grid_cap
        self.tolerance = 0.0 if delta is not None and on_grid(game, delta) else alpha

    def adapt(self, alpha: float):
        """Tighten the per-call step to meet the solver's tolerance."""
        if self.delta is None:
            self.tolerance = min(self.tolerance, alpha)

    def step_for(self, y: ScalingVector):
        if self.delta is not None:
            return self.delta
        return delta_for_tolerance(self.game, y, self.tolerance)

    def __call__(self, y: ScalingVector):
        return aggregative_dp_mwmp(self.game, y, self.step_for(y), self.grid_cap)[0]


def make_oracle(game: Game, kind: str = "auto", alpha: float = 1e-9, delta=None,
                cap: int = BRUTE_FORCE_CAP, grid_cap: int = GRID_CAP):
    if kind == "auto":
        kind = "aggdp" if isinstance(game, AggregativeGame) else "brute"
    if kind == "brute":
        return BruteForceOracle(game, cap)
    if kind == "aggdp":
        if not isinstance(game, AggregativeGame):
            raise ValueError("the aggregative DP oracle needs an aggregative game")
        return AggregativeDPOracle(game, alpha=alpha, delta=delta, grid_cap=grid_cap)
    raise ValueError(f"unknown oracle {kind!r}")


def scaling_vector(space: RegretSpace, values) -> ScalingVector:
    return ScalingVector(space, np.asarray(values))


__all__ = [
    "modified_utility", "modified_welfare", "modified_welfare_table", "brute_force_mwmp",
    "discretize_aggregative", "on_grid", "aggregative_dp_mwmp", "lipschitz_budget", "delta_for_tolerance",
    "BruteForceOracle", "AggregativeDPOracle", "make_oracle", "scaling_vector",
]

