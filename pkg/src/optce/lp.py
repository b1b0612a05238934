"""Best and worst (coarse) correlated equilibria of small explicit games by LP.

Variables are the masses x(a) over all profiles in lexicographic order.
Objectives: ``welfare``, ``egalitarian`` (max t s.t. u_p(x) >= t for all p)
and ``player:q``. Games whose utilities are ratios of small integers are
solved in exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, LPError
from .game import CorrelatedDistribution, ExplicitGame, Game, as_exact, explicit_from_succinct
from .simplex import FLOAT_TOL, solve_lp

LP_CAP = 5000


@dataclass
class LpSolution:
    distribution: CorrelatedDistribution
    objective_value: object
    objective: str
    concept: str
    direction: str
    exact: bool
    n_constraints: int

    def to_dict(self):
        return {
            "concept": self.concept,
            "objective": self.objective,
            "direction": self.direction,
            "objective_value": float(self.objective_value),
            "exact": self.exact,
            "objective_value_exact": str(self.objective_value) if self.exact else None,
            "entries": [{"profile": list(a), "p": float(m)}
                        for a, m in sorted(self.distribution.items())],
        }


def exact_table(game: ExplicitGame, max_denominator: int = 10**4):
    """The utility table as Fractions, or None if some entry is not a small ratio."""
    if game.exact:
        return game.table
    flat = game.table.ravel()
    out = np.empty(flat.shape, dtype=object)
    for k, v in enumerate(flat):
        frac = as_exact(v, max_denominator)
        if frac is None:
            return None
        out[k] = frac
    return out.reshape(game.table.shape)


def equilibrium_constraints(table: np.ndarray, concept: str) -> np.ndarray:
    """Rows ``G x <= 0`` defining the CE or CCE polytope.

    CE rows: one per (p, i, j), i != j, holding u_p(j, a_-p) - u_p(i, a_-p)
    on profiles with a_p = i. CCE rows: one per (p, j) over all profiles.
    """
    n = table.shape[0]
    shape = table.shape[1:]
    rows = []
    for p in range(n):
        u = table[p]
        m = shape[p]
        for i in range(m):
            ui = np.take(u, [i], axis=p)
            for j in range(m):
                if concept == "ce":
                    if i == j:
                        continue
                    row = np.zeros(shape, dtype=table.dtype)
                    idx = [slice(None)] * n
                    idx[p] = slice(i, i + 1)
                    row[tuple(idx)] = np.take(u, [j], axis=p) - ui
                    rows.append(row.ravel())
        if concept == "cce":
            for j in range(m):
                rows.append((np.take(u, [j], axis=p) - u).ravel())
    if concept not in ("ce", "cce"):
        raise ValueError(f"unknown concept {concept!r}")
    if not rows:
        return np.zeros((0, int(np.prod(shape))), dtype=table.dtype)
    return np.array(rows, dtype=table.dtype)


def _parse_objective(objective: str, n: int):
    if objective in ("welfare", "egalitarian"):
        return objective, None
    if objective.startswith("player:"):
        q = int(objective.split(":", 1)[1])
        if not 0 <= q < n:
            raise ValueError(f"player index {q} out of range")
        return "player", q
    raise ValueError(f"unknown objective {objective!r}")


def _solve(table, concept, objective, direction, exact, slack=0):
    n = table.shape[0]
    kind, q = _parse_objective(objective, n)
    G = equilibrium_constraints(table, concept)
    n_eq = G.shape[0]
    nprof = G.shape[1]
    flat = table.reshape(n, nprof)
    one = Fraction(1) if exact else 1.0
    sign = -1 if direction == "max" else 1
    if kind == "egalitarian":
        if direction != "max":
            # min over x of min_p u_p(x) = min_p of (min over x of u_p(x))
            best = None
            for p in range(n):
                sol = _solve(table, concept, f"player:{p}", "min", exact, slack)
                if best is None or sol[1] < best[1]:
                    best = sol
            return best
        # variables (x, t); rows t - u_p(x) <= 0
        A_ub = np.concatenate([
            np.concatenate([G, np.zeros((n_eq, 1), dtype=G.dtype)], axis=1),
            np.concatenate([-flat, np.full((n, 1), one, dtype=flat.dtype)], axis=1),
        ])
        b_ub = [slack] * n_eq + [0] * n
        A_eq = [list(np.ones(nprof, dtype=object)) + [0]]
        c = [0] * nprof + [-1]
        res = solve_lp(c, A_ub, b_ub, A_eq, [1], exact=exact)
        x = res.x[:nprof]
        value = res.x[nprof]
    else:
        obj = flat.sum(axis=0) if kind == "welfare" else flat[q]
        res = solve_lp(sign * obj, G if n_eq else None, [slack] * n_eq if n_eq else None,
                       [np.ones(nprof)], [1], exact=exact)
        x = res.x
        value = obj.dot(x)
    return x, value, n_eq


def _lp(game: Game, concept: str, objective: str, direction: str, exact, cap: int,
        slack=0) -> LpSolution:
    if game.num_profiles > cap:
        raise CapacityError(f"{game.num_profiles} profiles exceed the LP cap {cap}")
    game = explicit_from_succinct(game)
    table = None
    if exact is not False:
        table = exact_table(game)
        if table is None and exact:
            table = np.vectorize(Fraction, otypes=[object])(game.table)
    use_exact = table is not None
    if not use_exact:
        table = np.asarray(game.table, dtype=float)
    try:
        if use_exact:
            slack = Fraction(slack)
        x, value, n_eq = _solve(table, concept, objective, direction, use_exact, slack)
    except LPError as err:
        # every game has a Nash equilibrium, so the polytope is never empty
        raise LPError(f"internal error, equilibrium LP failed: {err}") from err
    profiles = list(game.profiles())
    if use_exact:
        entries = {profiles[k]: x[k] for k in range(len(x)) if x[k] > 0}
    else:
        entries = {profiles[k]: float(x[k]) for k in range(len(x)) if x[k] > FLOAT_TOL}
        total = sum(entries.values())
        entries = {a: m / total for a, m in entries.items()}
    dist = CorrelatedDistribution(entries, tol=1e-6)
    return LpSolution(dist, value, objective, concept, direction, use_exact, n_eq)


def optimal_equilibrium(game: Game, concept: str = "ce", objective: str = "welfare",
                        exact=None, cap: int = LP_CAP, slack=0) -> LpSolution:
    """Best CE/CCE for the objective.

    ``exact=None`` picks rational arithmetic when every utility is a small
    ratio; True forces it (slow on large games), False forces floats.
    ``slack`` > 0 relaxes every equilibrium row to regret <= slack, giving the
    best approximate equilibrium instead.
    """
    return _lp(game, concept, objective, "max", exact, cap, slack)


def worst_equilibrium(game: Game, concept: str = "ce", objective: str = "welfare",
                      exact=None, cap: int = LP_CAP, slack=0) -> LpSolution:
    return _lp(game, concept, objective, "min", exact, cap, slack)


def equilibrium_lp(game, concept="ce", objective="welfare", direction="max", exact=None,
                   cap=LP_CAP, slack=0) -> LpSolution:
    if direction not in ("max", "min"):
        raise ValueError("direction must be max or min")
    return _lp(game, concept, objective, direction, exact, cap, slack)
