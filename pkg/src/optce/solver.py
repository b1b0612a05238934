"""Approachability solver for near-optimal approximate correlated equilibria.

Each iteration projects the running average regret vector onto the negative
orthant, asks the MWMP oracle for a profile against the positive part, and
folds that profile's regret vector into the average. The empirical
distribution of the visited profiles (the arbitrary start included) is the
answer.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import OracleViolation, SolverError, TargetInfeasible
from .game import CorrelatedDistribution, Game, expected_utility, expected_welfare
from .regret import (RegretSpace, ScalingVector, build_regret_vector, cce_report, ce_report)

# slack for floating-point noise in the target and utilities when checking
# the oracle contract, scaled by |y|_1
ORACLE_NOISE = 1e-9


def project_negative_orthant(v) -> np.ndarray:
    return np.minimum(np.asarray(v, dtype=float), 0.0)


def distance_to_orthant(v) -> float:
    return float(np.linalg.norm(np.maximum(v, 0.0)))


def iteration_budget(n: int, m: int, eps: float) -> int:
    """``ceil(8 n^2 m^4 / eps^2)`` computed on the exact value of eps."""
    return math.ceil(Fraction(8 * n * n * m ** 4) / Fraction(eps) ** 2)


def oracle_tolerance(N: int) -> float:
    return 1.0 / (2 * N * (N + 1))


@dataclass
class SolverConfig:
    epsilon: float
    target: float | str = "lp"
    mode: str = "ce"
    iterations: int | None = None
    alpha: float | None = None
    early_exit: bool = True
    check_envelope: bool = True

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")

    def derive(self, game: Game) -> "SolverConfig":
        """Fill in N and alpha from the game's size."""
        N = self.iterations or iteration_budget(game.n, max(game.action_counts), self.epsilon)
        alpha = self.alpha if self.alpha is not None else oracle_tolerance(N)
        if N < 1 or not alpha > 0:
            raise ValueError("need N >= 1 and alpha > 0")
        return SolverConfig(self.epsilon, self.target, self.mode, N, alpha,
                            self.early_exit, self.check_envelope)


@dataclass
class SolverTrace:
    t: list = field(default_factory=list)
    distance: list = field(default_factory=list)
    oracle_value: list = field(default_factory=list)
    support_size: list = field(default_factory=list)
    y_nonzeros: list = field(default_factory=list)
    envelope_violations: int = 0
    orthogonality_max: float = 0.0
    max_y: float = 0.0
    max_regret_norm_sq: float = 0.0
    average_regret: np.ndarray | None = None
    target: float | None = None
    mode: str = "ce"
    iterations: int = 0
    budget: int = 0
    alpha: float = 0.0
    final_distance: float = math.inf
    certificate: dict = field(default_factory=dict)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "distance", "oracle_value", "support_size"])
            for row in zip(self.t, self.distance, self.oracle_value, self.support_size):
                w.writerow([row[0], repr(row[1]), repr(row[2]), row[3]])


def envelope(t: int, n: int, m: int, d1_sq: float) -> float:
    """Upper bound on the squared distance after t iterations."""
    return (4 * n * n * m ** 4 + 1) / t + 4 * d1_sq / (t * t)


def first_profile(game: Game):
    return (0,) * game.n


def certify(game: Game, x: CorrelatedDistribution, space: RegretSpace, target, eps) -> dict:
    """Re-verify a returned distribution from scratch."""
    if space.mode == "cce":
        report = cce_report(game, x, eps)
    else:
        report = ce_report(game, x, eps)
    if space.mode == "egal":
        objective = min(expected_utility(game, x, p) for p in range(game.n))
    elif space.mode == "pareto":
        objective = expected_utility(game, x, space.q)
    else:
        objective = expected_welfare(game, x)
    ok = report.is_eps_equilibrium and objective >= target - eps - 1e-9
    return {"max_regret": float(report.max_regret), "argmax": report.argmax,
            "objective": float(objective), "target": float(target), "ok": bool(ok)}


def solve(game: Game, oracle, config: SolverConfig):
    """Run the approachability iteration; returns ``(distribution, trace)``.

    ``config.target`` must be numeric here, or ``"lp"`` for the exact LP
    optimum of the matching concept/objective.
    """
    space = RegretSpace.parse(game.action_counts, config.mode)
    target = resolve_target(game, config)
    cfg = config.derive(game)
    N, alpha, eps = cfg.iterations, cfg.alpha, cfg.epsilon
    n, m = game.n, max(game.action_counts)
    if hasattr(oracle, "adapt"):
        oracle.adapt(alpha)
    oracle_tol = getattr(oracle, "tolerance", 0.0)
    if oracle_tol > alpha:
        raise ValueError(f"oracle tolerance {oracle_tol} exceeds the required {alpha}")

    cache: dict = {}

    def regret_of(a):
        r = cache.get(a)
        if r is None:
            r = build_regret_vector(game, a, target, space).values
            cache[a] = r
        return r

    trace = SolverTrace(target=float(target), mode=space.label, budget=N, alpha=alpha)
    a0 = first_profile(game)
    counts = {a0: 1}
    rbar = regret_of(a0).copy()
    trace.max_regret_norm_sq = float(rbar @ rbar)
    d1_sq = None
    obj_mass = space.objective_mass
    t = 0
    for t in range(1, N + 1):
        proj = np.minimum(rbar, 0.0)
        y = rbar - proj
        trace.orthogonality_max = max(trace.orthogonality_max, abs(float(y @ proj)))
        trace.max_y = max(trace.max_y, float(y.max(initial=0.0)))
        a = tuple(oracle(ScalingVector(space, y)))
        r = regret_of(a)
        cross = float(y @ r)
        if cross > alpha + ORACLE_NOISE * max(1.0, float(y.sum())):
            raise OracleViolation(t, cross, alpha)
        rbar = rbar * (t / (t + 1)) + r / (t + 1)
        counts[a] = counts.get(a, 0) + 1
        dist_sq = float(np.sum(np.maximum(rbar, 0.0) ** 2))
        if t == 1:
            d1_sq = dist_sq
        if cfg.check_envelope and dist_sq > envelope(t, n, m, d1_sq) + 1e-12:
            trace.envelope_violations += 1
        trace.max_regret_norm_sq = max(trace.max_regret_norm_sq, float(r @ r))
        trace.t.append(t)
        trace.distance.append(math.sqrt(dist_sq))
        trace.oracle_value.append(float(obj_mass(y)) * float(target) - cross)
        trace.support_size.append(len(counts))
        trace.y_nonzeros.append(int(np.count_nonzero(y)))
        if cfg.early_exit and math.sqrt(dist_sq) <= eps / 2:
            break

    trace.iterations = t
    trace.average_regret = rbar
    trace.final_distance = distance_to_orthant(rbar)
    if trace.final_distance > eps:
        raise TargetInfeasible(
            f"distance {trace.final_distance:.4g} > eps={eps} after {t} iterations "
            f"(target {float(target):.6g})")
    total = sum(counts.values())
    x = CorrelatedDistribution({a: Fraction(c, total) for a, c in counts.items()})
    trace.certificate = certify(game, x, space, target, eps)
    if not trace.certificate["ok"]:
        raise SolverError(f"returned distribution failed re-verification: {trace.certificate}")
    return x, trace


def _objective_for(mode: str):
    space_mode, _, q = mode.partition(":")
    if space_mode == "egal":
        return "ce", "egalitarian"
    if space_mode == "pareto":
        return "ce", f"player:{q}"
    if space_mode == "cce":
        return "cce", "welfare"
    return "ce", "welfare"


def lp_target(game: Game, mode: str = "ce"):
    from .lp import optimal_equilibrium

    concept, objective = _objective_for(mode)
    return optimal_equilibrium(game, concept, objective).objective_value


def resolve_target(game: Game, config: SolverConfig):
    if config.target == "lp":
        return float(lp_target(game, config.mode))
    if isinstance(config.target, str):
        raise ValueError(f"target {config.target!r} must be numeric or 'lp' here; "
                         "use binary_search_target for 'search'")
    return float(config.target)


@dataclass
class SearchResult:
    target: float
    distribution: CorrelatedDistribution
    trace: SolverTrace
    invocations: int
    wall_time: float


def binary_search_target(game: Game, oracle, eps: float, mode: str = "ce",
                         config: SolverConfig | None = None) -> SearchResult:
    """Largest target on the eps/2 grid below the objective's range for which solve succeeds.

    The grid is ``{0, eps/2, ..., (K-1) eps/2}`` with ``K = ceil(range / (eps/2))``
    points, so bisection costs at most ``ceil(log2(K))`` solver runs. Target 0
    is assumed feasible and only solved for (one extra run) if no larger
    target succeeds.
    """
    start = time.perf_counter()
    upper = game.n if mode in ("ce", "cce") else 1
    step = eps / 2
    K = math.ceil(Fraction(upper) / Fraction(step))
    base = config or SolverConfig(eps, 0.0, mode)
    invocations = 0
    results = {}

    def attempt(k):
        nonlocal invocations
        invocations += 1
        cfg = SolverConfig(eps, k * step, mode, base.iterations, base.alpha, base.early_exit,
                           base.check_envelope)
        try:
            results[k] = solve(game, oracle, cfg)
            return True
        except (TargetInfeasible, OracleViolation):
            return False

    lo, hi = 0, K  # lo succeeds (assumed for 0), hi fails (sentinel)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if attempt(mid):
            lo = mid
        else:
            hi = mid
    if lo not in results:
        # target 0 is always feasible: any exact CE satisfies it
        invocations += 1
        cfg = SolverConfig(eps, 0.0, mode, base.iterations, base.alpha, base.early_exit,
                           base.check_envelope)
        results[0] = solve(game, oracle, cfg)
    x, trace = results[lo]
    return SearchResult(lo * step, x, trace, invocations, time.perf_counter() - start)
