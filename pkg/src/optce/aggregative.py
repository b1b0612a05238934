"""Aggregative games: utilities depend on own action and S(a) = sum_p f_p(a_p).

Payoffs come from one of three families. Each family reports an l-inf
Lipschitz constant in the aggregate; games reject constants above one so the
bounded-influence condition |v(a, s) - v(a, s')| <= |s - s'|_inf holds.
Arithmetic is generic, so Fraction inputs give exact utilities.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvariantViolation
from .game import Game


def _clamp01(v):
    return 0 if v < 0 else (1 if v > 1 else v)


class PayoffFamily:
    name = ""

    def value(self, p: int, action: int, s: Sequence) -> float:
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def check_shape(self, action_counts, k):
        pass


class LinearPayoff(PayoffFamily):
    """``v_p(a, s) = clamp(alpha[p][a] + sum_r beta[p][a][r] * s_r, 0, 1)``.

    Lipschitz constant: max over (p, a) of sum_r |beta[p][a][r]|.
    """

    name = "linear"

    def __init__(self, alpha, beta):
        self.alpha = [list(row) for row in alpha]
        self.beta = [[list(b) for b in row] for row in beta]

    def value(self, p, action, s):
        v = self.alpha[p][action]
        for b, sr in zip(self.beta[p][action], s):
            v = v + b * sr
        return _clamp01(v)

    @property
    def lipschitz(self):
        return max(sum(abs(b) for b in vec) for row in self.beta for vec in row)

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}

    def check_shape(self, action_counts, k):
        _check_nested(self.alpha, action_counts, None, "alpha")
        _check_nested(self.beta, action_counts, k, "beta")


class CongestionPayoff(PayoffFamily):
    """Utility falls with congestion on the resources an action uses.

    ``v_p(a, s) = clamp(base[p][a] - sum_r usage[p][a][r] * s_r / scale, 0, 1)``.
    Lipschitz constant: max over (p, a) of sum_r |usage[p][a][r]| / scale.
    """

    name = "congestion"

    def __init__(self, base, usage, scale):
        self.base = [list(row) for row in base]
        self.usage = [[list(u) for u in row] for row in usage]
        self.scale = scale
        if not scale > 0:
            raise InvariantViolation("congestion scale must be positive")

    def value(self, p, action, s):
        load = 0
        for w, sr in zip(self.usage[p][action], s):
            load = load + w * sr
        return _clamp01(self.base[p][action] - load / self.scale)

    @property
    def lipschitz(self):
        return max(sum(abs(w) for w in vec) for row in self.usage for vec in row) / self.scale

    def params(self):
        return {"base": self.base, "usage": self.usage, "scale": self.scale}

    def check_shape(self, action_counts, k):
        _check_nested(self.base, action_counts, None, "base")
        _check_nested(self.usage, action_counts, k, "usage")


class TabulatedPayoff(PayoffFamily):
    """Values stored on the grid ``lo + step * g``; lookup snaps to the nearest point.

    ``table[p][a]`` is a k-dimensional nested list. The declared Lipschitz
    constant is the largest jump between neighbouring grid values divided by
    ``step``; this is only a spot check because nearest-point lookup is a step
    function between grid points.
    """

    name = "tabulated"

    def __init__(self, table, lo, step):
        self.table = [[np.asarray(t, dtype=object if _any_fraction(t) else float) for t in row]
                      for row in table]
        self.lo = lo
        self.step = step
        if not step > 0:
            raise InvariantViolation("tabulated step must be positive")

    def value(self, p, action, s):
        t = self.table[p][action]
        idx = []
        for r, sr in enumerate(s):
            g = round((sr - self.lo) / self.step)
            idx.append(min(max(int(g), 0), t.shape[r] - 1))
        return _clamp01(t[tuple(idx)])

    @property
    def lipschitz(self):
        worst = 0
        for row in self.table:
            for t in row:
                for axis in range(t.ndim):
                    if t.shape[axis] > 1:
                        worst = max(worst, np.abs(np.diff(t, axis=axis)).max())
        return worst / self.step

    def params(self):
        return {"table": [[t.tolist() for t in row] for row in self.table],
                "lo": self.lo, "step": self.step}

    def check_shape(self, action_counts, k):
        if len(self.table) != len(action_counts):
            raise DimensionError("table needs one entry per player")
        for p, row in enumerate(self.table):
            if len(row) != action_counts[p]:
                raise DimensionError(f"table[{p}] needs {action_counts[p]} actions")
            for t in row:
                if t.ndim != k:
                    raise DimensionError(f"table entries must be {k}-dimensional")


FAMILIES = {cls.name: cls for cls in (LinearPayoff, CongestionPayoff, TabulatedPayoff)}


def payoff_from_dict(spec: dict) -> PayoffFamily:
    try:
        cls = FAMILIES[spec["family"]]
    except KeyError:
        raise ValueError(f"unknown payoff family {spec.get('family')!r}") from None
    return cls(**spec.get("params", {}))


def _any_fraction(x):
    return any(isinstance(v, Fraction) for v in np.asarray(x, dtype=object).ravel())


def _check_nested(values, action_counts, k, label):
    if len(values) != len(action_counts):
        raise DimensionError(f"{label} needs one entry per player")
    for p, row in enumerate(values):
        if len(row) != action_counts[p]:
            raise DimensionError(f"{label}[{p}] needs {action_counts[p]} entries")
        if k is not None and any(len(v) != k for v in row):
            raise DimensionError(f"{label}[{p}] entries must have length {k}")


class AggregativeGame(Game):
    """n-player game with ``u_p(a) = v_p(a_p, S(a))``.

    ``f[p][a]`` is the k-vector player p contributes when playing a. Both
    bounds are explicit: every contribution lies in [-W', W']^k and every
    reachable aggregate in [-W, W]^k.

    ``lattice`` is set by discretization: ``(delta, coords)`` with integer
    coordinates such that ``f[p][a] == coords[p][a] * delta``. When present,
    aggregates are computed from the integer coordinates, which keeps them
    bit-identical to the dynamic program's grid values.
    """

    def __init__(self, f, payoff: PayoffFamily, W, W_prime, lattice=None,
                 max_lipschitz=1):
        self.f = [[tuple(vec) for vec in row] for row in f]
        self.n = len(self.f)
        if self.n < 1:
            raise DimensionError("need at least one player")
        self.action_counts = tuple(len(row) for row in self.f)
        if min(self.action_counts) < 1:
            raise DimensionError("every player needs at least one action")
        dims = {len(vec) for row in self.f for vec in row}
        if len(dims) != 1:
            raise DimensionError("all aggregation vectors need the same dimension")
        self.k = dims.pop()
        self.payoff = payoff
        self.W = W
        self.W_prime = W_prime
        self.lattice = lattice
        payoff.check_shape(self.action_counts, self.k)
        if payoff.lipschitz > max_lipschitz:
            raise InvariantViolation(
                f"{payoff.name} payoff has Lipschitz constant {payoff.lipschitz} > {max_lipschitz}")
        self._check_bounds()

    def _check_bounds(self):
        for p, row in enumerate(self.f):
            for a, vec in enumerate(row):
                if any(abs(c) > self.W_prime for c in vec):
                    raise InvariantViolation(f"f[{p}][{a}] = {vec} outside [-W', W']")
        # interval arithmetic over per-player component ranges
        for r in range(self.k):
            lo = sum(min(vec[r] for vec in row) for row in self.f)
            hi = sum(max(vec[r] for vec in row) for row in self.f)
            if lo < -self.W or hi > self.W:
                raise InvariantViolation(
                    f"aggregate component {r} ranges over [{lo}, {hi}], outside [-W, W]")

    def aggregator_value(self, a) -> tuple:
        if self.lattice is not None:
            delta, coords = self.lattice
            return tuple(
                sum(coords[p][ap][r] for p, ap in enumerate(a)) * delta for r in range(self.k))
        total = [0] * self.k
        for p, ap in enumerate(a):
            for r, c in enumerate(self.f[p][ap]):
                total[r] = total[r] + c
        return tuple(total)

    def utility(self, p, a):
        return self.payoff.value(p, a[p], self.aggregator_value(a))

    def utilities_at(self, a):
        s = self.aggregator_value(a)
        return [self.payoff.value(p, ap, s) for p, ap in enumerate(a)]

    def spot_check_influence(self, samples: int = 200, seed: int = 0, tol: float = 1e-12):
        """Sample pairs of aggregates and return the worst ratio |dv| / |ds|_inf.

        Tabulated families are not Lipschitz between grid points, so for them
        the samples are taken on grid points.
        """
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            p = int(rng.integers(self.n))
            act = int(rng.integers(self.action_counts[p]))
            if isinstance(self.payoff, TabulatedPayoff):
                t = self.payoff.table[p][act]
                g1 = [int(rng.integers(m)) for m in t.shape]
                g2 = [min(max(g + int(rng.integers(-1, 2)), 0), m - 1) for g, m in zip(g1, t.shape)]
                s1 = [self.payoff.lo + g * self.payoff.step for g in g1]
                s2 = [self.payoff.lo + g * self.payoff.step for g in g2]
            else:
                s1 = list(rng.uniform(-float(self.W), float(self.W), self.k))
                s2 = list(rng.uniform(-float(self.W), float(self.W), self.k))
            ds = max(abs(x - y) for x, y in zip(s1, s2))
            if ds <= tol:
                continue
            dv = abs(float(self.payoff.value(p, act, s1)) - float(self.payoff.value(p, act, s2)))
            worst = max(worst, dv / ds)
        return worst

    def reachable_aggregates(self):
        """All distinct aggregate values, by enumeration (small games only)."""
        return {self.aggregator_value(a) for a in itertools.product(
            *(range(m) for m in self.action_counts))}

    def __repr__(self):
        return (f"AggregativeGame(n={self.n}, action_counts={self.action_counts}, k={self.k}, "
                f"payoff={self.payoff.name})")


def aggregator_value(game: AggregativeGame, a) -> tuple:
    """S(a) as a k-tuple; raises if it leaves the declared box."""
    a = game.check_profile(a)
    s = game.aggregator_value(a)
    if any(abs(c) > game.W for c in s):
        raise InvariantViolation(f"S{a} = {s} outside [-W, W]^k")
    return s
