"""Seeded instance families for tests and benchmarks."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .aggregative import AggregativeGame, CongestionPayoff, LinearPayoff
from .game import ExplicitGame
from .gadgets import build_gadget

FAMILIES = ("random-explicit", "gadget", "aggregative-congestion")


def random_explicit(n: int, m: int | list, seed: int, denominator: int | None = None
                    ) -> ExplicitGame:
    """Uniform utilities; with ``denominator`` they are exact multiples of 1/denominator."""
    rng = np.random.default_rng(seed)
    counts = [m] * n if isinstance(m, int) else list(m)
    shape = (n, *counts)
    if denominator is None:
        return ExplicitGame(rng.random(shape))
    ints = rng.integers(0, denominator + 1, size=shape)
    table = np.empty(shape, dtype=object)
    table.ravel()[:] = [Fraction(int(v), denominator) for v in ints.ravel()]
    return ExplicitGame(table)


def max_welfare(game: ExplicitGame):
    """Largest profile welfare, by enumeration."""
    return max(sum(game.utilities_at(a)) for a in game.profiles())


def gadget_instance(n: int, m: int, seed: int, denominator: int = 10, eps=None):
    """Gadget over a random rational base with OPT set to the base's best profile welfare.

    Redraws until that welfare is positive.
    """
    s = seed
    while True:
        base = random_explicit(n, m, s, denominator)
        opt = max_welfare(base)
        if opt > 0:
            return build_gadget(base, opt, eps)
        s += 10**6


def aggregative_congestion(n: int, m: int, k: int, seed: int, float_values: bool = True
                           ) -> AggregativeGame:
    """Weighted congestion game over k resources.

    Action 0 stays out (contributes nothing); action a >= 1 puts integer
    load ``w`` in {1, 2} on one resource. Utility is a base value minus the
    load on the used resources, normalized by the largest possible aggregate.
    Contributions are integers, so a unit grid discretizes them exactly.
    """
    rng = np.random.default_rng(seed)
    f, base, usage = [], [], []
    for p in range(n):
        row_f, row_b, row_u = [], [], []
        for a in range(m):
            vec = [0] * k
            if a > 0:
                vec[int(rng.integers(k))] = int(rng.integers(1, 3))
            row_f.append(tuple(vec))
            row_u.append(list(vec))
            lo, hi = (2, 10) if a == 0 else (8, 20)
            row_b.append(Fraction(int(rng.integers(lo, hi + 1)), 20))
        f.append(row_f)
        base.append(row_b)
        usage.append(row_u)
    W_prime = 2
    W = n * W_prime
    scale = Fraction(W)
    if float_values:
        base = [[float(b) for b in row] for row in base]
        scale = float(scale)
    return AggregativeGame(f, CongestionPayoff(base, usage, scale), W, W_prime)


def aggregative_linear(n: int, m: int, k: int, seed: int, denominator: int = 8
                       ) -> AggregativeGame:
    """Random linear-payoff aggregative game with exact rational data.

    Contributions are off-grid rationals so discretization has work to do.
    """
    rng = np.random.default_rng(seed)
    W_prime = Fraction(1)

    def rat(lo, hi):
        return Fraction(int(rng.integers(lo * denominator, hi * denominator + 1)), denominator)

    f = [[tuple(Fraction(int(rng.integers(-97, 98)), 97) for _ in range(k)) for _ in range(m)]
         for _ in range(n)]
    alpha = [[rat(0, 1) for _ in range(m)] for _ in range(n)]
    beta = []
    for _ in range(n):
        row = []
        for _ in range(m):
            raw = [rat(-1, 1) for _ in range(k)]
            norm = sum(abs(b) for b in raw)
            row.append([b / norm if norm > 1 else b for b in raw])
        beta.append(row)
    return AggregativeGame(f, LinearPayoff(alpha, beta), n * W_prime, W_prime)


def generate(family: str, n: int = 2, m: int = 2, k: int = 1, seed: int = 0, **kw):
    if family == "random-explicit":
        return random_explicit(n, m, seed, kw.get("denominator"))
    if family == "gadget":
        return gadget_instance(n, m, seed, kw.get("denominator") or 10, kw.get("eps"))
    if family == "aggregative-congestion":
        return aggregative_congestion(n, m, k, seed)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
