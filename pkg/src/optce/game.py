"""Normal-form game representations, distributions and welfare.

Action profiles are plain tuples of action indices, one per player. Every
game type exposes ``n``, ``action_counts`` and ``utility(p, a)``; the rest
of the package only relies on that surface.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, InvariantViolation, NormalizationError

PROB_TOL = 1e-12
MATERIALIZE_CAP = 10**6


def as_exact(value, max_denominator: int = 10**6):
    """Return ``value`` as a Fraction if it is a ratio of small integers.

    Floats qualify only when the recovered fraction maps back to exactly the
    same float. Returns None otherwise.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    frac = Fraction(float(value)).limit_denominator(max_denominator)
    return frac if float(frac) == float(value) else None


class Game:
    """Shared profile helpers. Subclasses implement ``utility``."""

    n: int
    action_counts: tuple[int, ...]

    def utility(self, p: int, a: Sequence[int]):
        raise NotImplementedError

    @property
    def num_profiles(self) -> int:
        return math.prod(self.action_counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.action_counts

    def profiles(self) -> Iterator[tuple[int, ...]]:
        """All profiles in lexicographic order."""
        return itertools.product(*(range(m) for m in self.action_counts))

    def check_profile(self, a: Sequence[int]) -> tuple[int, ...]:
        a = tuple(int(v) for v in a)
        if len(a) != self.n:
            raise DimensionError(f"profile {a} has {len(a)} entries, game has {self.n} players")
        for p, (ap, m) in enumerate(zip(a, self.action_counts)):
            if not 0 <= ap < m:
                raise DimensionError(f"action {ap} of player {p} outside [0, {m})")
        return a

    def utilities_at(self, a: Sequence[int]) -> list:
        return [self.utility(p, a) for p in range(self.n)]


def deviate(a: Sequence[int], p: int, j: int) -> tuple[int, ...]:
    """The profile (j, a_{-p})."""
    a = tuple(a)
    return a[:p] + (j,) + a[p + 1:]


class ExplicitGame(Game):
    """Dense utility table ``u[p][a_1]...[a_n]`` with values in [0, 1].

    A table containing Fractions is kept as an object array so that downstream
    computations (LP, gadget checks) stay exact.
    """

    def __init__(self, utilities):
        table = _as_table(utilities)
        if table.ndim < 2:
            raise DimensionError("utility table needs a player axis and at least one action axis")
        n = table.shape[0]
        if table.ndim != n + 1:
            raise DimensionError(f"table for {n} players must have {n + 1} axes, got {table.ndim}")
        if any(m < 1 for m in table.shape[1:]):
            raise DimensionError("every player needs at least one action")
        lo, hi = table.min(), table.max()
        if lo < 0 or hi > 1:
            raise InvariantViolation(f"utilities must lie in [0,1], found range [{lo}, {hi}]")
        table.flags.writeable = False
        self.table = table
        self.n = n
        self.action_counts = tuple(int(m) for m in table.shape[1:])

    @property
    def exact(self) -> bool:
        return self.table.dtype == object

    def utility(self, p, a):
        return self.table[(p,) + tuple(a)]

    def utilities_at(self, a):
        return list(self.table[(slice(None),) + tuple(a)])

    @cached_property
    def welfare_table(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def deviation_gains(self, p: int) -> np.ndarray:
        """Array ``G[j][a] = u_p(j, a_{-p}) - u_p(a)`` for player ``p``."""
        return self._gains[p]

    @cached_property
    def _gains(self):
        out = []
        for p in range(self.n):
            u = self.table[p]
            out.append(np.stack([
                np.take(u, [j], axis=p) - u for j in range(self.action_counts[p])
            ]))
        return out

    def __repr__(self):
        return f"ExplicitGame(n={self.n}, action_counts={self.action_counts})"


def _as_table(utilities) -> np.ndarray:
    if isinstance(utilities, np.ndarray) and utilities.dtype != object:
        return np.array(utilities, dtype=float)
    arr = np.array(utilities, dtype=object)
    flat = arr.ravel()
    if any(isinstance(v, Fraction) for v in flat):
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [_to_fraction(v) for v in flat]
        return out
    return arr.astype(float)


@dataclass(frozen=True)
class SuccinctGameOracle(Game):
    """Game given by a pure evaluator ``(p, a) -> u_p(a)`` in [0, 1]."""

    n: int
    action_counts: tuple[int, ...]
    evaluator: Callable[[int, tuple], float]

    def __post_init__(self):
        object.__setattr__(self, "action_counts", tuple(int(m) for m in self.action_counts))
        if len(self.action_counts) != self.n:
            raise DimensionError("action_counts must have one entry per player")

    def utility(self, p, a):
        v = self.evaluator(p, tuple(a))
        if not 0 <= v <= 1:
            raise InvariantViolation(f"u_{p}{tuple(a)} = {v} outside [0,1]")
        return v


def explicit_from_succinct(game: Game, cap: int = MATERIALIZE_CAP) -> ExplicitGame:
    """Materialize any game into a dense table (``n * |A|`` entries, capped)."""
    if isinstance(game, ExplicitGame):
        return game
    entries = game.n * game.num_profiles
    if entries > cap:
        raise CapacityError(f"{entries} utility entries exceed cap {cap}")
    values = [game.utility(p, a) for p in range(game.n) for a in game.profiles()]
    if any(isinstance(v, Fraction) for v in values):
        table = np.empty(len(values), dtype=object)
        table[:] = [Fraction(v) for v in values]
    else:
        table = np.array(values, dtype=float)
    return ExplicitGame(table.reshape((game.n,) + game.action_counts))


@dataclass(frozen=True)
class AffineTransform:
    """Records ``u -> (u - lo) / (hi - lo)``."""

    lo: float
    hi: float

    def apply(self, u):
        return (u - self.lo) / (self.hi - self.lo)

    def inverse(self, v):
        return self.lo + v * (self.hi - self.lo)


def normalize(utilities, lo=None, hi=None) -> tuple[ExplicitGame, AffineTransform]:
    """Map an arbitrary utility table affinely into [0, 1].

    Bounds default to the table's own min and max. A constant table maps to
    all zeros.
    """
    arr = np.asarray(utilities, dtype=object if _has_fraction(utilities) else float)
    lo = arr.min() if lo is None else lo
    hi = arr.max() if hi is None else hi
    if hi < lo:
        raise ValueError("hi must be >= lo")
    if hi == lo:
        hi = lo + 1
    tf = AffineTransform(lo, hi)
    return ExplicitGame(tf.apply(arr)), tf


def _to_fraction(v) -> Fraction:
    exact = as_exact(v)
    return exact if exact is not None else Fraction(v)


def _has_fraction(x) -> bool:
    return any(isinstance(v, Fraction) for v in np.asarray(x, dtype=object).ravel())


class CorrelatedDistribution:
    """Sparse distribution over action profiles.

    Masses may be floats or Fractions. Totals within ``PROB_TOL`` of one are
    re-normalized; anything further off is rejected. Zero masses are dropped.
    """

    def __init__(self, entries: Mapping[Sequence[int], float] | Iterable, tol: float = PROB_TOL):
        items = entries.items() if isinstance(entries, Mapping) else entries
        masses: dict[tuple[int, ...], object] = {}
        for a, mass in items:
            a = tuple(int(v) for v in a)
            if mass < 0:
                raise NormalizationError(f"negative mass {mass} on {a}")
            if mass == 0:
                continue
            masses[a] = masses.get(a, 0) + mass
        if not masses:
            raise NormalizationError("distribution has no mass")
        total = sum(masses.values())
        if abs(total - 1) > tol:
            raise NormalizationError(f"masses sum to {total}, not 1")
        if total != 1:
            masses = {a: m / total for a, m in masses.items()}
        self.entries = masses

    @classmethod
    def point_mass(cls, a):
        return cls({tuple(a): 1})

    @classmethod
    def uniform(cls, profiles):
        profiles = [tuple(a) for a in profiles]
        return cls.empirical(profiles)

    @classmethod
    def empirical(cls, profiles):
        """Empirical distribution of a multiset of profiles (exact masses)."""
        counts: dict[tuple[int, ...], int] = {}
        for a in profiles:
            a = tuple(a)
            counts[a] = counts.get(a, 0) + 1
        total = sum(counts.values())
        return cls({a: Fraction(c, total) for a, c in counts.items()})

    def validate_for(self, game: Game) -> "CorrelatedDistribution":
        for a in self.entries:
            game.check_profile(a)
        return self

    def mix(self, other: "CorrelatedDistribution", lam) -> "CorrelatedDistribution":
        """``lam * self + (1 - lam) * other``."""
        out: dict = {}
        for a, m in self.entries.items():
            out[a] = out.get(a, 0) + lam * m
        for a, m in other.entries.items():
            out[a] = out.get(a, 0) + (1 - lam) * m
        return CorrelatedDistribution(out)

    def items(self):
        return self.entries.items()

    @property
    def support(self):
        return list(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, a):
        return self.entries.get(tuple(a), 0)

    def __repr__(self):
        return f"CorrelatedDistribution(support={len(self.entries)})"


def welfare(game: Game, a: Sequence[int]):
    a = game.check_profile(a)
    return sum(game.utilities_at(a))


def expected_utility(game: Game, x: CorrelatedDistribution, p: int):
    return sum(m * game.utility(p, game.check_profile(a)) for a, m in x.items())


def expected_welfare(game: Game, x: CorrelatedDistribution):
    return sum(m * welfare(game, a) for a, m in x.items())
