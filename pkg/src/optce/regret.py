"""Equilibrium verification and per-profile regret vectors.

The regret vector of a profile lists every pairwise deviation regret
followed by one or more objective-gap components. Layouts:

* ``ce``      (p, i, j) for i != j, then ``T - w(a)``
* ``cce``     (p, j) for every j, then ``T - w(a)``
* ``egal``    (p, i, j) for i != j, then ``T - u_p(a)`` for each p
* ``pareto``  (p, i, j) for i != j, then ``T - u_q(a)``

With heterogeneous action counts the CE block has sum_p m_p (m_p - 1) entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .game import CorrelatedDistribution, Game, deviate

VERIFY_TOL = 1e-9
MODES = ("ce", "cce", "egal", "pareto")


@dataclass(frozen=True)
class RegretSpace:
    """Index space shared by regret and scaling vectors."""

    action_counts: tuple[int, ...]
    mode: str = "ce"
    q: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "action_counts", tuple(int(m) for m in self.action_counts))
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "pareto":
            if self.q is None or not 0 <= self.q < self.n:
                raise ValueError(f"pareto mode needs a player index q in [0, {self.n})")
        elif self.q is not None:
            raise ValueError("q only applies to pareto mode")

    @classmethod
    def parse(cls, action_counts, mode: str) -> "RegretSpace":
        """Accepts ``ce``, ``cce``, ``egal`` or ``pareto:q``."""
        if mode.startswith("pareto"):
            _, _, q = mode.partition(":")
            if not q:
                raise ValueError("pareto mode is written pareto:q")
            return cls(action_counts, "pareto", int(q))
        return cls(action_counts, mode)

    @property
    def n(self):
        return len(self.action_counts)

    @property
    def label(self):
        return f"pareto:{self.q}" if self.mode == "pareto" else self.mode

    @property
    def deviation_offsets(self) -> list[int]:
        offs, pos = [], 0
        for m in self.action_counts:
            offs.append(pos)
            pos += m if self.mode == "cce" else m * (m - 1)
        return offs + [pos]

    @property
    def n_deviation(self) -> int:
        return self.deviation_offsets[-1]

    @property
    def n_objective(self) -> int:
        return self.n if self.mode == "egal" else 1

    @property
    def dim(self) -> int:
        return self.n_deviation + self.n_objective

    def index(self, p: int, i: int | None, j: int) -> int:
        """Flat position of deviation component (p, i, j); ``i`` is ignored in cce mode."""
        base = self.deviation_offsets[p]
        m = self.action_counts[p]
        if self.mode == "cce":
            return base + j
        if i == j:
            raise ValueError("deviation components need i != j")
        return base + i * (m - 1) + (j if j < i else j - 1)

    def deviation_blocks(self, vec) -> list[np.ndarray]:
        """Per-player ``m_p x m_p`` matrices ``B[i][j]``, zero on the diagonal for ce layouts.

        In cce mode every row holds the same ``(p, j)`` entries.
        """
        vec = np.asarray(vec)
        out = []
        offs = self.deviation_offsets
        for p, m in enumerate(self.action_counts):
            seg = vec[offs[p]:offs[p + 1]]
            if self.mode == "cce":
                out.append(np.tile(seg, (m, 1)))
            else:
                block = np.zeros((m, m), dtype=vec.dtype)
                if m > 1:
                    mask = ~np.eye(m, dtype=bool)
                    block[mask] = seg
                out.append(block)
        return out

    def objective_weights(self, vec) -> np.ndarray:
        """Weight each player's utility receives from the objective components."""
        vec = np.asarray(vec)
        obj = vec[self.n_deviation:]
        w = np.zeros(self.n, dtype=vec.dtype)
        if self.mode == "egal":
            w[:] = obj
        elif self.mode == "pareto":
            w[self.q] = obj[0]
        else:
            w[:] = obj[0]
        return w

    def objective_mass(self, vec):
        """Sum of the objective components (multiplies the target in y.r)."""
        return np.asarray(vec)[self.n_deviation:].sum()

    def zeros(self):
        return np.zeros(self.dim)


@dataclass(frozen=True)
class RegretVector:
    space: RegretSpace
    values: np.ndarray
    target: float

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ScalingVector:
    """Nonnegative weights over a regret index space."""

    space: RegretSpace
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.space.dim,):
            raise DimensionError(f"scaling vector needs {self.space.dim} entries, got {vals.shape}")
        if (vals < 0).any():
            raise ValueError("scaling vector components must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def y_d(self):
        return self.values[-1]

    def blocks(self):
        return self.space.deviation_blocks(self.values)

    def objective_weights(self):
        return self.space.objective_weights(self.values)


def _deviation_values(game: Game, a, p):
    """``[u_p(j, a_{-p}) for j in A_p]``."""
    return [game.utility(p, deviate(a, p, j)) for j in range(game.action_counts[p])]


def build_regret_vector(game: Game, a: Sequence[int], target, space: RegretSpace | str = "ce"
                        ) -> RegretVector:
    if isinstance(space, str):
        space = RegretSpace.parse(game.action_counts, space)
    if space.action_counts != tuple(game.action_counts):
        raise DimensionError("regret space does not match the game's action counts")
    a = game.check_profile(a)
    vals = np.zeros(space.dim)
    utils = []
    for p in range(game.n):
        dev = _deviation_values(game, a, p)
        ua = dev[a[p]]
        utils.append(ua)
        for j, uj in enumerate(dev):
            if space.mode == "cce":
                vals[space.index(p, None, j)] = uj - ua
            elif j != a[p]:
                vals[space.index(p, a[p], j)] = uj - ua
    obj = space.n_deviation
    if space.mode == "egal":
        for p, up in enumerate(utils):
            vals[obj + p] = target - up
    elif space.mode == "pareto":
        vals[obj] = target - utils[space.q]
    else:
        vals[obj] = target - sum(utils)
    return RegretVector(space, vals, target)


def scaled_regret(y: ScalingVector, r: RegretVector) -> float:
    """``y^T r(a)``."""
    if y.space != r.space:
        raise DimensionError("scaling and regret vectors live in different index spaces")
    return float(np.dot(y.values, r.values))


def ce_pair_regret(game: Game, x: CorrelatedDistribution, p: int, i: int, j: int):
    """Expected gain for player p from switching every recommendation i to j."""
    if i == j:
        raise ValueError("ce_pair_regret needs distinct actions")
    m = game.action_counts[p]
    if not (0 <= i < m and 0 <= j < m):
        raise ValueError(f"actions must lie in [0, {m})")
    total = 0
    for a, mass in x.items():
        a = game.check_profile(a)
        if a[p] == i:
            total += mass * (game.utility(p, deviate(a, p, j)) - game.utility(p, a))
    return total


def cce_deviation_regret(game: Game, x: CorrelatedDistribution, p: int, j: int):
    """Expected gain for player p from committing to j before the draw."""
    if not 0 <= j < game.action_counts[p]:
        raise ValueError(f"action {j} invalid for player {p}")
    total = 0
    for a, mass in x.items():
        a = game.check_profile(a)
        total += mass * (game.utility(p, deviate(a, p, j)) - game.utility(p, a))
    return total


def _regret_tables(game: Game, x: CorrelatedDistribution):
    """One pass over Supp(x): CE table R[p][i][j] and CCE table C[p][j]."""
    ce = [np.zeros((m, m), dtype=object) for m in game.action_counts]
    cce = [np.zeros(m, dtype=object) for m in game.action_counts]
    for a, mass in x.items():
        a = game.check_profile(a)
        for p in range(game.n):
            dev = _deviation_values(game, a, p)
            ua = dev[a[p]]
            for j, uj in enumerate(dev):
                g = mass * (uj - ua)
                ce[p][a[p], j] += g
                cce[p][j] += g
    return ce, cce


@dataclass(frozen=True)
class RegretReport:
    max_regret: float
    argmax: tuple | None
    epsilon: float
    concept: str

    @property
    def is_eps_equilibrium(self) -> bool:
        return bool(self.max_regret <= self.epsilon + VERIFY_TOL)

    def to_dict(self):
        key = "max_ce_regret" if self.concept == "ce" else "max_cce_regret"
        flag = "is_eps_ce" if self.concept == "ce" else "is_eps_cce"
        return {key: float(self.max_regret),
                "argmax": [int(v) for v in self.argmax] if self.argmax is not None else None,
                flag: self.is_eps_equilibrium, "eps": float(self.epsilon)}


def ce_report(game: Game, x: CorrelatedDistribution, eps: float = 0.0) -> RegretReport:
    ce, _ = _regret_tables(game, x)
    best, arg = None, None
    for p, table in enumerate(ce):
        m = table.shape[0]
        for i in range(m):
            for j in range(m):
                if i != j and (best is None or table[i, j] > best):
                    best, arg = table[i, j], (p, i, j)
    return RegretReport(0 if best is None else best, arg, eps, "ce")


def cce_report(game: Game, x: CorrelatedDistribution, eps: float = 0.0) -> RegretReport:
    _, cce = _regret_tables(game, x)
    best, arg = None, None
    for p, row in enumerate(cce):
        for j, v in enumerate(row):
            if best is None or v > best:
                best, arg = v, (p, j)
    return RegretReport(best, arg, eps, "cce")


def max_ce_regret(game: Game, x: CorrelatedDistribution):
    """Largest pairwise CE regret; x is an eps-CE iff this is <= eps.

    Games where nobody has two actions have no deviation pairs; 0 is returned.
    """
    return ce_report(game, x).max_regret


def max_cce_regret(game: Game, x: CorrelatedDistribution):
    return cce_report(game, x).max_regret


def expected_regret_vector(game: Game, x: CorrelatedDistribution, target, space: RegretSpace):
    """``E_{a ~ x}[r(a)]``."""
    total = np.zeros(space.dim)
    for a, mass in x.items():
        total += float(mass) * build_regret_vector(game, a, target, space).values
    return total
