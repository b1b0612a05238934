"""The augmented-action gadget game G' built on top of a base game G.

Every player gets one extra action b_p (index m_p in G'). Utilities:

1. base profiles: identical interest, ``u'_p(a) = w(a) / n``;
2. exactly one player on b_p: that player gets ``OPT / n``, others 0;
3. two or more on their b's: ``eps / n`` for those players, 0 for the rest.

The all-b profile is a pure Nash equilibrium with welfare ``eps`` and no CCE
of G' has lower welfare, which makes G' a generator of instances with a
known worst equilibrium.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import StructuralViolation
from .game import Game, as_exact, explicit_from_succinct, welfare

ENUMERATION_CAP = 10**5


def _exactify(v):
    """Keep small rationals exact so gadget checks compare without rounding."""
    if isinstance(v, float):
        frac = as_exact(v)
        return frac if frac is not None else v
    if isinstance(v, int):
        return Fraction(v)
    return v


@dataclass(frozen=True, eq=False)
class GadgetGame(Game):
    base: Game
    opt: object
    eps: object
    n: int = field(init=False)
    action_counts: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.base.n)
        object.__setattr__(self, "action_counts", tuple(m + 1 for m in self.base.action_counts))

    def augmented(self, p: int) -> int:
        return self.base.action_counts[p]

    def augmented_players(self, a) -> list[int]:
        return [p for p, ap in enumerate(a) if ap == self.augmented(p)]

    def utility(self, p, a):
        a = tuple(a)
        aug = self.augmented_players(a)
        if not aug:
            return welfare(self.base, a) / self.n
        if len(aug) == 1:
            return self.opt / self.n if aug[0] == p else 0 * self.opt
        return self.eps / self.n if p in aug else 0 * self.eps

    @property
    def all_augmented(self) -> tuple[int, ...]:
        return tuple(self.base.action_counts)

    def to_explicit(self):
        return explicit_from_succinct(self)


def build_gadget(base: Game, opt, eps=None) -> GadgetGame:
    """G' for decision parameter ``opt``; ``eps`` defaults to ``opt / n``.

    Requires ``0 < opt <= n`` and ``opt > eps >= opt / n``. ``opt="lp"``
    takes the best CCE welfare of the base from the exact LP.
    """
    n = base.n
    if opt == "lp":
        from .lp import optimal_equilibrium
        opt = optimal_equilibrium(base, "cce", "welfare").objective_value
    opt = _exactify(opt)
    eps = opt / n if eps is None else _exactify(eps)
    if not 0 < opt <= n:
        raise ValueError(f"OPT must lie in (0, n], got {opt}")
    if not (opt > eps >= opt / n):
        raise ValueError(f"need OPT > eps >= OPT/n, got OPT={opt}, eps={eps}, n={n}")
    return GadgetGame(base, opt, eps)


def build_ant_gadget(base: Game, tau: int) -> GadgetGame:
    """Approximate-version gadget: ``eps = (tau + 1) / n`` with ``tau + 1`` in OPT's role."""
    n = base.n
    if n < 4:
        raise ValueError("the approximate gadget assumes n >= 4")
    if int(tau) != tau or not 0 <= tau <= n - 1:
        raise ValueError(f"tau must be an integer in [0, {n - 1}]")
    opt = Fraction(int(tau) + 1)
    return build_gadget(base, opt, opt / n)


def gadget_potential(game: GadgetGame, a) -> object:
    """Exact potential: w(a)/n on base profiles, OPT/n + (k-1) eps/n otherwise."""
    a = game.check_profile(a)
    k = len(game.augmented_players(a))
    if k == 0:
        return welfare(game.base, a) / game.n
    return game.opt / game.n + (k - 1) * game.eps / game.n


@dataclass
class GadgetReport:
    b_is_nash: bool
    potential_holds: bool
    b_is_worst_profile: bool
    checked_profiles: int
    checked_deviations: int
    failures: dict

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"b_is_nash": self.b_is_nash, "potential_holds": self.potential_holds,
                "b_is_worst_profile": self.b_is_worst_profile,
                "checked_profiles": self.checked_profiles,
                "checked_deviations": self.checked_deviations,
                "failures": {k: list(v) for k, v in self.failures.items()}}


def _close(x, y, tol):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    return abs(x - y) <= tol


def verify_gadget_structure(game: GadgetGame, tol: float = 1e-9, raise_on_failure=True,
                            cap: int = ENUMERATION_CAP) -> GadgetReport:
    """Exhaustive structural checks on a small gadget.

    (i) no player gains by leaving b; (ii) the potential difference equals
    the utility difference for every unilateral deviation; (iii) every
    profile outside the base game has welfare at most w'(b).
    """
    if game.num_profiles > cap:
        raise ValueError(f"{game.num_profiles} profiles exceed the enumeration cap {cap}")
    failures = {}
    b = game.all_augmented
    ub = game.utilities_at(b)
    wb = sum(ub)
    for p in range(game.n):
        for j in range(game.action_counts[p]):
            dev = b[:p] + (j,) + b[p + 1:]
            if game.utility(p, dev) > ub[p] and not _close(game.utility(p, dev), ub[p], tol):
                failures.setdefault("nash", dev)

    n_dev = 0
    phi = {}
    utils = {}
    for a in game.profiles():
        phi[a] = gadget_potential(game, a)
        utils[a] = game.utilities_at(a)
    for a in game.profiles():
        for p in range(game.n):
            for j in range(a[p] + 1, game.action_counts[p]):
                other = a[:p] + (j,) + a[p + 1:]
                n_dev += 1
                du = utils[a][p] - utils[other][p]
                dphi = phi[a] - phi[other]
                if not _close(du, dphi, tol):
                    failures.setdefault("potential", a)
        if game.augmented_players(a):
            w = sum(utils[a])
            if w > wb and not _close(w, wb, tol):
                failures.setdefault("worst_welfare", a)

    report = GadgetReport("nash" not in failures, "potential" not in failures,
                          "worst_welfare" not in failures, len(phi), n_dev, failures)
    if failures and raise_on_failure:
        raise StructuralViolation(failures)
    return report
