"""JSON files for games, distributions and scaling vectors.

Explicit games list utilities player-major, profiles in lexicographic order.
Floats are written with Python's shortest round-trip repr, so reading a file
back reproduces every value bit for bit.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .aggregative import AggregativeGame, payoff_from_dict
from .errors import DimensionError
from .game import CorrelatedDistribution, ExplicitGame, Game
from .gadgets import GadgetGame, build_gadget
from .lp import exact_table
from .regret import RegretSpace, ScalingVector


def _plain(v):
    """JSON-safe scalar or nested list; Fractions become floats."""
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (Fraction, np.floating)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def game_to_dict(game: Game) -> dict:
    if isinstance(game, ExplicitGame):
        return {"type": "explicit", "n": game.n, "m": list(game.action_counts),
                "u": [_plain(game.table[p].ravel()) for p in range(game.n)]}
    if isinstance(game, AggregativeGame):
        return {"type": "aggregative", "k": game.k, "W": _plain(game.W),
                "W_prime": _plain(game.W_prime), "f": _plain([list(r) for r in game.f]),
                "payoff": {"family": game.payoff.name, "params": _plain_params(game.payoff.params())}}
    if isinstance(game, GadgetGame):
        return {"type": "gadget", "base": game_to_dict(game.base), "opt": _plain(game.opt),
                "eps": _plain(game.eps)}
    raise TypeError(f"cannot serialize {type(game).__name__}")


def _plain_params(params: dict) -> dict:
    return {k: _plain(v) for k, v in params.items()}


def game_from_dict(d: dict) -> Game:
    kind = d.get("type")
    if kind == "explicit":
        m = [int(v) for v in d["m"]]
        n = int(d.get("n", len(m)))
        if len(m) != n or len(d["u"]) != n:
            raise DimensionError("explicit game needs one action count and one utility list per player")
        table = np.array(d["u"], dtype=float)
        if table.shape[1] != int(np.prod(m)):
            raise DimensionError(f"each utility list needs {int(np.prod(m))} entries")
        return ExplicitGame(table.reshape([n] + m))
    if kind == "aggregative":
        f = d["f"]
        W_prime = d.get("W_prime")
        if W_prime is None:
            W_prime = max(abs(c) for row in f for vec in row for c in vec)
        return AggregativeGame(f, payoff_from_dict(d["payoff"]), d["W"], W_prime)
    if kind == "gadget":
        base = game_from_dict(d["base"])
        if isinstance(base, ExplicitGame):
            # gadget checks compare exactly, so restore small-ratio utilities
            exact = exact_table(base)
            if exact is not None:
                base = ExplicitGame(exact)
        return build_gadget(base, d["opt"], d.get("eps"))
    raise ValueError(f"unknown game type {kind!r}")


def load_game(path) -> Game:
    with open(path) as fh:
        return game_from_dict(json.load(fh))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


def save_game(game: Game, path):
    with open(path, "w") as fh:
        fh.write(dumps(game_to_dict(game)) + "\n")


def distribution_to_dict(x: CorrelatedDistribution) -> dict:
    return {"entries": [{"profile": list(a), "p": float(m)} for a, m in sorted(x.items())]}


def distribution_from_dict(d: dict) -> CorrelatedDistribution:
    return CorrelatedDistribution([(e["profile"], e["p"]) for e in d["entries"]])


def load_distribution(path) -> CorrelatedDistribution:
    with open(path) as fh:
        return distribution_from_dict(json.load(fh))


def save_distribution(x: CorrelatedDistribution, path):
    with open(path, "w") as fh:
        fh.write(dumps(distribution_to_dict(x)) + "\n")


def scaling_from_dict(game: Game, d: dict) -> ScalingVector:
    """``{"mode": "ce", "values": [...]}``; mode defaults to ce."""
    space = RegretSpace.parse(game.action_counts, d.get("mode", "ce"))
    return ScalingVector(space, np.array(d["values"], dtype=float))


def load_scaling(game: Game, path) -> ScalingVector:
    with open(path) as fh:
        return scaling_from_dict(game, json.load(fh))
