"""Benchmark sweeps over generated instance families, one CSV row per instance."""
from __future__ import annotations

import csv
import itertools
import json
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .generators import FAMILIES, generate
from .lp import LP_CAP, optimal_equilibrium, worst_equilibrium
from .mwmp import make_oracle
from .solver import SolverConfig, binary_search_target, iteration_budget, solve

COLUMNS = ["family", "n", "m", "k", "seed", "eps", "beta", "solver_welfare", "max_regret",
           "iteration_budget", "iterations", "wall_time", "error"]


@dataclass
class BenchmarkSpec:
    family: str = "random-explicit"
    n: list = field(default_factory=lambda: [2])
    m: list = field(default_factory=lambda: [2])
    k: list = field(default_factory=lambda: [1])
    seeds: list = field(default_factory=list)
    eps: list = field(default_factory=lambda: [0.1])
    output: str = "bench_out"
    mode: str = "ce"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        for name in ("n", "m", "k", "seeds", "eps"):
            v = getattr(self, name)
            setattr(self, name, list(v) if isinstance(v, (list, tuple)) else [v])

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkSpec":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown benchmark fields: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def load(cls, path) -> "BenchmarkSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def tasks(self):
        ks = self.k if self.family == "aggregative-congestion" else [1]
        for n, m, k, seed, eps in itertools.product(self.n, self.m, ks, self.seeds, self.eps):
            yield {"family": self.family, "n": int(n), "m": int(m), "k": int(k),
                   "seed": int(seed), "eps": float(eps), "mode": self.mode}


def run_instance(task: dict) -> dict:
    """Generate, measure beta by LP where small enough, solve; never raises."""
    row = {c: "" for c in COLUMNS}
    row.update({c: task[c] for c in ("family", "n", "m", "k", "seed", "eps")})
    start = time.perf_counter()
    try:
        game = generate(task["family"], task["n"], task["m"], task["k"], task["seed"])
        eps, mode = task["eps"], task["mode"]
        small = game.num_profiles <= LP_CAP
        if small:
            best = optimal_equilibrium(game, "cce", "welfare").objective_value
            worst = worst_equilibrium(game, "cce", "welfare").objective_value
            row["beta"] = float(worst / best) if best else ""
        row["iteration_budget"] = iteration_budget(game.n, max(game.action_counts), eps)
        oracle = make_oracle(game, "auto", delta=1 if task["family"] == "aggregative-congestion" else None)
        if small:
            x, trace = solve(game, oracle, SolverConfig(eps, "lp", mode))
        else:
            res = binary_search_target(game, oracle, eps, mode)
            x, trace = res.distribution, res.trace
        row["solver_welfare"] = trace.certificate["objective"]
        row["max_regret"] = trace.certificate["max_regret"]
        row["iterations"] = trace.iterations
    except Exception as err:  # recorded per row, the sweep goes on
        row["error"] = f"{type(err).__name__}: {err}".replace("\n", " ")
        if os.environ.get("OPTCE_DEBUG"):
            traceback.print_exc()
    row["wall_time"] = round(time.perf_counter() - start, 6)
    return row


def run_benchmark(spec: BenchmarkSpec, workers: int = 1) -> list[dict]:
    tasks = list(spec.tasks())
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_instance, tasks))
    else:
        rows = [run_instance(t) for t in tasks]
    return rows


def write_report(rows: list[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(row)
    return path
