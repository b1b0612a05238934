import csv
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from optce import io
from optce.bench import BenchmarkSpec, run_benchmark
from optce.cli import main
from optce.gadgets import verify_gadget_structure
from optce.generators import max_welfare
from optce.lp import optimal_equilibrium


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    try:
        return code, json.loads(out)
    except json.JSONDecodeError:
        return code, out


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "generate", "--family", "random-explicit", "--n", 2, "--m", 2,
                   "--seed", 7, "-o", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    run(capsys, "generate", "--n", 2, "--m", 2, "--seed", 8, "-o", c)
    assert a.read_bytes() != c.read_bytes()


def test_generated_families_validate(tmp_path, capsys):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--family", "gadget", "--n", 2, "--m", 2, "--seed", 3, "-o", g)
    assert verify_gadget_structure(io.load_game(g)).ok
    code, rep = run(capsys, "gadget", "verify", g)
    assert code == 0 and rep["failures"] == {}
    agg = tmp_path / "agg.json"
    run(capsys, "generate", "--family", "aggregative-congestion", "--n", 4, "--m", 3, "--k", 1,
        "--seed", 1, "-o", agg)
    game = io.load_game(agg)  # construction enforces bounded influence
    assert game.payoff.lipschitz <= 1 and game.k == 1


def test_solve_then_verify(tmp_path, capsys):
    g, x, t = tmp_path / "g.json", tmp_path / "x.json", tmp_path / "t.csv"
    run(capsys, "generate", "--n", 3, "--m", 2, "--seed", 2, "-o", g)
    code, out = run(capsys, "solve", "--game", g, "--eps", 0.05, "--target", "lp", "-o", x,
                    "--trace", t)
    assert code == 0 and out["certified"]
    code, rep = run(capsys, "verify", "--game", g, "--x", x, "--eps", 0.05)
    assert code == 0 and rep["is_eps_ce"]
    assert rep["max_ce_regret"] == pytest.approx(out["max_regret"], abs=1e-12)
    assert rep["argmax"] == out["argmax"]
    header = next(csv.reader(open(t)))
    assert header == ["t", "distance", "oracle_value", "support_size"]
    # a stricter eps is reported as not certified
    code, rep = run(capsys, "verify", "--game", g, "--x", x, "--eps", 0.0)
    assert code == (0 if rep["max_ce_regret"] <= 1e-9 else 1)


@pytest.mark.parametrize("mode", ["cce", "egal", "pareto:1"])
def test_solve_modes(tmp_path, capsys, mode):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--n", 2, "--m", 3, "--seed", 5, "-o", g)
    code, out = run(capsys, "solve", "--game", g, "--eps", 0.1, "--mode", mode)
    assert code == 0 and out["mode"] == mode


def test_solve_search_with_dp(tmp_path, capsys):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--family", "aggregative-congestion", "--n", 4, "--m", 3,
        "--seed", 0, "-o", g)
    code, out = run(capsys, "solve", "--game", g, "--eps", 0.1, "--target", "search",
                    "--oracle", "aggdp", "--delta", 1)
    assert code == 0 and out["certified"] and out["invocations"] >= 1


def test_solve_infeasible_target_exit_code(tmp_path, capsys):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--n", 2, "--m", 2, "--seed", 0, "-o", g)
    code, out = run(capsys, "solve", "--game", g, "--eps", 0.05, "--target", 2)
    assert code == 1 and not out["certified"]


def test_lp_solve(tmp_path, capsys):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--n", 2, "--m", 2, "--seed", 1, "--denominator", 10, "-o", g)
    code, out = run(capsys, "lp-solve", "--game", g, "--concept", "cce", "--objective",
                    "egalitarian", "--direction", "max")
    assert code == 0 and out["exact"]
    expect = optimal_equilibrium(io.load_game(g), "cce", "egalitarian").objective_value
    assert F(out["objective_value_exact"]) == expect


def test_mwmp_command(tmp_path, capsys):
    g, y = tmp_path / "g.json", tmp_path / "y.json"
    run(capsys, "generate", "--family", "aggregative-congestion", "--n", 3, "--m", 2,
        "--seed", 0, "-o", g)
    y.write_text(json.dumps({"values": [0, 0, 0, 0, 0, 0, 1]}))
    code, brute = run(capsys, "mwmp", "--game", g, "--y", y)
    code2, dp = run(capsys, "mwmp", "--game", g, "--y", y, "--delta", "1")
    assert code == code2 == 0
    assert brute["method"] == "brute" and dp["method"] == "aggdp"
    assert dp["value"] == pytest.approx(brute["value"])


def test_gadget_build(tmp_path, capsys):
    base, gp = tmp_path / "b.json", tmp_path / "gp.json"
    run(capsys, "generate", "--n", 2, "--m", 2, "--seed", 4, "--denominator", 10, "-o", base)
    opt = max_welfare(io.load_game(base))
    code, info = run(capsys, "gadget", "build", "--base", base, "--opt", str(opt), "-o", gp)
    assert code == 0 and info["m"] == [3, 3]
    assert run(capsys, "gadget", "verify", gp)[0] == 0
    code, _ = run(capsys, "gadget", "build", "--base", base, "--opt", "lp", "--eps", "0.9", "-o", gp)
    assert code in (0, 2)
    assert main(["gadget", "build", "--base", str(base), "--opt", "5", "-o", str(gp)]) == 2


def test_capacity_override(tmp_path, capsys, monkeypatch):
    g = tmp_path / "g.json"
    run(capsys, "generate", "--n", 3, "--m", 2, "--seed", 0, "-o", g)
    monkeypatch.setenv("OPTCE_LP_CAP", "4")
    assert main(["lp-solve", "--game", str(g)]) == 2
    monkeypatch.setenv("OPTCE_BRUTE_CAP", "4")
    assert main(["solve", "--game", str(g), "--eps", "0.1", "--target", "0"]) == 2


def test_bench_empty_sweep(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text("{}")
    code, out = run(capsys, "bench", spec, "--output-dir", tmp_path / "out")
    assert code == 0 and out["rows"] == 0
    rows = list(csv.reader(open(tmp_path / "out" / "report.csv")))
    assert len(rows) == 1


def test_bench_gadget_beta(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"family": "gadget", "n": [2, 3], "m": [2], "seeds": [0, 1],
                                "eps": [0.1, 0.05], "output": str(tmp_path / "o")}))
    code, out = run(capsys, "bench", spec)
    assert code == 0 and out["rows"] == 8
    rows = list(csv.DictReader(open(tmp_path / "o" / "report.csv")))
    for r in rows:
        # default eps = OPT/n, so worst/best = 1/n
        assert float(r["beta"]) == pytest.approx(1 / int(r["n"]), abs=1e-9)
        assert float(r["max_regret"]) <= float(r["eps"]) + 1e-9
    budgets = {(r["n"], r["seed"], r["eps"]): int(r["iteration_budget"]) for r in rows}
    for (n, seed, eps), b in budgets.items():
        if eps == "0.05":
            assert b == 4 * budgets[(n, seed, "0.1")]


def test_bench_rows_reproducible_and_parallel():
    spec = BenchmarkSpec(family="random-explicit", n=[2], m=[2, 3], seeds=[0, 1], eps=[0.1])
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_time"} for r in rows]
    serial = strip(run_benchmark(spec))
    assert serial == strip(run_benchmark(spec))
    assert serial == strip(run_benchmark(spec, workers=2))


def test_bench_records_failures():
    spec = BenchmarkSpec(family="random-explicit", n=[2], m=[2], seeds=[0], eps=[2.0])
    rows = run_benchmark(spec)
    assert rows[0]["error"].startswith("ValueError")


def test_bench_sweep_validation():
    with pytest.raises(ValueError):
        BenchmarkSpec(family="graphical")
    with pytest.raises(ValueError):
        BenchmarkSpec.from_dict({"familly": "gadget"})


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "optce", "generate", "--n", "2", "--m", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["type"] == "explicit"
