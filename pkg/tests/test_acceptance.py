"""Acceptance suite: ten go/no-go criteria for the release.

Each test prints one line, ``[acceptance] criterion NN <name>: PASS/FAIL``,
so the run's verdict can be read off the terminal without parsing pytest
output.  Criteria 1-6 share a pool of twenty randomized instances; the
remaining criteria pin the shipped worked examples and the CLI contract.

The instance pool draws alpha factors from {0.5, 1, 2}: powers of two keep
division exact in IEEE-754 arithmetic, so the jammer-waterfilling identity
of criterion 2 can be checked at zero tolerance while still exercising the
full [0.5, 2] range of gain ratios.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from jamgame import (
    Allocation,
    GridSpec,
    JammerKktState,
    RegimeLabel,
    grid_minimax,
    jam_best_response,
    jam_rate_gradient,
    kkt_report,
    run_dynamics,
    saddle_probe,
    sample_simplex,
    solve_nash,
    tx_best_response,
    utility_batch,
)
from jamgame.cli import main

from conftest import make_params

GOLDEN = Path(__file__).parent / "golden"

N_INSTANCES = 20
POOL_SEED = 20260819

SHIPPED_EXAMPLES = (
    make_params([1.0, 1.0], 2.0, 1.0),
    make_params([1.0, 3.0, 6.0], 4.0, 1.0),
    make_params([1.0], 1.0, 1.0),
)


def _report(capsys, num, name, failures):
    verdict = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"[acceptance] criterion {num:02d} {name}: {verdict}")
    assert not failures, "\n".join(str(f) for f in failures)


@pytest.fixture(scope="module")
def pool():
    rng = np.random.default_rng(POOL_SEED)
    out = []
    for _ in range(N_INSTANCES):
        m = int(rng.integers(2, 4))
        noise = rng.uniform(0.5, 8.0, size=m)
        t_budget = float(rng.uniform(0.5, 5.0))
        j_budget = float(rng.uniform(0.5, 5.0))
        alpha_t = float(rng.choice([0.5, 1.0, 2.0]))
        alpha_j = float(rng.choice([0.5, 1.0, 2.0]))
        params = make_params(noise, t_budget, j_budget, alpha_t, alpha_j)
        out.append((params, solve_nash(params)))
    return out


def test_criterion_01_oracle_agreement(pool, capsys):
    failures = []
    started = time.perf_counter()
    for i, (params, sol) in enumerate(pool):
        resolution = 101 if params.m == 2 else 51
        grid = grid_minimax(params, GridSpec(resolution=resolution, m=params.m))
        gap = abs(grid.value - sol.value)
        bound = 2.0 * grid.spacing * grid.lipschitz_bound
        if gap > bound:
            failures.append(f"instance {i}: gap {gap:.3e} exceeds bound {bound:.3e}")
        if gap > 1e-2:
            failures.append(f"instance {i}: gap {gap:.3e} exceeds 1e-2")
    elapsed = time.perf_counter() - started
    if elapsed > 60.0:
        failures.append(f"runtime {elapsed:.1f}s exceeds 60s")
    _report(capsys, 1, "oracle-agreement", failures)


def test_criterion_02_jammer_waterfilling(pool, capsys):
    failures = []
    for i, (params, sol) in enumerate(pool):
        expected_scaled = np.maximum(sol.w - params.noise, 0.0)
        construction_gap = float(
            np.max(np.abs(params.alpha_j * sol.jam.powers - expected_scaled))
        )
        if construction_gap != 0.0:
            failures.append(
                f"instance {i}: construction gap {construction_gap!r} is not zero"
            )
        jam_br, _ = jam_best_response(params, sol.tx)
        br_gap = float(np.max(np.abs(jam_br.powers - sol.jam.powers)))
        if br_gap > 1e-6:
            failures.append(f"instance {i}: independent-path gap {br_gap:.3e}")
    _report(capsys, 2, "jammer-waterfilling", failures)


def test_criterion_03_mutual_best_response(pool, capsys):
    failures = []
    for i, (params, sol) in enumerate(pool):
        tx_br, _ = tx_best_response(params, sol.jam)
        gap = float(np.max(np.abs(tx_br.powers - sol.tx.powers)))
        if gap > 1e-9:
            failures.append(f"instance {i}: tx gap {gap:.3e}")
    _report(capsys, 3, "mutual-best-response", failures)


def test_criterion_04_saddle_probe(pool, capsys):
    failures = []
    for i, (params, sol) in enumerate(pool):
        report = saddle_probe(
            params, sol.tx, sol.jam, trials=10_000, seed=1000 + i, tol=1e-6
        )
        if report.tx_violations or report.jam_violations:
            failures.append(
                f"instance {i}: {report.tx_violations} tx / "
                f"{report.jam_violations} jam violations "
                f"(excess {report.tx_excess:.3e}, "
                f"shortfall {report.jam_shortfall:.3e})"
            )
    _report(capsys, 4, "saddle-probe", failures)


def _fd_gradient_gap(params, tx, jam_powers):
    """Largest relative mismatch between the analytic jammer-side gradient
    and a central finite difference of the rate, step 1e-5."""
    grad = jam_rate_gradient(params, tx.powers, jam_powers)
    h = 1e-5
    worst = 0.0
    for k in range(params.m):
        up = jam_powers.copy()
        up[k] += h
        down = jam_powers.copy()
        down[k] -= h
        fd = (
            float(utility_batch(params, tx.powers, up)[0])
            - float(utility_batch(params, tx.powers, down)[0])
        ) / (2.0 * h)
        rel = abs(fd - grad[k]) / max(1.0, abs(fd), abs(grad[k]))
        worst = max(worst, rel)
    return worst


def test_criterion_05_kkt_residuals(pool, capsys):
    failures = []
    rng = np.random.default_rng(7)
    for i, (params, sol) in enumerate(pool):
        random_tx = Allocation(
            powers=sample_simplex(rng, 1, params.m, params.t_budget)[0],
            budget=params.t_budget,
        )
        for label, tx in (("random", random_tx), ("equilibrium", sol.tx)):
            jam, state = jam_best_response(params, tx)
            report = kkt_report(params, tx, jam, state)
            if not report.ok(1e-8):
                failures.append(f"instance {i} ({label} tx): {report}")
            fd_gap = _fd_gradient_gap(params, tx, jam.powers.copy())
            if fd_gap > 1e-6:
                failures.append(
                    f"instance {i} ({label} tx): gradient mismatch {fd_gap:.3e}"
                )
        lambdas = jam_rate_gradient(params, sol.tx.powers, sol.jam.powers) + sol.u
        at_nash = kkt_report(
            params, sol.tx, sol.jam, JammerKktState(u=sol.u, lambdas=lambdas)
        )
        if not at_nash.ok(1e-8):
            failures.append(f"instance {i} (equilibrium point): {at_nash}")
    _report(capsys, 5, "kkt-residuals", failures)


def test_criterion_06_regime_trichotomy(pool, capsys):
    failures = []
    for i, (params, sol) in enumerate(pool):
        for k in range(params.m):
            n_k = params.noise[k]
            matched = [
                label
                for label, hit in (
                    (RegimeLabel.UNUSED, n_k >= sol.v),
                    (RegimeLabel.TX_ONLY, sol.w < n_k < sol.v),
                    (RegimeLabel.CONTESTED, n_k <= sol.w),
                )
                if hit
            ]
            if len(matched) != 1 or sol.regimes[k] != matched[0]:
                failures.append(
                    f"instance {i} channel {k}: label {sol.regimes[k]} "
                    f"vs thresholds {matched}"
                )
                continue
            tx_k = sol.tx.powers[k]
            jam_k = sol.jam.powers[k]
            if sol.regimes[k] is RegimeLabel.UNUSED:
                if tx_k != 0.0 or jam_k != 0.0:
                    failures.append(f"instance {i} channel {k}: Unused but powered")
            elif sol.regimes[k] is RegimeLabel.TX_ONLY:
                if not (tx_k > 0.0 and jam_k == 0.0):
                    failures.append(f"instance {i} channel {k}: TxOnly invariant")
            else:
                height = params.alpha_t * tx_k + params.alpha_j * jam_k + n_k
                if abs(height - sol.v) > 1e-12 * max(1.0, sol.v):
                    failures.append(
                        f"instance {i} channel {k}: contested height "
                        f"{height!r} vs v {sol.v!r}"
                    )
    _report(capsys, 6, "regime-trichotomy", failures)


def test_criterion_07_high_power_uniformity(capsys):
    failures = []
    budget = 1e6
    params = make_params([1.0, 3.0, 6.0], budget, budget)
    sol = solve_nash(params)
    share = budget / 3.0
    tx_dev = float(np.max(np.abs(sol.tx.powers - share)) / share)
    jam_dev = float(np.max(np.abs(sol.jam.powers - share)) / share)
    if tx_dev > 1e-3:
        failures.append(f"tx deviation {tx_dev:.3e}")
    if jam_dev > 1e-3:
        failures.append(f"jam deviation {jam_dev:.3e}")
    _report(capsys, 7, "high-power-uniformity", failures)


def test_criterion_08_worked_examples(capsys):
    failures = []

    sol2 = solve_nash(SHIPPED_EXAMPLES[0])
    for name, got, want in (
        ("v", sol2.v, 2.5),
        ("w", sol2.w, 1.5),
        ("value", sol2.value, math.log(5.0 / 3.0)),
    ):
        if abs(got - want) > 1e-9:
            failures.append(f"two-channel {name}: {got!r} vs {want!r}")

    sol3 = solve_nash(SHIPPED_EXAMPLES[1])
    for name, got, want in (
        ("v", sol3.v, 4.5),
        ("w", sol3.w, 2.0),
        ("value", sol3.value, 0.5 * math.log(3.375)),
    ):
        if abs(got - want) > 1e-9:
            failures.append(f"three-channel {name}: {got!r} vs {want!r}")
    for name, got, want in (
        ("tx", sol3.tx.powers, [2.5, 1.5, 0.0]),
        ("jam", sol3.jam.powers, [1.0, 0.0, 0.0]),
    ):
        gap = float(np.max(np.abs(got - np.asarray(want))))
        if gap > 1e-9:
            failures.append(f"three-channel {name}: {list(got)} vs {want}")
    _report(capsys, 8, "worked-examples", failures)


def test_criterion_09_dynamics_convergence(capsys):
    failures = []
    for params in SHIPPED_EXAMPLES:
        for seed in range(10):
            rng = np.random.default_rng(seed)
            start = (
                sample_simplex(rng, 1, params.m, params.t_budget)[0],
                sample_simplex(rng, 1, params.m, params.j_budget)[0],
            )
            trace = run_dynamics(params, damping=0.5, max_iters=10_000, start=start)
            if not trace.converged or trace.final_distance > 1e-6:
                failures.append(
                    f"m={params.m} seed {seed}: converged={trace.converged} "
                    f"distance {trace.final_distance:.3e}"
                )
    _report(capsys, 9, "dynamics-convergence", failures)


def test_criterion_10_cli_determinism(tmp_path, capsys):
    failures = []
    config_path = tmp_path / "game.json"
    config_path.write_text(
        json.dumps(
            {
                "alpha_t": 1.0,
                "alpha_j": 1.0,
                "t_budget": 2.0,
                "j_budget": 1.0,
                "channels": [1.0, 1.0],
            }
        )
    )

    def run(*argv):
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, out

    nash_args = ("nash", "--config", str(config_path), "--verify")
    code1, json1 = run(*nash_args)
    code2, json2 = run(*nash_args)
    if code1 != 0 or code2 != 0:
        failures.append(f"nash exit codes {code1}, {code2}")
    if json1 != json2:
        failures.append("nash JSON output is not byte-identical across runs")

    sweep_args = (
        "sweep", "--config", str(config_path),
        "--vary", "j_budget", "--from", "0.5", "--to", "2.5", "--steps", "5",
    )
    code3, csv1 = run(*sweep_args)
    code4, csv2 = run(*sweep_args)
    if code3 != 0 or code4 != 0:
        failures.append(f"sweep exit codes {code3}, {code4}")
    if csv1 != csv2:
        failures.append("sweep CSV output is not byte-identical across runs")

    golden_json = (GOLDEN / "nash_m2.json").read_text()
    if json1 != golden_json:
        failures.append("nash JSON differs from the golden file")
    golden_csv = (GOLDEN / "sweep_m2.csv").read_text()
    if csv1 != golden_csv:
        failures.append("sweep CSV differs from the golden file")

    _report(capsys, 10, "cli-determinism", failures)
