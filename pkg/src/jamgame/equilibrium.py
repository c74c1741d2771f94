"""Nash equilibrium of the power allocation game, in closed form.

The game has a saddle point in which the jammer itself water-fills: the
equilibrium jammer allocation pours alpha_j*J over the noise floors up to a
level w, and the transmitter then water-fills alpha_t*T over the flattened
floors max(N_k, w) up to a level v > w.  The jammer's budget multiplier is
recovered exactly from the pair of levels:

    w = v*alpha_j / (alpha_j + 2*u*v)   <=>   u = alpha_j*(v - w) / (2*v*w).

Each channel falls into one of three regimes by comparing its noise power to
the two levels: noise at or above v is unused by both players, noise strictly
between w and v carries transmitter power but no jamming, and noise at or
below w is contested, with alpha_t*T_k + alpha_j*J_k + N_k = v exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .best_response import (
    EPS_KKT,
    EPS_OPT,
    JammerKktState,
    KktReport,
    jam_best_response,
    jam_rate_gradient,
    kkt_report,
    tx_best_response,
)
from .core import (
    Allocation,
    GameParams,
    require_feasible,
    sample_simplex,
    utility,
    utility_batch,
)
from .waterfill import water_fill

__all__ = [
    "NashSolution",
    "NashVerification",
    "RegimeLabel",
    "classify_regimes",
    "solve_nash",
    "verify_nash",
]


class RegimeLabel(enum.Enum):
    """Which role a channel plays at equilibrium."""

    UNUSED = "Unused"
    TX_ONLY = "TxOnly"
    CONTESTED = "Contested"


@dataclass(frozen=True, eq=False)
class NashSolution:
    """Equilibrium allocations with the levels and multiplier behind them.

    ``v`` is the transmitter water level, ``w`` the jammer water level,
    ``u`` the jammer budget multiplier, ``value`` the equilibrium rate.
    """

    tx: Allocation
    jam: Allocation
    v: float
    w: float
    u: float
    regimes: tuple[RegimeLabel, ...]
    value: float


def _classify(noise: np.ndarray, v: float, w: float) -> tuple[RegimeLabel, ...]:
    labels = []
    for n in noise:
        if n >= v:
            labels.append(RegimeLabel.UNUSED)
        elif n > w:
            labels.append(RegimeLabel.TX_ONLY)
        else:
            labels.append(RegimeLabel.CONTESTED)
    return tuple(labels)


def classify_regimes(params: GameParams, v: float, u: float) -> tuple[RegimeLabel, ...]:
    """Label every channel from the transmitter level and the multiplier.

    The jammer level is implied: w = v*alpha_j / (alpha_j + 2*u*v).
    """
    v = float(v)
    u = float(u)
    if not math.isfinite(v) or v <= 0.0:
        raise ValueError("level v must be finite and positive")
    if not math.isfinite(u) or u <= 0.0:
        raise ValueError("multiplier u must be finite and positive")
    w = v * params.alpha_j / (params.alpha_j + 2.0 * u * v)
    return _classify(params.noise, v, w)


def solve_nash(params: GameParams) -> NashSolution:
    """Compute the unique Nash equilibrium of the game.

    The construction is two nested water-fillings.  First the jammer pours
    alpha_j*J over the raw noise floors, fixing the level w.  Then the
    transmitter pours alpha_t*T over the floors max(N_k, w), fixing v.  The
    multiplier u follows algebraically from (v, w).
    """
    noise = params.noise
    jam_ws = water_fill(noise, params.alpha_j * params.j_budget)
    w = jam_ws.level
    assert jam_ws.active, "positive jammer budget must fill at least one channel"

    tx_ws = water_fill(np.maximum(noise, w), params.alpha_t * params.t_budget)
    v = tx_ws.level
    assert v > w, "transmitter level must clear the jammer level"

    u = params.alpha_j * (v - w) / (2.0 * v * w)
    tx = Allocation(powers=tx_ws.fills / params.alpha_t, budget=params.t_budget)
    jam = Allocation(powers=jam_ws.fills / params.alpha_j, budget=params.j_budget)
    return NashSolution(
        tx=tx,
        jam=jam,
        v=v,
        w=w,
        u=u,
        regimes=_classify(noise, v, w),
        value=utility(params, tx, jam),
    )


@dataclass(frozen=True, eq=False)
class NashVerification:
    """Evidence that a candidate solution is the saddle point.

    ``tx_gap`` is how much the transmitter could still gain (best response
    value minus candidate value; nonnegative, near zero at equilibrium), and
    ``jam_gap`` how much the jammer could still remove.  ``tx_excess`` and
    ``jam_shortfall`` are the worst payoff movements over random deviations:
    positive tx_excess means some transmitter deviation beat the candidate,
    positive jam_shortfall means some jammer deviation pushed the rate below
    it.  ``kkt`` carries the jammer multiplier residuals, and the two
    reconstruction gaps tie the stored levels back to the allocations.
    """

    tx_gap: float
    jam_gap: float
    tx_excess: float
    jam_shortfall: float
    kkt: KktReport
    regime_failures: tuple[str, ...]
    level_gap: float
    multiplier_gap: float
    deviations: int
    seed: int
    ok: bool


def verify_nash(
    params: GameParams,
    sol: NashSolution,
    deviations: int = 512,
    seed: int = 0,
    eps_opt: float = EPS_OPT,
    eps_kkt: float = EPS_KKT,
) -> NashVerification:
    """Stress a candidate equilibrium from every angle the theory offers.

    Checks are: (1) both allocations feasible; (2) best-response gaps for the
    two players within eps_opt; (3) ``deviations`` random simplex deviations
    per player never improve on the candidate beyond eps_opt; (4) jammer KKT
    residuals within eps_kkt; (5) regime labels match the stored levels and
    the allocations respect them; (6) the stored (v, w, u) reproduce each
    other through the closed-form relation.
    """
    require_feasible(sol.tx, params.t_budget, params.m, "tx")
    require_feasible(sol.jam, params.j_budget, params.m, "jam")

    value = utility(params, sol.tx, sol.jam)

    tx_star, _ = tx_best_response(params, sol.jam)
    tx_gap = utility(params, tx_star, sol.jam) - value

    jam_star, _ = jam_best_response(params, sol.tx)
    jam_gap = value - utility(params, sol.tx, jam_star)

    if deviations > 0:
        rng = np.random.default_rng(seed)
        tx_devs = sample_simplex(rng, deviations, params.m, params.t_budget)
        jam_devs = sample_simplex(rng, deviations, params.m, params.j_budget)
        tx_vals = utility_batch(params, tx_devs, sol.jam.powers)
        jam_vals = utility_batch(params, sol.tx.powers, jam_devs)
        tx_excess = float(tx_vals.max() - value)
        jam_shortfall = float(value - jam_vals.min())
    else:
        tx_excess = 0.0
        jam_shortfall = 0.0

    state = JammerKktState(
        u=sol.u,
        lambdas=jam_rate_gradient(params, sol.tx.powers, sol.jam.powers) + sol.u,
    )
    kkt = kkt_report(params, sol.tx, sol.jam, state)

    regime_failures: list[str] = []
    expected = _classify(params.noise, sol.v, sol.w)
    zero_tx = 1e-9 * params.t_budget
    zero_jam = 1e-9 * params.j_budget
    for k, label in enumerate(sol.regimes):
        t_k = float(sol.tx.powers[k])
        j_k = float(sol.jam.powers[k])
        if label is not expected[k]:
            regime_failures.append(
                f"channel {k}: labeled {label.value}, levels say {expected[k].value}"
            )
            continue
        if label is RegimeLabel.UNUSED:
            if t_k > zero_tx or j_k > zero_jam:
                regime_failures.append(f"channel {k}: Unused but carries power")
        elif label is RegimeLabel.TX_ONLY:
            if t_k <= zero_tx:
                regime_failures.append(f"channel {k}: TxOnly but transmitter silent")
            if j_k > zero_jam:
                regime_failures.append(f"channel {k}: TxOnly but jammed")
        else:
            height = params.alpha_t * t_k + params.alpha_j * j_k + params.noise[k]
            if abs(height - sol.v) > eps_opt * max(1.0, sol.v):
                regime_failures.append(
                    f"channel {k}: contested height {height:.12g} misses v"
                )

    w_back = sol.v * params.alpha_j / (params.alpha_j + 2.0 * sol.u * sol.v)
    level_gap = abs(w_back - sol.w)
    u_back = params.alpha_j * (sol.v - sol.w) / (2.0 * sol.v * sol.w)
    multiplier_gap = abs(u_back - sol.u)

    ok = (
        tx_gap <= eps_opt
        and jam_gap <= eps_opt
        and tx_excess <= eps_opt
        and jam_shortfall <= eps_opt
        and kkt.ok(eps_kkt)
        and not regime_failures
        and level_gap <= eps_opt * max(1.0, sol.w)
        and multiplier_gap <= eps_opt * max(1.0, sol.u)
    )
    return NashVerification(
        tx_gap=float(tx_gap),
        jam_gap=float(jam_gap),
        tx_excess=tx_excess,
        jam_shortfall=jam_shortfall,
        kkt=kkt,
        regime_failures=tuple(regime_failures),
        level_gap=float(level_gap),
        multiplier_gap=float(multiplier_gap),
        deviations=deviations,
        seed=seed,
        ok=ok,
    )
