"""Exact best responses for both players.

The transmitter's best response to a fixed jammer allocation is classical
water-filling over the effective floors alpha_j*J_k + N_k.  The jammer's best
response to a fixed transmitter allocation comes from the stationarity system

    alpha_j / (2*(alpha_t*T_k + alpha_j*J_k + N_k))
        - alpha_j / (2*(alpha_j*J_k + N_k)) + u = lambda_k,      (stationarity)
    lambda_k * J_k = 0,   lambda_k >= 0,  J_k >= 0,              (slackness)

where u is the multiplier on sum J_k = J.  On channels where the jammer is
active the quadratic in J_k solves in closed form; the budget then pins u by
a one-dimensional bisection on the strictly decreasing map u -> sum_k J_k(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Allocation, GameParams, require_feasible
from .waterfill import EPS_SOLVE, water_fill

__all__ = [
    "EPS_KKT",
    "EPS_OPT",
    "JammerKktState",
    "KktReport",
    "jam_best_response",
    "jam_closed_form",
    "jam_rate_gradient",
    "kkt_report",
    "tx_best_response",
]

#: Tolerance on KKT residuals (stationarity, slackness, dual feasibility).
EPS_KKT = 1e-8

#: Tolerance on optimality gaps measured by direct payoff comparison.
EPS_OPT = 1e-6


@dataclass(frozen=True, eq=False)
class JammerKktState:
    """Multipliers certifying a jammer best response.

    ``u`` is the budget multiplier, ``lambdas`` the per-channel nonnegativity
    multipliers.  ``degenerate`` marks the all-zero-transmitter case where the
    payoff does not depend on the jammer at all: every allocation is optimal,
    and the canonical multipliers u = 0, lambda = 0 are reported.
    """

    u: float
    lambdas: np.ndarray
    degenerate: bool = False

    def __post_init__(self) -> None:
        lam = np.asarray(self.lambdas, dtype=float)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        if self.degenerate:
            if self.u != 0.0:
                raise ValueError("degenerate state must carry u = 0")
        elif not math.isfinite(self.u) or self.u <= 0.0:
            raise ValueError("budget multiplier u must be finite and positive")


def tx_best_response(params: GameParams, jam: Allocation) -> tuple[Allocation, float]:
    """Water-fill the transmitter budget against a fixed jammer allocation.

    Returns the optimal transmitter allocation together with the water level
    v over the effective floors alpha_j*J_k + N_k.  The attenuation alpha_t
    scales the poured power, so the allocation is fills / alpha_t.
    """
    require_feasible(jam, params.j_budget, params.m, "jam")
    floors = params.alpha_j * jam.powers + params.noise
    ws = water_fill(floors, params.alpha_t * params.t_budget)
    tx = Allocation(powers=ws.fills / params.alpha_t, budget=params.t_budget)
    return tx, ws.level


def jam_rate_gradient(params: GameParams, tx_powers, jam_powers) -> np.ndarray:
    """Gradient of the rate with respect to the jammer powers.

    d/dJ_k of (1/2) ln(1 + alpha_t*T_k / (alpha_j*J_k + N_k)), elementwise:
    always nonpositive, and zero exactly where T_k = 0.
    """
    tx = np.asarray(tx_powers, dtype=float)
    jam = np.asarray(jam_powers, dtype=float)
    base = params.alpha_j * jam + params.noise
    top = params.alpha_t * tx + base
    return 0.5 * params.alpha_j * (1.0 / top - 1.0 / base)


def jam_closed_form(params: GameParams, tx: Allocation, u: float) -> np.ndarray:
    """Per-channel jammer powers that satisfy stationarity at multiplier u.

    On channels with T_k > 0 the active-channel stationarity condition is a
    quadratic in J_k whose admissible root is

        J_k = (1 / (2*alpha_j)) * [ -alpha_t*T_k - 2*N_k
                + sqrt((alpha_t*T_k)^2 + 2*alpha_j*alpha_t*T_k / u) ]+

    Channels with T_k = 0 get J_k = 0: jamming there burns budget without
    touching the payoff, and the bracket above would be negative anyway.
    The sqrt difference is evaluated in the cancellation-free form
    s / (sqrt(a^2 + s) + a) to stay accurate when u is large.
    """
    u = float(u)
    if not math.isfinite(u) or u <= 0.0:
        raise ValueError("multiplier u must be finite and positive")
    powers = np.zeros(params.m)
    mask = tx.powers > 0.0
    if not np.any(mask):
        return powers
    a = params.alpha_t * tx.powers[mask]
    s = 2.0 * params.alpha_j * a / u
    # sqrt(a^2 + s) - a, rewritten to avoid subtracting near-equal terms.
    root_gap = s / (np.sqrt(a * a + s) + a)
    bracket = root_gap - 2.0 * params.noise[mask]
    powers[mask] = np.maximum(bracket, 0.0) / (2.0 * params.alpha_j)
    return powers


def _solve_budget_multiplier(params: GameParams, tx: Allocation) -> float:
    """Find u > 0 with sum_k jam_closed_form(u) = j_budget by bisection.

    The total is continuous and strictly decreasing in u on the region where
    it is positive, diverging as u -> 0+ and vanishing for large u, so a
    bracket always exists and bisection cannot fail.
    """
    target = params.j_budget

    def total(u: float) -> float:
        return float(jam_closed_form(params, tx, u).sum())

    lo = hi = 1.0
    for _ in range(1200):
        if total(lo) > target:
            break
        lo *= 0.5
    else:
        raise RuntimeError("failed to bracket the jammer multiplier from below")
    for _ in range(1200):
        if total(hi) < target:
            break
        hi *= 2.0
    else:
        raise RuntimeError("failed to bracket the jammer multiplier from above")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gap = total(mid) - target
        if abs(gap) <= EPS_SOLVE * max(1.0, target):
            return mid
        if gap > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def jam_best_response(
    params: GameParams, tx: Allocation
) -> tuple[Allocation, JammerKktState]:
    """Optimal jammer allocation against a fixed transmitter allocation.

    Returns the allocation and the KKT multipliers certifying it.  When the
    transmitter is silent everywhere the payoff is identically zero and any
    feasible allocation is a best response; the canonical choice returned is
    noise-water-filling (pour alpha_j*J over the noise floors), flagged
    ``degenerate`` with u = 0.  That case is admitted before the budget check
    since an all-zero vector can never exhaust a positive budget, yet the
    response to it is still well defined; the operation stays total.
    """
    powers = tx.powers
    if (
        powers.size == params.m
        and bool(np.all(np.isfinite(powers)))
        and not np.any(powers != 0.0)
    ):
        ws = water_fill(params.noise, params.alpha_j * params.j_budget)
        jam = Allocation(powers=ws.fills / params.alpha_j, budget=params.j_budget)
        state = JammerKktState(u=0.0, lambdas=np.zeros(params.m), degenerate=True)
        return jam, state

    require_feasible(tx, params.t_budget, params.m, "tx")

    u = _solve_budget_multiplier(params, tx)
    powers = jam_closed_form(params, tx, u)
    # Exact budget match: bisection leaves a residual of at most a few ulps,
    # which the feasibility gate downstream would still flag.
    total = powers.sum()
    if total > 0.0:
        powers = powers * (params.j_budget / total)
    jam = Allocation(powers=powers, budget=params.j_budget)
    lambdas = jam_rate_gradient(params, tx.powers, jam.powers) + u
    return jam, JammerKktState(u=u, lambdas=lambdas)


@dataclass(frozen=True)
class KktReport:
    """Residuals of the jammer KKT system at a given point.

    ``stationarity`` is the largest violation of the active-channel condition
    (gradient + u - lambda = 0 holds by construction; what is measured is
    lambda_k = 0 on active channels), ``complementarity`` the largest
    |lambda_k * J_k|, ``dual_violation`` the most negative multiplier, and
    ``primal_gap`` the budget mismatch.
    """

    stationarity: float
    complementarity: float
    dual_violation: float
    primal_gap: float

    def ok(self, tol: float = EPS_KKT) -> bool:
        return (
            self.stationarity <= tol
            and self.complementarity <= tol
            and self.dual_violation <= tol
            and self.primal_gap <= tol
        )


def kkt_report(
    params: GameParams, tx: Allocation, jam: Allocation, state: JammerKktState
) -> KktReport:
    """Measure how well (jam, state) satisfies the jammer KKT conditions."""
    if state.degenerate:
        gap = abs(float(jam.powers.sum()) - params.j_budget)
        return KktReport(0.0, 0.0, 0.0, gap)
    grad = jam_rate_gradient(params, tx.powers, jam.powers)
    residual = grad + state.u - state.lambdas
    active = jam.powers > 0.0
    stationarity = float(np.max(np.abs(residual)))
    if np.any(active):
        stationarity = max(stationarity, float(np.max(np.abs(state.lambdas[active]))))
    complementarity = float(np.max(np.abs(state.lambdas * jam.powers)))
    dual_violation = float(max(0.0, -state.lambdas.min()))
    primal_gap = abs(float(jam.powers.sum()) - params.j_budget)
    return KktReport(stationarity, complementarity, dual_violation, primal_gap)
