"""Data model and payoff evaluation for the transmitter-vs-jammer power game.

Two players split fixed power budgets across M parallel Gaussian channels:
the transmitter maximizes her aggregate rate, the jammer (whose signal the
receiver treats as extra noise) minimizes it.  The rate is the zero-sum
payoff.  All powers are linear units; rates are nats per channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BUDGET_RTOL",
    "Allocation",
    "AllocationReport",
    "ChannelSet",
    "GameParams",
    "require_feasible",
    "sample_simplex",
    "utility",
    "utility_batch",
    "validate_allocation",
]

#: Relative tolerance on an allocation's budget sum.
BUDGET_RTOL = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional vector")
    return _readonly(arr)


def _positive_scalar(value, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and positive")
    return value


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Per-channel noise powers plus the two link attenuations.

    ``noise[k]`` is the AWGN power on channel k; ``alpha_t`` and ``alpha_j``
    attenuate the transmitter and jammer signals on every channel alike.
    """

    noise: np.ndarray
    alpha_t: float
    alpha_j: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "noise", _vector(self.noise, "noise"))
        if self.noise.size == 0:
            raise ValueError("noise must contain at least one channel")
        if not np.all(np.isfinite(self.noise)) or np.any(self.noise <= 0.0):
            raise ValueError("every noise power must be finite and positive")
        object.__setattr__(self, "alpha_t", _positive_scalar(self.alpha_t, "alpha_t"))
        object.__setattr__(self, "alpha_j", _positive_scalar(self.alpha_j, "alpha_j"))

    @property
    def m(self) -> int:
        return int(self.noise.size)


@dataclass(frozen=True, eq=False)
class GameParams:
    """A channel set together with both players' total power budgets."""

    channels: ChannelSet
    t_budget: float
    j_budget: float

    def __post_init__(self) -> None:
        if not isinstance(self.channels, ChannelSet):
            raise ValueError("channels must be a ChannelSet")
        object.__setattr__(self, "t_budget", _positive_scalar(self.t_budget, "t_budget"))
        object.__setattr__(self, "j_budget", _positive_scalar(self.j_budget, "j_budget"))

    @property
    def m(self) -> int:
        return self.channels.m

    @property
    def noise(self) -> np.ndarray:
        return self.channels.noise

    @property
    def alpha_t(self) -> float:
        return self.channels.alpha_t

    @property
    def alpha_j(self) -> float:
        return self.channels.alpha_j


@dataclass(frozen=True, eq=False)
class Allocation:
    """A per-channel power split and the budget its entries should sum to.

    Construction does not enforce feasibility; run the allocation through
    validate_allocation / require_feasible so violations can be reported
    rather than silently rejected.
    """

    powers: np.ndarray
    budget: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "powers", _vector(self.powers, "powers"))
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def m(self) -> int:
        return int(self.powers.size)


@dataclass(frozen=True)
class AllocationReport:
    """Outcome of validating one allocation against its invariants."""

    ok: bool
    expected_len: int
    actual_len: int
    negative_indices: tuple[int, ...]
    nonfinite_indices: tuple[int, ...]
    budget_gap: float
    budget_tol: float

    def describe(self) -> str:
        if self.ok:
            return "ok"
        problems = []
        if self.actual_len != self.expected_len:
            problems.append(f"length {self.actual_len} != expected {self.expected_len}")
        if self.nonfinite_indices:
            problems.append(f"non-finite entries at {list(self.nonfinite_indices)}")
        if self.negative_indices:
            problems.append(f"negative entries at {list(self.negative_indices)}")
        if self.budget_gap > self.budget_tol:
            problems.append(f"power sum off budget by {self.budget_gap:.6g}")
        return "; ".join(problems)


def validate_allocation(alloc: Allocation, expected_len: int) -> AllocationReport:
    """Check nonnegativity, length, and the budget sum of an allocation.

    The budget sum is accepted when it is within BUDGET_RTOL (relative to the
    budget) of the declared budget.
    """
    powers = alloc.powers
    nonfinite = tuple(int(k) for k in np.nonzero(~np.isfinite(powers))[0])
    negative = tuple(int(k) for k in np.nonzero(np.isfinite(powers) & (powers < 0.0))[0])
    budget_tol = BUDGET_RTOL * abs(alloc.budget)
    total = float(powers.sum()) if not nonfinite else math.nan
    budget_gap = abs(total - alloc.budget) if not nonfinite else math.inf
    ok = (
        alloc.m == expected_len
        and not negative
        and not nonfinite
        and budget_gap <= budget_tol
    )
    return AllocationReport(
        ok=ok,
        expected_len=int(expected_len),
        actual_len=alloc.m,
        negative_indices=negative,
        nonfinite_indices=nonfinite,
        budget_gap=budget_gap,
        budget_tol=budget_tol,
    )


def require_feasible(alloc: Allocation, budget: float, m: int, who: str) -> None:
    """Raise ValueError unless ``alloc`` is a feasible allocation of ``budget``."""
    if abs(alloc.budget - budget) > BUDGET_RTOL * abs(budget):
        raise ValueError(
            f"{who} allocation budget {alloc.budget:.12g} does not match {budget:.12g}"
        )
    report = validate_allocation(alloc, m)
    if not report.ok:
        raise ValueError(f"{who} allocation invalid: {report.describe()}")


def utility(params: GameParams, tx: Allocation, jam: Allocation) -> float:
    """Transmitter rate (1/2)·sum_k ln(1 + alpha_t·T_k / (alpha_j·J_k + N_k)).

    Both allocations are validated against their budgets first; the result is
    finite and nonnegative since every noise power is positive.
    """
    require_feasible(tx, params.t_budget, params.m, "tx")
    require_feasible(jam, params.j_budget, params.m, "jam")
    snr = params.alpha_t * tx.powers / (params.alpha_j * jam.powers + params.noise)
    return 0.5 * float(np.sum(np.log1p(snr)))


def utility_batch(params: GameParams, tx_powers, jam_powers) -> np.ndarray:
    """Row-wise transmitter rates for batched raw power vectors.

    ``tx_powers`` and ``jam_powers`` broadcast against each other along the
    leading axis; no feasibility checks are applied.  Used by the deviation
    probes, where thousands of simplex samples are evaluated at once.
    """
    tx = np.atleast_2d(np.asarray(tx_powers, dtype=float))
    jam = np.atleast_2d(np.asarray(jam_powers, dtype=float))
    snr = params.alpha_t * tx / (params.alpha_j * jam + params.noise)
    return 0.5 * np.sum(np.log1p(snr), axis=-1)


def sample_simplex(rng: np.random.Generator, n: int, m: int, budget: float) -> np.ndarray:
    """Draw ``n`` uniform points on the simplex {x >= 0, sum x = budget}.

    Flat Dirichlet sampling; returns an (n, m) array.
    """
    if m == 1:
        return np.full((n, 1), float(budget))
    return rng.dirichlet(np.ones(m), size=n) * budget
