"""Independent checks on the closed-form equilibrium.

Three routes that do not share code with the solver:

* grid_minimax discretizes the jammer simplex and, at every grid point,
  answers with the transmitter's exact best response.  Minimizing the inner
  maximum over the grid gives an upper bound on the game value that must sit
  within a provable Lipschitz margin of the closed-form value.
* saddle_probe hammers a candidate saddle with random unilateral deviations.
* run_dynamics iterates damped best responses and watches them contract onto
  the equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .best_response import jam_best_response, tx_best_response
from .core import Allocation, GameParams, sample_simplex, utility, utility_batch
from .equilibrium import solve_nash

__all__ = [
    "EPS_DYN",
    "DynamicsTrace",
    "GridMinimaxResult",
    "GridSpec",
    "SaddleReport",
    "grid_minimax",
    "run_dynamics",
    "saddle_probe",
]

#: Convergence tolerance for best-response dynamics distance to equilibrium.
EPS_DYN = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the jammer-simplex grid.

    ``resolution`` points per axis means a spacing of budget/(resolution - 1)
    and C(resolution - 1 + m - 1, m - 1) grid points in total.  Construction
    rejects grids whose point count exceeds ``max_evaluations``.
    """

    resolution: int
    m: int
    max_evaluations: int = 10_000_000

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.n_points > self.max_evaluations:
            raise ValueError(
                f"grid of {self.n_points} points exceeds the cap of "
                f"{self.max_evaluations} evaluations"
            )

    @property
    def n_points(self) -> int:
        return math.comb(self.resolution - 1 + self.m - 1, self.m - 1)


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All m-tuples of nonnegative ints summing to n, lexicographic order."""
    if m == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for tail in _compositions(n - head, m - 1):
            yield (head,) + tail


@dataclass(frozen=True, eq=False)
class GridMinimaxResult:
    """Outcome of the brute-force outer minimization.

    ``value`` is min over grid jammer points of the exact inner maximum, an
    upper bound on the true game value.  ``gap_bound`` = spacing times the
    Lipschitz bound is how far the grid optimum can exceed the continuum one.
    """

    value: float
    jam: np.ndarray
    tx: np.ndarray
    spacing: float
    lipschitz_bound: float
    gap_bound: float
    n_points: int

    def __post_init__(self) -> None:
        for name in ("jam", "tx"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def grid_minimax(params: GameParams, spec: GridSpec) -> GridMinimaxResult:
    """Exhaustive minimax over a discretized jammer simplex.

    The jammer grid has ``spec.resolution`` levels per axis; the transmitter
    side stays exact via water-filling, so the only discretization error is
    the jammer's.  The payoff is Lipschitz in the jammer allocation with
    constant at most alpha_j / (2 min_k N_k) per unit of L1 movement, and any
    simplex point is within m*spacing of a grid point in L1, hence

        0 <= grid value - true value <= spacing * lipschitz_bound

    with lipschitz_bound = m * alpha_j / (2 min_k N_k).  Ties on the grid
    resolve to the lexicographically smallest jammer point, keeping results
    reproducible.
    """
    if spec.m != params.m:
        raise ValueError("grid dimension does not match the game")
    steps = spec.resolution - 1
    spacing = params.j_budget / steps

    best_value = math.inf
    best_jam: np.ndarray | None = None
    best_tx: np.ndarray | None = None
    n_points = 0
    for combo in _compositions(steps, spec.m):
        jam_powers = np.array(combo, dtype=float) * spacing
        jam = Allocation(powers=jam_powers, budget=params.j_budget)
        tx, _ = tx_best_response(params, jam)
        inner = utility(params, tx, jam)
        n_points += 1
        if inner < best_value:
            best_value = inner
            best_jam = jam_powers
            best_tx = tx.powers

    assert best_jam is not None and best_tx is not None
    lipschitz = params.m * params.alpha_j / (2.0 * float(params.noise.min()))
    return GridMinimaxResult(
        value=best_value,
        jam=best_jam,
        tx=best_tx,
        spacing=spacing,
        lipschitz_bound=lipschitz,
        gap_bound=spacing * lipschitz,
        n_points=n_points,
    )


@dataclass(frozen=True)
class SaddleReport:
    """Tally of random unilateral deviations against a candidate saddle.

    ``tx_excess`` / ``jam_shortfall`` are the largest payoff improvements any
    deviation achieved (positive means the saddle property was beaten);
    the violation counts use ``tol`` as the pass line.
    """

    trials: int
    seed: int
    tol: float
    tx_excess: float
    jam_shortfall: float
    tx_violations: int
    jam_violations: int
    ok: bool


def saddle_probe(
    params: GameParams,
    tx: Allocation,
    jam: Allocation,
    trials: int = 10_000,
    seed: int = 0,
    tol: float = EPS_DYN,
) -> SaddleReport:
    """Test the saddle inequalities against random unilateral deviations.

    No transmitter deviation should raise the payoff above the candidate
    value, and no jammer deviation should push it below.  Draws ``trials``
    transmitter deviations and then ``trials`` jammer deviations from the
    uniform simplex distribution (one shared generator, fixed draw order, so
    a seed pins the entire report bit for bit) and records the worst
    violation on each side.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if trials == 0:
        return SaddleReport(0, seed, tol, 0.0, 0.0, 0, 0, True)
    value = utility(params, tx, jam)
    rng = np.random.default_rng(seed)
    tx_devs = sample_simplex(rng, trials, params.m, params.t_budget)
    jam_devs = sample_simplex(rng, trials, params.m, params.j_budget)
    tx_vals = utility_batch(params, tx_devs, jam.powers)
    jam_vals = utility_batch(params, tx.powers, jam_devs)
    tx_excess = float(tx_vals.max() - value)
    jam_shortfall = float(value - jam_vals.min())
    tx_violations = int(np.count_nonzero(tx_vals > value + tol))
    jam_violations = int(np.count_nonzero(jam_vals < value - tol))
    return SaddleReport(
        trials=trials,
        seed=seed,
        tol=tol,
        tx_excess=tx_excess,
        jam_shortfall=jam_shortfall,
        tx_violations=tx_violations,
        jam_violations=jam_violations,
        ok=tx_violations == 0 and jam_violations == 0,
    )


@dataclass(frozen=True, eq=False)
class DynamicsTrace:
    """Iterates of damped best-response dynamics and where they ended up.

    ``iterates`` holds one (tx_powers, jam_powers, utility) triple per update
    step.  ``final_distance`` is the sup-norm distance from the last iterate
    to the closed-form equilibrium, across both players' power vectors.
    """

    iterates: tuple[tuple[np.ndarray, np.ndarray, float], ...]
    damping: float
    alternating: bool
    converged: bool
    final_distance: float

    @property
    def n_iters(self) -> int:
        return len(self.iterates)


def run_dynamics(
    params: GameParams,
    damping: float = 0.5,
    max_iters: int = 10_000,
    start: tuple[np.ndarray, np.ndarray] | None = None,
    tol: float = 1e-9,
    alternating: bool = False,
) -> DynamicsTrace:
    """Iterate x <- (1 - damping)*x + damping*BR(opponent) for both players.

    By default both players update simultaneously from the previous iterate;
    with ``alternating=True`` the jammer reacts to the transmitter's fresh
    update within the same step.  Iteration stops when the largest change in
    any power entry falls below ``tol`` (then ``converged`` is True) or after
    ``max_iters`` steps.  ``start`` defaults to uniform allocations.

    The successive-change threshold is deliberately tighter than EPS_DYN:
    with damping around 0.5 the residual distance to the fixed point is a
    small multiple of the last step size, so stopping at 1e-9 leaves
    final_distance comfortably below 1e-6.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if max_iters < 1:
        raise ValueError("max_iters must be positive")

    if start is None:
        tx_powers = np.full(params.m, params.t_budget / params.m)
        jam_powers = np.full(params.m, params.j_budget / params.m)
    else:
        tx_powers = np.array(start[0], dtype=float)
        jam_powers = np.array(start[1], dtype=float)
        if tx_powers.shape != (params.m,) or jam_powers.shape != (params.m,):
            raise ValueError("start vectors must have one entry per channel")

    iterates: list[tuple[np.ndarray, np.ndarray, float]] = []
    converged = False
    for _ in range(max_iters):
        tx_alloc = Allocation(powers=tx_powers, budget=params.t_budget)
        jam_alloc = Allocation(powers=jam_powers, budget=params.j_budget)
        tx_br, _ = tx_best_response(params, jam_alloc)
        new_tx = (1.0 - damping) * tx_powers + damping * tx_br.powers
        if alternating:
            jam_br, _ = jam_best_response(
                params, Allocation(powers=new_tx, budget=params.t_budget)
            )
        else:
            jam_br, _ = jam_best_response(params, tx_alloc)
        new_jam = (1.0 - damping) * jam_powers + damping * jam_br.powers

        step = max(
            float(np.max(np.abs(new_tx - tx_powers))),
            float(np.max(np.abs(new_jam - jam_powers))),
        )
        tx_powers, jam_powers = new_tx, new_jam
        value = utility(
            params,
            Allocation(powers=tx_powers, budget=params.t_budget),
            Allocation(powers=jam_powers, budget=params.j_budget),
        )
        tx_snapshot = tx_powers.copy()
        jam_snapshot = jam_powers.copy()
        tx_snapshot.setflags(write=False)
        jam_snapshot.setflags(write=False)
        iterates.append((tx_snapshot, jam_snapshot, value))
        if step <= tol:
            converged = True
            break

    reference = solve_nash(params)
    final_distance = max(
        float(np.max(np.abs(tx_powers - reference.tx.powers))),
        float(np.max(np.abs(jam_powers - reference.jam.powers))),
    )
    return DynamicsTrace(
        iterates=tuple(iterates),
        damping=damping,
        alternating=alternating,
        converged=converged,
        final_distance=final_distance,
    )
