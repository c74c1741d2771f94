"""Command-line front end for the power allocation game solvers.

Reads a flat JSON config describing the game, runs the requested solver or
checker, and emits JSON, CSV, or a plain table.  All numbers are serialized
with 12 significant digits so identical inputs produce byte-identical output.
Exit codes: 0 success, 2 input error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .best_response import jam_best_response, kkt_report, tx_best_response
from .core import (
    Allocation,
    ChannelSet,
    GameParams,
    sample_simplex,
    utility,
    utility_batch,
    validate_allocation,
)
from .equilibrium import NashSolution, RegimeLabel, solve_nash, verify_nash
from .oracle import EPS_DYN, GridSpec, grid_minimax, run_dynamics
from .waterfill import level_for_fills

__all__ = [
    "ConfigError",
    "ConfigFile",
    "cmd_best_response",
    "cmd_dynamics",
    "cmd_nash",
    "cmd_oracle",
    "cmd_sweep",
    "load_config",
    "main",
    "run",
    "solution_from_record",
]


class ConfigError(ValueError):
    """Raised when a config file or CLI argument is unusable; maps to exit 2."""


_REQUIRED_FIELDS = ("alpha_t", "alpha_j", "t_budget", "j_budget", "channels")
_KNOWN_FIELDS = _REQUIRED_FIELDS + ("noise_unit",)


@dataclass(frozen=True)
class ConfigFile:
    """A validated game configuration, noise already in linear units."""

    alpha_t: float
    alpha_j: float
    t_budget: float
    j_budget: float
    channels: tuple[float, ...]

    @property
    def m(self) -> int:
        return len(self.channels)

    def to_params(self) -> GameParams:
        return GameParams(
            channels=ChannelSet(
                noise=np.array(self.channels),
                alpha_t=self.alpha_t,
                alpha_j=self.alpha_j,
            ),
            t_budget=self.t_budget,
            j_budget=self.j_budget,
        )

    def echo(self) -> dict:
        return {
            "alpha_t": _f12(self.alpha_t),
            "alpha_j": _f12(self.alpha_j),
            "t_budget": _f12(self.t_budget),
            "j_budget": _f12(self.j_budget),
            "channels": [_f12(n) for n in self.channels],
        }


def _require_number(raw: dict, name: str) -> float:
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return value


def load_config(path: str) -> ConfigFile:
    """Read and validate a flat JSON config; dB noise converts here, once."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc

    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _KNOWN_FIELDS:
            raise ConfigError(f"unknown config field: {key}")
    for key in _REQUIRED_FIELDS:
        if key not in raw:
            raise ConfigError(f"{key} is required")

    scalars = {}
    for key in ("alpha_t", "alpha_j", "t_budget", "j_budget"):
        value = _require_number(raw, key)
        if value <= 0.0:
            raise ConfigError(f"{key} must be positive")
        scalars[key] = value

    unit = raw.get("noise_unit", "linear")
    if unit not in ("linear", "db"):
        raise ConfigError("noise_unit must be 'linear' or 'db'")

    channels = raw["channels"]
    if not isinstance(channels, list) or not channels:
        raise ConfigError("channels must be non-empty")
    noise: list[float] = []
    for k, entry in enumerate(channels):
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise ConfigError(f"channels[{k}] must be a number")
        value = float(entry)
        if not math.isfinite(value):
            raise ConfigError(f"channels[{k}] must be finite")
        if unit == "db":
            value = 10.0 ** (value / 10.0)
        if value <= 0.0:
            raise ConfigError(f"channels[{k}] must be positive")
        noise.append(value)

    return ConfigFile(channels=tuple(noise), **scalars)


# ---------------------------------------------------------------------------
# serialization helpers

def _s12(x: float) -> str:
    return f"{float(x):.12g}"


def _f12(x: float) -> float:
    return float(_s12(x))


def _dump_json(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


_CSV_SCALARS = ("varied", "value", "v", "w", "u")


def _csv_header(m: int) -> str:
    cols = list(_CSV_SCALARS)
    cols += [f"T_{k}" for k in range(1, m + 1)]
    cols += [f"J_{k}" for k in range(1, m + 1)]
    cols += [f"regime_{k}" for k in range(1, m + 1)]
    return ",".join(cols)


def _csv_row(varied: str, sol: NashSolution) -> str:
    cells = [varied, _s12(sol.value), _s12(sol.v), _s12(sol.w), _s12(sol.u)]
    cells += [_s12(p) for p in sol.tx.powers]
    cells += [_s12(p) for p in sol.jam.powers]
    cells += [label.value for label in sol.regimes]
    return ",".join(cells)


# ---------------------------------------------------------------------------
# nash

def _solution_record(cfg: ConfigFile, sol: NashSolution) -> dict:
    channels = []
    for k in range(cfg.m):
        channels.append(
            {
                "k": k + 1,
                "noise": _f12(cfg.channels[k]),
                "tx_power": _f12(sol.tx.powers[k]),
                "jam_power": _f12(sol.jam.powers[k]),
                "regime": sol.regimes[k].value,
            }
        )
    return {
        "v": _f12(sol.v),
        "w": _f12(sol.w),
        "u": _f12(sol.u),
        "value": _f12(sol.value),
        "channels": channels,
    }


def _verification_record(params: GameParams, sol: NashSolution) -> dict:
    report = verify_nash(params, sol)
    return {
        "ok": report.ok,
        "tx_gap": _f12(report.tx_gap),
        "jam_gap": _f12(report.jam_gap),
        "tx_excess": _f12(report.tx_excess),
        "jam_shortfall": _f12(report.jam_shortfall),
        "kkt_stationarity": _f12(report.kkt.stationarity),
        "kkt_complementarity": _f12(report.kkt.complementarity),
        "kkt_dual_violation": _f12(report.kkt.dual_violation),
        "kkt_primal_gap": _f12(report.kkt.primal_gap),
        "regime_failures": list(report.regime_failures),
        "level_gap": _f12(report.level_gap),
        "multiplier_gap": _f12(report.multiplier_gap),
        "deviations": report.deviations,
        "seed": report.seed,
    }


def solution_from_record(record: dict) -> tuple[GameParams, NashSolution]:
    """Rebuild (GameParams, NashSolution) from a cmd_nash JSON record.

    The inverse of the nash record writer, used to round-trip CLI output back
    through verify_nash.
    """
    cfg = record["config"]
    params = GameParams(
        channels=ChannelSet(
            noise=np.array(cfg["channels"], dtype=float),
            alpha_t=cfg["alpha_t"],
            alpha_j=cfg["alpha_j"],
        ),
        t_budget=cfg["t_budget"],
        j_budget=cfg["j_budget"],
    )
    sol_rec = record["solution"]
    rows = sol_rec["channels"]
    tx = Allocation(
        powers=np.array([row["tx_power"] for row in rows]), budget=params.t_budget
    )
    jam = Allocation(
        powers=np.array([row["jam_power"] for row in rows]), budget=params.j_budget
    )
    regimes = tuple(RegimeLabel(row["regime"]) for row in rows)
    sol = NashSolution(
        tx=tx,
        jam=jam,
        v=float(sol_rec["v"]),
        w=float(sol_rec["w"]),
        u=float(sol_rec["u"]),
        regimes=regimes,
        value=float(sol_rec["value"]),
    )
    return params, sol


def _render_nash(record: dict, fmt: str, m: int) -> str:
    if fmt == "json":
        return _dump_json(record)
    sol = record["solution"]
    if fmt == "csv":
        header = _csv_header(m)
        cells = ["", _s12(sol["value"]), _s12(sol["v"]), _s12(sol["w"]), _s12(sol["u"])]
        cells += [_s12(row["tx_power"]) for row in sol["channels"]]
        cells += [_s12(row["jam_power"]) for row in sol["channels"]]
        cells += [row["regime"] for row in sol["channels"]]
        return header + "\n" + ",".join(cells) + "\n"
    lines = [
        f"v = {_s12(sol['v'])}",
        f"w = {_s12(sol['w'])}",
        f"u = {_s12(sol['u'])}",
        f"value = {_s12(sol['value'])}",
    ]
    rows = [["k", "noise", "tx_power", "jam_power", "regime"]]
    for row in sol["channels"]:
        rows.append(
            [
                str(row["k"]),
                _s12(row["noise"]),
                _s12(row["tx_power"]),
                _s12(row["jam_power"]),
                row["regime"],
            ]
        )
    text = "\n".join(lines) + "\n" + _table(rows)
    if "verification" in record:
        verdict = "pass" if record["verification"]["ok"] else "FAIL"
        text += f"verification: {verdict}\n"
    return text


def cmd_nash(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    params = cfg.to_params()
    sol = solve_nash(params)
    record = {"command": "nash", "config": cfg.echo(), "solution": _solution_record(cfg, sol)}
    code = 0
    if args.verify:
        record["verification"] = _verification_record(params, sol)
        if not record["verification"]["ok"]:
            code = 3
    _emit(_render_nash(record, args.format, cfg.m), args.out)
    return code


# ---------------------------------------------------------------------------
# best-response

def _parse_fixed(
    text: str, m: int, budget: float, who: str, allow_all_zero: bool = False
) -> Allocation:
    try:
        powers = np.array([float(part) for part in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"--fixed must be comma-separated numbers: {exc}") from exc
    alloc = Allocation(powers=powers, budget=budget)
    if allow_all_zero and powers.size == m and not np.any(powers != 0.0):
        return alloc
    report = validate_allocation(alloc, m)
    if not report.ok:
        raise ConfigError(f"--fixed is not a feasible {who} allocation: {report.describe()}")
    return alloc


def cmd_best_response(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    params = cfg.to_params()
    record: dict = {"command": "best-response", "config": cfg.echo(), "player": args.player}
    verified_ok = True

    if args.player == "tx":
        jam = _parse_fixed(args.fixed, cfg.m, cfg.j_budget, "jammer")
        record["fixed_jam"] = [_f12(p) for p in jam.powers]
        tx, level = tx_best_response(params, jam)
        check = level_for_fills(
            params.alpha_j * jam.powers + params.noise, params.alpha_t * tx.powers
        )
        record["response"] = {
            "tx_powers": [_f12(p) for p in tx.powers],
            "level": _f12(level),
            "value": _f12(utility(params, tx, jam)),
            "level_consistent": check.consistent,
        }
        verified_ok = check.consistent
    else:
        tx = _parse_fixed(args.fixed, cfg.m, cfg.t_budget, "transmitter", allow_all_zero=True)
        record["fixed_tx"] = [_f12(p) for p in tx.powers]
        jam, state = jam_best_response(params, tx)
        report = kkt_report(params, tx, jam, state)
        value = float(utility_batch(params, tx.powers, jam.powers)[0])
        record["response"] = {
            "jam_powers": [_f12(p) for p in jam.powers],
            "u": _f12(state.u),
            "lambdas": [_f12(lam) for lam in state.lambdas],
            "value": _f12(value),
            "kkt": {
                "stationarity": _f12(report.stationarity),
                "complementarity": _f12(report.complementarity),
                "dual_violation": _f12(report.dual_violation),
                "primal_gap": _f12(report.primal_gap),
                "ok": report.ok(),
            },
        }
        if state.degenerate:
            record["response"]["note"] = (
                "degenerate: any allocation optimal; "
                "canonical noise-waterfilling returned"
            )
        verified_ok = report.ok()

    code = 3 if args.verify and not verified_ok else 0
    _emit(_render_best_response(record, args.format), args.out)
    return code


def _render_best_response(record: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(record)
    if fmt == "csv":
        raise ConfigError("csv format is not available for best-response")
    resp = record["response"]
    lines = [f"player = {record['player']}"]
    if record["player"] == "tx":
        lines.append(f"tx_powers = [{', '.join(_s12(p) for p in resp['tx_powers'])}]")
        lines.append(f"level = {_s12(resp['level'])}")
        lines.append(f"value = {_s12(resp['value'])}")
        lines.append(f"level_consistent = {str(resp['level_consistent']).lower()}")
    else:
        lines.append(f"jam_powers = [{', '.join(_s12(p) for p in resp['jam_powers'])}]")
        lines.append(f"u = {_s12(resp['u'])}")
        lines.append(f"lambdas = [{', '.join(_s12(x) for x in resp['lambdas'])}]")
        lines.append(f"value = {_s12(resp['value'])}")
        kkt = resp["kkt"]
        lines.append(
            "kkt residuals: "
            f"stationarity={_s12(kkt['stationarity'])} "
            f"complementarity={_s12(kkt['complementarity'])} "
            f"dual={_s12(kkt['dual_violation'])} "
            f"primal={_s12(kkt['primal_gap'])}"
        )
        if "note" in resp:
            lines.append(resp["note"])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# oracle

def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if cfg.m > 4:
        raise ConfigError(
            f"oracle supports at most 4 channels (config has {cfg.m}); "
            "the grid grows combinatorially beyond that"
        )
    params = cfg.to_params()
    spec = GridSpec(resolution=args.resolution, m=cfg.m)
    result = grid_minimax(params, spec)
    sol = solve_nash(params)
    gap = result.value - sol.value
    record = {
        "command": "oracle",
        "config": cfg.echo(),
        "resolution": args.resolution,
        "n_points": result.n_points,
        "grid_value": _f12(result.value),
        "nash_value": _f12(sol.value),
        "gap": _f12(gap),
        "spacing": _f12(result.spacing),
        "lipschitz_bound": _f12(result.lipschitz_bound),
        "gap_bound": _f12(result.gap_bound),
        "grid_jam": [_f12(p) for p in result.jam],
    }
    ok = 0.0 <= gap <= result.gap_bound
    record["within_bound"] = ok
    code = 3 if args.verify and not ok else 0
    _emit(_render_oracle(record, args.format), args.out)
    return code


def _render_oracle(record: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(record)
    if fmt == "csv":
        raise ConfigError("csv format is not available for oracle")
    lines = [
        f"resolution = {record['resolution']} ({record['n_points']} grid points)",
        f"grid_value = {_s12(record['grid_value'])}",
        f"nash_value = {_s12(record['nash_value'])}",
        f"gap = {_s12(record['gap'])} (bound {_s12(record['gap_bound'])})",
        f"grid_jam = [{', '.join(_s12(p) for p in record['grid_jam'])}]",
        f"within_bound = {str(record['within_bound']).lower()}",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dynamics

def cmd_dynamics(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    params = cfg.to_params()
    rng = np.random.default_rng(args.seed)
    start = (
        sample_simplex(rng, 1, cfg.m, cfg.t_budget)[0],
        sample_simplex(rng, 1, cfg.m, cfg.j_budget)[0],
    )
    trace = run_dynamics(
        params,
        damping=args.gamma,
        max_iters=args.max_iters,
        start=start,
        alternating=args.alternating,
    )
    final_tx, final_jam, final_value = trace.iterates[-1]
    record = {
        "command": "dynamics",
        "config": cfg.echo(),
        "gamma": _f12(args.gamma),
        "seed": args.seed,
        "max_iters": args.max_iters,
        "alternating": args.alternating,
        "start_tx": [_f12(p) for p in start[0]],
        "start_jam": [_f12(p) for p in start[1]],
        "iterations": trace.n_iters,
        "converged": trace.converged,
        "final_distance": _f12(trace.final_distance),
        "final_tx": [_f12(p) for p in final_tx],
        "final_jam": [_f12(p) for p in final_jam],
        "final_value": _f12(final_value),
    }
    ok = trace.converged and trace.final_distance <= EPS_DYN
    code = 3 if args.verify and not ok else 0
    _emit(_render_dynamics(record, args.format), args.out)
    return code


def _render_dynamics(record: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(record)
    if fmt == "csv":
        raise ConfigError("csv format is not available for dynamics")
    lines = [
        f"gamma = {_s12(record['gamma'])}  seed = {record['seed']}",
        f"iterations = {record['iterations']}  converged = {str(record['converged']).lower()}",
        f"final_distance = {_s12(record['final_distance'])}",
        f"final_tx = [{', '.join(_s12(p) for p in record['final_tx'])}]",
        f"final_jam = [{', '.join(_s12(p) for p in record['final_jam'])}]",
        f"final_value = {_s12(record['final_value'])}",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sweep

def _sweep_config(cfg: ConfigFile, key: str, value: float) -> ConfigFile:
    if key == "t_budget":
        return ConfigFile(cfg.alpha_t, cfg.alpha_j, value, cfg.j_budget, cfg.channels)
    if key == "j_budget":
        return ConfigFile(cfg.alpha_t, cfg.alpha_j, cfg.t_budget, value, cfg.channels)
    if key.startswith("noise:"):
        index = int(key.split(":", 1)[1]) - 1
        channels = list(cfg.channels)
        channels[index] = value
        return ConfigFile(
            cfg.alpha_t, cfg.alpha_j, cfg.t_budget, cfg.j_budget, tuple(channels)
        )
    raise AssertionError(f"unchecked vary key {key!r}")


def _check_vary_key(key: str, m: int) -> None:
    if key in ("t_budget", "j_budget"):
        return
    if key.startswith("noise:"):
        suffix = key.split(":", 1)[1]
        if suffix.isdigit() and 1 <= int(suffix) <= m:
            return
        raise ConfigError(
            f"unknown --vary key: {key} (channel index must be 1..{m})"
        )
    raise ConfigError(f"unknown --vary key: {key}")


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    _check_vary_key(args.vary, cfg.m)
    if not args.from_ < args.to:
        raise ConfigError("--from must be less than --to")
    if args.steps < 2:
        raise ConfigError("--steps must be at least 2")
    if args.from_ <= 0.0:
        raise ConfigError(f"--from must be positive when varying {args.vary}")

    values = np.linspace(args.from_, args.to, args.steps)
    rows = []
    json_rows = []
    all_ok = True
    for value in values:
        step_cfg = _sweep_config(cfg, args.vary, float(value))
        params = step_cfg.to_params()
        sol = solve_nash(params)
        if args.verify:
            all_ok = all_ok and verify_nash(params, sol).ok
        rows.append(_csv_row(_s12(value), sol))
        json_rows.append(
            {
                "varied": _f12(value),
                "value": _f12(sol.value),
                "v": _f12(sol.v),
                "w": _f12(sol.w),
                "u": _f12(sol.u),
                "tx_powers": [_f12(p) for p in sol.tx.powers],
                "jam_powers": [_f12(p) for p in sol.jam.powers],
                "regimes": [label.value for label in sol.regimes],
            }
        )

    if args.format == "json":
        record = {
            "command": "sweep",
            "config": cfg.echo(),
            "vary": args.vary,
            "rows": json_rows,
        }
        text = _dump_json(record)
    elif args.format == "table":
        table_rows = [list(_CSV_SCALARS)]
        for row in rows:
            table_rows.append(row.split(",")[: len(_CSV_SCALARS)])
        text = _table(table_rows)
    else:
        text = _csv_header(cfg.m) + "\n" + "\n".join(rows) + "\n"
    _emit(text, args.out)
    return 3 if args.verify and not all_ok else 0


# ---------------------------------------------------------------------------
# entry points

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamgame",
        description="Solvers for the transmitter-vs-jammer power allocation game.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a JSON game config")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--verify", action="store_true", help="run self-checks; exit 3 on failure")

    sub = parser.add_subparsers(dest="command", required=True)

    p_nash = sub.add_parser("nash", parents=[common], help="solve for the Nash equilibrium")
    p_nash.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_nash.set_defaults(func=cmd_nash)

    p_br = sub.add_parser(
        "best-response", parents=[common], help="best response to a fixed opponent allocation"
    )
    p_br.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_br.add_argument("--player", choices=("tx", "jam"), required=True)
    p_br.add_argument(
        "--fixed",
        required=True,
        help="opponent allocation as comma-separated powers, e.g. 1,0",
    )
    p_br.set_defaults(func=cmd_best_response)

    p_oracle = sub.add_parser(
        "oracle", parents=[common], help="brute-force minimax check of the equilibrium value"
    )
    p_oracle.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_oracle.add_argument("--resolution", type=int, default=101)
    p_oracle.set_defaults(func=cmd_oracle)

    p_dyn = sub.add_parser(
        "dynamics", parents=[common], help="damped best-response dynamics from a seeded start"
    )
    p_dyn.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_dyn.add_argument("--gamma", type=float, default=0.5)
    p_dyn.add_argument("--seed", type=int, default=0)
    p_dyn.add_argument("--max-iters", type=int, default=10_000)
    p_dyn.add_argument("--alternating", action="store_true")
    p_dyn.set_defaults(func=cmd_dynamics)

    p_sweep = sub.add_parser(
        "sweep", parents=[common], help="solve across a swept parameter, one CSV row per step"
    )
    p_sweep.add_argument("--format", choices=("json", "table", "csv"), default="csv")
    p_sweep.add_argument(
        "--vary",
        required=True,
        help="t_budget, j_budget, or noise:<k> with k a 1-based channel index",
    )
    p_sweep.add_argument("--from", dest="from_", type=float, required=True)
    p_sweep.add_argument("--to", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
