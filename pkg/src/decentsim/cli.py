"""Command-line surface tying the toolkit together.

Subcommands: simulate (reinvestment dynamics), bound (catch-up bound
estimate), sweep (bound over a parameter grid), metrics (producer-dataset
report), check (incentive-condition report), anchors (documented
real-world reference constants).  Every run emits a JSON report embedding
the resolved configuration and seed; re-running that configuration
reproduces the results payload byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bound import SweepRow, WalkParams, estimate_g, real_world_anchors, sweep, u_sensitivity
from .conditions import check_all, check_linearity
from .config import SCHEMAS, RunConfig, echo_values, parse_config
from .core import PlayerMap, PowerVector, RewardParams
from .dynamics import (
    ExplicitInit,
    PowerLawInit,
    SimConfig,
    TwoPointInit,
    Trajectory,
    ed_verdict,
    monotonicity_stats,
    simulate,
)
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    SearchBoundError,
    StructuralError,
    UnsupportedModelError,
)
from .incentives import (
    DPoS,
    GammaReward,
    IncentiveModel,
    Linear,
    PoS,
    PoW,
    ThresholdCoverSybilCost,
    ZeroSybilCost,
)
from .metrics import load_producer_csv, report as metrics_report

EXIT_CODES = {
    ConfigError: 2,
    StructuralError: 3,
    DomainError: 3,
    SearchBoundError: 4,
    BudgetError: 5,
    UnsupportedModelError: 6,
}

OUTPUT_DIR_ENV = "DECENTSIM_OUT"


def _resolve_path(raw: str) -> Path:
    path = Path(raw)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


def build_incentive_model(cfg: RunConfig) -> IncentiveModel:
    name = cfg["model"]
    if name == "pow":
        return PoW(b_r=cfg["br"], c1=cfg["c1"], c2=cfg["c2"])
    if name == "pos":
        return PoS(b_r=cfg["br"], c=cfg["c"], s_b=cfg["sb"])
    if name == "dpos":
        return DPoS(b_r=cfg["br"], c=cfg["c"], n_dpos=cfg["ndpos"])
    if name == "gamma":
        return GammaReward(b_r=cfg["br"], gamma=cfg["gamma"])
    if name == "linear":
        return Linear(kind=cfg["kind"], k=cfg["k"])
    raise ConfigError(f"unknown model '{name}'")


def _build_init(cfg: RunConfig):
    kind = cfg["init"]
    if kind == "explicit":
        return ExplicitInit(powers=cfg["init_powers"])
    if kind == "power-law":
        return PowerLawInit(exponent=cfg["init_exponent"])
    return TwoPointInit(
        f=cfg["init_f"],
        count_rich=cfg["init_count_rich"],
        count_poor=cfg["init_count_poor"],
    )


def _write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["step", "ratio"] + [f"beta_{i + 1}" for i in range(traj.n_nodes)]
        )
        for t in range(traj.horizon + 1):
            writer.writerow(
                [t, repr(float(traj.ratios[t]))]
                + [repr(float(b)) for b in traj.betas[t]]
            )


def _run_simulate(cfg: RunConfig) -> dict[str, Any]:
    sim = SimConfig(
        model=build_incentive_model(cfg),
        reward=RewardParams(r=cfg["r"], r_max=cfg["r_max"]),
        horizon=cfg["horizon"],
        n_nodes=cfg["n_nodes"],
        init=_build_init(cfg),
        seeds=cfg["seeds"],
        epsilon=cfg["epsilon"],
        delta=cfg["delta"],
        window=cfg["window"] or None,
    )
    trajectories = simulate(sim)
    window = sim.effective_window() if sim.horizon else 1
    results: dict[str, Any] = {
        "horizon": sim.horizon,
        "n_seeds": len(trajectories),
        "per_seed": [
            {
                "seed": traj.seed,
                "final_ratio": float(traj.ratios[-1]),
                "final_betas": [float(b) for b in traj.betas[-1]],
            }
            for traj in trajectories
        ],
    }
    if sim.horizon:
        verdict = ed_verdict(trajectories, cfg["epsilon"], cfg["delta"], window)
        results["ed"] = {
            "converged_fraction": verdict.converged_fraction,
            "mean_final_ratio": verdict.mean_final_ratio,
            "window": window,
        }
    if len(trajectories) >= 30:
        stats = monotonicity_stats(trajectories)
        results["monotonicity"] = dataclasses.asdict(stats)
    if cfg["trajectories_dir"]:
        out_dir = _resolve_path(cfg["trajectories_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        for traj in trajectories:
            _write_trajectory_csv(out_dir / f"trajectory_{traj.seed}.csv", traj)
        results["trajectories_dir"] = str(out_dir)
    return results


def _walk_params(cfg: RunConfig, f: float, rho: float, epsilon: float) -> WalkParams:
    return WalkParams(
        f=f,
        rho=rho,
        epsilon=epsilon,
        u=cfg["u"],
        k_max=cfg["k_max"],
        samples=cfg["samples"],
        seed=cfg["seed"],
        strategy=cfg["strategy"],
        n_jump=cfg["n_jump"],
        budget=cfg["budget"],
    )


def _run_bound(cfg: RunConfig) -> dict[str, Any]:
    params = _walk_params(cfg, cfg["f"], cfg["rho"], cfg["epsilon"])
    result = estimate_g(params)
    results: dict[str, Any] = {
        "estimate": result.estimate,
        "ci_low": result.ci_low,
        "ci_high": result.ci_high,
        "std_error": result.std_error,
        "p0": result.p0,
        "p0_std_error": result.p0_std_error,
        "p0_analytic_bound": (1.0 + params.epsilon) * params.f,
        "dense_success_mass": result.dense_success_mass,
        "per_k": list(result.per_k),
    }
    if cfg["u_sweep"]:
        results["u_sensitivity"] = [
            {"u": u, "estimate": est} for u, est in u_sensitivity(params)
        ]
    return results


def _write_sweep_csv(path: Path, rows: list[SweepRow]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["f", "epsilon", "rho", "estimate", "ci_low", "ci_high"])
        for row in rows:
            writer.writerow(
                [repr(row.f), repr(row.epsilon), repr(row.rho),
                 repr(row.estimate), repr(row.ci_low), repr(row.ci_high)]
            )


def _run_sweep(cfg: RunConfig) -> dict[str, Any]:
    base = WalkParams(
        f=cfg["f_grid"][0],
        rho=cfg["rho_grid"][0],
        epsilon=cfg["epsilon_grid"][0],
        u=cfg["u"],
        k_max=cfg["k_max"],
        samples=cfg["samples"],
        seed=cfg["seed"],
        strategy=cfg["strategy"],
        n_jump=cfg["n_jump"],
        budget=cfg["budget"],
    )
    rows = sweep(list(cfg["f_grid"]), list(cfg["epsilon_grid"]), list(cfg["rho_grid"]), base)
    results: dict[str, Any] = {"rows": [dataclasses.asdict(row) for row in rows]}
    if cfg["csv_out"]:
        path = _resolve_path(cfg["csv_out"])
        path.parent.mkdir(parents=True, exist_ok=True)
        _write_sweep_csv(path, rows)
        results["csv_path"] = str(path)
    return results


def _write_metrics_csv(path: Path, levels) -> None:
    header, row = [], []
    for level in levels:
        header += [f"addresses_{level.share}", f"gini_{level.share}", f"entropy_{level.share}"]
        row += [level.addresses, repr(level.gini), repr(level.entropy_bits)]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerow(row)


def _run_metrics(cfg: RunConfig) -> dict[str, Any]:
    dataset = load_producer_csv(cfg["input"])
    rep = metrics_report(dataset)
    results: dict[str, Any] = {
        "levels": [dataclasses.asdict(level) for level in rep.levels]
    }
    if cfg["csv_out"]:
        path = _resolve_path(cfg["csv_out"])
        path.parent.mkdir(parents=True, exist_ok=True)
        _write_metrics_csv(path, rep.levels)
        results["csv_path"] = str(path)
    return results


def _run_check(cfg: RunConfig) -> dict[str, Any]:
    model = build_incentive_model(cfg)
    powers = PowerVector(cfg["powers"])
    if cfg["owners"]:
        owners = tuple(o.strip() for o in cfg["owners"].split(","))
    else:
        owners = tuple(f"p{i + 1}" for i in range(len(powers)))
    pm = PlayerMap(owners)
    sybil = (
        ZeroSybilCost()
        if cfg["sybil"] == "zero"
        else ThresholdCoverSybilCost(margin=cfg["margin"])
    )
    rep = check_all(
        model, sybil, powers, pm, cfg["m"],
        delta=cfg["delta"], grid=cfg["grid"], max_nodes=cfg["max_nodes"],
    )
    linearity = check_linearity(
        model, cfg["linearity_trials"], np.random.default_rng(cfg["seed"])
    )
    out = dataclasses.asdict(rep)
    out["linearity"] = {
        "is_linear": linearity.is_linear,
        "max_violation": (
            None if linearity.max_violation == float("inf") else linearity.max_violation
        ),
    }
    return out


RUNNERS = {
    "simulate": _run_simulate,
    "bound": _run_bound,
    "sweep": _run_sweep,
    "metrics": _run_metrics,
    "check": _run_check,
    "anchors": lambda cfg: dict(real_world_anchors()),
}


def run(config: RunConfig) -> dict[str, Any]:
    """Execute a resolved configuration and assemble the full report."""
    started = time.perf_counter()
    results = RUNNERS[config.subcommand](config)
    return {
        "version": __version__,
        "subcommand": config.subcommand,
        "config": echo_values(config),
        "results": results,
        "wall_time_s": time.perf_counter() - started,
    }


def results_payload_bytes(report_dict: dict[str, Any]) -> bytes:
    """Canonical bytes of the results section, used by determinism checks."""
    return json.dumps(report_dict["results"], sort_keys=True).encode("utf-8")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decentsim",
        description="Incentive-system decentralization toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, keys in SCHEMAS.items():
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", default=None, help="JSON config file")
        for key in keys:
            sub.add_argument(f"--{key.name}", default=None, help=key.help or key.kind)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        name: value
        for name, value in vars(args).items()
        if name not in ("subcommand", "config") and value is not None
    }
    try:
        config = parse_config(args.subcommand, file=args.config, overrides=overrides)
        report = run(config)
    except tuple(EXIT_CODES) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES[type(exc)]
    text = json.dumps(report, sort_keys=True, indent=2)
    if config["out"]:
        path = _resolve_path(config["out"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
