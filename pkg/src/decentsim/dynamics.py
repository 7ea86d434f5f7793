"""Reinvestment dynamics of the block lottery.

Each time unit one winner is drawn from the lottery, earns the block
reward net of its running cost (clamped to [0, r_max]), and reinvests the
fraction r of it into its own resource power.  Losing nodes pay their
costs out of pocket; resource power is a stock and never shrinks.  The
long-run behaviour splits three ways with the lottery exponent: below 1
the power fractions equalize, at 1 each fraction is a martingale, above 1
the largest node takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PowerVector, RewardParams
from .errors import DomainError, UnsupportedModelError
from .incentives import (
    LOTTERY_MODELS,
    GammaReward,
    IncentiveModel,
    PoS,
    PoW,
    block_reward,
    lottery_weights,
)


@dataclass(frozen=True)
class ExplicitInit:
    powers: tuple[float, ...]


@dataclass(frozen=True)
class PowerLawInit:
    """Deterministic power-law profile: node i gets (i+1) ** -exponent."""

    exponent: float


@dataclass(frozen=True)
class TwoPointInit:
    """count_rich nodes of power 1 and count_poor nodes of power f."""

    f: float
    count_rich: int
    count_poor: int

    def __post_init__(self) -> None:
        if not 0 < self.f <= 1:
            raise DomainError("two-point f must lie in (0, 1]")
        if self.count_rich < 1 or self.count_poor < 1:
            raise DomainError("two-point init needs at least one node per level")


InitSpec = ExplicitInit | PowerLawInit | TwoPointInit


def build_initial_powers(init: InitSpec, n_nodes: int) -> np.ndarray:
    if isinstance(init, ExplicitInit):
        powers = np.asarray(init.powers, dtype=float)
        if powers.size != n_nodes:
            raise DomainError(
                f"explicit init has {powers.size} powers but n_nodes is {n_nodes}"
            )
    elif isinstance(init, PowerLawInit):
        powers = (np.arange(1, n_nodes + 1, dtype=float)) ** (-init.exponent)
    elif isinstance(init, TwoPointInit):
        if init.count_rich + init.count_poor != n_nodes:
            raise DomainError(
                f"two-point init has {init.count_rich + init.count_poor} nodes "
                f"but n_nodes is {n_nodes}"
            )
        powers = np.concatenate(
            [np.ones(init.count_rich), np.full(init.count_poor, init.f)]
        )
    else:
        raise DomainError(f"unknown init spec {type(init).__name__}")
    if np.any(powers <= 0):
        raise DomainError("all initial powers must be strictly positive")
    return powers


@dataclass(frozen=True)
class SimConfig:
    model: IncentiveModel
    reward: RewardParams
    horizon: int
    n_nodes: int
    init: InitSpec
    seeds: tuple[int, ...]
    epsilon: float = 0.0
    delta: float = 0.0
    window: int | None = None

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise DomainError("horizon must be >= 0")
        if self.n_nodes < 1:
            raise DomainError("n_nodes must be >= 1")
        if not self.seeds:
            raise DomainError("at least one seed is required")
        if any(s < 0 for s in self.seeds):
            raise DomainError("seeds must be non-negative integers")
        if not isinstance(self.model, LOTTERY_MODELS):
            raise UnsupportedModelError(
                f"{type(self.model).__name__} has no block lottery to simulate"
            )
        if self.epsilon < 0 or not 0 <= self.delta <= 100:
            raise DomainError("epsilon must be >= 0 and delta in [0, 100]")

    def effective_window(self) -> int:
        if self.window is not None:
            return self.window
        return max(1, self.horizon // 10)


@dataclass(frozen=True)
class Trajectory:
    """Per-step record of one seeded run: fractions, max/percentile ratio
    of node powers, and the winning node (-1 for the initial step)."""

    seed: int
    betas: np.ndarray  # (horizon + 1, n_nodes)
    ratios: np.ndarray  # (horizon + 1,)
    winners: np.ndarray  # (horizon + 1,)

    @property
    def horizon(self) -> int:
        return self.betas.shape[0] - 1

    @property
    def n_nodes(self) -> int:
        return self.betas.shape[1]


def _nearest_rank_index(n: int, delta: float) -> int:
    rank = math.ceil(delta / 100.0 * n)
    return min(max(rank, 1), n) - 1


def _winner_net_rewards(
    model: IncentiveModel,
    state: np.ndarray,
    winners: np.ndarray,
    totals: np.ndarray,
    reward: RewardParams,
) -> np.ndarray:
    """Clamped net reward earned by each row's winner."""
    rows = np.arange(state.shape[0])
    if isinstance(model, PoW):
        gross = model.b_r - model.c1 * state[rows, winners] - model.c2
    elif isinstance(model, PoS):
        gross = np.full(rows.shape, model.b_r - model.c)
    elif isinstance(model, GammaReward):
        gross = np.array([block_reward(model, t) for t in totals])
    else:
        raise UnsupportedModelError(f"{type(model).__name__} is not a lottery model")
    return np.clip(gross, 0.0, reward.r_max)


def _advance(
    model: IncentiveModel,
    state: np.ndarray,
    uniforms: np.ndarray,
    reward: RewardParams,
) -> np.ndarray:
    """One lottery step applied to every row of ``state`` in place."""
    weights = lottery_weights(model, state)
    cum = np.cumsum(weights, axis=1)
    thresholds = uniforms * cum[:, -1]
    winners = (cum <= thresholds[:, None]).sum(axis=1)
    totals = state.sum(axis=1)
    net = _winner_net_rewards(model, state, winners, totals, reward)
    state[np.arange(state.shape[0]), winners] += reward.r * net
    return winners


def step(
    state: PowerVector,
    model: IncentiveModel,
    reward: RewardParams,
    rng: np.random.Generator,
) -> PowerVector:
    """Advance one time unit: exactly one node wins and reinvests.

    Consumes exactly one uniform draw, so repeated calls with a fresh
    generator reproduce ``simulate`` bit for bit.
    """
    if not isinstance(model, LOTTERY_MODELS):
        raise UnsupportedModelError(
            f"{type(model).__name__} has no block lottery to simulate"
        )
    arr = np.array([state.powers], dtype=float)
    if isinstance(model, PoS) and bool(np.any(arr < model.s_b)):
        raise DomainError("every stake must be >= s_b to run the lottery")
    _advance(model, arr, rng.random(1), reward)
    return PowerVector(tuple(arr[0]))


def simulate(config: SimConfig) -> list[Trajectory]:
    """Run every seed of the config and record full per-step statistics.

    Seeds are advanced in lockstep for speed, but each seed consumes only
    its own pre-drawn uniform stream, so a trajectory depends on nothing
    beyond (config, seed).
    """
    n, horizon = config.n_nodes, config.horizon
    init = build_initial_powers(config.init, n)
    if isinstance(config.model, PoS) and bool(np.any(init < config.model.s_b)):
        raise DomainError("every stake must be >= s_b to run the lottery")
    n_seeds = len(config.seeds)
    state = np.tile(init, (n_seeds, 1))
    uniforms = np.empty((n_seeds, horizon))
    for row, seed in enumerate(config.seeds):
        uniforms[row] = np.random.default_rng(seed).random(horizon)

    betas = np.empty((n_seeds, horizon + 1, n))
    ratios = np.empty((n_seeds, horizon + 1))
    winners = np.full((n_seeds, horizon + 1), -1, dtype=np.int64)
    rank = _nearest_rank_index(n, config.delta)

    def record(t: int) -> None:
        totals = state.sum(axis=1)
        betas[:, t, :] = state / totals[:, None]
        low = np.sort(state, axis=1)[:, rank]
        ratios[:, t] = state.max(axis=1) / low

    record(0)
    for t in range(horizon):
        winners[:, t + 1] = _advance(config.model, state, uniforms[:, t], config.reward)
        record(t + 1)

    return [
        Trajectory(seed=seed, betas=betas[i], ratios=ratios[i], winners=winners[i])
        for i, seed in enumerate(config.seeds)
    ]


@dataclass(frozen=True)
class EdVerdict:
    converged_fraction: float
    mean_final_ratio: float


def ed_verdict(
    trajectories: list[Trajectory], epsilon: float, delta: float, window: int
) -> EdVerdict:
    """Fraction of seeds whose max/percentile power ratio stays at or
    below 1 + epsilon through every step of the final window."""
    if not trajectories:
        raise DomainError("at least one trajectory is required")
    horizon = trajectories[0].horizon
    if window < 1 or window > horizon:
        raise DomainError(f"window must lie in [1, horizon={horizon}]")
    n = trajectories[0].n_nodes
    rank = _nearest_rank_index(n, delta)
    converged = 0
    finals = []
    for traj in trajectories:
        tail = traj.betas[-window:]
        low = np.sort(tail, axis=1)[:, rank]
        ratio = tail.max(axis=1) / low
        converged += bool(np.all(ratio <= 1.0 + epsilon))
        finals.append(ratio[-1])
    return EdVerdict(
        converged_fraction=converged / len(trajectories),
        mean_final_ratio=float(np.mean(finals)),
    )


@dataclass(frozen=True)
class MonotonicityStats:
    """Least-squares drift of the poorest and richest nodes' fractions.

    The poorest/richest node is fixed at step 0 and tracked by identity,
    which makes the exponent-1 case an exact martingale with zero expected
    slope.  Slopes are per-seed fits; the standard error comes from the
    spread across independent seeds.
    """

    slope_min: float
    se_min: float
    slope_max: float
    se_max: float


def _per_seed_slopes(series: np.ndarray) -> np.ndarray:
    steps = np.arange(series.shape[1], dtype=float)
    centered = steps - steps.mean()
    denom = float((centered**2).sum())
    if denom == 0.0:
        return np.zeros(series.shape[0])
    return (series - series.mean(axis=1, keepdims=True)) @ centered / denom


def monotonicity_stats(trajectories: list[Trajectory]) -> MonotonicityStats:
    if len(trajectories) < 30:
        raise DomainError("at least 30 seeds are required for slope statistics")
    mins = np.stack(
        [t.betas[:, int(np.argmin(t.betas[0]))] for t in trajectories]
    )
    maxs = np.stack(
        [t.betas[:, int(np.argmax(t.betas[0]))] for t in trajectories]
    )
    slope_min = _per_seed_slopes(mins)
    slope_max = _per_seed_slopes(maxs)
    n = len(trajectories)
    return MonotonicityStats(
        slope_min=float(slope_min.mean()),
        se_min=float(slope_min.std(ddof=1) / math.sqrt(n)),
        slope_max=float(slope_max.mean()),
        se_max=float(slope_max.std(ddof=1) / math.sqrt(n)),
    )
