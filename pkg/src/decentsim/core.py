"""Resource-power state and the decentralization predicate.

A system state is a vector of node resource powers plus a map from nodes
to the players that run them.  A player's effective power is the sum of
the powers of its nodes.  A state counts as decentralized for a target
(m, epsilon, delta) when at least m distinct players run nodes and the
ratio between the largest and the delta-th percentile effective power is
at most 1 + epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, StructuralError


@dataclass(frozen=True)
class PowerVector:
    """Ordered, strictly positive resource powers, one entry per node."""

    powers: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.powers) < 1:
            raise DomainError("power vector must contain at least one node")
        if any(not (p > 0) for p in self.powers):
            raise DomainError("every resource power must be strictly positive")
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))

    def __len__(self) -> int:
        return len(self.powers)

    def total(self) -> float:
        return math.fsum(self.powers)


@dataclass(frozen=True)
class PlayerMap:
    """Node-to-player assignment, parallel to a PowerVector."""

    owners: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "owners", tuple(str(o) for o in self.owners))

    def __len__(self) -> int:
        return len(self.owners)

    def players(self) -> tuple[str, ...]:
        """Distinct players in first-appearance order."""
        return tuple(dict.fromkeys(self.owners))


class PercentileRule(Enum):
    """Percentile convention used by the decentralization predicate."""

    NEAREST_RANK = "nearest-rank"


@dataclass(frozen=True)
class DecentralizationSpec:
    """Target triple (m, epsilon, delta) plus the percentile convention."""

    m: int
    epsilon: float
    delta: float
    percentile_rule: PercentileRule = PercentileRule.NEAREST_RANK

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("m must be a positive integer")
        if self.epsilon < 0:
            raise DomainError("epsilon must be >= 0")
        if not 0 <= self.delta <= 100:
            raise DomainError("delta must lie in [0, 100]")


@dataclass(frozen=True)
class RewardParams:
    """Reinvestment rate and the cap on per-step net reward."""

    r: float
    r_max: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise DomainError("reinvestment rate r must be >= 0")
        if not self.r_max > 0:
            raise DomainError("reward cap r_max must be > 0")


class Verdict(Enum):
    HOLDS = "holds"
    FAILS_COUNT = "fails-count"
    FAILS_RATIO = "fails-ratio"


@dataclass(frozen=True)
class DecentralizationResult:
    verdict: Verdict
    ratio: float
    player_count: int


def effective_powers(pv: PowerVector, pm: PlayerMap) -> dict[str, float]:
    """Sum each player's node powers.

    Uses exact summation, so the result is invariant under node reordering.
    """
    if len(pv) != len(pm):
        raise StructuralError(
            f"power vector has {len(pv)} nodes but player map has {len(pm)}"
        )
    grouped: dict[str, list[float]] = {}
    for owner, power in zip(pm.owners, pv.powers):
        grouped.setdefault(owner, []).append(power)
    return {owner: math.fsum(parts) for owner, parts in grouped.items()}


def percentile_power(values: list[float], delta: float) -> float:
    """Nearest-rank percentile of a non-empty list of positive values.

    delta=0 returns the minimum and delta=100 the maximum; in between, the
    ceil(delta/100 * n)-th smallest value (1-based) of the sorted list.
    """
    if not values:
        raise DomainError("percentile of an empty list is undefined")
    if not 0 <= delta <= 100:
        raise DomainError("delta must lie in [0, 100]")
    ordered = sorted(values)
    rank = math.ceil(delta / 100.0 * len(ordered))
    rank = min(max(rank, 1), len(ordered))
    return ordered[rank - 1]


def is_decentralized(
    pv: PowerVector, pm: PlayerMap, spec: DecentralizationSpec
) -> DecentralizationResult:
    """Decide the (m, epsilon, delta) predicate for one state.

    The ratio between the largest and the delta-th percentile effective
    power is reported regardless of the verdict.  When both the player
    count and the ratio fail, the count failure is reported.
    """
    eps = effective_powers(pv, pm)
    ep_values = list(eps.values())
    ratio = max(ep_values) / percentile_power(ep_values, spec.delta)
    if len(ep_values) < spec.m:
        return DecentralizationResult(Verdict.FAILS_COUNT, ratio, len(ep_values))
    if ratio > 1.0 + spec.epsilon:
        return DecentralizationResult(Verdict.FAILS_RATIO, ratio, len(ep_values))
    return DecentralizationResult(Verdict.HOLDS, ratio, len(ep_values))
