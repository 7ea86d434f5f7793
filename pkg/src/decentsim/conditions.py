"""Numerical deciders for the four incentive-system conditions.

Reward coverage (at least m nodes profit) is decided exactly.  The
no-gain-from-merging and no-gain-from-splitting conditions quantify over
continuum re-allocations, so they are decided by bounded brute force: all
node subsets up to a hard cap, all survivor sets, and all power splits on
a uniform grid.  Every reported witness carries enough detail to be
re-evaluated independently.  The even-distribution condition is a limit
statement about the power dynamics and is delegated to the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

import numpy as np

from .core import PlayerMap, PowerVector, effective_powers, percentile_power
from .errors import DomainError, SearchBoundError
from .incentives import (
    IncentiveModel,
    Linear,
    PoS,
    SybilCostModel,
    realized_utility,
    sybil_cost,
    utility,
)

REL_TOL = 1e-9
DEFAULT_GRID = 20
DEFAULT_MAX_NODES = 6


@dataclass(frozen=True)
class GrResult:
    holds: bool
    profitable_nodes: int
    m: int


@dataclass(frozen=True)
class MergeWitness:
    """A merge of distinct-player nodes that beats running them separately."""

    merged_nodes: tuple[int, ...]
    surviving_nodes: tuple[int, ...]
    allocation: tuple[float, ...]
    separate_total: float
    merged_total: float

    @property
    def gain(self) -> float:
        return self.merged_total - self.separate_total


@dataclass(frozen=True)
class SplitWitness:
    """A split of one player's power into several nodes that beats one node."""

    player: str
    power: float
    parts: tuple[float, ...]
    single_utility: float
    split_total: float
    cost: float

    @property
    def gain(self) -> float:
        return self.split_total - self.cost - self.single_utility


@dataclass(frozen=True)
class NdResult:
    holds: bool
    witness: MergeWitness | None


@dataclass(frozen=True)
class NsResult:
    holds: bool
    witness: SplitWitness | None


@dataclass(frozen=True)
class LinearityResult:
    is_linear: bool
    max_violation: float


@dataclass(frozen=True)
class ConditionReport:
    gr: GrResult
    nd: NdResult
    ns: NsResult
    ed: str = "deferred"
    notes: tuple[str, ...] = field(default_factory=tuple)


def _tolerance(reference: float) -> float:
    return REL_TOL * max(1.0, abs(reference))


def check_gr(model: IncentiveModel, pv: PowerVector, m: int) -> GrResult:
    """Do at least m nodes earn strictly positive net profit?

    A stake node below the participation minimum cannot run and therefore
    does not earn.
    """
    if m < 1:
        raise DomainError("m must be a positive integer")
    count = 0
    for i in range(len(pv)):
        u = utility(model, i, pv)
        if u is not None and u > 0:
            count += 1
    return GrResult(holds=count >= m, profitable_nodes=count, m=m)


def grid_allocations(total: float, parts: int, grid: int) -> Iterator[tuple[float, ...]]:
    """All strictly positive splits of ``total`` into ``parts`` grid cells.

    Each part receives an integer number (>= 1) of ``grid`` equal shares,
    so the enumeration covers the simplex at resolution total/grid.
    """
    if parts < 1 or grid < parts:
        return
    unit = total / grid

    def compose(remaining: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield (remaining,)
            return
        for first in range(1, remaining - slots + 2):
            for rest in compose(remaining - first, slots - 1):
                yield (first, *rest)

    for cells in compose(grid, parts):
        yield tuple(c * unit for c in cells)


def check_nd(
    model: IncentiveModel,
    pv: PowerVector,
    pm: PlayerMap,
    m: int,
    grid: int = DEFAULT_GRID,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> NdResult:
    """Can nodes run by different players profit by combining into fewer nodes?

    Only merges that leave fewer than m players running nodes count.  The
    combined power may be re-allocated arbitrarily among the surviving
    nodes; the grid discretizes that re-allocation.  Holds on equality.
    """
    n = len(pv)
    if n != len(pm):
        raise DomainError("power vector and player map must be parallel")
    if n > max_nodes:
        raise SearchBoundError(
            f"{n} nodes exceeds the merge search bound of {max_nodes}"
        )
    best: MergeWitness | None = None
    indices = range(n)
    for size in range(2, n + 1):
        for subset in combinations(indices, size):
            owners = [pm.owners[i] for i in subset]
            if len(set(owners)) != len(owners):
                continue  # not a distinct-player set
            separate = math.fsum(realized_utility(model, i, pv) for i in subset)
            pool = math.fsum(pv.powers[i] for i in subset)
            for surv_size in range(1, size):
                for survivors in combinations(subset, surv_size):
                    removed = set(subset) - set(survivors)
                    running = {
                        pm.owners[i] for i in indices if i not in removed
                    }
                    if len(running) >= m:
                        continue  # merge does not push the player count below m
                    keep = [i for i in indices if i not in set(subset)]
                    for alloc in grid_allocations(pool, surv_size, grid):
                        merged_powers = list(alloc) + [pv.powers[i] for i in keep]
                        merged_pv = PowerVector(tuple(merged_powers))
                        merged = math.fsum(
                            realized_utility(model, j, merged_pv)
                            for j in range(surv_size)
                        )
                        if merged > separate + _tolerance(separate):
                            witness = MergeWitness(
                                merged_nodes=subset,
                                surviving_nodes=survivors,
                                allocation=alloc,
                                separate_total=separate,
                                merged_total=merged,
                            )
                            if best is None or witness.gain > best.gain:
                                best = witness
    return NdResult(holds=best is None, witness=best)


def check_ns(
    model: IncentiveModel,
    sybil: SybilCostModel,
    pv: PowerVector,
    pm: PlayerMap,
    delta: float,
    grid: int = DEFAULT_GRID,
    max_parts: int = DEFAULT_MAX_NODES,
) -> NsResult:
    """Can a player at or above the delta-th percentile profit by splitting
    its power across several nodes, net of the multi-node cost?

    The split utilities and the single-node utility are evaluated against
    the other players' nodes as a fixed context.  Holds on equality.
    """
    if len(pv) != len(pm):
        raise DomainError("power vector and player map must be parallel")
    if grid < 2:
        raise DomainError("grid must allow at least a two-way split")
    eps = effective_powers(pv, pm)
    threshold = percentile_power(list(eps.values()), delta)
    best: SplitWitness | None = None
    for player, power in eps.items():
        if power < threshold:
            continue
        context = tuple(
            pv.powers[i] for i in range(len(pv)) if pm.owners[i] != player
        )
        single_pv = PowerVector((power, *context))
        single = realized_utility(model, 0, single_pv)
        for parts_count in range(2, min(max_parts, grid) + 1):
            for parts in grid_allocations(power, parts_count, grid):
                split_pv = PowerVector(parts + context)
                split_total = math.fsum(
                    realized_utility(model, j, split_pv)
                    for j in range(parts_count)
                )
                cost = sybil_cost(sybil, model, parts, context)
                if split_total - cost > single + _tolerance(single):
                    witness = SplitWitness(
                        player=player,
                        power=power,
                        parts=parts,
                        single_utility=single,
                        split_total=split_total,
                        cost=cost,
                    )
                    if best is None or witness.gain > best.gain:
                        best = witness
    return NsResult(holds=best is None, witness=best)


def check_linearity(
    model: IncentiveModel,
    trials: int,
    rng: np.random.Generator,
    total_power: float = 10.0,
) -> LinearityResult:
    """Is utility proportional to power within states of a fixed total?

    Samples random states, each rescaled to the given total power, and
    measures the spread of utility-per-power across nodes.  A state
    containing a node that cannot run counts as an unbounded violation.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        raw = rng.random(n) + 0.05
        powers = tuple(float(x) for x in raw * (total_power / raw.sum()))
        pv = PowerVector(powers)
        ratios = []
        for i in range(n):
            u = utility(model, i, pv)
            if u is None:
                return LinearityResult(is_linear=False, max_violation=math.inf)
            ratios.append(u / powers[i])
        scale = max(abs(r) for r in ratios)
        if scale == 0.0:
            continue
        worst = max(worst, (max(ratios) - min(ratios)) / scale)
    return LinearityResult(is_linear=worst <= REL_TOL, max_violation=worst)


def verify_merge_witness(
    model: IncentiveModel, pv: PowerVector, witness: MergeWitness
) -> float:
    """Recompute a merge witness's gain from scratch."""
    separate = math.fsum(
        realized_utility(model, i, pv) for i in witness.merged_nodes
    )
    keep = [
        pv.powers[i] for i in range(len(pv)) if i not in set(witness.merged_nodes)
    ]
    merged_pv = PowerVector(tuple(list(witness.allocation) + keep))
    merged = math.fsum(
        realized_utility(model, j, merged_pv)
        for j in range(len(witness.allocation))
    )
    return merged - separate


def verify_split_witness(
    model: IncentiveModel,
    sybil: SybilCostModel,
    pv: PowerVector,
    pm: PlayerMap,
    witness: SplitWitness,
) -> float:
    """Recompute a split witness's gain from scratch."""
    context = tuple(
        pv.powers[i] for i in range(len(pv)) if pm.owners[i] != witness.player
    )
    single = realized_utility(model, 0, PowerVector((witness.power, *context)))
    split_pv = PowerVector(witness.parts + context)
    split_total = math.fsum(
        realized_utility(model, j, split_pv) for j in range(len(witness.parts))
    )
    cost = sybil_cost(sybil, model, witness.parts, context)
    return split_total - cost - single


def check_all(
    model: IncentiveModel,
    sybil: SybilCostModel,
    pv: PowerVector,
    pm: PlayerMap,
    m: int,
    delta: float = 0.0,
    grid: int = DEFAULT_GRID,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> ConditionReport:
    """Run the three statically decidable condition checks."""
    gr = check_gr(model, pv, m)
    nd = check_nd(model, pv, pm, m, grid=grid, max_nodes=max_nodes)
    ns = check_ns(model, sybil, pv, pm, delta, grid=grid, max_parts=max_nodes)
    notes = []
    if isinstance(model, PoS) and any(p < model.s_b for p in pv.powers):
        notes.append("some stakes are below the participation minimum")
    if isinstance(model, Linear):
        notes.append("linear family: merge and split totals are invariant")
    return ConditionReport(gr=gr, nd=nd, ns=ns, notes=tuple(notes))
