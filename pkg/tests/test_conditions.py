import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decentsim.conditions import (
    check_all,
    check_gr,
    check_linearity,
    check_nd,
    check_ns,
    grid_allocations,
    verify_merge_witness,
    verify_split_witness,
)
from decentsim.core import PlayerMap, PowerVector
from decentsim.errors import SearchBoundError
from decentsim.incentives import (
    GammaReward,
    Linear,
    PoS,
    PoW,
    ThresholdCoverSybilCost,
    ZeroSybilCost,
)


def players(n):
    return PlayerMap(tuple(f"p{i}" for i in range(n)))


class TestRewardCoverage:
    def test_small_node_priced_out(self):
        res = check_gr(PoW(12.5, 0, 4), PowerVector((1, 9)), m=2)
        assert not res.holds
        assert res.profitable_nodes == 1

    def test_one_profitable_node_suffices_for_m1(self):
        assert check_gr(PoW(12.5, 0, 4), PowerVector((1, 9)), m=1).holds

    def test_gamma_always_pays_everyone(self):
        pv = PowerVector((0.1, 5, 40))
        for m in (1, 2, 3):
            assert check_gr(GammaReward(3, 0.5), pv, m).holds

    def test_cannot_run_counts_as_not_earning(self):
        res = check_gr(PoS(10, 0, s_b=2.0), PowerVector((1, 5)), m=2)
        assert not res.holds
        assert res.profitable_nodes == 1


class TestGridAllocations:
    def test_counts(self):
        assert len(list(grid_allocations(1.0, 2, 20))) == 19
        assert len(list(grid_allocations(1.0, 1, 20))) == 1

    def test_each_allocation_positive_and_complete(self):
        for alloc in grid_allocations(4.0, 3, 10):
            assert all(a > 0 for a in alloc)
            assert math.fsum(alloc) == pytest.approx(4.0)


class TestMergeCondition:
    def test_fixed_cost_merge_violates(self):
        model = PoW(12.5, 0, 1)
        pv, pm = PowerVector((1, 1)), players(2)
        res = check_nd(model, pv, pm, m=2)
        assert not res.holds
        w = res.witness
        assert w.separate_total == pytest.approx(10.5)
        assert w.merged_total == pytest.approx(11.5)
        assert verify_merge_witness(model, pv, w) == pytest.approx(w.gain, rel=1e-9)

    def test_merge_allowed_when_players_stay_above_m(self):
        # the same merge is irrelevant for m=1: one player still runs a node
        res = check_nd(PoW(12.5, 0, 1), PowerVector((1, 1)), players(2), m=1)
        assert res.holds

    def test_linear_is_merge_invariant(self):
        res = check_nd(Linear("inverse-total", 3.0), PowerVector((2, 1, 4)), players(3), m=3)
        assert res.holds

    def test_concave_lottery_resists_merging(self):
        # merging (4, 1) into a 5 drops utility 1.8 -> 1.5836 against a 4
        model = GammaReward(3, 0.5)
        merged = PowerVector((5, 4))
        apart = PowerVector((4, 1, 4))
        merged_u = 3 * math.sqrt(5) / (math.sqrt(5) + 2)
        assert merged_u == pytest.approx(1.58359, abs=1e-5)
        from decentsim.incentives import utility

        assert utility(model, 0, merged) == pytest.approx(merged_u)
        assert utility(model, 0, apart) + utility(model, 1, apart) == pytest.approx(1.8)
        assert check_nd(model, apart, players(3), m=3).holds

    def test_pos_delegation_pays(self):
        # two stakes below the minimum merge into one runnable node
        model = PoS(10, 1, s_b=2.0)
        res = check_nd(model, PowerVector((1, 1)), players(2), m=2)
        assert not res.holds
        assert res.witness.merged_total == pytest.approx(9.0)

    def test_search_bound_is_explicit(self):
        with pytest.raises(SearchBoundError):
            check_nd(PoW(1), PowerVector((1,) * 7), players(7), m=2)


class TestSplitCondition:
    def test_square_root_lottery_rewards_sybils(self):
        model = GammaReward(3, 0.5)
        pv = PowerVector((4, 1))
        pm = PlayerMap(("A", "B"))
        res = check_ns(model, ZeroSybilCost(), pv, pm, delta=0)
        assert not res.holds
        w = res.witness
        assert w.gain > 0.4  # best split beats the four-way one
        assert verify_split_witness(model, ZeroSybilCost(), pv, pm, w) == pytest.approx(
            w.gain, rel=1e-9
        )

    def test_four_way_split_of_the_rich_player(self):
        # auditing only the top player with at most four parts pins the
        # witness to the equal four-way split and its 0.4 gain
        model = GammaReward(3, 0.5)
        pv = PowerVector((4, 1))
        pm = PlayerMap(("A", "B"))
        res = check_ns(model, ZeroSybilCost(), pv, pm, delta=100, max_parts=4)
        assert not res.holds
        w = res.witness
        assert w.player == "A"
        assert w.parts == (1.0, 1.0, 1.0, 1.0)
        assert w.gain == pytest.approx(0.4, abs=1e-9)
        assert verify_split_witness(model, ZeroSybilCost(), pv, pm, w) == pytest.approx(
            w.gain, rel=1e-9
        )

    def test_threshold_cover_neutralizes_the_gain(self):
        res = check_ns(
            GammaReward(3, 0.5),
            ThresholdCoverSybilCost(0.0),
            PowerVector((4, 1)),
            PlayerMap(("A", "B")),
            delta=0,
        )
        assert res.holds

    def test_linear_is_split_invariant(self):
        res = check_ns(
            Linear("inverse-total", 3.0),
            ZeroSybilCost(),
            PowerVector((4, 1)),
            PlayerMap(("A", "B")),
            delta=0,
        )
        assert res.holds

    def test_delta_limits_the_audited_players(self):
        # with delta=50 only players at or above the median are audited;
        # the poor player's split opportunity is out of scope
        model = GammaReward(3, 0.5)
        pv = PowerVector((9, 1))
        pm = PlayerMap(("A", "B"))
        full = check_ns(model, ZeroSybilCost(), pv, pm, delta=0)
        assert not full.holds
        assert {full.witness.player} <= {"A", "B"}


class TestLinearityProbe:
    def test_linear_families(self):
        rng = np.random.default_rng(3)
        assert check_linearity(Linear("inverse-total", 2.0), 64, rng).is_linear
        rng = np.random.default_rng(3)
        assert check_linearity(Linear("constant", 2.0), 64, rng).is_linear
        rng = np.random.default_rng(3)
        res = check_linearity(PoW(5, 0, 0), 64, rng)
        assert res.is_linear
        assert res.max_violation <= 1e-9

    def test_square_root_is_not_linear(self):
        res = check_linearity(GammaReward(3, 0.5), 64, np.random.default_rng(3))
        assert not res.is_linear
        assert res.max_violation > 1e-3

    def test_fixed_cost_breaks_linearity(self):
        res = check_linearity(PoW(5, 0, 1.0), 64, np.random.default_rng(3))
        assert not res.is_linear

    def test_cannot_run_is_a_violation(self):
        res = check_linearity(PoS(5, 0, s_b=100.0), 8, np.random.default_rng(3))
        assert not res.is_linear
        assert res.max_violation == math.inf


class TestNeutralityLinearityMatch:
    """With zero multi-node cost, merge and split neutrality together must
    coincide with utility being linear in power at fixed total."""

    @pytest.mark.parametrize(
        "model",
        [Linear("inverse-total", 3.0), Linear("constant", 0.5), PoW(5, 0, 0)],
    )
    def test_neutral_models_probe_linear(self, model):
        pv, pm = PowerVector((2, 1, 1)), players(3)
        nd = check_nd(model, pv, pm, m=3)
        ns = check_ns(model, ZeroSybilCost(), pv, pm, delta=0)
        lin = check_linearity(model, 64, np.random.default_rng(5))
        assert nd.holds and ns.holds and lin.is_linear

    @pytest.mark.parametrize("model", [GammaReward(3, 0.5), PoW(12.5, 0, 1)])
    def test_non_neutral_models_probe_nonlinear(self, model):
        pv, pm = PowerVector((2, 1, 1)), players(3)
        nd = check_nd(model, pv, pm, m=3)
        ns = check_ns(model, ZeroSybilCost(), pv, pm, delta=0)
        lin = check_linearity(model, 64, np.random.default_rng(5))
        assert not (nd.holds and ns.holds)
        assert not lin.is_linear


class TestReorderingInvariance:
    POWERS = (4.0, 1.0, 2.0, 0.5)
    OWNERS = ("A", "B", "C", "D")
    MODEL = GammaReward(3, 0.5)
    GRID = 8

    @classmethod
    def _verdicts(cls, powers, owners):
        nd = check_nd(cls.MODEL, PowerVector(powers), PlayerMap(owners), m=4, grid=cls.GRID)
        ns = check_ns(
            cls.MODEL, ZeroSybilCost(), PowerVector(powers), PlayerMap(owners),
            delta=0, grid=cls.GRID,
        )
        return nd.holds, ns.holds

    @settings(max_examples=10, deadline=None)
    @given(st.permutations(range(4)))
    def test_verdicts_do_not_depend_on_node_order(self, perm):
        base = self._verdicts(self.POWERS, self.OWNERS)
        permuted = self._verdicts(
            tuple(self.POWERS[i] for i in perm), tuple(self.OWNERS[i] for i in perm)
        )
        assert base == permuted


class TestFullReport:
    def test_report_shape(self):
        rep = check_all(
            PoW(12.5, 0, 1),
            ZeroSybilCost(),
            PowerVector((1, 1)),
            players(2),
            m=2,
        )
        assert rep.gr.holds
        assert not rep.nd.holds
        assert rep.ed == "deferred"
