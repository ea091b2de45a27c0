import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binpack_lab.delays import (
    DelayFunction, OracleLimitError, SimulationError, TimedItem, check_bound, compute_rho,
    default_rho, offline_optimal, simulate,
)
from binpack_lab.packing import Item
from binpack_lab.suites import random_timed_instance
from conftest import brute_offline

LIN = DelayFunction.linear(1)
RHO = F(default_rho())


def ti(size, index, arrive, delay=LIN):
    return TimedItem(Item(F(size), index), F(arrive), delay)


def test_compute_rho():
    rho, ratio = compute_rho(6)
    assert abs(rho - 0.4640251938) < 1e-9
    assert abs(ratio - 3.1550554008) < 1e-9
    rho1, _ = compute_rho(1)
    assert abs(rho1 - (math.sqrt(5) - 1) / 2) < 1e-15
    rho30, ratio30 = compute_rho(30)
    assert abs(1 + 1 / rho30 - ratio30) < 1e-12
    with pytest.raises(ValueError):
        compute_rho(0)


def test_delay_functions():
    assert LIN(F(3, 2)) == F(3, 2) and LIN(F(-1)) == 0
    p = DelayFunction.power(2, F(1, 2))
    assert p(4.0) == pytest.approx(4.0)
    t = DelayFunction.from_table([(1, F(1, 10)), (2, F(3, 10))])
    assert t(F(1, 2)) == F(1, 20) and t(F(3, 2)) == F(1, 5) and t(F(9)) == F(3, 10)
    assert t.bounded and not LIN.bounded
    with pytest.raises(ValueError):
        DelayFunction.linear(0)
    with pytest.raises(ValueError):
        DelayFunction.from_table([(2, 1), (1, 2)])


def test_single_item():
    tr = simulate([ti("1/2", 0, 0)], RHO)
    assert tr.exact and tr.phase_count == 1
    assert tr.phases[0].trigger_time == RHO
    assert tr.total_cost == RHO + 1


def test_two_items_together():
    tr = simulate([ti("3/10", 0, 0), ti("3/10", 1, 0)], RHO)
    assert tr.phases[0].trigger_time == RHO / 2
    assert tr.phases[0].bin_count == 1 and tr.total_cost == RHO + 1


def test_arrival_at_trigger_starts_next_phase():
    rho = F(1, 2)
    tr = simulate([ti("1/5", 0, 0), ti("1/5", 1, F(1, 2))], rho)
    assert [p.items for p in tr.phases] == [(0,), (1,)]
    tr = simulate([ti("1/5", 0, 0), ti("1/5", 1, F(1, 3))], rho)
    # pending delay t + (t - 1/3) reaches 1/2 at t = 5/12
    assert [p.items for p in tr.phases] == [(0, 1)]
    assert tr.phases[0].trigger_time == F(5, 12)


def test_tcp_ack_shape():
    tr = simulate([ti(0, i, F(i, 4)) for i in range(10)], RHO)
    assert all(p.bin_count == 1 for p in tr.phases)
    assert tr.total_cost == tr.phase_count * (RHO + 1)


def test_power_delay_crossing_tolerance():
    d = DelayFunction.power(1, F(1, 2))
    tr = simulate([ti("1/3", 0, 0, d), ti("1/3", 1, F(1, 10), d)], 0.46)
    assert not tr.exact
    for ph in tr.phases:
        assert abs(ph.accumulated_delay - 0.46) <= 1e-12 * 0.46


def test_bounded_delays_need_horizon():
    d = DelayFunction.from_table([(1, F(1, 10))])
    with pytest.raises(SimulationError, match="horizon"):
        simulate([ti("1/3", 0, 0, d)], 0.46)
    tr = simulate([ti("1/3", 0, 0, d)], 0.46, horizon=5)
    assert tr.phases[-1].flushed and tr.total_cost == pytest.approx(1.1)


def test_table_delay_that_reaches_rho():
    d = DelayFunction.from_table([(1, F(1))])
    tr = simulate([ti("1/3", 0, 0, d)], 0.5)
    assert tr.phases[0].trigger_time == pytest.approx(0.5)


def test_out_of_order_arrivals_rejected():
    with pytest.raises(SimulationError):
        simulate([ti("1/3", 0, 1), ti("1/3", 1, 0)], RHO)


def test_offline_examples():
    two = [ti("2/5", 0, 0), ti("2/5", 1, 1)]
    off = offline_optimal(two)
    assert off.cost == 2 and off.bin_count == 1 and off.partition == ((0, 1),)
    one = offline_optimal([ti("1/2", 0, 0)])
    assert (one.bin_count, one.total_delay, one.cost) == (1, 0, 1)
    split = offline_optimal([ti("3/5", 0, 0), ti("3/5", 1, 0)])
    assert split.cost == 2 and split.bin_count == 2
    with pytest.raises(OracleLimitError):
        offline_optimal([ti("1/20", i, 0) for i in range(13)])


def test_offline_matches_brute_force_and_dp():
    for trial in range(60):
        items = random_timed_instance(np.random.default_rng([11, trial]), 6)
        sizes = [x.size for x in items]
        arr = [x.arrival for x in items]
        rates = [x.delay.rate for x in items]
        cost, bins, canon = brute_offline(arr, rates, sizes)
        for method in ("enumerate", "dp"):
            off = offline_optimal(items, method=method)
            assert (off.cost, off.bin_count) == (cost, bins)
            assert off.partition == canon


def test_offline_invariant_under_equal_arrival_permutation():
    a = [ti("1/2", 0, 0), TimedItem(Item(F(1, 3), 1), F(0), DelayFunction.linear(3)), ti("1/4", 2, 1)]
    b = [TimedItem(Item(F(1, 3), 0), F(0), DelayFunction.linear(3)), ti("1/2", 1, 0), ti("1/4", 2, 1)]
    assert offline_optimal(a).cost == offline_optimal(b).cost


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_bound_on_random_instances(seed):
    items = random_timed_instance(np.random.default_rng(seed), 6)
    tr = simulate(items, RHO)
    off = offline_optimal(items)
    chk = check_bound(tr, off)
    assert chk.ok and chk.alg >= chk.opt
    assert all(p.accumulated_delay == RHO for p in tr.phases)
    covered = sorted(i for p in tr.phases for i in p.items)
    assert covered == list(range(len(items)))
    assert [p.items for p in tr.phases] == sorted(p.items for p in tr.phases)


def test_check_bound_float_path():
    d = DelayFunction.power(1, 2)
    items = [ti("1/2", 0, 0, d), ti("1/2", 1, F(1, 5), d), ti("1/4", 2, 1, d)]
    chk = check_bound(simulate(items), offline_optimal(items))
    assert chk.ok and isinstance(chk.alg, float)
