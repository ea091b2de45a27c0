from fractions import Fraction as F

from binpack_lab.packing import Item, ffd
from binpack_lab.suites import (
    cluster_suite, delay_suite, equality_bin, ffd_structure_problems, ffd_suite, opening_rule_problems,
    tcp_ack_problems, weight_cap_suite,
)


def test_workers_do_not_change_results():
    a = cluster_suite(3, 40, seed=5, workers=1)
    b = cluster_suite(3, 40, seed=5, workers=2)
    assert (a.trials, a.violations, a.stats) == (b.trials, b.violations, b.stats)


def test_small_batteries_pass():
    assert weight_cap_suite(trials=300, seed=1, exhaustive_grid=False).passed
    assert ffd_suite(200, 1).passed
    assert delay_suite(100, 1).passed
    assert cluster_suite(4, 50, 1).passed


def test_equality_bin_reaches_cap():
    res = weight_cap_suite(("wk3",), trials=1, seed=0, exhaustive_grid=False)
    assert res.stats["equality-weight"] == F(581, 300)
    x, y = equality_bin()
    assert x + y == 1 and x > F(1, 2) and F(1, 3) < y <= F(1, 2)


def test_structure_checker_catches_a_bad_packing():
    sizes = [F(1, 2), F(1, 2), F(1, 3)]
    assert ffd_structure_problems(sizes) == []
    # hand-made bins breaking the opening rule: bin 1 opens with 2/5 while bin 0 has only one item in (1/3, 1/2]
    bins = ((Item(F(2, 5), 0),), (Item(F(2, 5), 1),))
    assert opening_rule_problems(bins)
    assert opening_rule_problems(ffd([Item(s, i) for i, s in enumerate(sizes)]).packing.bins) == []


def test_tcp_ack_helper():
    assert tcp_ack_problems([0, 0, F(1, 2), 3]) == []
