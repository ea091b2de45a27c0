from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from binpack_lab.packing import (
    InstanceError, Item, ItemClass, Packing, SolverLimitError, exact_optimal, ffd, first_fit,
    size_lower_bound, validate_instance, verify_packing,
)
from conftest import brute_bin_count


def items(*sizes):
    return [Item(F(s), i) for i, s in enumerate(sizes)]


def sizes_of(packing):
    return [[it.size for it in b] for b in packing.bins]


# ---- validation

def test_validate_accepts_and_reports():
    rep = validate_instance(["3/5", "2/5"])
    assert rep.ok and len(rep.items) == 2
    rep = validate_instance(["7/5"])
    assert not rep.ok and "size exceeds 1" in rep.errors[0]
    assert validate_instance([F(0)]).ok
    rep = validate_instance(["2/4"])
    assert rep.ok and rep.warnings and rep.items[0].size == F(1, 2)
    with pytest.raises(InstanceError):
        validate_instance(["1/0"])


def test_duplicate_indices_and_bad_counts():
    rep = validate_instance([Item(F(1, 2), 0), Item(F(1, 3), 0)])
    assert not rep.ok and "duplicate" in rep.errors[0]
    assert not validate_instance([F(-1, 2)]).ok


# ---- first fit

def test_first_fit_examples():
    assert sizes_of(first_fit(items("1/2", "1/2", "1/2"))) == [[F(1, 2)] * 2, [F(1, 2)]]
    assert sizes_of(first_fit(items("3/5", "1/2", "2/5"))) == [[F(3, 5), F(2, 5)], [F(1, 2)]]
    assert len(first_fit([]).bins) == 0


# ---- FFD

def test_ffd_examples():
    tr = ffd(items("3/5", "1/2", "2/5", "3/10"))
    assert sizes_of(tr.packing) == [[F(3, 5), F(2, 5)], [F(1, 2), F(3, 10)]]
    assert (tr.bin_count, tr.tau, tr.theta) == (2, 1, F(1, 2))
    tr = ffd(items(0, 0))
    assert tr.bin_count == 1
    tr = ffd(items("2/3", "2/3", "2/3"))
    assert (tr.bin_count, tr.tau, tr.theta) == (3, 2, F(2, 3))


def test_ffd_tau_zero_when_only_last_bin_is_large():
    tr = ffd(items("3/5"))
    assert tr.tau == 0 and tr.theta == F(3, 5)
    tr = ffd(items("1/3", "1/3", "1/3", "1/3"))
    assert tr.bin_count == 2 and tr.tau == 0


def test_ffd_tie_break_and_zeros_last():
    tr = ffd([Item(F(1, 2), 5), Item(F(1, 2), 2), Item(F(0), 0)])
    assert [it.index for it in tr.packing.bins[0]] == [2, 5, 0]


def test_ffd_deterministic():
    xs = items("1/3", "1/2", "1/4", "1/3", "2/3")
    assert ffd(xs) == ffd(list(reversed(xs)))


# ---- exact solver

def test_exact_examples():
    assert exact_optimal(items("51/100", "51/100", "49/100")).bin_count == 2
    assert exact_optimal(items("1/3", "1/3", "1/3")).bin_count == 1
    tiny = F(1, 1807) + F(1, 10**9)
    res = exact_optimal([ItemClass(tiny, 3613)])
    assert res.bin_count == 3 and res.method == "pattern"


def test_exact_all_zero_and_empty():
    assert exact_optimal(items(0, 0, 0)).bin_count == 1
    assert exact_optimal([]).bin_count == 0


def test_exact_limit():
    xs = items(*[F(1, 3) + F(i, 1000) for i in range(30)])
    with pytest.raises(SolverLimitError, match="too large for exact solve"):
        exact_optimal(xs, item_limit=24)


def test_exact_pattern_large_counts():
    # 1806 copies fit in a bin exactly when the perturbation is tiny
    s = F(1, 1807) + F(1, 10**7)
    assert exact_optimal([ItemClass(s, 1806)]).bin_count == 1
    assert exact_optimal([ItemClass(s, 1807)]).bin_count == 2


def test_exact_matches_brute_force_on_fixed_cases():
    cases = [
        ["1/2", "1/2", "1/3", "1/3", "1/3", "2/3"],
        ["2/5", "2/5", "2/5", "3/10", "3/10", "3/10", "1/5"],
        ["7/10", "3/10", "3/5", "2/5", "1/2", "1/2", "1/10"],
        ["1/4", "1/4", "1/4", "1/4", "3/4", "3/4", "1/5", "4/5"],
    ]
    for c in cases:
        res = exact_optimal(items(*c))
        assert res.bin_count == brute_bin_count(c)
        assert verify_packing(items(*c), res.packing) == (True, None)


sizes_st = st.lists(st.integers(0, 24).map(lambda a: F(a, 24)), min_size=0, max_size=8)


@settings(max_examples=150, deadline=None)
@given(sizes_st)
def test_exact_against_oracle(sizes):
    xs = items(*sizes)
    res = exact_optimal(xs)
    positive = [s for s in sizes if s > 0]
    expected = brute_bin_count(positive) if positive else (1 if sizes else 0)
    assert res.bin_count == expected
    assert verify_packing(xs, res.packing)[0]
    assert size_lower_bound(xs) <= res.bin_count <= ffd(xs).bin_count


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 60).map(lambda a: F(a, 60)), min_size=1, max_size=30))
def test_ff_ffd_properties(sizes):
    xs = items(*sizes)
    for packing in (first_fit(xs), ffd(xs).packing):
        assert verify_packing(xs, packing)[0]
        loads = packing.loads
        for i in range(len(loads)):
            for j in range(i + 1, len(loads)):
                assert loads[i] + loads[j] > 1
    tr = ffd(xs)
    large = [any(it.size > F(1, 2) for it in b) for b in tr.packing.bins]
    assert large == sorted(large, reverse=True)
    assert tr.tau <= tr.bin_count - 1


# ---- verification

def test_verify_packing_messages():
    a, b = Item(F(1, 2), 0), Item(F(1, 2), 1)
    assert verify_packing([a, b], Packing(((a, b),))) == (True, None)
    c, d = Item(F(3, 5), 0), Item(F(3, 5), 1)
    assert verify_packing([c, d], Packing(((c, d),))) == (False, "bin 0 overfull by 1/5")
    assert verify_packing([a, b], Packing(((a,),))) == (False, "coverage mismatch")
    assert verify_packing([a], Packing(((a,), ()))) == (False, "bin 1 is empty")
