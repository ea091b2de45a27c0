from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binpack_lab.packing import ItemClass
from binpack_lab.weights import (
    BUILTIN_CAPS, bin_weight_cap_check, certifies_below, cluster_weight_dominates_ffd, eval_weight,
    ffd_v_bound_check, grid_bins, make_builtin, monotonicity_violations, partial_sum_below,
    pi_float, pi_sequence, pi_upper, random_bin,
)

W195, WK3, WK4, V = (make_builtin(n) for n in ("w195", "wk3", "wk4", "v"))


def v_oracle(x):
    """v computed by scanning pieces instead of integer division."""
    if x == 0:
        return F(0)
    if x > F(1, 2):
        return F(1)
    j = 1
    while not (F(1, j + 1) < x <= F(1, j)):
        j += 1
    return x + F(1, j * (j + 1))


def test_builtin_constants():
    assert WK3.coefficient == F(21, 13)
    assert (F(1, 3), F(1, 2), F(64, 975)) in WK3.bonuses
    assert (F(1, 2), F(1), F(25124, 77805)) in WK4.bonuses
    assert W195(F(3, 5)) == F(9, 5) * F(3, 5) + F(3, 20)
    assert W195(F(1, 2)) == F(9, 10)
    with pytest.raises(ValueError):
        make_builtin("w2")


def test_eval_examples():
    assert eval_weight(WK3, F(3, 5)) == F(4777, 3900)
    assert eval_weight(V, F(3, 10)) == F(23, 60)
    assert eval_weight(WK3, F(1, 6)) == F(7, 26)
    assert eval_weight(V, 0) == 0
    assert eval_weight(WK3, F(1, 3)) == F(21, 39) + F(18, 325)  # closed right endpoint
    assert eval_weight(WK3, F(1)) == F(7297, 3900)
    with pytest.raises(ValueError):
        eval_weight(WK3, F(11, 10))


@settings(max_examples=300)
@given(st.integers(0, 5040).map(lambda a: F(a, 5040)))
def test_v_matches_oracle(x):
    assert V(x) == v_oracle(x)


def test_cap_examples():
    assert WK3.total([F(51, 100), F(49, 100)]) == F(7553, 3900) == F(581, 300)
    assert bin_weight_cap_check(WK3, F(581, 300), [[F(51, 100), F(49, 100)]]) == []
    assert bin_weight_cap_check(W195, F(39, 20), [[F(1)]]) == []
    assert bin_weight_cap_check(W195, F(39, 20), [[]]) == []
    with pytest.raises(ValueError):
        bin_weight_cap_check(W195, F(39, 20), [[F(3, 5), F(3, 5)]])
    # a cap that is too low is caught
    assert bin_weight_cap_check(WK3, F(19, 10), [[F(51, 100), F(49, 100)]])


def test_grid_small_exhaustive():
    bins = list(grid_bins(q=60))
    assert () in bins
    assert all(sum(b) <= 1 for b in bins)
    for name in ("w195", "wk3", "wk4"):
        assert bin_weight_cap_check(make_builtin(name), BUILTIN_CAPS[name], bins) == []
    assert bin_weight_cap_check(V, pi_upper(), bins) == []


def test_random_bins_feasible_and_seeded():
    a = [random_bin(np.random.default_rng([5, t])) for t in range(50)]
    b = [random_bin(np.random.default_rng([5, t])) for t in range(50)]
    assert a == b and all(sum(x) <= 1 for x in a)


def test_monotone():
    for f in (W195, WK3, WK4, V):
        assert monotonicity_violations(f) == []


def test_cluster_check_examples():
    r = cluster_weight_dominates_ffd(WK3, [F(51, 100), F(51, 100), F(49, 100)], 3)
    assert r.status == "precondition-failed" and r.opt == 2
    eps, eps2 = F(1, 1000), F(1, 3000)
    five = [ItemClass(F(1, 3) + eps, 3), ItemClass(F(1, 3) - eps2, 2)]
    assert F(1, 3) + eps + 2 * (F(1, 3) - eps2) > 1
    r = cluster_weight_dominates_ffd(WK3, five, 3)
    assert (r.opt, r.ffd_bins, r.status) == (3, 3, "holds") and r.weight >= 3
    r = cluster_weight_dominates_ffd(WK3, [F(1)] * 3, 3)
    assert r.status == "holds" and r.weight == 3 * (F(21, 13) + F(997, 3900))


def test_ffd_v_examples():
    assert ffd_v_bound_check([F(0), F(0)])
    assert ffd_v_bound_check([])
    assert ffd_v_bound_check([F(3, 5), F(3, 5)])


# ---- pi machinery

def c_oracle(n):
    c = [1]
    for _ in range(n - 1):
        c.append(c[-1] ** 2 + c[-1])
    return c


def test_pi_sequence_values():
    s = pi_sequence(5)
    assert list(s.terms) == [1, 2, 6, 42, 1806]
    assert s.partial_sum == F(509, 301) == sum(F(1, c) for c in c_oracle(5))
    assert abs(float(s.partial_sum) - 1.6910299) < 1e-7
    assert pi_sequence(1).partial_sum == 1
    assert pi_sequence(6).terms[-1] == 3263442


def test_pi_bounds_bracket_later_sums():
    for n in range(1, 9):
        s, later = pi_sequence(n), pi_sequence(n + 3)
        assert s.partial_sum < later.partial_sum < s.upper


def test_pi_certifies_published_bound():
    bound = F(1691030207, 10**9)
    for n in range(6, 31):
        seq = pi_sequence(n)
        assert partial_sum_below(seq, bound) and certifies_below(seq, bound)
    assert not certifies_below(pi_sequence(5), bound)
    assert pi_upper(30) < bound


def test_lazy_full_comparison_agrees():
    bound = F(1691030207, 10**9)
    seq = pi_sequence(16)
    assert partial_sum_below(seq, bound, shortcut=False)
    assert certifies_below(seq, bound, shortcut=False)
    assert not partial_sum_below(seq, F(16910302, 10**7), shortcut=False)
    assert seq.terms[:6] == tuple(c_oracle(6))


@pytest.mark.slow
def test_pi30_full_big_integer_path():
    bound = F(1691030207, 10**9)
    seq = pi_sequence(30)
    assert partial_sum_below(seq, bound, shortcut=False)
    assert certifies_below(seq, bound, shortcut=False)


def test_pi_float():
    assert abs(pi_float(30) - 1.6910302067) < 1e-9
