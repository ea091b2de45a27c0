"""Independent brute-force oracles shared by the tests.

These deliberately avoid the package's own solvers so that they can serve as
reference values.
"""
from __future__ import annotations

from fractions import Fraction

import pytest


def set_partitions(seq):
    """Every set partition of ``seq`` (as lists of lists)."""
    if not seq:
        yield []
        return
    first, rest = seq[0], seq[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_bin_count(sizes) -> int:
    """Minimum number of bins by trying every partition."""
    sizes = [Fraction(s) for s in sizes]
    if not sizes:
        return 0
    best = len(sizes)
    for part in set_partitions(list(range(len(sizes)))):
        if len(part) < best and all(sum(sizes[i] for i in b) <= 1 for b in part):
            best = len(part)
    return best


def brute_offline(arrivals, rates, sizes):
    """(cost, bins, partition) of the best offline solution for linear delays."""
    n = len(sizes)
    best = None
    for part in set_partitions(list(range(n))):
        if any(sum(Fraction(sizes[i]) for i in b) > 1 for b in part):
            continue
        delay = Fraction(0)
        for b in part:
            close = max(arrivals[i] for i in b)
            delay += sum(rates[i] * (close - arrivals[i]) for i in b)
        canon = tuple(sorted(tuple(sorted(b)) for b in part))
        key = (len(part) + delay, len(part), canon)
        if best is None or key < best:
            best = key
    return best


@pytest.fixture
def oracle_bins():
    return brute_bin_count
