"""Seeded randomized batteries shared by the CLI, the demos and the tests.

Every trial draws from ``numpy.random.default_rng([seed, trial])`` so results
do not depend on the number of workers or on trial order.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .delays import DelayFunction, TimedItem, check_bound, default_rho, offline_optimal, simulate
from .packing import HALF, Item, exact_optimal, ffd, verify_packing
from .weights import (
    BUILTIN_CAPS, bin_weight_cap_check, grid_bins, make_builtin, pi_upper, random_bins,
)

F = Fraction
MAX_REPORTED = 20


@dataclass
class SuiteResult:
    name: str
    seed: int | None
    trials: int
    violations: list[str] = field(default_factory=list)
    stats: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def absorb(self, other: "SuiteResult") -> None:
        self.trials += other.trials
        room = MAX_REPORTED - len(self.violations)
        self.violations += other.violations[:max(room, 0)]
        for key, val in other.stats.items():
            self.stats[key] = self.stats.get(key, 0) + val


def _chunks(trials: int, workers: int):
    step = max(1, -(-trials // max(workers, 1)))
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def _fan_out(fn: Callable, name: str, seed: int, trials: int, workers: int, *args) -> SuiteResult:
    total = SuiteResult(name, seed, 0)
    if workers <= 1:
        total.absorb(fn(seed, 0, trials, *args))
        return total
    with ProcessPoolExecutor(workers) as pool:
        futs = [pool.submit(fn, seed, lo, hi, *args) for lo, hi in _chunks(trials, workers)]
        for f in futs:
            total.absorb(f.result())
    return total


# ---------------------------------------------------------------- weight caps

WEIGHT_NAMES = ("w195", "wk3", "wk4", "v")


def cap_for(name: str) -> Fraction:
    return pi_upper() if name == "v" else BUILTIN_CAPS[name]


def equality_bin() -> tuple[Fraction, Fraction]:
    """A large item and a (1/3, 1/2] item filling the bin; wk3 reaches its cap exactly."""
    return F(3, 5), F(2, 5)


def weight_cap_suite(names=WEIGHT_NAMES, trials: int = 100_000, seed: int = 0,
                     exhaustive_grid: bool = True, grid_q: int = 420) -> SuiteResult:
    res = SuiteResult("weight-caps", seed, 0)
    fns = {n: make_builtin(n) for n in names}
    sources = []
    if exhaustive_grid:
        sources.append(("grid", list(grid_bins(grid_q))))
    if trials:
        sources.append(("random", list(random_bins(seed, trials))))
    sources.append(("equality", [equality_bin()]))
    for label, bins in sources:
        res.trials += len(bins)
        res.stats[f"{label}-bins"] = len(bins)
        for n, f in fns.items():
            bad = bin_weight_cap_check(f, cap_for(n), bins)
            for sizes, w in bad[:MAX_REPORTED]:
                res.violations.append(f"{n} {label} bin {[str(s) for s in sizes]} weighs {w}")
    if "wk3" in fns:
        w = fns["wk3"].total(equality_bin())
        res.stats["equality-weight"] = w
        if w != BUILTIN_CAPS["wk3"]:
            res.violations.append(f"equality bin weighs {w}, expected {BUILTIN_CAPS['wk3']}")
    return res


# ---------------------------------------------------------------- W >= A on clusters

_NEAR = (2, 3, 4, 5, 6, 7, 8, 43)


def random_cluster(rng: np.random.Generator, max_items: int = 12) -> list[Fraction]:
    """Sizes biased to sit just above or below ``1/t`` for small ``t``."""
    q = int(rng.choice((840, 2520, 27720, 360360)))
    n = int(rng.integers(3, max_items + 1))
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.7:
            t = _NEAR[int(rng.integers(len(_NEAR)))]
            off = int(rng.integers(-2, 6))
            a = q // t + off
        elif r < 0.85:
            a = int(rng.integers(q // 2 + 1, q + 1))
        else:
            a = int(rng.integers(1, q + 1))
        out.append(F(min(max(a, 1), q), q))
    return out


def _cluster_chunk(seed: int, lo: int, hi: int, k: int, fname: str, max_items: int) -> SuiteResult:
    f = make_builtin(fname)
    res = SuiteResult("cluster-w-ge-a", seed, 0, stats={"rejected": 0, "ffd-above-opt": 0})
    for trial in range(lo, hi):
        rng = np.random.default_rng([seed, trial])
        while True:
            sizes = random_cluster(rng, max_items)
            items = [Item(s, i) for i, s in enumerate(sizes)]
            opt = exact_optimal(items).bin_count
            if opt >= k:
                break
            res.stats["rejected"] += 1
        a = ffd(items).bin_count
        w = f.total(sizes)
        res.trials += 1
        if a > opt:
            res.stats["ffd-above-opt"] += 1
        if w < a and len(res.violations) < MAX_REPORTED:
            res.violations.append(f"trial {trial}: W={w} < A={a} for {[str(s) for s in sizes]}")
    return res


def cluster_suite(k: int = 3, trials: int = 10_000, seed: int = 0, workers: int = 1,
                  max_items: int = 12) -> SuiteResult:
    fname = {3: "wk3", 4: "wk4"}[k]
    res = _fan_out(_cluster_chunk, f"cluster-w-ge-a-k{k}", seed, trials, workers, k, fname, max_items)
    return res


# ---------------------------------------------------------------- FFD and v

def random_multiset(rng: np.random.Generator, max_items: int = 40) -> list[Fraction]:
    n = int(rng.integers(1, max_items + 1))
    q = int(rng.choice((12, 60, 840, 2520, 1807 * 6)))
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.5:
            t = int(rng.integers(2, 9))
            a = q // t + int(rng.integers(-1, 3))
        elif r < 0.55:
            a = 0
        else:
            a = int(rng.integers(1, q + 1))
        out.append(F(min(max(a, 0), q), q))
    return out


def ffd_structure_problems(sizes) -> list[str]:
    """FFD invariants checked against the trace; an empty list means all hold."""
    items = [Item(F(s), i) for i, s in enumerate(sizes)]
    tr = ffd(items)
    bins = tr.packing.bins
    loads = tr.packing.loads
    problems = []
    ok, msg = verify_packing(items, tr.packing)
    if not ok:
        problems.append(msg)
    if not items:
        return problems + (["empty instance must use 0 bins"] if tr.bin_count else [])
    if all(s == 0 for s in sizes):
        return problems + ([] if tr.bin_count == 1 else ["all-zero instance must use 1 bin"])
    for i in range(len(loads)):
        for j in range(i + 1, len(loads)):
            if loads[i] + loads[j] <= 1:
                problems.append(f"bins {i},{j} have loads summing to {loads[i] + loads[j]}")
    has_large = [any(it.size > HALF for it in b) for b in bins]
    if has_large != sorted(has_large, reverse=True):
        problems.append("bins with a large item are not a prefix")
    # replay: an item opens a bin only if it fits in no open bin
    order = sorted(items, key=lambda it: (-it.size, it.index))
    replay: list[Fraction] = []
    where = {it.index: b for b, bin_ in enumerate(bins) for it in bin_}
    for it in order:
        target = next((b for b, ld in enumerate(replay) if ld + it.size <= 1), len(replay))
        if target == len(replay):
            replay.append(F(0))
        replay[target] += it.size
        if where[it.index] != target:
            problems.append(f"item {it.index} should be in bin {target}, found in {where[it.index]}")
            break
    problems += opening_rule_problems(bins)
    tau = 0
    for b in bins[:-1]:
        if not any(it.size > HALF for it in b):
            break
        tau += 1
    if tr.tau != tau:
        problems.append(f"tau={tr.tau}, expected {tau}")
    if tr.theta != bins[-1][0].size:
        problems.append("theta is not the first item of the last bin")
    return problems


def opening_rule_problems(bins) -> list[str]:
    """If bin ``b`` opens with an item above ``1/s``, every earlier bin without an item
    above ``1/(s-1)`` holds at least ``s - 1`` items in ``(1/s, 1/(s-1)]``."""
    problems = []
    for b in range(1, len(bins)):
        x = bins[b][0].size
        if x == 0:
            continue
        for s in range(2, min(int(1 / x) + 1, 60) + 1):
            lo, hi = F(1, s), F(1, s - 1)
            if x <= lo:
                continue
            for e in range(b):
                if any(it.size > hi for it in bins[e]):
                    continue
                n = sum(1 for it in bins[e] if lo < it.size <= hi)
                if n < s - 1:
                    problems.append(f"bin {b} opens above 1/{s} but bin {e} has {n} items in (1/{s},1/{s - 1}]")
    return problems


def _ffd_chunk(seed: int, lo: int, hi: int, max_items: int) -> SuiteResult:
    v = make_builtin("v")
    res = SuiteResult("ffd-v", seed, 0)
    for trial in range(lo, hi):
        sizes = random_multiset(np.random.default_rng([seed, trial]), max_items)
        res.trials += 1
        a = ffd([Item(s, i) for i, s in enumerate(sizes)]).bin_count
        vv = v.total(sizes)
        if a > vv + 1 and len(res.violations) < MAX_REPORTED:
            res.violations.append(f"trial {trial}: FFD={a} > V+1={vv + 1}")
        for p in ffd_structure_problems(sizes)[:1]:
            if len(res.violations) < MAX_REPORTED:
                res.violations.append(f"trial {trial}: {p}")
    return res


def ffd_suite(trials: int = 10_000, seed: int = 0, workers: int = 1, max_items: int = 40) -> SuiteResult:
    res = _fan_out(_ffd_chunk, "ffd-v", seed, trials, workers, max_items)
    v = make_builtin("v")
    for name, sizes in (("empty", []), ("all-zero", [F(0)] * 5)):
        res.trials += 1
        a = ffd([Item(s, i) for i, s in enumerate(sizes)]).bin_count
        if a > v.total(sizes) + 1:
            res.violations.append(f"{name}: FFD={a} exceeds V+1")
        res.violations += [f"{name}: {p}" for p in ffd_structure_problems(sizes)]
    return res


# ---------------------------------------------------------------- delays

PUBLISHED_RATIO = F(31550554008, 10**10)


def random_timed_instance(rng: np.random.Generator, max_items: int = 8) -> list[TimedItem]:
    n = int(rng.integers(1, max_items + 1))
    q = int(rng.choice((10, 12, 20)))
    t = F(0)
    items = []
    for i in range(n):
        if i and rng.random() < 0.7:
            t += F(int(rng.integers(0, 9)), 8)
        size = F(int(rng.integers(1, q + 1)), q)
        rate = F(int(rng.integers(1, 13)), int(rng.integers(1, 5)))
        items.append(TimedItem(Item(size, i), t, DelayFunction.linear(rate)))
    return items


def bound_problems(items, rho=None) -> tuple[list[str], dict]:
    rho = F(default_rho()) if rho is None else rho
    tr = simulate(items, rho)
    off = offline_optimal(items)
    chk = check_bound(tr, off)
    problems = []
    if not chk.ok:
        problems.append(chk.detail)
    if chk.alg > PUBLISHED_RATIO * chk.opt:
        problems.append(f"ALG={chk.alg} exceeds 3.1550554008*(B+D)={PUBLISHED_RATIO * chk.opt}")
    if tr.exact:
        for ph in tr.phases[:-1] if tr.phases and tr.phases[-1].flushed else tr.phases:
            if ph.accumulated_delay != tr.rho:
                problems.append(f"phase delay {ph.accumulated_delay} != rho")
    if chk.alg < chk.opt:
        problems.append(f"ALG={chk.alg} below OPT={chk.opt}")
    return problems, {"ratio": chk.alg / chk.opt}


def _delay_chunk(seed: int, lo: int, hi: int, max_items: int) -> SuiteResult:
    res = SuiteResult("delays-bound", seed, 0, stats={"max-ratio": 0.0})
    worst = 0.0
    for trial in range(lo, hi):
        items = random_timed_instance(np.random.default_rng([seed, trial]), max_items)
        probs, info = bound_problems(items)
        res.trials += 1
        worst = max(worst, float(info["ratio"]))
        for p in probs[:1]:
            if len(res.violations) < MAX_REPORTED:
                res.violations.append(f"trial {trial}: {p}")
    res.stats["max-ratio"] = worst
    return res


def delay_suite(trials: int = 10_000, seed: int = 0, workers: int = 1, max_items: int = 8) -> SuiteResult:
    res = _fan_out(_delay_chunk, "delays-bound", seed, trials, workers, max_items)
    return res


def tcp_ack_instance(arrivals) -> list[TimedItem]:
    ident = DelayFunction.linear(1)
    return [TimedItem(Item(F(0), i), F(a), ident) for i, a in enumerate(arrivals)]


def tcp_ack_problems(arrivals, rho=None) -> list[str]:
    items = tcp_ack_instance(arrivals)
    rho = F(default_rho()) if rho is None else rho
    tr = simulate(items, rho)
    problems = [f"phase {i} used {ph.bin_count} bins" for i, ph in enumerate(tr.phases) if ph.bin_count != 1]
    if tr.total_cost != tr.phase_count * (rho + 1):
        problems.append(f"cost {tr.total_cost} != phases*(rho+1)")
    if len(items) <= 12:
        probs, _ = bound_problems(items, rho)
        problems += probs
    return problems
