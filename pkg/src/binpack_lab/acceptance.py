"""The acceptance battery: one function per criterion, each returning a verdict.

Used by ``binpack-lab suite`` and by ``tests/test_acceptance.py``. Trial
counts default to the full targets; ``scale`` shrinks the randomized parts for
quick runs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .clustering import price_of_clustering
from .construction import (
    GeneratorParams, generate_construction, k3_finite_ratio, k3_limit, lb_formula,
    required_modulus, verify_construction,
)
from .delays import DelayFunction, TimedItem, check_bound, compute_rho, default_rho, offline_optimal, simulate
from .packing import Item
from .suites import PUBLISHED_RATIO, cluster_suite, delay_suite, ffd_suite, tcp_ack_problems, weight_cap_suite
from .weights import certifies_below, partial_sum_below, pi_sequence

F = Fraction

# (k, printed value) pairs for the general-k bound
LB_PRINTED = ((4, "1.8781318"), (5, "1.8410851"), (6, "1.815945"), (7, "1.7979"),
              (8, "1.78437"), (9, "1.77386"), (10, "1.76546"))
LB_TOL = 5e-7
PI_BOUND = F(1691030207, 10**9)


@dataclass
class Verdict:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed and self.within_budget else "FAIL"
        budget = "" if self.budget is None else f" (budget {self.budget:g}s)"
        return f"[{status}] criterion {self.number}: {self.title}: {self.detail} [{self.seconds:.2f}s{budget}]"


def printed_tolerance(printed: str) -> float:
    """Half a unit in the last printed place, never below ``LB_TOL``."""
    decimals = len(printed.split(".")[1])
    return max(LB_TOL, 0.5 * 10.0 ** -decimals)


def criterion_1() -> tuple[bool, str]:
    lim = k3_limit()
    expected = F(19, 10) + F(2, 18065) + F(2, 425) + F(2, 65)
    ok = lim == expected and abs(float(lim) - 1.9355858244424) <= 1e-10
    parts = [f"k3-limit={lim} ({float(lim):.13f})"]
    for k, printed in LB_PRINTED:
        val = float(lb_formula(k))
        good = abs(val - float(printed)) <= printed_tolerance(printed)
        ok &= good
        if not good:
            parts.append(f"k={k}: {val:.10f} vs {printed}")
    return ok, "; ".join(parts)


def criterion_2() -> tuple[bool, str]:
    s5 = pi_sequence(5).partial_sum
    ok = s5 == F(509, 301) and abs(float(s5) - 1.6910299) < 1e-7
    for n in range(6, 31):
        seq = pi_sequence(n)
        ok &= partial_sum_below(seq, PI_BOUND) and certifies_below(seq, PI_BOUND)
    return ok, f"S5={s5}; S6..S30 and S30+tail < {PI_BOUND}"


def criterion_3() -> tuple[bool, str]:
    rho, ratio = compute_rho(30)
    ok = abs(rho - 0.4640251938) <= 1e-9 and abs(ratio - 3.1550554008) <= 1e-9
    return ok, f"rho={rho:.12f} ratio={ratio:.12f}"


def criterion_4(scale: float = 1.0, seed: int = 2024, workers: int = 1) -> tuple[bool, str]:
    res = weight_cap_suite(trials=max(1, int(100_000 * scale)), seed=seed, exhaustive_grid=True)
    return res.passed, f"{res.trials} bins, {len(res.violations)} violations {res.violations[:2]}"


def criterion_5(scale: float = 1.0, seed: int = 2024, workers: int = 1) -> tuple[bool, str]:
    n = max(1, int(10_000 * scale))
    r3 = cluster_suite(3, n, seed, workers)
    r4 = cluster_suite(4, n, seed, workers)
    return (r3.passed and r4.passed,
            f"k=3: {r3.trials} clusters ({r3.stats['ffd-above-opt']} with A>OPT), "
            f"k=4: {r4.trials} clusters ({r4.stats['ffd-above-opt']} with A>OPT), "
            f"violations {r3.violations[:1] + r4.violations[:1]}")


def criterion_6(scale: float = 1.0, seed: int = 2024, workers: int = 1) -> tuple[bool, str]:
    res = ffd_suite(max(1, int(10_000 * scale)), seed, workers)
    return res.passed, f"{res.trials} multisets, violations {res.violations[:2]}"


def _construction(N: int, M: int, k: int, families, leftover: str = "merge") -> tuple:
    c = generate_construction(GeneratorParams(N, M, k, frozenset(families), leftover=leftover))
    return c, verify_construction(c)


def criterion_7() -> tuple[bool, str]:
    c, rep = _construction(90, 1, 3, {2, 3})
    ok = rep.ok and c.large_item_count == 90 and rep.global_opt == 90
    # prediction: 3 per base cluster, the merged cluster's solver value, 3 per family-3 cluster
    merged = rep.cluster_opt[c.merged_cluster]
    predicted = 3 * (len(c.instance.clusters) - 1) + merged
    ok &= rep.sum_cluster_opt == predicted == 145
    return ok, (f"verify={'ok' if rep.ok else rep.failures()[:2]}, large={c.large_item_count}, "
                f"sum OPT_i={rep.sum_cluster_opt} (merged cluster {merged}), ratio={rep.ratio}")


def criterion_8() -> tuple[bool, str]:
    c, rep = _construction(52650, 2, 3, {2, 3, 6, 7})
    merged_extra = rep.cluster_opt[c.merged_cluster] - 3
    expected = k3_finite_ratio(52650, 2, {2, 3, 6, 7}, merged_extra=merged_extra)
    closed = (F(3, 2) - F(3, 52650) + F(2, 65) + F(3, 10) * (1 - F(5, 9) ** 2)
              + F(1, 10) * (1 - F(5, 9)) + F(merged_extra, 52650))
    ok = rep.ok and rep.ratio == expected == closed
    return ok, f"verify={'ok' if rep.ok else rep.failures()[:2]}, ratio={rep.ratio} ({float(rep.ratio):.10f})"


def criterion_9() -> tuple[bool, str]:
    # the merge placement gives one cluster cost 2k-2, so every-cluster-equals-k needs "spread"
    N = required_modulus(4, 1, {2, 3})
    c, rep = _construction(N, 1, 4, {2, 3}, leftover="spread")
    bad = {cid: o for cid, o in rep.cluster_opt.items() if o != 4}
    ok = rep.ok and not bad and len(rep.cluster_opt) == len(c.instance.clusters)
    pr = price_of_clustering(c.instance, certificate=c.certificate)
    cm, rm = _construction(N, 1, 4, {2, 3})
    return ok and rm.ok, (f"N={N}, verify={'ok' if rep.ok else rep.failures()[:2]}, "
                          f"{len(rep.cluster_opt)} clusters, clusters with OPT != 4: {bad}, ratio={pr.ratio}; "
                          f"merge placement: verify={'ok' if rm.ok else 'FAILED'}, "
                          f"merged cluster OPT {rm.cluster_opt[cm.merged_cluster]}")


def criterion_10(scale: float = 1.0, seed: int = 2024, workers: int = 1) -> tuple[bool, str]:
    rho = F(default_rho())
    single = [TimedItem(Item(F(1, 2), 0), F(0), DelayFunction.linear(1))]
    tr = simulate(single, rho)
    chk = check_bound(tr, offline_optimal(single))
    ok = tr.total_cost == rho + 1 and chk.ok and chk.alg <= PUBLISHED_RATIO * chk.opt
    res = delay_suite(max(1, int(10_000 * scale)), seed, workers)
    return ok and res.passed, (f"single item cost {float(tr.total_cost):.10f} = rho+1; "
                               f"{res.trials} instances, worst ALG/OPT {res.stats['max-ratio']:.4f}, "
                               f"violations {res.violations[:2]}")


def criterion_11() -> tuple[bool, str]:
    patterns = [[0], [0, 0, 0], [0, 1, 2, 3], [0, F(1, 10), F(1, 5), 1, 1, F(5, 2), 7],
                [i * F(1, 3) for i in range(12)], [0] * 6 + [F(1, 2)] * 6]
    problems = []
    for arr in patterns:
        problems += tcp_ack_problems(arr)
    long_run = tcp_ack_problems([F(i, 7) for i in range(200)])
    return not (problems or long_run), f"{len(patterns) + 1} arrival patterns, problems {(problems + long_run)[:2]}"


RANDOMIZED = {4, 5, 6, 10}
CRITERIA: dict[int, tuple[str, Callable, float]] = {
    1: ("published constants", criterion_1, 1.0),
    2: ("pi machinery", criterion_2, 1.0),
    3: ("rho and ratio", criterion_3, 1.0),
    4: ("weight caps", criterion_4, 120.0),
    5: ("W >= A on clusters", criterion_5, 120.0),
    6: ("FFD <= V + 1 and FFD structure", criterion_6, 60.0),
    7: ("construction k=3 N=90 M=1", criterion_7, 30.0),
    8: ("construction k=3 N=52650 M=2", criterion_8, 60.0),
    9: ("construction k=4 minimal N", criterion_9, 30.0),
    10: ("delay competitive bound", criterion_10, 180.0),
    11: ("TCP-ack shape", criterion_11, 30.0),
}


def run_criterion(number: int, scale: float = 1.0, seed: int = 2024, workers: int = 1) -> Verdict:
    title, fn, budget = CRITERIA[number]
    t0 = time.perf_counter()
    if number in RANDOMIZED:
        ok, detail = fn(scale=scale, seed=seed, workers=workers)
    else:
        ok, detail = fn()
    dt = time.perf_counter() - t0
    # budgets only apply to full-size runs
    return Verdict(number, title, ok, detail, dt, budget if math.isclose(scale, 1.0) and workers <= 1 else None)
