"""Weight functions for the clustering and delay analyses, and their checks.

A piecewise-bonus function is ``coefficient * x + bonus(x)`` where the bonus
is constant on half-open intervals ``(lower, upper]``. The ``v`` function is
the harmonic-type weight ``v(x) = x + 1/(j(j+1))`` for ``x`` in
``(1/(j+1), 1/j]``, ``v(x) = 1`` above one half and ``v(0) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .packing import HALF, exact_optimal, expand, ffd

F = Fraction
DELTA = 77805
LAMBDA = 146312

# exact terms kept for the certified upper bound on pi_infinity; later terms
# are below 1e-100 and only enter through the tail bound
PI_CERT_TERMS = 9


@dataclass(frozen=True)
class WeightFunction:
    name: str
    kind: str  # "piecewise" or "v"
    coefficient: Fraction = F(0)
    bonuses: tuple[tuple[Fraction, Fraction, Fraction], ...] = ()

    def __post_init__(self):
        last = F(0)
        for lo, hi, bonus in sorted(self.bonuses):
            if lo < last or hi <= lo or bonus < 0:
                raise ValueError(f"{self.name}: bonus intervals must be disjoint, sorted, non-negative")
            last = hi

    def __call__(self, x) -> Fraction:
        return eval_weight(self, x)

    def breakpoints(self) -> list[Fraction]:
        if self.kind == "v":
            return [F(1, j) for j in range(1, 50)]
        return sorted({b for lo, hi, _ in self.bonuses for b in (lo, hi)})

    def total(self, sizes: Iterable) -> Fraction:
        return sum((eval_weight(self, s) for s in sizes), F(0))


def make_builtin(name: str) -> WeightFunction:
    """Builtin functions: ``w195``, ``wk3``, ``wk4`` and ``v``."""
    if name == "w195":
        return WeightFunction("w195", "piecewise", F(9, 5), ((HALF, F(1), F(3, 20)),))
    if name == "wk3":
        return WeightFunction("wk3", "piecewise", F(21, 13), (
            (F(1, 6), F(1, 4), F(2, 195)),
            (F(1, 4), F(1, 3), F(18, 325)),
            (F(1, 3), HALF, F(64, 975)),
            (HALF, F(1), F(997, 3900)),
        ))
    if name == "wk4":
        return WeightFunction("wk4", "piecewise", F(28, 19), (
            (F(1, 6), F(1, 4), F(1008, DELTA)),
            (F(1, 4), F(1, 3), F(5520, DELTA)),
            (F(1, 3), HALF, F(6528, DELTA)),
            (HALF, F(1), F(25124, DELTA)),
        ))
    if name == "v":
        return WeightFunction("v", "v")
    raise ValueError(f"unknown weight function {name!r}")


BUILTIN_CAPS = {
    "w195": F(39, 20),
    "wk3": F(581, 300),
    "wk4": F(LAMBDA, DELTA),
}


def eval_weight(f: WeightFunction, x) -> Fraction:
    x = F(x)
    if not 0 <= x <= 1:
        raise ValueError(f"size {x} outside [0, 1]")
    if f.kind == "v":
        if x == 0:
            return F(0)
        if x > HALF:
            return F(1)
        j = x.denominator // x.numerator  # x in (1/(j+1), 1/j]
        return x + F(1, j * (j + 1))
    w = f.coefficient * x
    for lo, hi, bonus in f.bonuses:
        if lo < x <= hi:
            return w + bonus
    return w


# ---------------------------------------------------------------- pi machinery

@dataclass(frozen=True)
class HarmonicSequence:
    """Terms ``c_1..c_n`` with ``c_1 = 1`` and ``c_i = c_{i-1}(c_{i-1} + 1)``.

    ``partial_sum`` is ``sum(1/c_i)``; ``tail_bound = 2/c_{n+1}`` bounds the
    rest of the series because every later term at most halves.
    """

    terms: tuple[int, ...]
    partial_sum: Fraction
    tail_bound: Fraction

    @property
    def upper(self) -> Fraction:
        return self.partial_sum + self.tail_bound


def _c_terms(n: int) -> list[int]:
    terms = [1]
    while len(terms) < n:
        c = terms[-1]
        terms.append(c * (c + 1))
    return terms


def _big_int():
    try:
        import gmpy2
        return gmpy2.mpz
    except ImportError:  # pragma: no cover
        return int


def pi_sequence(n: int) -> HarmonicSequence:
    """Exact partial sums of ``sum 1/c_i``.

    The terms grow doubly exponentially (``c_30`` has about 10^8 digits), so
    beyond a dozen terms the big-integer work dominates; gmpy2 is used when
    present. The partial sum is kept as ``P_n / c_n`` with
    ``P_{n+1} = P_n (c_n + 1) + 1`` which avoids repeated gcd reductions.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n <= 12:
        terms = _c_terms(n + 1)
        ps = sum((F(1, c) for c in terms[:n]), F(0))
        return HarmonicSequence(tuple(terms[:n]), ps, F(2, terms[n]))
    return _LazyHarmonic.build(n)


class _LazyHarmonic(HarmonicSequence):
    """Huge-``n`` variant: nothing is computed until needed, and the sum is
    held unreduced and compared by cross multiplication."""

    @classmethod
    def build(cls, n: int) -> "_LazyHarmonic":
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "_state", {})
        return obj

    def _materialize(self) -> dict:
        st = self._state
        if not st:
            mpz = _big_int()
            c = mpz(1)
            p = mpz(1)
            terms = [c]
            for _ in range(self.n - 1):
                p = p * (c + 1) + 1
                c = c * (c + 1)
                terms.append(c)
            st.update(terms=tuple(terms), p=p, next=c * (c + 1))
        return st

    def __repr__(self) -> str:
        return f"HarmonicSequence(n={self.n}, lazy)"

    __eq__ = object.__eq__
    __hash__ = object.__hash__

    @property
    def terms(self) -> tuple:  # type: ignore[override]
        return self._materialize()["terms"]

    @property
    def partial_sum(self) -> Fraction:  # type: ignore[override]
        # reducing a 10^8-digit fraction is slow; prefer the comparison helpers
        st = self._materialize()
        return F(int(st["p"]), int(st["terms"][-1]))

    @property
    def tail_bound(self) -> Fraction:  # type: ignore[override]
        return F(2, int(self._materialize()["next"]))

    def partial_sum_below(self, bound: Fraction, shortcut: bool = True) -> bool:
        if shortcut and _prefix_certifies(self.n, bound):
            return True
        st = self._materialize()
        return st["p"] * bound.denominator < bound.numerator * st["terms"][-1]

    def upper_below(self, bound: Fraction, shortcut: bool = True) -> bool:
        if shortcut and _prefix_certifies(self.n, bound):
            return True
        st = self._materialize()
        # P/c + 2/(c(c+1)) = (P(c+1) + 2) / next
        c = st["terms"][-1]
        return (st["p"] * (c + 1) + 2) * bound.denominator < bound.numerator * st["next"]


def _prefix_certifies(n: int, bound: Fraction) -> bool:
    """Decide ``upper(n) < bound`` from a short prefix when possible.

    ``upper(m) = S_m + 2/c_{m+1}`` never increases with ``m``: going from
    ``m`` to ``m + 1`` adds ``1/c_{m+1} + 2/c_{m+2}`` and removes
    ``2/c_{m+1}``, and ``c_{m+2} = c_{m+1}(c_{m+1} + 1) >= 2 c_{m+1}``.
    So ``upper(m) < bound`` for some ``m <= n`` already proves
    ``S_n <= upper(n) < bound``.
    """
    return any(pi_sequence(m).upper < bound for m in range(1, min(n, 12) + 1))


def partial_sum_below(seq: HarmonicSequence, bound: Fraction, shortcut: bool = True) -> bool:
    """``partial_sum < bound``; ``shortcut=False`` forces the full big-integer comparison."""
    if isinstance(seq, _LazyHarmonic):
        return seq.partial_sum_below(bound, shortcut)
    return seq.partial_sum < bound


def certifies_below(seq: HarmonicSequence, bound: Fraction, shortcut: bool = True) -> bool:
    """True when ``partial_sum + tail_bound < bound``, proving pi_infinity < bound."""
    if isinstance(seq, _LazyHarmonic):
        return seq.upper_below(bound, shortcut)
    return seq.upper < bound


@lru_cache(maxsize=None)
def pi_upper(n: int = 30) -> Fraction:
    """A certified rational upper bound on pi_infinity, at least ``partial_sum(n)``.

    Uses ``min(n, PI_CERT_TERMS)`` exact terms plus the tail bound, so it is
    cheap for any ``n`` and still dominates every longer partial sum.
    """
    return pi_sequence(min(n, PI_CERT_TERMS)).upper


@lru_cache(maxsize=None)
def pi_float(n: int) -> float:
    """``float(partial_sum(n))``; terms past the ninth are below double precision."""
    return float(pi_sequence(min(n, PI_CERT_TERMS)).partial_sum)


# ---------------------------------------------------------------- checks

def bin_weight_cap_check(f: WeightFunction, cap, bins: Iterable[Sequence]) -> list[tuple[tuple, Fraction]]:
    """All bins whose total weight exceeds ``cap``; an empty list upholds the cap.

    Every bin must be feasible (total size at most 1), otherwise ``ValueError``.
    """
    cap = F(cap)
    violations = []
    for b in bins:
        sizes = tuple(F(s) for s in b)
        if sum(sizes, F(0)) > 1:
            raise ValueError(f"infeasible bin {sizes}")
        w = f.total(sizes)
        if w > cap:
            violations.append((sizes, w))
    return violations


def grid_bins(q: int = 420, max_items: int = 3, min_exclusive: Fraction = F(1, 4),
              complete: bool = True) -> Iterator[tuple[Fraction, ...]]:
    """Every multiset of at most ``max_items`` sizes from ``{1/q, ..., q/q}``
    that are all above ``min_exclusive`` and sum to at most 1.

    With ``complete`` each non-full bin is also yielded once more with its
    slack added as one extra item, so the tight variants are covered too.
    """
    lo = int(min_exclusive * q) + 1

    def rec(start: int, room: int, chosen: list[int]):
        if chosen:
            yield tuple(chosen)
        if len(chosen) == max_items:
            return
        for a in range(start, room + 1):
            chosen.append(a)
            yield from rec(a, room - a, chosen)
            chosen.pop()

    yield ()
    for combo in rec(lo, q, []):
        sizes = tuple(F(a, q) for a in combo)
        yield sizes
        slack = q - sum(combo)
        if complete and slack > 0:
            yield sizes + (F(slack, q),)


_TARGETS = [F(1, t) for t in (2, 3, 4, 5, 6, 7, 43)]


def random_bin(rng: np.random.Generator, max_items: int = 12) -> tuple[Fraction, ...]:
    """A random feasible bin on a random rational grid, biased toward sizes near
    reciprocals of small integers and toward tight loads."""
    q = int(rng.choice((60, 420, 840, 2520, 10_000, 30_030, 1_000_003)))
    room = q
    sizes = []
    while room > 0 and len(sizes) < max_items:
        if rng.random() < 0.5:
            t = _TARGETS[int(rng.integers(len(_TARGETS)))]
            jitter = int(rng.integers(-3, 4)) if q > 1000 else int(rng.integers(-1, 2))
            a = int(t * q) + jitter
            a = min(max(a, 1), room)
        else:
            a = int(rng.integers(1, room + 1))
        sizes.append(a)
        room -= a
        if rng.random() < 0.15:
            break
    if room > 0 and rng.random() < 0.6:
        sizes.append(room)
    return tuple(F(a, q) for a in sizes)


def random_bins(seed: int, count: int, max_items: int = 12) -> Iterator[tuple[Fraction, ...]]:
    for trial in range(count):
        yield random_bin(np.random.default_rng([seed, trial]), max_items)


@dataclass(frozen=True)
class ClusterCheck:
    status: str  # "holds", "violated" or "precondition-failed"
    weight: Fraction
    ffd_bins: int
    opt: int


def cluster_weight_dominates_ffd(f: WeightFunction, cluster: Iterable, k: int) -> ClusterCheck:
    """Check ``W_i >= A_i`` for a cluster whose exact optimum is at least ``k``.

    Raises :class:`SolverLimitError` if the cluster is too large to solve.
    """
    items = expand(cluster)
    opt = exact_optimal(items).bin_count
    a = ffd(items).bin_count
    w = f.total(it.size for it in items)
    if opt < k:
        status = "precondition-failed"
    else:
        status = "holds" if w >= a else "violated"
    return ClusterCheck(status, w, a, opt)


_V = make_builtin("v")


def ffd_v_bound_check(items: Iterable) -> bool:
    """``FFD(J) <= V(J) + 1`` with exact arithmetic."""
    items = expand(items)
    return ffd(items).bin_count <= _V.total(it.size for it in items) + 1


def monotonicity_violations(f: WeightFunction, step: Fraction = F(1, 10**6)) -> list[Fraction]:
    """Breakpoints where ``f`` fails to be non-decreasing across one grid step."""
    bad = []
    for b in f.breakpoints():
        pts = [p for p in (b - step, b, b + step) if 0 <= p <= 1]
        vals = [eval_weight(f, p) for p in pts]
        if any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
            bad.append(b)
    return bad
