"""Online bin packing with delays: the phase algorithm and its competitive bound.

The algorithm watches the total delay of all unpacked items. When it reaches
``rho`` the pending items form a phase and are packed by FFD at once. All
instances with linear delays (and rational arrivals) are simulated exactly
in rationals; other delay shapes use floats and bisection for the crossing
time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._rational import as_fraction
from .packing import Item, Packing, ffd
from .weights import pi_float, pi_upper

F = Fraction
CROSS_RTOL = 1e-13


@dataclass(frozen=True)
class DelayFunction:
    """``linear``: rate*t; ``power``: rate*t**exponent; ``table``: piecewise
    linear through (0, 0) and the breakpoints, constant after the last one."""

    kind: str
    rate: Fraction = F(1)
    exponent: Fraction = F(1)
    table: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if self.kind not in ("linear", "power", "table"):
            raise ValueError(f"unknown delay kind {self.kind!r}")
        if self.kind in ("linear", "power") and self.rate <= 0:
            raise ValueError("delay rate must be positive")
        if self.kind == "power" and self.exponent <= 0:
            raise ValueError("exponent must be positive")
        if self.kind == "table":
            if not self.table:
                raise ValueError("table delay needs at least one breakpoint")
            last_t, last_v = F(0), F(0)
            for t, v in self.table:
                if t <= last_t or v < last_v:
                    raise ValueError("table breakpoints must have increasing times and non-decreasing values")
                last_t, last_v = t, v

    @classmethod
    def linear(cls, rate=1) -> "DelayFunction":
        return cls("linear", rate=as_fraction(rate))

    @classmethod
    def power(cls, rate, exponent) -> "DelayFunction":
        return cls("power", rate=as_fraction(rate), exponent=as_fraction(exponent))

    @classmethod
    def from_table(cls, points) -> "DelayFunction":
        return cls("table", table=tuple((as_fraction(t), as_fraction(v)) for t, v in points))

    @property
    def bounded(self) -> bool:
        return self.kind == "table"

    @property
    def saturation_time(self) -> Fraction | None:
        return self.table[-1][0] if self.kind == "table" else None

    def __call__(self, t):
        if t <= 0:
            return t * 0
        if self.kind == "linear":
            return self.rate * t
        if self.kind == "power":
            return float(self.rate) * float(t) ** float(self.exponent)
        prev_t, prev_v = F(0), F(0)
        for bt, bv in self.table:
            if t <= bt:
                return prev_v + (bv - prev_v) * (t - prev_t) / (bt - prev_t)
            prev_t, prev_v = bt, bv
        return prev_v * (t / t)  # keeps the numeric type of t


@dataclass(frozen=True)
class TimedItem:
    item: Item
    arrival: Fraction
    delay: DelayFunction

    @property
    def index(self) -> int:
        return self.item.index

    @property
    def size(self) -> Fraction:
        return self.item.size


@dataclass(frozen=True)
class Phase:
    items: tuple[int, ...]
    trigger_time: Fraction | float
    accumulated_delay: Fraction | float
    bin_count: int
    packing: Packing
    flushed: bool = False


@dataclass(frozen=True)
class SimulationTrace:
    rho: Fraction | float
    phases: tuple[Phase, ...]
    exact: bool

    @property
    def phase_count(self) -> int:
        return len(self.phases)

    @property
    def total_cost(self):
        return sum((p.accumulated_delay + p.bin_count for p in self.phases), self.rho * 0)

    @property
    def total_delay(self):
        return sum((p.accumulated_delay for p in self.phases), self.rho * 0)


class SimulationError(RuntimeError):
    pass


def compute_rho(pi_terms: int = 30) -> tuple[float, float]:
    """Equalize ``1 + 1/rho`` and ``1 + rho + pi`` for ``pi = partial_sum(pi_terms)``.

    Returns ``(rho, max(1 + 1/rho, 1 + rho + pi))``.
    """
    if pi_terms < 1:
        raise ValueError("pi_terms must be at least 1")
    pi = pi_float(pi_terms)
    rho = (-pi + math.sqrt(pi * pi + 4)) / 2
    return rho, max(1 + 1 / rho, 1 + rho + pi)


def default_rho() -> float:
    return compute_rho(30)[0]


def all_linear(items: Sequence[TimedItem]) -> bool:
    return all(ti.delay.kind == "linear" for ti in items)


def _pending_delay(pending: Sequence[TimedItem], t):
    return sum((ti.delay(t - ti.arrival) for ti in pending), t * 0)


def _crossing_exact(pending, rho: Fraction, hi):
    rate = sum((ti.delay.rate for ti in pending), F(0))
    offset = sum((ti.delay.rate * ti.arrival for ti in pending), F(0))
    t = (rho + offset) / rate
    return t if hi is None or t <= hi else None


def _crossing_float(pending, rho: float, lo: float, hi):
    g = lambda t: float(_pending_delay(pending, t))  # noqa: E731
    if hi is None:
        if all(ti.delay.bounded for ti in pending):
            hi = max(float(ti.arrival + ti.delay.saturation_time) for ti in pending)
        else:
            step = 1.0
            hi = lo + step
            while g(hi) < rho:
                step *= 2
                hi = lo + step
                if step > 1e300:
                    return None
    if g(hi) < rho:
        return None
    # earliest t with g(t) >= rho; g is continuous and non-decreasing
    for _ in range(400):
        mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= rho:
            hi = mid
        else:
            lo = mid
        if g(hi) - rho <= CROSS_RTOL * rho:
            break
    return hi


def simulate(items: Sequence[TimedItem], rho=None, horizon=None) -> SimulationTrace:
    """Run the phase algorithm.

    Items are processed in index order and arrivals must be non-decreasing in
    that order. An item arriving exactly at a trigger instant starts the next
    phase. If the pending delay can never reach ``rho`` after the last arrival
    (bounded delays) the remaining items are flushed at ``horizon``.
    """
    items = sorted(items, key=lambda ti: ti.index)
    for a, b in zip(items, items[1:]):
        if b.arrival < a.arrival:
            raise SimulationError(f"item {b.index} arrives before item {a.index}")
    if rho is None:
        rho = default_rho()
    exact = all_linear(items) and isinstance(rho, (int, float, Fraction))
    rho = F(rho) if exact else float(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    conv = (lambda x: x) if exact else float

    phases: list[Phase] = []
    pending: list[TimedItem] = []
    pos, n = 0, len(items)
    t = None

    def close(at, flushed=False):
        acc = _pending_delay(pending, at)
        trace = ffd([ti.item for ti in pending])
        phases.append(Phase(tuple(ti.index for ti in pending), at, acc, trace.bin_count,
                            trace.packing, flushed))
        pending.clear()

    while pos < n or pending:
        if not pending:
            t = conv(items[pos].arrival)
            while pos < n and conv(items[pos].arrival) == t:
                pending.append(items[pos])
                pos += 1
            continue
        hi = conv(items[pos].arrival) if pos < n else None
        if exact:
            cross = _crossing_exact(pending, rho, hi)
        else:
            cross = _crossing_float(pending, rho, t, hi)
        if cross is not None:
            close(cross)
            t = cross
            continue
        if hi is None:
            if horizon is None:
                raise SimulationError("pending delay never reaches rho; a horizon is required")
            h = conv(as_fraction(horizon)) if exact else float(horizon)
            if h < t:
                raise SimulationError("horizon precedes the last arrival")
            close(h, flushed=True)
            break
        t = hi
        while pos < n and conv(items[pos].arrival) == t:
            pending.append(items[pos])
            pos += 1
    return SimulationTrace(rho, tuple(phases), exact)


# ---------------------------------------------------------------- offline optimum

@dataclass(frozen=True)
class OfflineSolution:
    partition: tuple[tuple[int, ...], ...]
    bin_count: int
    total_delay: Fraction | float
    cost: Fraction | float


class OracleLimitError(RuntimeError):
    pass


def _block_costs(items: Sequence[TimedItem], exact: bool):
    """Lazily evaluated cost ``1 + delay`` of a bin given as a bitmask; ``None`` if it overflows."""
    cache: dict[int, tuple | None] = {}

    def cost(mask: int):
        if mask in cache:
            return cache[mask]
        members = [items[i] for i in range(len(items)) if mask >> i & 1]
        load = sum((ti.size for ti in members), F(0))
        if load > 1:
            cache[mask] = None
        else:
            close = max(ti.arrival for ti in members)
            if exact:
                d = sum((ti.delay(close - ti.arrival) for ti in members), F(0))
            else:
                d = sum(float(ti.delay(float(close) - float(ti.arrival))) for ti in members)
            cache[mask] = (1 + d, d)
        return cache[mask]

    return cost


def offline_optimal(items: Sequence[TimedItem], limit: int = 12, method: str = "enumerate") -> OfflineSolution:
    """Cheapest offline solution, closing each bin when its last item arrives.

    ``method="enumerate"`` walks every set partition with feasible blocks
    (pruning partial partitions already costlier than the incumbent);
    ``method="dp"`` is an independent dynamic program over subsets. Ties go
    to fewer bins, then to the lexicographically smallest partition.
    """
    items = sorted(items, key=lambda ti: ti.index)
    n = len(items)
    if n > limit:
        raise OracleLimitError(f"{n} items exceed the oracle limit {limit}")
    if n == 0:
        return OfflineSolution((), 0, F(0), F(0))
    exact = all_linear(items)
    cost = _block_costs(items, exact)
    idx = [ti.index for ti in items]

    def blocks_of(masks):
        return tuple(tuple(idx[i] for i in range(n) if m >> i & 1) for m in masks)

    if method == "dp":
        best = _subset_dp(n, cost)
        masks = best[2]
    elif method == "enumerate":
        masks = _enumerate(n, cost)
    else:
        raise ValueError(f"unknown method {method!r}")
    delay = sum((cost(m)[1] for m in masks), F(0) if exact else 0.0)
    return OfflineSolution(blocks_of(masks), len(masks), delay, len(masks) + delay)


def _enumerate(n: int, cost):
    best = {"key": None, "masks": None}
    masks: list[int] = []

    def canon(ms):
        return tuple(tuple(i for i in range(n) if m >> i & 1) for m in ms)

    def rec(i: int, partial):
        if best["key"] is not None and partial > best["key"][0]:
            return
        if i == n:
            key = (partial, len(masks), canon(masks))
            if best["key"] is None or key < best["key"]:
                best["key"], best["masks"] = key, masks[:]
            return
        bit = 1 << i
        for b in range(len(masks)):
            old = masks[b]
            c_old, c_new = cost(old), cost(old | bit)
            if c_new is None:
                continue
            masks[b] = old | bit
            rec(i + 1, partial - c_old[0] + c_new[0])
            masks[b] = old
        masks.append(bit)
        rec(i + 1, partial + cost(bit)[0])
        masks.pop()

    rec(0, 0)
    return best["masks"]


def _subset_dp(n: int, cost):
    full = (1 << n) - 1
    best = {0: (0, 0, ())}
    for mask in range(1, full + 1):
        low = mask & -mask
        rest_bits = mask ^ low
        choice = None
        sub = rest_bits
        while True:
            block = sub | low
            c = cost(block)
            if c is not None:
                r = best[mask ^ block]
                cand = (c[0] + r[0], 1 + r[1], (block,) + r[2])
                if choice is None or _dp_key(cand, n) < _dp_key(choice, n):
                    choice = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest_bits
        best[mask] = choice
    return best[full]


def _dp_key(entry, n):
    c, bins, masks = entry
    return c, bins, tuple(tuple(i for i in range(n) if m >> i & 1) for m in masks)


# ---------------------------------------------------------------- bound check

@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    alg: Fraction | float
    opt: Fraction | float
    phase_bound: Fraction | float  # (1 + 1/rho) D + (1 + rho + pi) B
    ratio_bound: Fraction | float  # max(1 + 1/rho, 1 + rho + pi)
    detail: str = ""


def check_bound(trace: SimulationTrace, off: OfflineSolution, pi_terms: int = 30, tol: float = 1e-9) -> BoundCheck:
    """Check ALG against ``(1 + 1/rho) D + (1 + rho + pi) B`` and ``ratio * (B + D)``.

    ``pi`` is a certified upper bound on pi_infinity, so the check can only
    err on the side of passing a true inequality. Exact traces are compared
    exactly; float traces get the absolute tolerance ``tol``.
    """
    exact = trace.exact and isinstance(off.total_delay, Fraction)
    if exact:
        rho, pi, slack = F(trace.rho), pi_upper(pi_terms), 0
        d, b, alg = off.total_delay, off.bin_count, trace.total_cost
    else:
        rho, pi, slack = float(trace.rho), float(pi_upper(pi_terms)), tol
        d, b, alg = float(off.total_delay), off.bin_count, float(trace.total_cost)
    phase_bound = (1 + 1 / rho) * d + (1 + rho + pi) * b
    ratio = max(1 + 1 / rho, 1 + rho + pi)
    ok1 = alg <= phase_bound + slack
    ok2 = alg <= ratio * (b + d) + slack
    detail = "" if ok1 and ok2 else f"ALG={alg} phase_bound={phase_bound} ratio*(B+D)={ratio * (b + d)}"
    return BoundCheck(ok1 and ok2, alg, b + d, phase_bound, ratio, detail)
