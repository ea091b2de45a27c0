"""Exact-rational bin packing primitives.

Sizes are :class:`fractions.Fraction` values in ``[0, 1]``. The greedy rules
and the exact solver work internally on integers obtained by scaling every
size by the least common denominator, so all comparisons are exact and fast.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from ._rational import RationalParseError, as_fraction, common_scale, fmt, parse_rational

HALF = Fraction(1, 2)


class InstanceError(ValueError):
    """An instance that violates the size or index rules."""


class SolverLimitError(RuntimeError):
    """The exact solver refused an input as too large for exact solve."""


@dataclass(frozen=True)
class Item:
    size: Fraction
    index: int
    cluster: str | None = None
    label: str = ""


@dataclass(frozen=True)
class ItemClass:
    """``count`` identical items; ``label`` names the size type (e.g. ``pos(3,2)``)."""

    size: Fraction
    count: int = 1
    cluster: str | None = None
    label: str = ""


@dataclass(frozen=True)
class Packing:
    bins: tuple[tuple[Item, ...], ...]

    @property
    def loads(self) -> tuple[Fraction, ...]:
        return tuple(sum((it.size for it in b), Fraction(0)) for b in self.bins)

    def __len__(self) -> int:
        return len(self.bins)

    def __iter__(self):
        return iter(self.bins)


@dataclass(frozen=True)
class FFDTrace:
    """FFD output plus the observables used by the weighting arguments.

    ``tau`` counts the leading inner bins (all bins but the last) that hold an
    item larger than 1/2; ``theta`` is the size of the first item of the last
    bin (``None`` for an empty instance).
    """

    packing: Packing
    bin_count: int
    tau: int
    theta: Fraction | None
    first_items: tuple[Fraction, ...]


@dataclass(frozen=True)
class OptimalPacking:
    bin_count: int
    packing: Packing
    method: str


@dataclass
class ValidationReport:
    ok: bool
    items: list[Item]
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def expand(items: Iterable) -> list[Item]:
    """Expand item classes into items with fresh indices.

    Plain :class:`Item` objects keep their index; classes are numbered after
    the largest index already present.
    """
    items = list(items)
    out: list[Item] = []
    next_index = 1 + max((it.index for it in items if isinstance(it, Item)), default=-1)
    for it in items:
        if isinstance(it, Item):
            out.append(it)
        elif isinstance(it, ItemClass):
            for _ in range(it.count):
                out.append(Item(it.size, next_index, it.cluster, it.label))
                next_index += 1
        else:
            out.append(Item(as_fraction(it), next_index))
            next_index += 1
    return out


def validate_instance(items: Iterable) -> ValidationReport:
    """Check sizes and indices; accepts items, item classes, numbers or ``p/q`` text.

    Malformed rationals (zero denominator) raise :class:`InstanceError`; every
    other problem is collected into the report.
    """
    errors: list[str] = []
    warnings: list[str] = []
    normalized = []
    for pos, raw in enumerate(items):
        if isinstance(raw, str):
            try:
                value, reduced = parse_rational(raw)
            except RationalParseError as exc:
                raise InstanceError(str(exc)) from None
            if not reduced:
                warnings.append(f"item {pos}: {raw.strip()} not in lowest terms (read as {fmt(value)})")
            normalized.append(value)
        else:
            normalized.append(raw)
    expanded = expand(normalized)
    for it in expanded:
        if it.size > 1:
            errors.append(f"item {it.index}: size exceeds 1 ({fmt(it.size)})")
        elif it.size < 0:
            errors.append(f"item {it.index}: negative size ({fmt(it.size)})")
    for ic in normalized:
        if isinstance(ic, ItemClass) and ic.count < 1:
            errors.append(f"class {ic.label or fmt(ic.size)}: count must be positive")
    dup = [i for i, c in Counter(it.index for it in expanded).items() if c > 1]
    if dup:
        errors.append(f"duplicate indices {sorted(dup)[:5]}")
    return ValidationReport(not errors, expanded, errors, warnings)


def _checked(items: Iterable) -> list[Item]:
    report = validate_instance(items)
    if not report.ok:
        raise InstanceError("; ".join(report.errors))
    return report.items


def _scale(items: Sequence[Item]) -> tuple[list[int], int]:
    scale = common_scale(it.size for it in items)
    return [it.size.numerator * (scale // it.size.denominator) for it in items], scale


def _first_fit_int(sizes: Sequence[int], cap: int) -> list[list[int]]:
    loads: list[int] = []
    bins: list[list[int]] = []
    for pos, s in enumerate(sizes):
        for b, load in enumerate(loads):
            if load + s <= cap:
                loads[b] += s
                bins[b].append(pos)
                break
        else:
            loads.append(s)
            bins.append([pos])
    return bins


def first_fit(items: Sequence) -> Packing:
    """First-Fit in the given order: lowest-indexed bin with room, else a new bin."""
    items = _checked(items)
    if not items:
        return Packing(())
    ints, scale = _scale(items)
    bins = _first_fit_int(ints, scale)
    return Packing(tuple(tuple(items[p] for p in b) for b in bins))


def ffd_order(items: Sequence[Item]) -> list[Item]:
    return sorted(items, key=lambda it: (-it.size, it.index))


def ffd(items: Iterable) -> FFDTrace:
    """First-Fit Decreasing; equal sizes are taken in ascending index order."""
    ordered = ffd_order(_checked(items))
    packing = first_fit(ordered)
    firsts = tuple(b[0].size for b in packing.bins)
    tau = 0
    for b in packing.bins[:-1]:
        if any(it.size > HALF for it in b):
            tau += 1
        else:
            break
    theta = firsts[-1] if firsts else None
    return FFDTrace(packing, len(packing), tau, theta, firsts)


# ---------------------------------------------------------------- exact solver

def _lower_bound(sizes: Sequence[int], cap: int) -> int:
    total = sum(sizes)
    large = sum(1 for s in sizes if 2 * s > cap)
    return max(-(-total // cap), large)


def _bnb(sizes: list[int], cap: int, node_limit: int) -> list[list[int]]:
    """Depth-first branch and bound; ``sizes`` must be non-increasing and positive."""
    n = len(sizes)
    best_bins = _first_fit_int(sizes, cap)
    lb = _lower_bound(sizes, cap)
    if len(best_bins) == lb:
        return best_bins
    suffix = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] + sizes[j]
    loads: list[int] = []
    assign = [0] * n
    state = {"best": len(best_bins), "assign": None, "nodes": 0}

    def dfs(j: int, used: int) -> bool:
        state["nodes"] += 1
        if state["nodes"] > node_limit:
            raise SolverLimitError(f"too large for exact solve: node limit {node_limit} exceeded")
        if j == n:
            state["best"] = len(loads)
            state["assign"] = assign[:]
            return len(loads) == lb
        free = len(loads) * cap - used
        need = suffix[j] - free
        extra = -(-need // cap) if need > 0 else 0
        if len(loads) + extra >= state["best"]:
            return False
        s = sizes[j]
        start = assign[j - 1] if j and sizes[j - 1] == s else 0
        tried = set()
        for b in range(start, len(loads)):
            load = loads[b]
            if load + s <= cap and load not in tried:
                tried.add(load)
                loads[b] = load + s
                assign[j] = b
                if dfs(j + 1, used + s):
                    return True
                loads[b] = load
        if len(loads) + 1 < state["best"]:
            loads.append(s)
            assign[j] = len(loads) - 1
            if dfs(j + 1, used + s):
                return True
            loads.pop()
        return False

    dfs(0, 0)
    if state["assign"] is None:
        return best_bins
    bins: list[list[int]] = [[] for _ in range(state["best"])]
    for pos, b in enumerate(state["assign"]):
        bins[b].append(pos)
    return bins


def _pattern_solve(sizes: list[int], counts: list[int], cap: int, state_limit: int) -> list[tuple[int, ...]]:
    """Minimum bins for few distinct sizes by DP over remaining-count vectors.

    Returns the chosen bin patterns (count vectors). Only patterns that are
    maximal with respect to the remaining items are tried, which is enough:
    any optimal packing can be augmented greedily into one using them.
    """
    d = len(sizes)
    if d == 1:
        per_bin = min(counts[0], cap // sizes[0])
        full, rest = divmod(counts[0], per_bin)
        return [(per_bin,)] * full + ([(rest,)] if rest else [])
    n_states = 1
    for c in counts:
        n_states *= c + 1
    if n_states > state_limit:
        raise SolverLimitError(f"too large for exact solve: {n_states} pattern states")
    patterns = []
    for p in product(*(range(min(c, cap // s) + 1) for s, c in zip(sizes, counts))):
        load = sum(pi * si for pi, si in zip(p, sizes))
        if 0 < load <= cap:
            patterns.append((p, load))

    best: dict[tuple[int, ...], tuple[int, tuple[int, ...] | None]] = {(0,) * d: (0, None)}
    for v in product(*(range(c + 1) for c in counts)):
        if not any(v):
            continue
        top = next(j for j in range(d) if v[j])
        choice = None
        for p, load in patterns:
            if p[top] == 0 or any(pi > vi for pi, vi in zip(p, v)):
                continue
            if any(v[j] > p[j] and load + sizes[j] <= cap for j in range(d)):
                continue
            rest = tuple(vi - pi for vi, pi in zip(v, p))
            cost = best[rest][0] + 1
            if choice is None or cost < choice[0]:
                choice = (cost, p)
        best[v] = choice
    out = []
    v = tuple(counts)
    while any(v):
        p = best[v][1]
        out.append(p)
        v = tuple(vi - pi for vi, pi in zip(v, p))
    return out


def exact_optimal(items: Iterable, item_limit: int = 24, *, state_limit: int = 2_000_000,
                  node_limit: int = 5_000_000) -> OptimalPacking:
    """Minimum number of bins together with a packing that achieves it.

    Inputs with at most three distinct positive sizes go to a pattern-level
    dynamic program (so counts may be large); anything else is solved by
    branch and bound on at most ``item_limit`` items. Raises
    :class:`SolverLimitError` when neither route applies.
    """
    items = _checked(items)
    positive = [it for it in items if it.size > 0]
    zeros = [it for it in items if it.size == 0]
    if not positive:
        return OptimalPacking(1 if zeros else 0, Packing((tuple(zeros),) if zeros else ()), "trivial")
    positive = ffd_order(positive)
    ints, cap = _scale(positive)
    distinct = sorted(set(ints), reverse=True)
    if len(distinct) <= 3:
        counts = [ints.count(s) for s in distinct]
        pools = {s: [it for it, v in zip(positive, ints) if v == s] for s in distinct}
        bins = []
        for p in _pattern_solve(distinct, counts, cap, state_limit):
            b = []
            for s, k in zip(distinct, p):
                b.extend(pools[s][:k])
                del pools[s][:k]
            bins.append(b)
        method = "pattern"
    elif len(positive) <= item_limit:
        bins = [[positive[p] for p in b] for b in _bnb(ints, cap, node_limit)]
        method = "branch-and-bound"
    else:
        raise SolverLimitError(
            f"too large for exact solve: {len(positive)} items with {len(distinct)} distinct sizes "
            f"(limit {item_limit} items, or at most 3 distinct sizes)")
    bins[0].extend(zeros)
    return OptimalPacking(len(bins), Packing(tuple(tuple(b) for b in bins)), method)


def size_lower_bound(items: Iterable) -> int:
    """max(ceil(total size), number of items larger than 1/2)."""
    items = expand(items)
    total = sum((it.size for it in items), Fraction(0))
    large = sum(1 for it in items if it.size > HALF)
    return max(-(-total.numerator // total.denominator), large)


def verify_packing(items: Iterable, packing: Packing) -> tuple[bool, str | None]:
    """Check that ``packing`` covers exactly ``items`` and no bin is overfull."""
    items = expand(items)
    for b, load in enumerate(packing.loads):
        if not packing.bins[b]:
            return False, f"bin {b} is empty"
        if load > 1:
            return False, f"bin {b} overfull by {fmt(load - 1)}"
    want = Counter((it.index, it.size) for it in items)
    got = Counter((it.index, it.size) for b in packing.bins for it in b)
    if want != got:
        return False, "coverage mismatch"
    return True, None
