"""Clustered instances and the price of clustering."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .packing import (
    ItemClass, SolverLimitError, exact_optimal, expand, ffd, size_lower_bound,
)


@dataclass
class ClusteredInstance:
    clusters: dict[str, list[ItemClass]]
    k: int = 3

    def __post_init__(self):
        for cid, classes in self.clusters.items():
            if not classes:
                raise ValueError(f"cluster {cid!r} is empty")

    def all_classes(self) -> list[ItemClass]:
        return [c for classes in self.clusters.values() for c in classes]

    def item_count(self) -> int:
        return sum(c.count for c in self.all_classes())


def cluster_key(classes) -> tuple:
    """Canonical size multiset; clusters with equal keys have equal optima."""
    sizes: dict[Fraction, int] = {}
    for c in classes:
        sizes[c.size] = sizes.get(c.size, 0) + c.count
    return tuple(sorted(sizes.items()))


@dataclass
class PriceReport:
    sum_cluster_opt: int
    global_opt: int
    global_opt_method: str
    per_cluster: dict[str, tuple[int, int]]  # cluster -> (OPT_i, A_i)
    k: int
    invalid_clusters: list[str] = field(default_factory=list)
    mode: str = "exact"

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.sum_cluster_opt, self.global_opt)

    @property
    def valid(self) -> bool:
        return not self.invalid_clusters


def cluster_optima(inst: ClusteredInstance, item_limit: int = 24) -> dict[str, tuple[int, int]]:
    """Exact optimum and FFD bin count per cluster, memoised by size multiset."""
    cache: dict[tuple, tuple[int, int]] = {}
    out = {}
    for cid, classes in inst.clusters.items():
        key = cluster_key(classes)
        if key not in cache:
            items = expand(classes)
            cache[key] = (exact_optimal(items, item_limit).bin_count, ffd(items).bin_count)
        out[cid] = cache[key]
    return out


def price_of_clustering(inst: ClusteredInstance, mode: str = "exact", *, certificate=None,
                        item_limit: int = 24) -> PriceReport:
    """Sum of per-cluster optima over the global optimum.

    ``mode="exact"`` solves every cluster exactly. The global optimum is taken
    from the exact solver when it fits; otherwise a certificate (anything with
    a ``bin_count`` attribute, typically from :mod:`binpack_lab.construction`)
    is accepted when its bin count matches the large-item lower bound.
    ``mode="ffd-upper"`` reports ``sum A_i / ceil(total size)`` as an estimate
    that only bounds the true price from above.
    """
    if mode not in ("exact", "ffd-upper"):
        raise ValueError(f"unknown mode {mode!r}")
    all_items = expand(inst.all_classes())
    if mode == "ffd-upper":
        per = {cid: (ffd(expand(cl)).bin_count,) * 2 for cid, cl in inst.clusters.items()}
        total = sum((it.size for it in all_items), Fraction(0))
        lb = max(1, -(-total.numerator // total.denominator))
        return PriceReport(sum(a for a, _ in per.values()), lb, "size-lower-bound", per, inst.k,
                           mode="ffd-upper")
    per = cluster_optima(inst, item_limit)
    invalid = [cid for cid, (opt, _) in per.items() if opt < inst.k]
    lb = size_lower_bound(all_items)
    if certificate is not None and certificate.bin_count == lb:
        gopt, method = lb, "certificate+large-item-bound"
    else:
        try:
            gopt, method = exact_optimal(all_items, item_limit).bin_count, "exact-solver"
        except SolverLimitError:
            if certificate is not None:
                raise SolverLimitError(
                    f"certificate uses {certificate.bin_count} bins but the lower bound is {lb}; "
                    "global optimum not certified") from None
            raise
    return PriceReport(sum(o for o, _ in per.values()), gopt, method, per, inst.k, invalid)
