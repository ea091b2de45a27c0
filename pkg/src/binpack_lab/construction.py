"""Worst-case clustered instances for the price of clustering.

The construction uses item families around 1/2, 1/3, 1/6 and just above 1/7,
1/43 and 1/1807. A globally optimal packing uses ``N`` bins: ``N/(k-1)`` bins
pair a positive and a negative type-2 item, every other bin holds one type-2
item plus at most one ``(3, i)`` item and its partner. Clusters are built so
that each needs ``k`` bins on its own.

Perturbations are multiples of a base unit ``nu``. Wherever the textbook
construction uses ``3^(N+3i) mu`` we use ``K 3^(3i) nu`` with ``K`` the least
power of three above ``10 N``; this keeps every required ordering while the
rationals stay small. Nothing is taken on trust: :func:`verify_construction`
re-derives every inequality from the generated sizes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .clustering import ClusteredInstance, cluster_key
from .packing import HALF, ItemClass, exact_optimal, expand

F = Fraction
FAMILIES = frozenset({2, 3, 6, 7, 43, 1807})
SMALL_FAMILIES = (7, 43, 1807)


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    N: int
    M: int = 1
    k: int = 3
    families: frozenset = frozenset({2, 3})
    nu: Fraction | None = None  # overrides the default base perturbation
    leftover: str = "merge"  # or "spread"; see generate_construction

    def __post_init__(self):
        object.__setattr__(self, "families", frozenset(self.families))


@dataclass
class Certificate:
    """Global packing as ``(pattern, multiplicity)`` pairs; a pattern maps labels to per-bin counts."""

    patterns: list[tuple[tuple[tuple[str, int], ...], int]]

    @property
    def bin_count(self) -> int:
        return sum(m for _, m in self.patterns)


@dataclass
class GeneratedConstruction:
    params: GeneratorParams
    instance: ClusteredInstance
    certificate: Certificate
    predicted: dict[str, int]
    large_item_count: int
    nu: Fraction
    merged_cluster: str


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    cluster_opt: dict[str, int] = field(default_factory=dict)
    sum_cluster_opt: int = 0
    global_opt: int = 0

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def ratio(self) -> Fraction:
        return F(self.sum_cluster_opt, self.global_opt)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, detail) for name, passed, detail in self.checks if not passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append((name, bool(passed), detail))


# ---------------------------------------------------------------- counts

def _ratio(k: int) -> Fraction:
    # per-level shrink factor of the (3, i) ladder; 5/9 for k = 3
    return F(10, (5 * k - 9) * (2 * k - 3))


def count_coefficients(k: int, M: int, families) -> dict[str, Fraction]:
    """Every count of the construction as a multiple of ``N``.

    Keys: ``pairs``, ``type2``, ``C3,i`` (family-3 clusters at level ``i``),
    ``C6,i`` (family-6 clusters pairing levels ``i`` and ``i+1``) and ``Ct``
    (clusters of type ``t`` items).
    """
    r = _ratio(k)
    out = {"pairs": F(1, k - 1), "type2": F(k - 2, k - 1)}
    if 3 in families:
        top = (1 - r) * F(k - 2, (k - 1) * (2 * k - 1))
        for i in range(1, M + 1):
            out[f"C3,{i}"] = top * r ** (M - i)
        if 6 in families:
            for i in range(1, M):
                out[f"C6,{i}"] = F(2 * k - 3, 5) * out[f"C3,{i}"]
        for t in SMALL_FAMILIES:
            if t in families:
                out[f"C{t}"] = (2 * k - 3) * out[f"C3,{M}"] / ((k - 1) * (t - 1) + 1)
    return out


def required_modulus(k: int, M: int, families) -> int:
    """Least ``m`` such that every count is an integer exactly when ``m | N``."""
    return lcm(*(c.denominator for c in count_coefficients(k, M, families).values()))


def _check_params(p: GeneratorParams) -> None:
    if p.k < 3:
        raise ConstructionError("k must be at least 3")
    if p.M < 1:
        raise ConstructionError("M must be at least 1")
    if not p.families <= FAMILIES:
        raise ConstructionError(f"unknown families {sorted(p.families - FAMILIES)}")
    if 2 not in p.families:
        raise ConstructionError("family 2 is required: it certifies the global optimum")
    if p.families & {6, 7, 43, 1807} and 3 not in p.families:
        raise ConstructionError("families 6, 7, 43 and 1807 are packed next to family 3 and need it")
    m = required_modulus(p.k, p.M, p.families)
    if p.N <= 0 or p.N % m:
        fams = "{" + ",".join(str(f) for f in sorted(p.families)) + "}"
        raise ConstructionError(f"N must be divisible by {m} for families {fams}, M={p.M}")
    if p.N // (p.k - 1) < 2:
        raise ConstructionError("N too small: need at least two type-2 pairs")
    if p.leftover not in ("merge", "spread"):
        raise ConstructionError(f"unknown leftover placement {p.leftover!r}")
    if p.leftover == "spread":
        c3 = count_coefficients(p.k, p.M, p.families).get(f"C3,{p.M}", 0) * p.N
        if c3 < p.k - 1:
            raise ConstructionError(f"leftover=spread needs at least {p.k - 1} top-level family-3 clusters")


def default_nu(p: GeneratorParams) -> Fraction:
    K = ladder_base(p.N)
    slack = 1 - HALF - F(1, 3) - sum((F(1, t) for t in SMALL_FAMILIES if t in p.families), F(0))
    return F(1, 100 * K * 3 ** (3 * p.M + 3) * -(-1 // slack))


def ladder_base(N: int) -> int:
    K = 1
    while K <= 10 * N:
        K *= 3
    return K


def item_sizes(p: GeneratorParams, nu: Fraction) -> dict[str, Fraction]:
    """Label -> size for every item type the parameters enable."""
    N, M, k = p.N, p.M, p.k
    K = ladder_base(N)
    P = N // (k - 1)
    sizes = {"type2": HALF + P * nu}
    for i in range(1, P + 1):
        sizes[f"pos(2,{i})"] = HALF + i * nu
        sizes[f"neg(2,{i})"] = HALF - i * nu
    if 3 in p.families:
        for i in range(1, M + 1):
            sizes[f"pos(3,{i})"] = F(1, 3) + K * 3 ** (3 * i) * nu
            sizes[f"neg(3,{i})"] = F(1, 3) - K * 3 ** (3 * i - 1) * nu
    if 6 in p.families:
        for i in range(2, M + 1):
            sizes[f"pos(6,{i})"] = F(1, 6) + K * 3 ** (3 * i - 1) * nu - N * nu
        for i in range(1, M):
            sizes[f"neg(6,{i})"] = F(1, 6) - K * 3 ** (3 * i) * nu - N * nu
    for t in SMALL_FAMILIES:
        if t in p.families:
            sizes[f"type{t}"] = F(1, t) + nu
    return sizes


# ---------------------------------------------------------------- generation

def generate_construction(p: GeneratorParams) -> GeneratedConstruction:
    """Build the clustered instance, the global certificate and predicted cluster costs.

    The family-2 chain leaves ``k - 2`` type-2 items, ``pos(2,1)`` and
    ``neg(2,P)`` over. ``leftover="merge"`` adds them all to cluster ``f2-1``,
    whose optimum becomes ``2k - 2``. ``leftover="spread"`` gives each of the
    ``k - 1`` large leftovers to its own top-level family-3 cluster (it shares
    a bin with a ``neg(3,M)`` item) and ``neg(2,P)`` to ``f2-1`` (it shares a
    bin with ``neg(2,1)``), so every cluster keeps optimum ``k``.
    """
    _check_params(p)
    N, M, k = p.N, p.M, p.k
    nu = p.nu if p.nu is not None else default_nu(p)
    sizes = item_sizes(p, nu)
    coef = {key: int(c * N) for key, c in count_coefficients(k, M, p.families).items()}
    P = coef["pairs"]
    clusters: dict[str, list[ItemClass]] = {}
    predicted: dict[str, int] = {}

    def cls(label: str, count: int, cid: str) -> ItemClass:
        return ItemClass(sizes[label], count, cid, label)

    # family 2: k-2 type-2 items with pos(2,i+1) and neg(2,i); the three leftovers join cluster 1
    for i in range(1, P):
        cid = f"f2-{i}"
        clusters[cid] = [cls("type2", k - 2, cid), cls(f"pos(2,{i + 1})", 1, cid), cls(f"neg(2,{i})", 1, cid)]
        predicted[cid] = k
    merged = "f2-1"
    if p.leftover == "merge":
        clusters[merged][0] = cls("type2", 2 * (k - 2), merged)
        clusters[merged] += [cls("pos(2,1)", 1, merged), cls(f"neg(2,{P})", 1, merged)]
        # every item but the two negatives is above 1/2, and each negative pairs with one of them
        predicted[merged] = 2 * (k - 2) + 2
    else:
        clusters[merged].append(cls(f"neg(2,{P})", 1, merged))

    if 3 in p.families:
        for i in range(1, M + 1):
            for j in range(coef[f"C3,{i}"]):
                cid = f"f3-{i}-{j + 1}"
                clusters[cid] = [cls(f"pos(3,{i})", 2 * k - 3, cid), cls(f"neg(3,{i})", 2, cid)]
                predicted[cid] = k
        if p.leftover == "spread":
            extras = ["type2"] * (k - 2) + ["pos(2,1)"]
            for j, label in enumerate(extras):
                cid = f"f3-{M}-{j + 1}"
                clusters[cid].append(cls(label, 1, cid))
    if 6 in p.families:
        for i in range(1, M):
            for j in range(coef[f"C6,{i}"]):
                cid = f"f6-{i}-{j + 1}"
                clusters[cid] = [cls(f"pos(6,{i + 1})", 5 * k - 9, cid), cls(f"neg(6,{i})", 5, cid)]
                predicted[cid] = k
    for t in SMALL_FAMILIES:
        if t in p.families:
            per = (k - 1) * (t - 1) + 1
            for j in range(coef[f"C{t}"]):
                cid = f"f{t}-{j + 1}"
                clusters[cid] = [cls(f"type{t}", per, cid)]
                predicted[cid] = k

    certificate = _certificate(p, coef)
    inst = ClusteredInstance(clusters, k)
    large = sum(c.count for c in inst.all_classes() if c.size > HALF)
    return GeneratedConstruction(p, inst, certificate, predicted, large, nu,
                                 merged if p.leftover == "merge" else "")


def _certificate(p: GeneratorParams, coef: dict[str, int]) -> Certificate:
    M, k = p.M, p.k
    P = coef["pairs"]
    pats: list[tuple[tuple[tuple[str, int], ...], int]] = []
    for i in range(1, P + 1):
        pats.append(((("pos(2,%d)" % i, 1), ("neg(2,%d)" % i, 1)), 1))
    used = 0
    if 3 in p.families:
        for i in range(1, M + 1):
            c3 = coef[f"C3,{i}"]
            n_pos, n_neg = (2 * k - 3) * c3, 2 * c3
            pos = [("type2", 1), (f"pos(3,{i})", 1)]
            if i == M:
                pos += [(f"type{t}", 1) for t in SMALL_FAMILIES if t in p.families]
            elif 6 in p.families:
                pos.append((f"neg(6,{i})", 1))
            neg = [("type2", 1), (f"neg(3,{i})", 1)]
            if i > 1 and 6 in p.families:
                neg.append((f"pos(6,{i})", 1))
            pats.append((tuple(pos), n_pos))
            pats.append((tuple(neg), n_neg))
            used += n_pos + n_neg
    rest = coef["type2"] - used
    if rest < 0:
        raise ConstructionError("family-3 items outnumber the type-2 bins")
    if rest:
        pats.append(((("type2", 1),), rest))
    return Certificate(pats)


# ---------------------------------------------------------------- verification

def _labelled_sizes(inst: ClusteredInstance, report: VerificationReport) -> dict[str, Fraction]:
    sizes: dict[str, Fraction] = {}
    clash = []
    for c in inst.all_classes():
        if sizes.setdefault(c.label, c.size) != c.size:
            clash.append(c.label)
    report.add("labels have one size each", not clash, ", ".join(sorted(set(clash))[:5]))
    return sizes


def _inequalities(sizes: dict[str, Fraction], k: int) -> list[tuple[str, bool]]:
    """The strict and weak inequalities the cluster costs rely on, one entry per family and index."""
    out = []
    s = sizes.get
    bad = [lab for lab, v in sizes.items() if not 0 <= v <= 1]
    out.append(("all sizes in [0,1]", not bad))
    P = sum(1 for lab in sizes if lab.startswith("pos(2,"))
    t2 = sizes["type2"]
    out.append(("type2 > 1/2", t2 > HALF))
    ok = all(s(f"pos(2,{i + 1})") + s(f"neg(2,{i})") > 1 for i in range(1, P))
    out.append(("pos(2,i+1) + neg(2,i) > 1", ok))
    ok = all(t2 + s(f"neg(2,{i})") > 1 for i in range(1, P))
    out.append(("type2 + neg(2,i) > 1 for i < P", ok))
    ok = all(F(1, 3) < s(f"neg(2,{i})") < HALF < s(f"pos(2,{i})") for i in range(1, P + 1))
    out.append(("neg(2,i) in (1/3,1/2), pos(2,i) > 1/2", ok))
    i = 1
    while f"pos(3,{i})" in sizes:
        a, b = sizes[f"pos(3,{i})"], sizes[f"neg(3,{i})"]
        out.append((f"pos(3,{i}) + 2 neg(3,{i}) > 1", a + 2 * b > 1))
        out.append((f"2 pos(3,{i}) <= 1", 2 * a <= 1))
        out.append((f"neg(3,{i}) in (1/4,1/3), pos(3,{i}) in (1/3,1/2]", F(1, 4) < b < F(1, 3) < a <= HALF))
        i += 1
    i = 1
    while f"neg(6,{i})" in sizes:
        a, b = sizes[f"pos(6,{i + 1})"], sizes[f"neg(6,{i})"]
        out.append((f"pos(6,{i + 1}) + 5 neg(6,{i}) > 1", a + 5 * b > 1))
        out.append((f"5 pos(6,{i + 1}) <= 1", 5 * a <= 1))
        out.append((f"neg(6,{i}) in (1/7,1/6), pos(6,{i + 1}) in (1/6,1/5]", F(1, 7) < b < F(1, 6) < a <= F(1, 5)))
        i += 1
    for t in SMALL_FAMILIES:
        v = s(f"type{t}")
        if v is not None:
            out.append((f"{t - 1} type{t} items fit in a bin", (t - 1) * v <= 1))
            out.append((f"{t} type{t} items exceed a bin", t * v > 1))
    return out


def verify_construction(c: GeneratedConstruction, *, solve_clusters: bool = True) -> VerificationReport:
    """Re-check a construction from its item sizes alone.

    (a) the certificate uses exactly the generated items and every pattern
    fits; (b) the number of items above 1/2 equals the certificate's bin
    count, which pins the global optimum; (c) each cluster's exact optimum
    equals its predicted cost; (d) the inequalities the costs rely on.
    """
    rep = VerificationReport()
    inst = c.instance
    sizes = _labelled_sizes(inst, rep)

    have = Counter()
    for cl in inst.all_classes():
        have[cl.label] += cl.count
    used = Counter()
    over = []
    for pattern, mult in c.certificate.patterns:
        if mult < 0:
            over.append(f"negative multiplicity {mult}")
        load = F(0)
        for label, cnt in pattern:
            if label not in sizes:
                over.append(f"unknown label {label}")
                continue
            used[label] += cnt * mult
            load += cnt * sizes[label]
        if load > 1:
            over.append(f"pattern {dict(pattern)} overfull by {load - 1}")
    diff = sorted(lab for lab in set(have) | set(used) if have[lab] != used[lab])
    rep.add("certificate conserves items", not diff, ", ".join(diff[:5]))
    rep.add("certificate patterns fit", not over, "; ".join(over[:3]))

    rep.add("large items = certificate bins", c.large_item_count == c.certificate.bin_count
            and c.large_item_count == sum(cl.count for cl in inst.all_classes() if cl.size > HALF),
            f"{c.large_item_count} large vs {c.certificate.bin_count} bins")
    rep.global_opt = c.certificate.bin_count

    for name, passed in _inequalities(sizes, c.params.k):
        rep.add(name, passed)

    if solve_clusters:
        cache: dict[tuple, int] = {}
        wrong = []
        for cid, classes in inst.clusters.items():
            key = cluster_key(classes)
            if key not in cache:
                cache[key] = exact_optimal(expand(classes)).bin_count
            rep.cluster_opt[cid] = cache[key]
            if cache[key] != c.predicted[cid]:
                wrong.append(f"{cid}: OPT {cache[key]} != predicted {c.predicted[cid]}")
        below_k = [cid for cid, v in rep.cluster_opt.items() if v < inst.k]
        rep.add("cluster optima match prediction", not wrong, "; ".join(wrong[:5]))
        rep.add(f"every cluster needs at least k={inst.k} bins", not below_k, ", ".join(below_k[:5]))
        rep.sum_cluster_opt = sum(rep.cluster_opt.values())
    return rep


# ---------------------------------------------------------------- closed forms

def k3_limit() -> Fraction:
    """Limit of the k = 3 lower-bound ratio as N and M grow."""
    return F(19, 10) + F(2, 18065) + F(2, 425) + F(2, 65)


def _lb_expression(k: int) -> Fraction:
    k = F(k)
    base = (k - 1) * (2 * k - 1) * (5 * k - 9)
    small = F(1) / (6 * k - 5) + F(1) / (42 * k - 41) + F(1) / (1806 * k - 1805)
    return (k / (k - 1) + k * (k - 2) / ((k - 1) * (2 * k - 1)) + 2 * k * (k - 2) / base
            + k * (10 * k ** 3 - 53 * k ** 2 + 83 * k - 34) * small / base)


def lb_formula(k: int) -> Fraction:
    """Asymptotic lower bound on the price of clustering for clusters of cost at least ``k >= 4``."""
    if k < 4:
        raise ValueError("lb_formula needs k >= 4; use k3_limit() for k = 3")
    return _lb_expression(k)


def k3_finite_ratio(N: int, M: int, families=FAMILIES, merged_extra: int = 0) -> Fraction:
    """The k = 3 cost total divided by ``N`` at finite ``N`` and ``M``.

    Terms of disabled families are dropped; ``merged_extra`` is the merged
    family-2 cluster's optimum minus 3.
    """
    f = set(families)
    N = F(N)
    total = F(3, 2) - 3 / N + merged_extra / N
    if 1807 in f:
        total += F(2, 18065)
    if 43 in f:
        total += F(2, 425)
    if 7 in f:
        total += F(2, 65)
    if 3 in f:
        total += F(3, 10) * (1 - F(5, 9) ** M)
    if 6 in f:
        total += F(1, 10) * (1 - F(5, 9) ** (M - 1))
    return total


def limit_ratio(k: int, families=FAMILIES) -> Fraction:
    """Limit of the ratio for the enabled families (N, M to infinity)."""
    f = set(families)
    k = F(k)
    base = (k - 1) * (2 * k - 1) * (5 * k - 9)
    total = k / (k - 1)
    if 3 in f:
        total += k * (k - 2) / ((k - 1) * (2 * k - 1))
    if 6 in f:
        total += 2 * k * (k - 2) / base
    small = sum((F(1) / ((k - 1) * (t - 1) + 1) for t in SMALL_FAMILIES if t in f), F(0))
    return total + k * (10 * k ** 3 - 53 * k ** 2 + 83 * k - 34) * small / base


def predicted_sum_opt(p: GeneratorParams, merged_cost: int | None = None) -> int:
    """Sum of cluster optima implied by the counts, with the merged cluster at ``merged_cost``.

    With ``leftover="spread"`` there is no merged cluster and every cluster costs ``k``.
    """
    k = p.k
    if p.leftover == "spread":
        merged_cost = k
    coef = {key: c * p.N for key, c in count_coefficients(k, p.M, p.families).items()}
    merged = 2 * k - 2 if merged_cost is None else merged_cost
    clusters = coef["pairs"] - 2
    clusters += sum(v for key, v in coef.items() if key.startswith("C"))
    return int(k * clusters + merged)
