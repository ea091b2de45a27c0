from fractions import Fraction as F

import pytest

from binpack_lab.clustering import ClusteredInstance, cluster_optima, price_of_clustering
from binpack_lab.packing import ItemClass, SolverLimitError
from conftest import brute_bin_count


def test_single_full_cluster():
    inst = ClusteredInstance({"a": [ItemClass(F(1), 3)]})
    pr = price_of_clustering(inst)
    assert (pr.sum_cluster_opt, pr.global_opt, pr.ratio, pr.valid) == (3, 3, 1, True)


def test_invalid_clusters_flagged():
    cl = [ItemClass(F(51, 100), 2), ItemClass(F(49, 100), 2)]
    inst = ClusteredInstance({"a": cl, "b": cl})
    pr = price_of_clustering(inst)
    assert pr.per_cluster["a"][0] == 2
    assert not pr.valid and set(pr.invalid_clusters) == {"a", "b"}


def test_price_against_brute_force():
    clusters = {
        "x": [ItemClass(F(3, 5), 3)],
        "y": [ItemClass(F(2, 5), 3)],
        "z": [ItemClass(F(1, 2), 1), ItemClass(F(1, 4), 2)],
    }
    pr = price_of_clustering(ClusteredInstance(clusters, k=1))
    every = [c.size for cl in clusters.values() for c in cl for _ in range(c.count)]
    assert pr.global_opt == brute_bin_count(every)
    assert pr.sum_cluster_opt == sum(
        brute_bin_count([c.size for c in cl for _ in range(c.count)]) for cl in clusters.values())
    assert pr.ratio >= 1


def test_ffd_upper_mode():
    inst = ClusteredInstance({"a": [ItemClass(F(3, 5), 2)], "b": [ItemClass(F(2, 5), 2)]}, k=1)
    pr = price_of_clustering(inst, "ffd-upper")
    assert pr.global_opt_method == "size-lower-bound"
    assert (pr.sum_cluster_opt, pr.global_opt) == (3, 2)


def test_solver_limit_without_certificate():
    sizes = [ItemClass(F(1, 3) + F(i, 10**4), 1, "a") for i in range(30)]
    inst = ClusteredInstance({f"c{i}": [c] for i, c in enumerate(sizes)}, k=1)
    with pytest.raises(SolverLimitError):
        price_of_clustering(inst)


def test_empty_cluster_rejected():
    with pytest.raises(ValueError):
        ClusteredInstance({"a": []})


def test_cluster_optima_memoised_consistent():
    cl = [ItemClass(F(1, 2) + F(1, 100), 3)]
    opts = cluster_optima(ClusteredInstance({"a": cl, "b": list(cl)}))
    assert opts == {"a": (3, 3), "b": (3, 3)}
