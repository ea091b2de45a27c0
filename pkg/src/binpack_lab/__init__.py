"""Exact-arithmetic laboratory for bin packing with clustering and with delays."""
from .clustering import ClusteredInstance, PriceReport, price_of_clustering
from .construction import (
    GeneratedConstruction, GeneratorParams, generate_construction, k3_limit, lb_formula,
    verify_construction,
)
from .delays import (
    DelayFunction, OfflineSolution, SimulationTrace, TimedItem, check_bound, compute_rho,
    offline_optimal, simulate,
)
from .packing import (
    FFDTrace, InstanceError, Item, ItemClass, OptimalPacking, Packing, SolverLimitError,
    exact_optimal, ffd, first_fit, validate_instance, verify_packing,
)
from .weights import (
    HarmonicSequence, WeightFunction, bin_weight_cap_check, cluster_weight_dominates_ffd,
    eval_weight, ffd_v_bound_check, make_builtin, pi_sequence,
)

__all__ = [
    "ClusteredInstance",
    "DelayFunction",
    "FFDTrace",
    "GeneratedConstruction",
    "GeneratorParams",
    "HarmonicSequence",
    "InstanceError",
    "Item",
    "ItemClass",
    "OfflineSolution",
    "OptimalPacking",
    "Packing",
    "PriceReport",
    "SimulationTrace",
    "SolverLimitError",
    "TimedItem",
    "WeightFunction",
    "bin_weight_cap_check",
    "check_bound",
    "cluster_weight_dominates_ffd",
    "compute_rho",
    "eval_weight",
    "exact_optimal",
    "ffd",
    "ffd_v_bound_check",
    "first_fit",
    "generate_construction",
    "k3_limit",
    "lb_formula",
    "make_builtin",
    "offline_optimal",
    "pi_sequence",
    "price_of_clustering",
    "simulate",
    "validate_instance",
    "verify_construction",
    "verify_packing",
]

__version__ = "0.1.0"
