"""Edge data distribution: cloud-rooted, hop-limited data placement plans."""

from .baselines import greedy_connectivity, random_strategy
from .exact import BudgetExceeded, brute_force_steiner, exact_solve
from .graph import (
    CLOUD,
    EddInstance,
    EddSolution,
    Graph,
    InstanceError,
    MetricClosure,
    Violation,
    all_pairs_bfs,
    metric_closure,
    mst,
    validate_solution,
)
from .nste import DirectedTree, edd_nste, prune, root_at_cloud, slice_and_tune
from .steiner import (
    SaveMatrix,
    SteinerTree,
    Triple,
    centroid,
    contract_triple,
    enumerate_triples,
    find_save,
    steiner_approx,
)

__all__ = [
    "CLOUD", "BudgetExceeded", "DirectedTree", "EddInstance", "EddSolution",
    "Graph", "InstanceError", "MetricClosure", "SaveMatrix", "SteinerTree",
    "Triple", "Violation", "all_pairs_bfs", "brute_force_steiner", "centroid",
    "contract_triple", "edd_nste", "enumerate_triples", "exact_solve",
    "find_save", "greedy_connectivity", "metric_closure", "mst", "prune",
    "random_strategy", "root_at_cloud", "slice_and_tune", "steiner_approx",
    "validate_solution",
]
