"""Balanced min-max clustering of weighted similarity graphs.

Clusters a connected similarity graph (weights in (0, 1)) so that the
worst ratio of heaviest outgoing edge to lightest internal spanning-tree
edge is as small as possible. The optimum is found exactly on the
maximum spanning tree with a bottom-up dynamic program, for a fixed
cluster count or with the count left free. Brute-force oracles make the
solver and its structural guarantees directly testable.
"""

from .anyk import solve_any_k
from .dp import (
    DPCell,
    DPContext,
    DPTable,
    Provenance,
    SolveResult,
    add_child_tree,
    backtrack,
    build_root_table,
    leaf_table,
    pair_less,
    solve_fixed_k,
    up_to_parent,
)
from .errors import (
    Asymmetric,
    BalclustError,
    BudgetExceeded,
    ClusterNotConnectedInTree,
    CorruptProvenance,
    DimensionMismatch,
    Disconnected,
    DisconnectedCluster,
    DuplicateEdge,
    InfeasibleK,
    InputError,
    NotAPartition,
    NotATree,
    NotSquare,
    ParseError,
    SelfLoop,
    TooSmall,
    WeightOutOfRange,
)
from .graph import (
    Cluster,
    Clustering,
    WeightedGraph,
    build_graph,
    make_clustering,
    max_out,
    rescale_weights,
)
from .measures import evaluate_on_edges, phi_cluster, phi_clustering, phi_restricted
from .mst import RootedTree, maximum_spanning_tree, root_tree, tree_from_graph, verify_mst
from .oracle import (
    EnumerationBudget,
    OracleTable,
    brute_force_graph,
    brute_force_table,
    brute_force_tree,
    default_budget,
    enumerate_encodings,
    lightest_cut_clustering,
    subtree_nodes,
)
from .ratio import Ratio, cross_less, ratio_max

__version__ = "0.1.0"

__all__ = [
    "Asymmetric",
    "BalclustError",
    "BudgetExceeded",
    "Cluster",
    "ClusterNotConnectedInTree",
    "Clustering",
    "CorruptProvenance",
    "DPCell",
    "DPContext",
    "DPTable",
    "DimensionMismatch",
    "Disconnected",
    "DisconnectedCluster",
    "DuplicateEdge",
    "EnumerationBudget",
    "InfeasibleK",
    "InputError",
    "NotAPartition",
    "NotATree",
    "NotSquare",
    "OracleTable",
    "ParseError",
    "Provenance",
    "Ratio",
    "RootedTree",
    "SelfLoop",
    "SolveResult",
    "TooSmall",
    "WeightOutOfRange",
    "WeightedGraph",
    "add_child_tree",
    "backtrack",
    "brute_force_graph",
    "brute_force_table",
    "brute_force_tree",
    "build_graph",
    "build_root_table",
    "cross_less",
    "default_budget",
    "enumerate_encodings",
    "evaluate_on_edges",
    "leaf_table",
    "lightest_cut_clustering",
    "make_clustering",
    "max_out",
    "maximum_spanning_tree",
    "pair_less",
    "phi_cluster",
    "phi_clustering",
    "phi_restricted",
    "ratio_max",
    "rescale_weights",
    "root_tree",
    "solve_any_k",
    "solve_fixed_k",
    "subtree_nodes",
    "tree_from_graph",
    "up_to_parent",
    "verify_mst",
]
