"""Exact data reduction (kernelization) for maximum matching.

Reduce a graph to a small kernel, solve the kernel with any exact solver,
and lift the kernel matching back through the recorded trace.
"""

from .graph import (
    Graph, GraphError, Matching, ValidationError, VertexError, WeightedGraph, connected_components,
    export_perfect_matching_instance, feedback_edge_number, merge_vertices, remove_vertex,
)
from .io import ParseError, parse_edge_list, read_graph, write_dimacs, write_edge_list
from .trace import ReductionTrace, TraceError, dump_trace, lift_matching, load_trace, replay_trace
from .unweighted import (
    KernelBoundError, apply_degree_rules_exhaustive, check_fes_kernel_bound, lift_matching_unweighted,
)
from .crown import (
    BipartiteDouble, Crown, LPSolution, RelaxedCrown, apply_crown, apply_lp_rule, apply_relaxed_crown,
    build_bipartite_double, crown_kernelize, find_crown_bruteforce, find_relaxed_crown_bruteforce,
    kernelize_unweighted, konig_vertex_cover, lift_matching_crown, lp_solution_from_cover,
    maximal_persistency,
)
from .weighted import (
    CycleSpec, PathSpec, apply_deg1_weighted_exhaustive, apply_max_path, apply_pending_cycle,
    apply_zero_rules, check_weighted_kernel_bound, lift_matching_weighted, mwm_on_cycle, mwm_on_path,
    solve_isolated_paths_cycles, weighted_kernel_pipeline,
)
from .solvers import (
    BipartiteGraph, Digraph, OracleGuardError, blossom_mcm, brute_force_mcm, brute_force_mwm,
    brute_force_vc, hopcroft_karp, kosaraju_scc,
)

__version__ = "0.1.0"
