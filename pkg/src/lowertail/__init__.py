"""Lower-tail conditioned random graphs at desk scale.

Core objects: Graph and the copy hypergraph of H inside K_n; relative-entropy
primitives; the entropic variational problem and its sparse limit; exact and
MCMC conditional sampling; the conditional-correlation energy; cut norms; and
experiment runners emitting self-describing report files.
"""

from .graphs import Graph, disjoint_union, slot_count, slot_index, slot_pair, two_density
from .copies import (
    CopyHypergraph,
    ResourceBudgetError,
    copy_count_in_complete,
    enumerate_copies,
    expected_count,
    injective_density,
)
from .entropy import EdgeWeights, h, h_total, i_p_scalar, i_p_total, i_p_vec
from .variational import (
    SolverConfig,
    SolverConvergenceError,
    VariationalProblem,
    VariationalSolution,
    eta_threshold,
    solve_phi,
    stability_probe,
)
from .sampler import (
    ChainConfig,
    ExactConditional,
    LowerTailEvent,
    conditional_marginals,
    conditioned_marginal_vector_qW,
    run_chain,
    run_chains,
)
from .increment import EnergyReport, correlation_D, cs_bound_check, energy, greedy_increment
from .metrics import (
    cut_norm_exact,
    cut_norm_heuristic,
    deviation_matrix,
    spectral_cut_bound,
    weights_to_matrix,
)
from .reports import Report, read_report

__version__ = "0.1.0"
