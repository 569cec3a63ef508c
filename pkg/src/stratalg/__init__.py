"""Exact-arithmetic toolkit for layered (stratified) vector operations.

Bilinear and affine products on K^n — K the rationals or a prime field
— verified against the four layering axioms, partitioned into strata by
declared ratio rules or commutant discovery, traced through orbit and
transition-graph dynamics, and exercised by a toy key-agreement demo.
All arithmetic is exact; randomized checks are seeded and reproducible.
"""

from .field import Field, FieldElement, format_scalar
from .poly import Polynomial
from .algebra import (
    AffineOperation,
    BUILTIN_NAMES,
    BracketTree,
    MatrixFormulation,
    ModelSpec,
    StructureTensor,
    associativity_check,
    associator,
    builtin_model,
    commutator,
    evaluate_bracketing,
    format_assoc_report,
    left_chain,
    lps,
    make_params,
    matrix_to_tensor,
    model_from_json,
    model_to_json,
    multiply,
    symbolic_components,
    symbolic_model,
    vector,
)
from .strata import (
    StratumPartition,
    discover_strata,
    enumerate_space,
    is_stratum_stable,
    partitions_agree,
    ratio_partition,
    ratio_stratum_of,
    stratified_depth,
    tails_proportional,
    verify_closure,
)
from .axioms import (
    SamplingPlan,
    axiom_report,
    case_analysis,
    check_sa1,
    check_sa2,
    check_sa3,
    check_sa4,
    classify,
    identity_suite_json,
    verify_identity_suite,
)
from .dynamics import (
    Trajectory,
    TransitionGraph,
    chain_path,
    orbit,
    permutation_invariance,
    return_edge_stats,
    self_loop_report,
    transition_graph,
)
from .kex import (
    Party,
    SessionTranscript,
    brute_force_recover,
    eavesdropper_view,
    init_session,
    run_exchange,
    seeded_session,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
