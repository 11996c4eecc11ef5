"""Deterministic few-qubit simulator for single-EPR-pair teleportation of
bipartite states, with conditional-correction solving and Werner-channel
noise analytics."""

from .states_gates import (
    AncillaPrep,
    BellLabel,
    GeneralizedInput,
    InputState,
    canonicalize_input,
    gate,
    make_bell,
    make_input_state,
    make_werner,
    make_werner_variant,
)
from .tensor_core import (
    DensityMatrix,
    StateVector,
    fidelity_pure,
    hermitian_eigenvalues,
    kron,
    negativity,
    partial_trace,
    partial_transpose,
    realignment_singular_values,
)
from .protocol import (
    BranchOutcome,
    BranchResult,
    ChannelSpec,
    ProtocolConfig,
    branch_index,
    compensated_gate,
    default_config,
    outcome_from_index,
    run_mixed,
    run_pure,
    run_with_alternate_channel,
)
from .solver import (
    BranchClass,
    CorrectionSet,
    SU2Params,
    corrections_for_channel,
    corrections_for_cnot,
    find_factorized,
    solve_correction,
    solved_set,
    template_matrix,
    verify_correction_set,
    verify_relevant_line_equalities,
)
from .session import SessionLog, decode_message, encode_message, run_session

__all__ = [name for name in dir() if not name.startswith("_")]
