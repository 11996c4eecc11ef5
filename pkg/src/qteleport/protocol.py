"""Execution of the 5-qubit teleportation protocol.

Register layout: qubits 1, 2 hold the shared channel, qubits 3, 4 hold the
input to teleport, qubit 5 is Bob's ancilla. Alice measures (1, 3) in the
Bell basis, rotates 4 by a Hadamard and measures it; Bob applies his
two-qubit gate on (2, 5) followed by the conditional correction. The
delivered state lives on qubits (2, 5).

Branch enumeration is the primary execution mode; trajectory sampling lives
in the session module.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor_core as tc
from .solver import CorrectionSet, corrections_for_cnot
from .states_gates import (
    AncillaPrep,
    BellLabel,
    CNOT,
    HADAMARD,
    InputState,
    bell_projector,
    channel_density,
    make_bell,
    make_input_state,
)
from .tensor_core import DensityMatrix, StateVector, embed
from .tolerances import ATOL_SPECTRAL, ZERO_PROBABILITY

NUM_QUBITS = 5
BELL_ORDER = (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, BellLabel.PSI_MINUS)


@dataclass(frozen=True)
class BranchOutcome:
    """One of the eight classical outcomes: Bell result i and qubit-4 bit."""

    bell: BellLabel
    z4: int

    def __post_init__(self):
        if self.z4 not in (0, 1):
            raise ValueError(f"z4 must be 0 or 1, got {self.z4}")


def branch_index(outcome: BranchOutcome) -> int:
    """j = 2 (i - 1) + z4 + 1."""
    return 2 * (outcome.bell.index - 1) + outcome.z4 + 1


def outcome_from_index(j: int) -> BranchOutcome:
    if not 1 <= j <= 8:
        raise ValueError(f"branch index must be 1..8, got {j}")
    return BranchOutcome(BELL_ORDER[(j - 1) // 2], (j - 1) % 2)


ALL_OUTCOMES = tuple(outcome_from_index(j) for j in range(1, 9))


@dataclass(frozen=True)
class ChannelSpec:
    """Quantum channel on qubits (1, 2): a pure Bell state, a Werner mixture,
    or an explicit two-qubit density matrix."""

    kind: str
    label: BellLabel | None = None
    p: float | None = None
    explicit: DensityMatrix | None = None

    @classmethod
    def pure_bell(cls, label: BellLabel = BellLabel.PHI_PLUS) -> "ChannelSpec":
        return cls(kind="pure_bell", label=label)

    @classmethod
    def werner(cls, p: float, label: BellLabel = BellLabel.PHI_PLUS) -> "ChannelSpec":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Werner parameter must be in [0, 1], got {p}")
        return cls(kind="werner", p=p, label=label)

    @classmethod
    def from_matrix(cls, rho: DensityMatrix) -> "ChannelSpec":
        if rho.num_qubits != 2:
            raise ValueError("explicit channel must be a 2-qubit density matrix")
        return cls(kind="explicit", explicit=rho)

    def density(self) -> DensityMatrix:
        from .states_gates import make_werner_variant

        if self.kind == "pure_bell":
            return channel_density(self.label)
        if self.kind == "werner":
            return make_werner_variant(self.p, self.label)
        if self.kind == "explicit":
            return self.explicit
        raise ValueError(f"invalid channel kind {self.kind!r}")


@dataclass(frozen=True)
class ProtocolConfig:
    """Bob's gate, the conditional corrections, and the ancilla preparation."""

    bob_gate: np.ndarray = None
    corrections: CorrectionSet = None
    ancilla: AncillaPrep = AncillaPrep(1.0, 0.0)

    def __post_init__(self):
        gate = CNOT if self.bob_gate is None else np.asarray(self.bob_gate, dtype=complex)
        if not tc.is_unitary(gate, atol=ATOL_SPECTRAL):
            raise ValueError("bob_gate is not unitary within 1e-10")
        object.__setattr__(self, "bob_gate", gate)
        if self.corrections is None:
            object.__setattr__(self, "corrections", corrections_for_cnot())


def default_config() -> ProtocolConfig:
    return ProtocolConfig()


@dataclass(frozen=True)
class ProtocolTrace:
    """Intermediate protocol data kept for auditing a single branch."""

    post_bell: np.ndarray
    pre_correction_25: np.ndarray


@dataclass(frozen=True)
class BranchResult:
    branch: BranchOutcome
    j: int
    probability: float
    output: DensityMatrix | None
    trace: ProtocolTrace | None = None


@dataclass(frozen=True)
class MixedRunResult:
    branches: tuple
    averaged: DensityMatrix


_Z_PROJ = (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex))


def _branch_operators(outcome: BranchOutcome, config: ProtocolConfig):
    """The five register-sized operators of one branch, in application order."""
    j = branch_index(outcome)
    return (
        embed(bell_projector(outcome.bell), (1, 3), NUM_QUBITS),
        embed(config.bob_gate, (2, 5), NUM_QUBITS),
        embed(HADAMARD, (4,), NUM_QUBITS),
        embed(_Z_PROJ[outcome.z4], (4,), NUM_QUBITS),
        embed(config.corrections[j], (2, 5), NUM_QUBITS),
    )


def _initial_vector(input_state: InputState, channel: BellLabel, ancilla: AncillaPrep) -> np.ndarray:
    return tc.kron(
        tc.kron(make_bell(channel).amplitudes, make_input_state(input_state).amplitudes),
        ancilla.vector(),
    )


def _pure_branch(psi0: np.ndarray, outcome: BranchOutcome, config: ProtocolConfig,
                 keep_trace: bool) -> BranchResult:
    p_bell, u_gate, u_h, p_z, u_corr = _branch_operators(outcome, config)
    v = p_bell @ psi0
    post_bell = v.copy() if keep_trace else None
    v = p_z @ (u_h @ (u_gate @ v))
    probability = float(np.vdot(v, v).real)
    if probability < ZERO_PROBABILITY:
        raise ValueError(
            f"branch {branch_index(outcome)} is structurally impossible for this input "
            f"(probability {probability!r} below {ZERO_PROBABILITY})"
        )
    trace = None
    if keep_trace:
        trace = ProtocolTrace(post_bell=post_bell,
                              pre_correction_25=_extract_25(v, outcome))
    v = (u_corr @ v) / np.sqrt(probability)
    state = StateVector(NUM_QUBITS, v)
    output = tc.partial_trace(state.density_matrix(), keep=(2, 5))
    return BranchResult(branch=outcome, j=branch_index(outcome),
                        probability=probability, output=output, trace=trace)


def _extract_25(v: np.ndarray, outcome: BranchOutcome) -> np.ndarray:
    """Pure state of qubits (2, 5) once qubits (1, 3) sit in the measured Bell
    state and qubit 4 in |z4>; normalized."""
    t = v.reshape(2, 2, 2, 2, 2)
    bell = make_bell(outcome.bell).amplitudes.reshape(2, 2)
    z = np.zeros(2, dtype=complex)
    z[outcome.z4] = 1.0
    sub = np.einsum("abcde,ac,d->be", t, bell.conj(), z.conj()).reshape(-1)
    return sub / np.linalg.norm(sub)


def bell_conditional(input_state: InputState, i: int) -> tuple[StateVector, float]:
    """Conditional state of qubits (2, 4) after Alice's Bell measurement on
    (1, 3) over an ideal phi+ channel, with the projection probability.

    i = 1, 2 give alpha|00> +/- beta|11>; i = 3, 4 give beta|01> +/- alpha|10>.
    """
    if not 1 <= i <= 4:
        raise ValueError(f"Bell outcome index must be 1..4, got {i}")
    psi = tc.kron(make_bell(BellLabel.PHI_PLUS).amplitudes,
                  make_input_state(input_state).amplitudes).reshape(2, 2, 2, 2)
    bell = make_bell(BELL_ORDER[i - 1]).amplitudes.reshape(2, 2)
    sub = np.einsum("abcd,ac->bd", psi, bell.conj()).reshape(-1)
    probability = float(np.vdot(sub, sub).real)
    return StateVector(2, sub / np.sqrt(probability)), probability


def run_pure(input_state: InputState, config: ProtocolConfig | None = None,
             forced: BranchOutcome | None = None,
             channel: BellLabel = BellLabel.PHI_PLUS,
             keep_trace: bool = False):
    """Run the protocol on a pure Bell channel.

    With ``forced`` given, returns the BranchResult of that branch (error if
    the branch is structurally impossible); with ``forced=None``, returns the
    deterministic enumeration of all eight branches.
    """
    config = config or default_config()
    psi0 = _initial_vector(input_state, channel, config.ancilla)
    if forced is not None:
        return _pure_branch(psi0, forced, config, keep_trace)
    return tuple(_pure_branch(psi0, outcome, config, keep_trace) for outcome in ALL_OUTCOMES)


def run_mixed(input_state: InputState, channel: ChannelSpec,
              config: ProtocolConfig | None = None) -> MixedRunResult:
    """Deterministic enumeration of all 8 branches on the full 32x32 density
    matrix; the averaged output is the probability-weighted branch mixture."""
    config = config or default_config()
    rho_c = channel.density().matrix
    input_dm = make_input_state(input_state).density_matrix().matrix
    anc = config.ancilla.vector()
    rho = tc.kron(tc.kron(rho_c, input_dm), np.outer(anc, anc.conj()))
    branches = []
    accumulated = np.zeros((4, 4), dtype=complex)
    for outcome in ALL_OUTCOMES:
        p_bell, u_gate, u_h, p_z, u_corr = _branch_operators(outcome, config)
        e = u_corr @ p_z @ u_h @ u_gate @ p_bell
        branch_rho = e @ rho @ e.conj().T
        probability = float(branch_rho.trace().real)
        reduced = _partial_trace_raw(branch_rho)
        accumulated += reduced
        if probability < ZERO_PROBABILITY:
            output = None
        else:
            output = DensityMatrix(2, reduced / probability)
        branches.append(BranchResult(branch=outcome, j=branch_index(outcome),
                                     probability=probability, output=output))
    return MixedRunResult(branches=tuple(branches), averaged=DensityMatrix(2, accumulated))


def _partial_trace_raw(rho32: np.ndarray) -> np.ndarray:
    """Unnormalized reduction of a 32x32 register matrix onto qubits (2, 5).

    Axes after reshape: rows q1..q5, then columns q1..q5; qubits 1, 3, 4 are
    traced out.
    """
    t = rho32.reshape([2] * 10)
    return np.einsum("abcdeafcdj->befj", t).reshape(4, 4)


def run_with_alternate_channel(input_state: InputState, label: BellLabel,
                               config: ProtocolConfig) -> tuple:
    """All eight branches over a pure alternate Bell channel; ``config`` must
    carry corrections derived for that channel."""
    if config is None or config.corrections is None:
        raise ValueError("config with channel-specific corrections is required")
    return run_pure(input_state, config, forced=None, channel=label)


def compensated_gate(ancilla: AncillaPrep, base_gate: np.ndarray | None = None) -> np.ndarray:
    """C (I x V5^dagger) where V5 maps |0> to the ancilla preparation; using
    this gate with ancilla a|0> + b|1> restores perfect teleportation."""
    base = CNOT if base_gate is None else np.asarray(base_gate, dtype=complex)
    v5 = np.array([[ancilla.a, -np.conj(ancilla.b)],
                   [ancilla.b, np.conj(ancilla.a)]], dtype=complex)
    return base @ tc.kron(np.eye(2, dtype=complex), v5.conj().T)
