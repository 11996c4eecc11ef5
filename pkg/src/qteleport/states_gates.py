"""Constructors for the states and gates used by the teleportation protocol.

Phase conventions: sigma_y = [[0, -i], [i, 0]], hence i*sigma_y maps
|0> -> -|1> and |1> -> |0>. Corrections are compared up to global phase,
so this choice is observationally irrelevant.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tensor_core import DensityMatrix, StateVector, kron
from .tolerances import ATOL_ENTRY

SQRT2_INV = 1.0 / math.sqrt(2.0)

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = SQRT2_INV * np.array([[1, 1], [1, -1]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class BellLabel(Enum):
    """The four Bell states, in the measurement-outcome order i = 1..4."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def index(self) -> int:
        return {"phi+": 1, "phi-": 2, "psi+": 3, "psi-": 4}[self.value]

    @classmethod
    def parse(cls, text: str) -> "BellLabel":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown Bell label {text!r}; expected one of phi+, phi-, psi+, psi-"
            ) from None


def _check_normalized(a: complex, b: complex, what: str) -> None:
    norm_sq = abs(a) ** 2 + abs(b) ** 2
    if abs(norm_sq - 1.0) > ATOL_ENTRY:
        raise ValueError(f"{what} not normalized: |a|^2 + |b|^2 = {norm_sq!r}")


@dataclass(frozen=True)
class InputState:
    """The bipartite input alpha|00> + beta|11> held on qubits (3, 4)."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        _check_normalized(self.alpha, self.beta, "input state")

    @classmethod
    def from_alpha_sq(cls, alpha_sq: float, beta_phase: float = 0.0) -> "InputState":
        if not 0.0 <= alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must be in [0, 1], got {alpha_sq}")
        return cls(math.sqrt(alpha_sq), math.sqrt(1.0 - alpha_sq) * cmath.exp(1j * beta_phase))


@dataclass(frozen=True)
class AncillaPrep:
    """Preparation a|0> + b|1> of Bob's extra qubit 5."""

    a: complex
    b: complex

    def __post_init__(self):
        _check_normalized(self.a, self.b, "ancilla preparation")

    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)


@dataclass(frozen=True)
class GeneralizedInput:
    """alpha|m1 n1> + beta|m2 n2> with distinct basis patterns."""

    alpha: complex
    beta: complex
    m1: int
    n1: int
    m2: int
    n2: int

    def __post_init__(self):
        bits = (self.m1, self.n1, self.m2, self.n2)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"basis labels must be bits, got {bits}")
        if (self.m1, self.n1) == (self.m2, self.n2):
            raise ValueError("the two basis patterns must differ")
        _check_normalized(self.alpha, self.beta, "generalized input")


def make_input_state(s: InputState) -> StateVector:
    return StateVector(2, [s.alpha, 0.0, 0.0, s.beta])


_BELL_AMPS = {
    BellLabel.PHI_PLUS: (SQRT2_INV, 0.0, 0.0, SQRT2_INV),
    BellLabel.PHI_MINUS: (SQRT2_INV, 0.0, 0.0, -SQRT2_INV),
    BellLabel.PSI_PLUS: (0.0, SQRT2_INV, SQRT2_INV, 0.0),
    BellLabel.PSI_MINUS: (0.0, SQRT2_INV, -SQRT2_INV, 0.0),
}


def make_bell(label: BellLabel) -> StateVector:
    return StateVector(2, _BELL_AMPS[label])


def make_werner(p: float) -> DensityMatrix:
    return make_werner_variant(p, BellLabel.PHI_PLUS)


def make_werner_variant(p: float, label: BellLabel) -> DensityMatrix:
    """p |B><B| + (1 - p) I/4 for the labeled Bell state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must be in [0, 1], got {p}")
    bell = make_bell(label).amplitudes
    mat = p * np.outer(bell, bell.conj()) + (1.0 - p) * np.eye(4, dtype=complex) / 4.0
    return DensityMatrix(2, mat)


@dataclass(frozen=True)
class CanonicalForm:
    """Result of mapping a generalized input back to the canonical family.

    ``entangled_class`` is True when the two patterns differ in both bits
    and the local gates map the input to alpha|00> + beta|11>. Otherwise the
    input is product-teleportable and ``target`` names the reached form.
    """

    entangled_class: bool
    input_state: InputState
    gate_q3: np.ndarray
    gate_q4: np.ndarray
    target: str


def canonicalize_input(g: GeneralizedInput) -> CanonicalForm:
    """Local gates on qubits 3 and 4 bringing alpha|m1 n1> + beta|m2 n2>
    to the canonical form (both bits differing) or to a product-teleportable
    form (one bit differing)."""
    gate_q3 = SIGMA_X if g.m1 else IDENTITY_2
    gate_q4 = SIGMA_X if g.n1 else IDENTITY_2
    r2 = g.m1 ^ g.m2
    c2 = g.n1 ^ g.n2
    target = f"alpha|00> + beta|{r2}{c2}>"
    return CanonicalForm(
        entangled_class=bool(r2 and c2),
        input_state=InputState(g.alpha, g.beta),
        gate_q3=gate_q3,
        gate_q4=gate_q4,
        target=target,
    )


def generalized_vector(g: GeneralizedInput) -> StateVector:
    amps = np.zeros(4, dtype=complex)
    amps[2 * g.m1 + g.n1] = g.alpha
    amps[2 * g.m2 + g.n2] += g.beta
    return StateVector(2, amps)


def gate(name: str, angle: float | None = None) -> np.ndarray:
    """Named unitaries. ``cz``/``cphase`` takes an optional angle
    (diag(1, 1, 1, e^{i angle}), default pi)."""
    key = name.strip().lower()
    fixed = {
        "i": IDENTITY_2,
        "x": SIGMA_X,
        "y": SIGMA_Y,
        "z": SIGMA_Z,
        "h": HADAMARD,
        "cnot": CNOT,
    }
    if key in fixed:
        return fixed[key].copy()
    if key in ("cz", "cphase"):
        theta = math.pi if angle is None else float(angle)
        return np.diag([1.0, 1.0, 1.0, cmath.exp(1j * theta)]).astype(complex)
    raise ValueError(f"unknown gate {name!r}")


def bell_projector(label: BellLabel) -> np.ndarray:
    amps = make_bell(label).amplitudes
    return np.outer(amps, amps.conj())


# Single-qubit operator P with |B> = (I x P)|phi+>; used to compensate
# alternate Bell channels by absorbing P into Bob's gate.
BELL_LOCAL_FACTOR = {
    BellLabel.PHI_PLUS: IDENTITY_2,
    BellLabel.PHI_MINUS: SIGMA_Z,
    BellLabel.PSI_PLUS: SIGMA_X,
    BellLabel.PSI_MINUS: SIGMA_X @ SIGMA_Z,
}


def channel_density(label: BellLabel) -> DensityMatrix:
    return make_bell(label).density_matrix()


def tensor_state(*vectors: np.ndarray) -> np.ndarray:
    out = np.array([1.0], dtype=complex)
    for v in vectors:
        out = kron(out.reshape(-1, 1), np.asarray(v, dtype=complex).reshape(-1, 1)).reshape(-1)
    return out
