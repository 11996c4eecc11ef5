"""Alice/Bob session framing: one sampled protocol run with a bit-exact
3-bit classical message and an auditable event log.

Wire layout of the single message byte: bits 1..0 carry the Bell outcome
index i-1 (00 = phi+, 01 = phi-, 10 = psi+, 11 = psi-), bit 2 carries the
qubit-4 result; bits 7..3 must be zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .protocol import (
    BranchOutcome,
    ChannelSpec,
    ProtocolConfig,
    branch_index,
    default_config,
    run_mixed,
)
from .states_gates import BellLabel, InputState, make_input_state
from .tensor_core import fidelity_pure

_BELL_BY_CODE = (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, BellLabel.PSI_MINUS)


def encode_message(outcome: BranchOutcome) -> int:
    """Pack one branch outcome into the message byte."""
    return ((outcome.bell.index - 1) & 0b11) | (outcome.z4 << 2)


def decode_message(byte: int) -> BranchOutcome:
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"message must fit one byte, got {byte}")
    if byte & ~0b111:
        raise ValueError(f"message byte 0x{byte:02x} has nonzero high bits")
    return BranchOutcome(_BELL_BY_CODE[byte & 0b11], (byte >> 2) & 1)


@dataclass(frozen=True)
class SessionEvent:
    kind: str
    data: dict


@dataclass(frozen=True)
class SessionLog:
    """Ordered record of one teleportation session."""

    rng_seed: int
    session_index: int
    events: tuple

    def find(self, kind: str) -> SessionEvent:
        for event in self.events:
            if event.kind == kind:
                return event
        raise KeyError(f"no event of kind {kind!r}")

    @property
    def message_byte(self) -> int:
        return self.find("message_sent").data["byte"]

    @property
    def fidelity(self) -> float:
        return self.find("output_delivered").data["fidelity"]

    def to_text(self) -> str:
        """Line-delimited record: one event per line, fields in fixed order."""
        lines = [f"session seed={self.rng_seed} index={self.session_index}"]
        for event in self.events:
            fields = " ".join(f"{k}={_fmt(v)}" for k, v in event.data.items())
            lines.append(f"{event.kind} {fields}".rstrip())
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "session_index": self.session_index,
            "events": [{"kind": e.kind, **{k: _json_value(v) for k, v in e.data.items()}}
                       for e in self.events],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(format(value, ".12g"))
    return value


def _channel_description(channel: ChannelSpec) -> dict:
    if channel.kind == "pure_bell":
        return {"channel": "pure_bell", "label": channel.label.value}
    if channel.kind == "werner":
        return {"channel": "werner", "label": channel.label.value, "p": channel.p}
    return {"channel": "explicit"}


def run_session(input_state: InputState, channel: ChannelSpec,
                config: ProtocolConfig | None = None, seed: int = 0,
                session_index: int = 0) -> SessionLog:
    """Sample one branch (counter-based generator keyed by seed and session
    index), route the 3-bit message from Alice to Bob, and log every step.
    Identical seeds yield byte-identical logs.
    """
    config = config or default_config()
    result = run_mixed(input_state, channel, config)
    probabilities = np.array([b.probability for b in result.branches])
    rng = np.random.Generator(np.random.Philox(counter=[session_index, 0, 0, 0],
                                               key=[seed & 0xFFFFFFFFFFFFFFFF, 0]))
    u = rng.random()
    cumulative = np.cumsum(probabilities)
    picked = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
    picked = min(picked, 7)
    branch = result.branches[picked]
    outcome = branch.branch
    byte = encode_message(outcome)
    decoded = decode_message(byte)
    j = branch_index(decoded)
    fidelity = fidelity_pure(branch.output, make_input_state(input_state))
    events = (
        SessionEvent("channel_established", _channel_description(channel)),
        SessionEvent("bell_measurement", {"outcome": outcome.bell.value,
                                          "i": outcome.bell.index,
                                          "probability": float(branch.probability)}),
        SessionEvent("z4_measurement", {"z4": outcome.z4}),
        SessionEvent("message_sent", {"byte": byte, "bits": format(byte, "03b")}),
        SessionEvent("correction_applied", {"j": j}),
        SessionEvent("output_delivered", {"fidelity": float(fidelity)}),
    )
    return SessionLog(rng_seed=seed, session_index=session_index, events=events)
