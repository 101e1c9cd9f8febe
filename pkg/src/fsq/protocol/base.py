"""Public-coin interactive proofs as resumable prover state machines."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Sequence

from ..encoding import decode_int, encode_int, int_width

Instance = bytes | tuple[bytes, ...]


class ShapeError(ValueError):
    """Transcript or proof does not match the protocol's round structure."""


class ParameterError(ValueError):
    """Protocol parameters fail validation."""


class NotExtractableError(ValueError):
    pass


@dataclass(frozen=True)
class ChallengeSpace:
    """Challenges are the integers [0, cardinality), encoded big-endian at fixed width."""

    cardinality: int

    def __post_init__(self):
        if self.cardinality < 2:
            raise ParameterError("challenge space needs at least two values")

    @property
    def width(self) -> int:
        return int_width(self.cardinality)

    def __contains__(self, c: object) -> bool:
        return isinstance(c, int) and 0 <= c < self.cardinality

    def encode(self, c: int) -> bytes:
        if c not in self:
            raise ValueError(f"challenge {c!r} outside [0, {self.cardinality})")
        return encode_int(c, self.width)

    def decode(self, data: bytes) -> int:
        return decode_int(data, self.width, self.cardinality)


@dataclass(frozen=True)
class Transcript:
    instance: Instance
    messages: tuple[bytes, ...]
    challenges: tuple[int, ...]
    response: bytes


class Pcip(ABC):
    """A (2n+1)-round public-coin protocol.

    Prover state is an immutable value: ``prover_step`` returns a new state,
    so a saved state can be replayed (rewinding, FS).
    """

    rounds: int = 1
    name: str = "pcip"

    @abstractmethod
    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        """Space of the i-th challenge, 1-indexed."""

    @property
    def challenge_spaces(self) -> tuple[ChallengeSpace, ...]:
        return tuple(self.challenge_space(i) for i in range(1, self.rounds + 1))

    @abstractmethod
    def instance_gen(self, seed: bytes) -> tuple[Any, Instance]:
        """Seeded (witness, instance) pair."""

    @abstractmethod
    def prover_start(self, witness: Any, instance: Instance, seed: bytes) -> tuple[Any, bytes]:
        """Returns (state, a1)."""

    @abstractmethod
    def prover_step(self, state: Any, challenge: int) -> tuple[Any, bytes]:
        """Consumes c_i; returns (state, a_{i+1}) or (state, z) after the last round."""

    @abstractmethod
    def verify(
        self, instance: Instance, messages: Sequence[bytes], challenges: Sequence[int], response: bytes
    ) -> bool:
        ...

    def descriptor(self) -> dict:
        return {"scheme": self.name, "params": {}}

    def encode_witness(self, witness: Any) -> bytes:
        raise NotImplementedError

    def decode_witness(self, data: bytes) -> Any:
        raise NotImplementedError


class SpecialHvzk:
    """Mixin for Sigma-protocols whose first message is a function of (c, z)."""

    def simulate(self, instance: Instance, challenge: int, response: bytes) -> bytes:
        raise NotImplementedError

    def sample_response(self, seed: bytes) -> bytes:
        raise NotImplementedError


def check_shape(spec: Pcip, messages: Sequence, challenges: Sequence) -> None:
    if len(messages) != spec.rounds or len(challenges) != spec.rounds:
        raise ShapeError(
            f"expected {spec.rounds} messages and challenges, got {len(messages)} and {len(challenges)}"
        )


def verify_transcript(spec: Pcip, t: Transcript) -> bool:
    check_shape(spec, t.messages, t.challenges)
    for i, c in enumerate(t.challenges, start=1):
        if c not in spec.challenge_space(i):
            return False
    return bool(spec.verify(t.instance, t.messages, t.challenges, t.response))


def run_interactive(
    spec: Pcip, witness: Any, instance: Instance, challenges: Sequence[int], seed: bytes
) -> Transcript:
    """Honest execution against a fixed list of verifier challenges."""
    if len(challenges) != spec.rounds:
        raise ShapeError(f"expected {spec.rounds} challenges")
    state, msg = spec.prover_start(witness, instance, seed)
    messages = [msg]
    for c in challenges:
        state, msg = spec.prover_step(state, c)
        messages.append(msg)
    return Transcript(instance, tuple(messages[:-1]), tuple(challenges), messages[-1])
