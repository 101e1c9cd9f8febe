"""Multi-round Fiat-Shamir: chained challenge derivation, prover, verifier, proof files."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..encoding import ParseError, fields_of, frame, frame_field, parse_frames, round_index
from ..protocol.base import ChallengeSpace, Instance, Pcip, ShapeError
from .oracle import RandomOracle

PROOF_MAGIC = b"FSQP"
VERSION = 1


def challenge_input(i: int, prev: Sequence[bytes], message: bytes, ad: bytes | None = None) -> bytes:
    """Oracle input for round i+1: index i, then the framed previous value(s) and message."""
    parts = [round_index(i), *(frame_field(f) for f in prev), frame_field(message)]
    if ad is not None:
        parts.append(frame_field(ad))
    return b"".join(parts)


def _spaces(oracle: RandomOracle, spaces, n: int) -> list[ChallengeSpace]:
    if spaces is None:
        return [oracle._resolve(None)] * n
    spaces = list(spaces)
    if len(spaces) != n:
        raise ShapeError("one challenge space per round required")
    return spaces


def derive_challenges(
    oracle: RandomOracle,
    x: Instance,
    messages: Sequence[bytes],
    spaces: Sequence[ChallengeSpace] | None = None,
    ad: bytes | None = None,
) -> list[int]:
    """c_1 = H(0, x, a_1), c_i = H(i-1, c_{i-1}, a_i). Exactly len(messages) queries."""
    if not messages:
        raise ShapeError("at least one message required")
    spaces = _spaces(oracle, spaces, len(messages))
    out: list[int] = []
    prev = fields_of(x)
    for i, (a, space) in enumerate(zip(messages, spaces)):
        c = oracle.query(challenge_input(i, prev, a, ad), space)
        out.append(c)
        prev = (space.encode(c),)
    return out


@dataclass(frozen=True)
class FSProof:
    instance: Instance
    messages: tuple[bytes, ...]
    response: bytes

    def to_bytes(self) -> bytes:
        if not isinstance(self.instance, bytes):
            raise TypeError("only byte-string instances are serializable")
        n = len(self.messages).to_bytes(4, "big")
        return PROOF_MAGIC + bytes([VERSION]) + frame(self.instance, n, *self.messages, self.response)

    @classmethod
    def from_bytes(cls, data: bytes) -> "FSProof":
        if data[:4] != PROOF_MAGIC:
            raise ParseError("not an FS proof file")
        if data[4:5] != bytes([VERSION]):
            raise ParseError("unsupported proof version")
        fields = parse_frames(data, 5)
        if len(fields) < 4 or len(fields[1]) != 4:
            raise ParseError("malformed proof body")
        n = int.from_bytes(fields[1], "big")
        if len(fields) != n + 3 or n < 1:
            raise ParseError("message count does not match the body")
        return cls(fields[0], tuple(fields[2 : 2 + n]), fields[-1])


def fs_prove(
    spec: Pcip, witness, oracle: RandomOracle, x: Instance, seed: bytes, ad: bytes | None = None
) -> FSProof:
    spaces = spec.challenge_spaces
    state, a = spec.prover_start(witness, x, seed)
    messages = [a]
    prev = fields_of(x)
    for i in range(spec.rounds):
        c = oracle.query(challenge_input(i, prev, messages[-1], ad), spaces[i])
        prev = (spaces[i].encode(c),)
        state, msg = spec.prover_step(state, c)
        messages.append(msg)
    return FSProof(x, tuple(messages[:-1]), messages[-1])


def fs_verify(spec: Pcip, oracle: RandomOracle, proof: FSProof, ad: bytes | None = None) -> bool:
    if len(proof.messages) != spec.rounds:
        raise ShapeError(f"proof has {len(proof.messages)} messages, protocol has {spec.rounds} rounds")
    challenges = derive_challenges(oracle, proof.instance, proof.messages, spec.challenge_spaces, ad)
    return bool(spec.verify(proof.instance, proof.messages, challenges, proof.response))


def hash_chain(
    oracle: RandomOracle, x0: bytes, xs: Sequence[bytes], space: ChallengeSpace | None = None
) -> list[int]:
    """h_1 = H(x_0, x_1), h_i = H(h_{i-1}, x_i)."""
    if not xs:
        raise ShapeError("chain needs at least one element")
    space = oracle._resolve(space)
    out = []
    prev = x0
    for x in xs:
        h = oracle.query(frame(prev, x), space)
        out.append(h)
        prev = space.encode(h)
    return out
