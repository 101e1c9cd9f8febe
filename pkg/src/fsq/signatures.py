"""Fiat-Shamir signatures from an identification protocol.

The public key and message enter the first hash only:
c_1 = H(0, pk, m, a_1), c_i = H(i-1, c_{i-1}, a_i).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

from .encoding import ParseError, frame, frame_field, parse_frames, round_index
from .fs.oracle import RandomOracle, XofOracle
from .fs.transform import fs_prove
from .protocol.base import ChallengeSpace, Pcip, ShapeError, Transcript

SIG_MAGIC = b"FSQS"
VERSION = 1


@dataclass(frozen=True)
class KeyPair:
    secret_key: Any
    public_key: bytes


@dataclass(frozen=True)
class Signature:
    messages: tuple[bytes, ...]
    response: bytes

    def to_bytes(self, descriptor: dict) -> bytes:
        desc = json.dumps(descriptor, sort_keys=True, separators=(",", ":")).encode()
        return SIG_MAGIC + bytes([VERSION]) + frame(desc, *self.messages, self.response)

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple[dict, "Signature"]:
        if data[:4] != SIG_MAGIC:
            raise ParseError("not a signature file")
        if data[4:5] != bytes([VERSION]):
            raise ParseError("unsupported signature version")
        fields = parse_frames(data, 5)
        if len(fields) < 3:
            raise ParseError("signature body too short")
        try:
            desc = json.loads(fields[0])
        except ValueError as exc:
            raise ParseError(f"bad scheme descriptor: {exc}") from None
        return desc, cls(tuple(fields[1:-1]), fields[-1])


def _oracle(oracle: RandomOracle | None) -> RandomOracle:
    return oracle if oracle is not None else XofOracle()


def keygen(spec: Pcip, seed: bytes) -> KeyPair:
    sk, pk = spec.instance_gen(seed)
    return KeyPair(sk, pk)


def _first_input(pk: bytes, m: bytes, a1: bytes, ad: bytes | None) -> bytes:
    data = round_index(0) + frame(pk, m, a1)
    return data if ad is None else data + frame_field(ad)


def _next_input(i: int, space: ChallengeSpace, c: int, a: bytes, ad: bytes | None) -> bytes:
    data = round_index(i) + frame(space.encode(c), a)
    return data if ad is None else data + frame_field(ad)


def sign(
    spec: Pcip,
    sk,
    pk: bytes,
    message: bytes,
    seed: bytes,
    oracle: RandomOracle | None = None,
    ad: bytes | None = None,
) -> Signature:
    H = _oracle(oracle)
    spaces = spec.challenge_spaces
    state, a = spec.prover_start(sk, pk, seed)
    messages = [a]
    c = H.query(_first_input(pk, message, a, ad), spaces[0])
    for i in range(spec.rounds):
        state, msg = spec.prover_step(state, c)
        messages.append(msg)
        if i + 1 < spec.rounds:
            c = H.query(_next_input(i + 1, spaces[i], c, msg, ad), spaces[i + 1])
    return Signature(tuple(messages[:-1]), messages[-1])


def signature_challenges(
    spec: Pcip, pk: bytes, message: bytes, messages: Sequence[bytes], oracle: RandomOracle, ad: bytes | None = None
) -> list[int]:
    spaces = spec.challenge_spaces
    cs = [oracle.query(_first_input(pk, message, messages[0], ad), spaces[0])]
    for i in range(1, spec.rounds):
        cs.append(oracle.query(_next_input(i, spaces[i - 1], cs[-1], messages[i], ad), spaces[i]))
    return cs


def verify(
    spec: Pcip,
    pk: bytes,
    message: bytes,
    sig: Signature,
    oracle: RandomOracle | None = None,
    ad: bytes | None = None,
) -> bool:
    if len(sig.messages) != spec.rounds:
        raise ShapeError(f"signature has {len(sig.messages)} messages, scheme has {spec.rounds} rounds")
    cs = signature_challenges(spec, pk, message, sig.messages, _oracle(oracle), ad)
    return bool(spec.verify(pk, sig.messages, cs, sig.response))


class MessageBound(Pcip):
    """The protocol with instances (pk, m); the prover and verifier ignore m."""

    def __init__(self, inner: Pcip):
        self.inner = inner
        self.rounds = inner.rounds
        self.name = inner.name

    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        return self.inner.challenge_space(i)

    def instance_gen(self, seed: bytes):
        raise NotImplementedError("instances are (pk, m) pairs built by the caller")

    def prover_start(self, witness, instance, seed: bytes):
        return self.inner.prover_start(witness, instance[0], seed)

    def prover_step(self, state, challenge: int):
        return self.inner.prover_step(state, challenge)

    def verify(self, instance, messages, challenges, response) -> bool:
        return self.inner.verify(instance[0], messages, challenges, response)


def sign_via_fs_equivalence(
    spec: Pcip,
    sk,
    pk: bytes,
    message: bytes,
    seed: bytes,
    oracle: RandomOracle | None = None,
    ad: bytes | None = None,
) -> Signature:
    """Sign by running the FS prover of the message-bound protocol on (pk, m)."""
    proof = fs_prove(MessageBound(spec), sk, _oracle(oracle), (pk, message), seed, ad)
    return Signature(proof.messages, proof.response)


def unique_response_violation(spec: Pcip, t1: Transcript, t2: Transcript) -> int | None:
    """Round index i if both transcripts accept, agree on (x, a_1, c_1, ..., a_i, c_i)
    and differ in the next prover message (z counts as a_{n+1}); otherwise None."""
    if t1.instance != t2.instance:
        return None
    for t in (t1, t2):
        if not spec.verify(t.instance, t.messages, t.challenges, t.response):
            return None
    m1 = list(t1.messages) + [t1.response]
    m2 = list(t2.messages) + [t2.response]
    for i in range(spec.rounds + 1):
        if m1[i] != m2[i]:
            return i if i > 0 else None
        if i < spec.rounds and t1.challenges[i] != t2.challenges[i]:
            return None
    return None
