"""Schnorr identification over the order-l subgroup of Z_p^*."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from sympy import isprime

from ..encoding import XofStream, decode_int, encode_int, int_width, labelled
from .base import (
    ChallengeSpace,
    NotExtractableError,
    ParameterError,
    Pcip,
    SpecialHvzk,
    Transcript,
)


class InvalidTranscriptError(ValueError):
    pass


@dataclass(frozen=True)
class SchnorrParams:
    p: int
    order: int
    g: int

    def __post_init__(self):
        if not isprime(self.p) or not isprime(self.order):
            raise ParameterError("p and the subgroup order must be prime")
        if (self.p - 1) % self.order:
            raise ParameterError("subgroup order must divide p - 1")
        if self.g % self.p == 1 or pow(self.g, self.order, self.p) != 1:
            raise ParameterError(f"g={self.g} does not have order {self.order} mod {self.p}")

    @classmethod
    def toy(cls) -> "SchnorrParams":
        return cls(23, 11, 2)

    @classmethod
    def generate(cls, bits: int, seed: int | bytes) -> "SchnorrParams":
        """Safe prime p = 2l + 1 with a `bits`-bit prime l, deterministic in the seed."""
        if bits < 3:
            raise ParameterError("need at least 3 bits")
        s = seed if isinstance(seed, int) else int.from_bytes(seed, "big")
        rng = random.Random(s)
        while True:
            order = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
            if isprime(order) and isprime(2 * order + 1):
                break
        p = 2 * order + 1
        while True:
            g = pow(rng.randrange(2, p - 1), 2, p)
            if g != 1:
                return cls(p, order, g)

    @property
    def elem_width(self) -> int:
        return int_width(self.p)

    @property
    def scalar_width(self) -> int:
        return int_width(self.order)

    def as_dict(self) -> dict:
        return {"p": self.p, "order": self.order, "g": self.g}


def schnorr_commit(params: SchnorrParams, r: int) -> int:
    return pow(params.g, r, params.p)


def schnorr_respond(params: SchnorrParams, s: int, r: int, c: int) -> tuple[int, int]:
    if not (0 <= s < params.order and 0 <= r < params.order):
        raise ValueError("witness and randomness must lie in [0, order)")
    if not 0 <= c < params.order:
        raise ValueError("challenge must lie in [0, order)")
    return schnorr_commit(params, r), (r + c * s) % params.order


def schnorr_simulate(params: SchnorrParams, y: int, c: int, z: int) -> int:
    if not (0 <= c < params.order and 0 <= z < params.order):
        raise ValueError("challenge and response must lie in [0, order)")
    return pow(params.g, z, params.p) * pow(y, -c, params.p) % params.p


def schnorr_check(params: SchnorrParams, y: int, a: int, c: int, z: int) -> bool:
    p = params.p
    if not (1 <= y < p and 1 <= a < p and 0 <= z < params.order):
        return False
    if pow(y, params.order, p) != 1:
        return False
    return pow(params.g, z, p) == a * pow(y, c, p) % p


class Schnorr(Pcip, SpecialHvzk):
    rounds = 1
    name = "schnorr"

    def __init__(self, params: SchnorrParams, challenge_bound: int | None = None):
        bound = params.order if challenge_bound is None else challenge_bound
        if bound > params.order:
            raise ParameterError("challenge space larger than the subgroup order breaks special soundness")
        self.params = params
        self._space = ChallengeSpace(bound)

    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        return self._space

    def descriptor(self) -> dict:
        d = self.params.as_dict()
        if self._space.cardinality != self.params.order:
            d["challenge_bound"] = self._space.cardinality
        return {"scheme": self.name, "params": d}

    # encodings
    def encode_elem(self, v: int) -> bytes:
        return encode_int(v, self.params.elem_width)

    def decode_elem(self, data: bytes) -> int:
        return decode_int(data, self.params.elem_width, self.params.p)

    def encode_scalar(self, v: int) -> bytes:
        return encode_int(v, self.params.scalar_width)

    def decode_scalar(self, data: bytes) -> int:
        return decode_int(data, self.params.scalar_width, self.params.order)

    def encode_witness(self, witness: int) -> bytes:
        return self.encode_scalar(witness)

    def decode_witness(self, data: bytes) -> int:
        return self.decode_scalar(data)

    def public_key(self, s: int) -> bytes:
        return self.encode_elem(pow(self.params.g, s, self.params.p))

    def instance_gen(self, seed: bytes) -> tuple[int, bytes]:
        s = XofStream(labelled(b"FSQ/v1/keygen/schnorr", seed)).below(self.params.order)
        return s, self.public_key(s)

    def prover_start(self, witness: int, instance, seed: bytes):
        r = XofStream(labelled(b"FSQ/v1/prover/schnorr", seed)).below(self.params.order)
        return (witness, r), self.encode_elem(schnorr_commit(self.params, r))

    def prover_step(self, state, challenge: int):
        s, r = state
        _, z = schnorr_respond(self.params, s, r, challenge)
        return None, self.encode_scalar(z)

    def verify(self, instance, messages: Sequence[bytes], challenges: Sequence[int], response: bytes) -> bool:
        try:
            y = self.decode_elem(instance)
            a = self.decode_elem(messages[0])
            z = self.decode_scalar(response)
        except (ValueError, TypeError):
            return False
        c = challenges[0]
        if c not in self._space:
            return False
        return schnorr_check(self.params, y, a, c, z)

    def simulate(self, instance, challenge: int, response: bytes) -> bytes:
        y = self.decode_elem(instance)
        z = self.decode_scalar(response)
        return self.encode_elem(schnorr_simulate(self.params, y, challenge, z))

    def sample_response(self, seed: bytes) -> bytes:
        return self.encode_scalar(XofStream(labelled(b"FSQ/v1/simulate/schnorr", seed)).below(self.params.order))


def schnorr_extract(scheme: Schnorr, t1: Transcript, t2: Transcript) -> int:
    """Witness from two accepting transcripts with a shared first message."""
    for t in (t1, t2):
        if not scheme.verify(t.instance, t.messages, t.challenges, t.response):
            raise InvalidTranscriptError("transcript does not verify")
    if t1.instance != t2.instance or t1.messages[0] != t2.messages[0]:
        raise ValueError("transcripts must share instance and first message")
    ell = scheme.params.order
    c1, c2 = t1.challenges[0], t2.challenges[0]
    if (c1 - c2) % ell == 0:
        raise NotExtractableError("challenges coincide")
    z1, z2 = scheme.decode_scalar(t1.response), scheme.decode_scalar(t2.response)
    return (z1 - z2) * pow(c1 - c2, -1, ell) % ell
