"""Commit-and-open 5-pass identification from multivariate quadratic maps.

Public key v = F(s). The prover splits s = r0 + r1, masks r0 = t0 + t1 and
F(r0) = e0 + e1, commits, receives alpha, sends (t1, e1), then opens one
side according to a single challenge bit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..encoding import ParseError, XofStream, frame, labelled, parse_frames
from ..protocol.base import ChallengeSpace, ParameterError, Pcip

COMMIT_PREFIX = b"FSQ/v1/commit"
OPENING_BYTES = 16


@dataclass(frozen=True)
class MqParams:
    p: int
    nv: int
    m: int
    quad: np.ndarray  # (m, nv, nv), upper triangular
    lin: np.ndarray  # (m, nv)

    def __post_init__(self):
        if self.p > 256 or self.p < 2:
            raise ParameterError("field size must fit one byte per element")
        if self.quad.shape != (self.m, self.nv, self.nv) or self.lin.shape != (self.m, self.nv):
            raise ParameterError("coefficient arrays do not match (m, nv)")

    @classmethod
    def random(cls, p: int = 7, nv: int = 5, m: int = 5, seed: bytes = b"") -> "MqParams":
        stream = XofStream(labelled(b"FSQ/v1/mq/system", seed, bytes([p, nv, m])))
        quad = np.zeros((m, nv, nv), dtype=np.int64)
        for k in range(m):
            for i in range(nv):
                for j in range(i, nv):
                    quad[k, i, j] = stream.below(p)
        lin = np.array(stream.vector(p, m * nv), dtype=np.int64).reshape(m, nv)
        return cls(p, nv, m, quad, lin)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return (np.einsum("kij,i,j->k", self.quad, x, x) + self.lin @ x) % self.p

    def polar(self, x, y) -> np.ndarray:
        """G(x, y) = F(x + y) - F(x) - F(y), written out as the symmetric bilinear form."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return (np.einsum("kij,i,j->k", self.quad, x, y) + np.einsum("kij,i,j->k", self.quad, y, x)) % self.p

    def as_dict(self) -> dict:
        return {"p": self.p, "nv": self.nv, "m": self.m, "quad": self.quad.tolist(), "lin": self.lin.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MqParams":
        return cls(d["p"], d["nv"], d["m"], np.array(d["quad"], dtype=np.int64), np.array(d["lin"], dtype=np.int64))


def commit(value: bytes, opening: bytes, size: int = 32) -> bytes:
    return hashlib.shake_256(COMMIT_PREFIX + frame(value, opening)).digest(size)


@dataclass(frozen=True)
class HashCommitment:
    commitment: bytes
    value: bytes
    opening: bytes

    def verify(self, size: int | None = None) -> bool:
        return commit(self.value, self.opening, size or len(self.commitment)) == self.commitment


class MqScheme(Pcip):
    rounds = 2
    name = "mq"

    def __init__(self, params: MqParams, commit_bytes: int = 32):
        self.params = params
        self.commit_bytes = commit_bytes
        self._spaces = (ChallengeSpace(params.p), ChallengeSpace(2))

    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        return self._spaces[i - 1]

    def descriptor(self) -> dict:
        return {"scheme": self.name, "params": {**self.params.as_dict(), "commit_bytes": self.commit_bytes}}

    # field vectors travel as one byte per element
    def enc(self, v) -> bytes:
        return bytes(int(e) for e in v)

    def dec(self, data: bytes, length: int) -> np.ndarray:
        if len(data) != length or any(b >= self.params.p for b in data):
            raise ParseError("bad field vector")
        return np.frombuffer(data, dtype=np.uint8).astype(np.int64)

    def encode_witness(self, witness) -> bytes:
        return self.enc(witness)

    def decode_witness(self, data: bytes) -> np.ndarray:
        return self.dec(data, self.params.nv)

    def com(self, *parts: bytes, opening: bytes) -> bytes:
        return commit(frame(*parts), opening, self.commit_bytes)

    def instance_gen(self, seed: bytes):
        s = np.array(XofStream(labelled(b"FSQ/v1/keygen/mq", seed)).vector(self.params.p, self.params.nv))
        return s, self.enc(self.params.evaluate(s))

    def prover_start(self, witness, instance, seed: bytes):
        P, p = self.params, self.params.p
        stream = XofStream(labelled(b"FSQ/v1/prover/mq", seed))
        r0 = np.array(stream.vector(p, P.nv))
        t0 = np.array(stream.vector(p, P.nv))
        e0 = np.array(stream.vector(p, P.m))
        u0, u1 = stream.read(OPENING_BYTES), stream.read(OPENING_BYTES)
        s = np.asarray(witness, dtype=np.int64)
        r1 = (s - r0) % p
        c0 = self.com(self.enc(r0), self.enc(t0), self.enc(e0), opening=u0)
        c1 = self.com(self.enc(r1), self.enc((P.polar(t0, r1) + e0) % p), opening=u1)
        return ("alpha", r0, r1, t0, e0, u0, u1), frame(c0, c1)

    def prover_step(self, state, challenge: int):
        P, p = self.params, self.params.p
        if state[0] == "alpha":
            _, r0, r1, t0, e0, u0, u1 = state
            t1 = (challenge * r0 - t0) % p
            e1 = (challenge * P.evaluate(r0) - e0) % p
            return ("bit", r0, r1, u0, u1), frame(self.enc(t1), self.enc(e1))
        _, r0, r1, u0, u1 = state
        if challenge == 0:
            return None, frame(self.enc(r0), u0)
        return None, frame(self.enc(r1), u1)

    def parse(self, messages: Sequence[bytes], response: bytes):
        """((c0, c1), t1, e1, revealed vector, opening)."""
        P = self.params
        a1 = parse_frames(messages[0])
        a2 = parse_frames(messages[1])
        z = parse_frames(response)
        if len(a1) != 2 or len(a2) != 2 or len(z) != 2:
            raise ParseError("wrong field count")
        return tuple(a1), self.dec(a2[0], P.nv), self.dec(a2[1], P.m), self.dec(z[0], P.nv), z[1]

    def opened(self, instance: bytes, messages, challenges, response) -> tuple[int, HashCommitment]:
        """Which commitment the response opens, with the preimage the verifier recomputes."""
        P, p = self.params, self.params.p
        (c0, c1), t1, e1, r, u = self.parse(messages, response)
        alpha, bit = challenges
        if bit == 0:
            value = frame(self.enc(r), self.enc((alpha * r - t1) % p), self.enc((alpha * P.evaluate(r) - e1) % p))
            return 0, HashCommitment(c0, value, u)
        v = self.dec(instance, P.m)
        masked = (alpha * (v - P.evaluate(r)) - P.polar(t1, r) - e1) % p
        return 1, HashCommitment(c1, frame(self.enc(r), self.enc(masked)), u)

    def verify(self, instance, messages: Sequence[bytes], challenges: Sequence[int], response: bytes) -> bool:
        if challenges[0] not in self._spaces[0] or challenges[1] not in self._spaces[1]:
            return False
        try:
            _, com = self.opened(instance, messages, challenges, response)
        except ParseError:
            return False
        return len(com.commitment) == self.commit_bytes and com.verify()
