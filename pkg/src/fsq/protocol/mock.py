"""Synthetic Sigma-protocol in which the first message determines the challenge.

Accepting triples are exactly (a, phi(a), psi(a)) for a in {0,1}^gamma. There
is no honest prover: every instance behaves like a false one, and the only
source of accepting transcripts is the simulator.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np

from ..encoding import XofStream, decode_int, encode_int, labelled, xof_below
from .base import ChallengeSpace, ParameterError, Pcip


class MockSigma(Pcip):
    rounds = 1
    name = "mock"

    def __init__(self, gamma: int, challenge_space: ChallengeSpace | int, seed: bytes, response_bytes: int = 8):
        if gamma < 1:
            raise ParameterError("gamma must be positive")
        self.gamma = gamma
        self.space = challenge_space if isinstance(challenge_space, ChallengeSpace) else ChallengeSpace(challenge_space)
        self.seed = seed
        self.response_bytes = response_bytes
        self._width = max(1, (gamma + 7) // 8)
        self._phi: np.ndarray | None = None

    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        return self.space

    def descriptor(self) -> dict:
        return {
            "scheme": self.name,
            "params": {"gamma": self.gamma, "C": self.space.cardinality, "seed": self.seed.hex()},
        }

    @property
    def size(self) -> int:
        return 1 << self.gamma

    def encode_first(self, a: int) -> bytes:
        return encode_int(a, self._width)

    def decode_first(self, data: bytes) -> int:
        return decode_int(data, self._width, self.size)

    def phi(self, a: int) -> int:
        if self._phi is not None:
            return int(self._phi[a])
        return xof_below(labelled(b"FSQ/v1/mock/phi", self.seed, self.encode_first(a)), self.space.cardinality)

    def psi(self, a: int) -> bytes:
        data = labelled(b"FSQ/v1/mock/psi", self.seed, self.encode_first(a))
        return hashlib.shake_256(data).digest(self.response_bytes)

    def phi_table(self) -> np.ndarray:
        """phi over all of {0,1}^gamma, computed once."""
        if self._phi is None:
            self._phi = np.array([self.phi(a) for a in range(self.size)], dtype=np.int64)
        return self._phi

    def simulate_triple(self, seed: bytes) -> tuple[bytes, int, bytes]:
        a = XofStream(labelled(b"FSQ/v1/mock/sim", self.seed, seed)).below(self.size)
        return self.encode_first(a), self.phi(a), self.psi(a)

    def instance_gen(self, seed: bytes):
        return None, labelled(b"FSQ/v1/mock/x", seed)

    def prover_start(self, witness, instance, seed: bytes):
        raise NotImplementedError("mock instances have no witness; use simulate_triple")

    def prover_step(self, state, challenge: int):
        raise NotImplementedError("mock instances have no witness; use simulate_triple")

    def verify(self, instance, messages: Sequence[bytes], challenges: Sequence[int], response: bytes) -> bool:
        try:
            a = self.decode_first(messages[0])
        except ValueError:
            return False
        return challenges[0] == self.phi(a) and response == self.psi(a)
