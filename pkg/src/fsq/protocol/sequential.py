"""n sequential runs of a Sigma-protocol folded into one (2n+1)-round protocol.

Messages interleave as a_1 = a^_1, a_i = (a^_i, z^_{i-1}), z = z^_n. Each
challenge c_i = (c^_i, r_i) carries pad_bits of padding that verification ignores.
"""

from __future__ import annotations

from typing import Sequence

from ..encoding import ParseError, frame, labelled, parse_frames, round_index
from .base import ChallengeSpace, ParameterError, Pcip


class SequentialRepeat(Pcip):
    name = "seq"

    def __init__(self, sigma: Pcip, reps: int, pad_bits: int = 0):
        if sigma.rounds != 1:
            raise ParameterError("sequential repetition needs a 3-round inner protocol")
        if reps < 1 or pad_bits < 0:
            raise ParameterError("reps >= 1 and pad_bits >= 0 required")
        self.inner = sigma
        self.rounds = reps
        self.pad_bits = pad_bits
        self._space = ChallengeSpace(sigma.challenge_space().cardinality << pad_bits)

    def challenge_space(self, i: int = 1) -> ChallengeSpace:
        return self._space

    def descriptor(self) -> dict:
        return {
            "scheme": self.name,
            "params": {"inner": self.inner.descriptor(), "reps": self.rounds, "pad_bits": self.pad_bits},
        }

    def split(self, c: int) -> tuple[int, int]:
        """(inner challenge, padding)."""
        return c >> self.pad_bits, c & ((1 << self.pad_bits) - 1)

    def join(self, inner_c: int, pad: int = 0) -> int:
        return (inner_c << self.pad_bits) | pad

    def encode_witness(self, witness) -> bytes:
        return self.inner.encode_witness(witness)

    def decode_witness(self, data: bytes):
        return self.inner.decode_witness(data)

    def instance_gen(self, seed: bytes):
        return self.inner.instance_gen(seed)

    def _seed(self, seed: bytes, i: int) -> bytes:
        # repetition 1 uses the caller's seed so reps=1 reproduces the inner protocol
        return seed if i == 1 else labelled(b"FSQ/v1/seq", seed, round_index(i))

    def prover_start(self, witness, instance, seed: bytes):
        inner_state, a = self.inner.prover_start(witness, instance, self._seed(seed, 1))
        return (inner_state, witness, instance, seed, 1), a

    def prover_step(self, state, challenge: int):
        inner_state, witness, instance, seed, i = state
        inner_state, z = self.inner.prover_step(inner_state, self.split(challenge)[0])
        if i == self.rounds:
            return None, z
        inner_state, a = self.inner.prover_start(witness, instance, self._seed(seed, i + 1))
        return (inner_state, witness, instance, seed, i + 1), frame(a, z)

    def triples(self, messages: Sequence[bytes], challenges: Sequence[int], response: bytes):
        """Inner (a^_i, c^_i, z^_i) triples; raises ParseError on malformed messages."""
        firsts = [messages[0]]
        responses = []
        for msg in messages[1:]:
            parts = parse_frames(msg)
            if len(parts) != 2:
                raise ParseError("repetition message must hold two fields")
            firsts.append(parts[0])
            responses.append(parts[1])
        responses.append(response)
        return [(a, self.split(c)[0], z) for a, c, z in zip(firsts, challenges, responses)]

    def verify(self, instance, messages: Sequence[bytes], challenges: Sequence[int], response: bytes) -> bool:
        try:
            triples = self.triples(messages, challenges, response)
        except ParseError:
            return False
        return all(self.inner.verify(instance, [a], [c], z) for a, c, z in triples)


def sequential_repeat(sigma: Pcip, reps: int, pad_bits: int = 0) -> SequentialRepeat:
    return SequentialRepeat(sigma, reps, pad_bits)
