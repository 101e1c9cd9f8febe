"""Sequential OR proof: one witness, two instances, challenges computed over cross.

c_0 = H(1, x_0, x_1, a_1) and c_1 = H(0, x_0, x_1, a_0).
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import ParseError, frame, labelled, parse_frames
from .fs.oracle import RandomOracle, XofOracle
from .protocol.base import Pcip, SpecialHvzk

OR_MAGIC = b"FSQO"
VERSION = 1


class MissingSimulatorError(TypeError):
    pass


@dataclass(frozen=True)
class OrProof:
    a0: bytes
    a1: bytes
    z0: bytes
    z1: bytes

    def to_bytes(self, x0: bytes, x1: bytes) -> bytes:
        return OR_MAGIC + bytes([VERSION]) + frame(x0, x1, self.a0, self.a1, self.z0, self.z1)

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple[bytes, bytes, "OrProof"]:
        if data[:4] != OR_MAGIC:
            raise ParseError("not an OR-proof file")
        if data[4:5] != bytes([VERSION]):
            raise ParseError("unsupported OR-proof version")
        fields = parse_frames(data, 5)
        if len(fields) != 6:
            raise ParseError("OR-proof body must hold six fields")
        x0, x1, a0, a1, z0, z1 = fields
        return x0, x1, cls(a0, a1, z0, z1)


def or_input(tag: int, x0: bytes, x1: bytes, a: bytes) -> bytes:
    return bytes([tag]) + frame(x0, x1, a)


def _check_sigma(sigma: Pcip) -> None:
    if sigma.rounds != 1:
        raise ValueError("OR proofs combine Sigma-protocols")


def or_prove(
    sigma0: Pcip,
    sigma1: Pcip,
    x0: bytes,
    x1: bytes,
    b: int,
    witness,
    oracle: RandomOracle | None = None,
    seed: bytes = b"",
) -> OrProof:
    """Exactly two oracle queries."""
    if b not in (0, 1):
        raise ValueError("known branch must be 0 or 1")
    _check_sigma(sigma0)
    _check_sigma(sigma1)
    H = oracle if oracle is not None else XofOracle()
    sigmas = (sigma0, sigma1)
    xs = (x0, x1)
    other = 1 - b
    sim = sigmas[other]
    if not isinstance(sim, SpecialHvzk):
        raise MissingSimulatorError(f"branch {other} has no special HVZK simulator")

    state, a_known = sigmas[b].prover_start(witness, xs[b], labelled(b"FSQ/v1/or/prove", seed))
    # c_other hashes the known branch's first message under the known branch's tag
    c_other = H.query(or_input(b, x0, x1, a_known), sim.challenge_space())
    z_other = sim.sample_response(labelled(b"FSQ/v1/or/sim", seed))
    a_other = sim.simulate(xs[other], c_other, z_other)
    c_known = H.query(or_input(other, x0, x1, a_other), sigmas[b].challenge_space())
    _, z_known = sigmas[b].prover_step(state, c_known)

    if b == 0:
        return OrProof(a_known, a_other, z_known, z_other)
    return OrProof(a_other, a_known, z_other, z_known)


def or_verify(
    sigma0: Pcip, sigma1: Pcip, x0: bytes, x1: bytes, proof: OrProof, oracle: RandomOracle | None = None
) -> bool:
    _check_sigma(sigma0)
    _check_sigma(sigma1)
    H = oracle if oracle is not None else XofOracle()
    c0 = H.query(or_input(1, x0, x1, proof.a1), sigma0.challenge_space())
    c1 = H.query(or_input(0, x0, x1, proof.a0), sigma1.challenge_space())
    return bool(
        sigma0.verify(x0, [proof.a0], [c0], proof.z0) and sigma1.verify(x1, [proof.a1], [c1], proof.z1)
    )
