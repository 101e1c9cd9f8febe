"""Four-transcript rewinding and key extraction for 5-round, 1-bit-second-challenge schemes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..encoding import XofStream, labelled
from ..protocol.base import Pcip, ShapeError, Transcript
from .mq import HashCommitment, MqScheme


class PatternError(ValueError):
    pass


class ExtractionFailure(ValueError):
    """Carries the name of the relation that failed."""

    def __init__(self, relation: str):
        super().__init__(relation)
        self.relation = relation


@dataclass(frozen=True)
class CommitmentCollision:
    """Two distinct openings of one commitment."""

    index: int
    first: HashCommitment
    second: HashCommitment


FourTranscripts = tuple[Transcript, Transcript, Transcript, Transcript]


def _shared_prefix(ts: Sequence[Transcript]) -> None:
    if len(ts) != 4:
        raise ShapeError("need exactly four transcripts")
    for t in ts:
        if len(t.messages) != 2 or len(t.challenges) != 2:
            raise ShapeError("q2 transcripts have two messages and two challenges")
    if len({t.instance for t in ts}) != 1 or len({t.messages[0] for t in ts}) != 1:
        raise PatternError("transcripts must share the instance and first message")


def check_q2_pattern(ts: Sequence[Transcript]) -> bool:
    """c1: equal within pairs (1,2) and (3,4), different across; c2: equal within (1,3) and (2,4), different across."""
    _shared_prefix(ts)
    first = [t.challenges[0] for t in ts]
    second = [t.challenges[1] for t in ts]
    return (
        first[0] == first[1] != first[2] == first[3]
        and second[0] == second[2] != second[1] == second[3]
    )


def rewind_collect(scheme: Pcip, witness: Any, instance, seed: bytes, prover: Pcip | None = None) -> FourTranscripts:
    """Run the prover once to a_1, then replay from saved states with (alpha, 0), (alpha, 1), (alpha', 0), (alpha', 1)."""
    prover = prover or scheme
    card = scheme.challenge_space(1).cardinality
    if card < 2:
        raise PatternError("first challenge space too small for the pattern")
    stream = XofStream(labelled(b"FSQ/v1/q2/rewind", seed))
    alpha = stream.below(card)
    alpha2 = (alpha + 1 + stream.below(card - 1)) % card
    state0, a1 = prover.prover_start(witness, instance, labelled(b"FSQ/v1/q2/prover", seed))
    out = []
    for al in (alpha, alpha2):
        state1, a2 = prover.prover_step(state0, al)
        for bit in (0, 1):
            _, z = prover.prover_step(state1, bit)
            out.append(Transcript(instance, (a1, a2), (al, bit), z))
    return out[0], out[1], out[2], out[3]


def q2_extract_mq(scheme: MqScheme, v: bytes, ts: Sequence[Transcript]) -> np.ndarray | CommitmentCollision:
    """s with F(s) = v, or a commitment collision if the openings disagree."""
    if not check_q2_pattern(ts):
        raise PatternError("challenges do not follow the q2 pattern")
    for k, t in enumerate(ts):
        if t.instance != v:
            raise PatternError("transcripts are for a different public key")
        if not scheme.verify(t.instance, t.messages, t.challenges, t.response):
            raise ExtractionFailure(f"transcript {k + 1} does not verify")
    opened = [scheme.opened(t.instance, t.messages, t.challenges, t.response) for t in ts]
    # bit-0 transcripts open commitment 0, bit-1 transcripts commitment 1
    by_side: dict[int, list[HashCommitment]] = {0: [], 1: []}
    for side, com in opened:
        by_side[side].append(com)
    for side, (first, second) in by_side.items():
        if (first.value, first.opening) != (second.value, second.opening):
            return CommitmentCollision(side, first, second)
    p = scheme.params.p
    r0 = scheme.parse(ts[0].messages, ts[0].response)[3]
    r1 = scheme.parse(ts[1].messages, ts[1].response)[3]
    s = (r0 + r1) % p
    if not np.array_equal(scheme.params.evaluate(s), scheme.dec(v, scheme.params.m)):
        raise ExtractionFailure("F(r0 + r1) != v")
    return s
