"""5-round schemes with a one-bit second challenge, and their rewinding extractor."""

from .extract import (
    CommitmentCollision,
    ExtractionFailure,
    PatternError,
    check_q2_pattern,
    q2_extract_mq,
    rewind_collect,
)
from .mq import HashCommitment, MqParams, MqScheme, commit

__all__ = [
    "CommitmentCollision",
    "ExtractionFailure",
    "HashCommitment",
    "MqParams",
    "MqScheme",
    "PatternError",
    "check_q2_pattern",
    "commit",
    "q2_extract_mq",
    "rewind_collect",
]
