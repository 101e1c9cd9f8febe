"""Interactive proof abstractions and concrete Sigma-protocols."""

from .base import (
    ChallengeSpace,
    NotExtractableError,
    ParameterError,
    Pcip,
    ShapeError,
    SpecialHvzk,
    Transcript,
    run_interactive,
    verify_transcript,
)
from .mock import MockSigma
from .schnorr import (
    InvalidTranscriptError,
    Schnorr,
    SchnorrParams,
    schnorr_commit,
    schnorr_extract,
    schnorr_respond,
    schnorr_simulate,
)
from .sequential import SequentialRepeat, sequential_repeat

__all__ = [
    "ChallengeSpace",
    "InvalidTranscriptError",
    "MockSigma",
    "NotExtractableError",
    "ParameterError",
    "Pcip",
    "Schnorr",
    "SchnorrParams",
    "SequentialRepeat",
    "ShapeError",
    "SpecialHvzk",
    "Transcript",
    "run_interactive",
    "schnorr_commit",
    "schnorr_extract",
    "schnorr_respond",
    "schnorr_simulate",
    "sequential_repeat",
    "verify_transcript",
]
