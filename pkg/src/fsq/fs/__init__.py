"""Random oracles and the multi-round Fiat-Shamir transform."""

from .oracle import (
    CHALLENGE_PREFIX,
    ConstantOracle,
    OracleDomainError,
    OracleTable,
    RandomOracle,
    ReprogrammedOracle,
    XofOracle,
)
from .transform import FSProof, challenge_input, derive_challenges, fs_prove, fs_verify, hash_chain

__all__ = [
    "CHALLENGE_PREFIX",
    "ConstantOracle",
    "FSProof",
    "OracleDomainError",
    "OracleTable",
    "RandomOracle",
    "ReprogrammedOracle",
    "XofOracle",
    "challenge_input",
    "derive_challenges",
    "fs_prove",
    "fs_verify",
    "hash_chain",
]
