"""Rebuild protocols from their JSON descriptors and read or write key files."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .protocol.base import ParameterError, Pcip
from .protocol.mock import MockSigma
from .protocol.schnorr import Schnorr, SchnorrParams
from .protocol.sequential import SequentialRepeat
from .q2.mq import MqParams, MqScheme


class KeyFileError(ValueError):
    pass


def from_descriptor(desc: dict) -> Pcip:
    try:
        name, params = desc["scheme"], desc["params"]
        if name == "schnorr":
            sp = SchnorrParams(int(params["p"]), int(params["order"]), int(params["g"]))
            return Schnorr(sp, params.get("challenge_bound"))
        if name == "seq":
            return SequentialRepeat(from_descriptor(params["inner"]), int(params["reps"]), int(params["pad_bits"]))
        if name == "mq":
            return MqScheme(MqParams.from_dict(params), int(params.get("commit_bytes", 32)))
        if name == "mock":
            return MockSigma(int(params["gamma"]), int(params["C"]), bytes.fromhex(params["seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise KeyFileError(f"bad scheme descriptor: {exc}") from None
    raise KeyFileError(f"unknown scheme {desc.get('scheme')!r}")


def make_scheme(name: str, seed: bytes, bits: int = 64, reps: int = 1, pad_bits: int = 0, mq_dims=(7, 5, 5)) -> Pcip:
    """Fresh public parameters for keygen; the seed fixes them."""
    if name == "schnorr-toy":
        return Schnorr(SchnorrParams.toy())
    if name == "schnorr":
        return Schnorr(SchnorrParams.generate(bits, seed))
    if name == "seq":
        return SequentialRepeat(Schnorr(SchnorrParams.generate(bits, seed)), reps, pad_bits)
    if name == "mq":
        p, nv, m = mq_dims
        return MqScheme(MqParams.random(p, nv, m, seed))
    raise ParameterError(f"unknown scheme {name!r}")


@dataclass
class KeyFile:
    scheme: Pcip
    public_key: bytes
    secret_key: Any | None = None

    def to_json(self) -> str:
        desc = self.scheme.descriptor()
        d = {"scheme": desc["scheme"], "params": desc["params"], "pk_hex": self.public_key.hex()}
        if self.secret_key is not None:
            d["sk_hex"] = self.scheme.encode_witness(self.secret_key).hex()
        return json.dumps(d, sort_keys=True, indent=1) + "\n"

    def public(self) -> "KeyFile":
        return KeyFile(self.scheme, self.public_key)

    @classmethod
    def from_json(cls, text: str) -> "KeyFile":
        try:
            d = json.loads(text)
            scheme = from_descriptor({"scheme": d["scheme"], "params": d["params"]})
            pk = bytes.fromhex(d["pk_hex"])
            sk = scheme.decode_witness(bytes.fromhex(d["sk_hex"])) if "sk_hex" in d else None
        except (KeyError, TypeError, ValueError) as exc:
            raise KeyFileError(f"bad key file: {exc}") from None
        return cls(scheme, pk, sk)

    @classmethod
    def load(cls, path: str | Path) -> "KeyFile":
        return cls.from_json(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())
