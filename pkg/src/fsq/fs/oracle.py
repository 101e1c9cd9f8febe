"""Random-oracle instantiations: SHAKE256-derived, explicit tables, and overlays."""

from __future__ import annotations

import itertools
import threading
from typing import Hashable, Iterator, Mapping, Sequence

import numpy as np

from ..encoding import xof_below
from ..protocol.base import ChallengeSpace

CHALLENGE_PREFIX = b"FSQ/v1/chal"


class OracleDomainError(KeyError):
    pass


class RandomOracle:
    """Base class; subclasses implement ``_evaluate``. Only the counter mutates."""

    def __init__(self, space: ChallengeSpace | None = None):
        self.space = space
        self._lock = threading.Lock()
        self._count = 0

    @property
    def query_count(self) -> int:
        return self._count

    def _resolve(self, space: ChallengeSpace | None) -> ChallengeSpace:
        space = space or self.space
        if space is None:
            raise ValueError("no challenge space given for an oracle without a default range")
        return space

    def query(self, data: Hashable, space: ChallengeSpace | None = None) -> int:
        with self._lock:
            self._count += 1
        return self._evaluate(data, self._resolve(space))

    __call__ = query

    def _evaluate(self, data, space: ChallengeSpace) -> int:
        raise NotImplementedError


class XofOracle(RandomOracle):
    """H(data) = rejection-sampled SHAKE256(key || data) in the requested space."""

    def __init__(self, space: ChallengeSpace | None = None, key: bytes = CHALLENGE_PREFIX):
        super().__init__(space)
        self.key = key

    def _evaluate(self, data: bytes, space: ChallengeSpace) -> int:
        return xof_below(self.key + data, space.cardinality)


class ConstantOracle(RandomOracle):
    def __init__(self, value: int, space: ChallengeSpace | None = None):
        super().__init__(space)
        self.value = value

    def _evaluate(self, data, space: ChallengeSpace) -> int:
        if self.value not in space:
            raise ValueError("constant outside the requested space")
        return self.value


class OracleTable(RandomOracle):
    """A total function on an explicit finite domain."""

    def __init__(self, domain: Sequence[Hashable], values: Sequence[int], range_cardinality: int):
        if len(domain) != len(values):
            raise ValueError("domain and values differ in length")
        super().__init__(ChallengeSpace(range_cardinality))
        self.domain = tuple(domain)
        self.values = tuple(int(v) for v in values)
        self.range_cardinality = range_cardinality
        self._index = {x: i for i, x in enumerate(self.domain)}
        if len(self._index) != len(self.domain):
            raise ValueError("domain contains duplicates")
        if any(not 0 <= v < range_cardinality for v in self.values):
            raise ValueError("table value outside the range")

    def _evaluate(self, data, space: ChallengeSpace) -> int:
        if space.cardinality != self.range_cardinality:
            raise ValueError("table range differs from the requested challenge space")
        return self[data]

    def __getitem__(self, x) -> int:
        try:
            return self.values[self._index[x]]
        except KeyError:
            raise OracleDomainError(x) from None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OracleTable)
            and self.domain == other.domain
            and self.values == other.values
            and self.range_cardinality == other.range_cardinality
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.values, self.range_cardinality))

    def __repr__(self) -> str:
        return f"OracleTable({dict(zip(self.domain, self.values))!r}, range={self.range_cardinality})"

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    def reprogram(self, x, theta: int) -> "OracleTable":
        """H*theta x: equal to H except at x."""
        return self.reprogram_multi((x,), (theta,))

    def reprogram_multi(self, xs: Sequence, thetas: Sequence[int]) -> "OracleTable":
        if len(set(xs)) != len(xs):
            raise ValueError("reprogramming points must be distinct")
        if len(xs) != len(thetas):
            raise ValueError("points and values differ in length")
        values = list(self.values)
        for x, theta in zip(xs, thetas):
            if x not in self._index:
                raise OracleDomainError(x)
            if not 0 <= theta < self.range_cardinality:
                raise ValueError("reprogrammed value outside the range")
            values[self._index[x]] = theta
        return OracleTable(self.domain, values, self.range_cardinality)

    @classmethod
    def enumerate_all(cls, domain: Sequence[Hashable], range_cardinality: int) -> Iterator["OracleTable"]:
        """All range^|domain| tables, in lexicographic order of value tuples."""
        for values in itertools.product(range(range_cardinality), repeat=len(domain)):
            yield cls(domain, values, range_cardinality)


class ReprogrammedOracle(RandomOracle):
    """Base oracle with a finite set of overridden points."""

    def __init__(self, base: RandomOracle, overrides: Mapping[Hashable, int]):
        super().__init__(base.space)
        self.base = base
        self.overrides = dict(overrides)

    def _evaluate(self, data, space: ChallengeSpace) -> int:
        if data in self.overrides:
            v = self.overrides[data]
            if v not in space:
                raise ValueError("override outside the requested space")
            return v
        return self.base.query(data, space)
