"""Measure-and-reprogram simulators and the inequality checks they satisfy.

A schedule entry (i, b) measures the query-input register right before query
i+1 (the output register X_j when i = q); query i+1 is answered by the
original oracle if b = 1 and every later query by the reprogrammed one.
All measurements are evaluated by exhaustive branching, never by sampling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..fs.oracle import OracleTable
from .dense import (
    OracleAdversary,
    QuantumPredicate,
    StateVector,
    apply_oracle_batch,
    apply_predicate,
    check_table,
)
from .layout import RegisterLayout
from . import kernels

TOL = 1e-9

Slot = tuple[int, int]


class ScheduleError(ValueError):
    pass


def legal_slots(q: int) -> list[Slot]:
    """({0..q-1} x {0,1}) u {(q, 0)}, 2q + 1 entries."""
    return [(i, b) for i in range(q) for b in (0, 1)] + [(q, 0)]


def check_schedule(schedule: Sequence[Slot], q: int, distinct: bool = True) -> None:
    legal = set(legal_slots(q))
    for s in schedule:
        if tuple(s) not in legal:
            raise ScheduleError(f"illegal schedule entry {s} for q={q}")
    if distinct and len({i for i, _ in schedule}) != len(schedule):
        raise ScheduleError("measured query slots must be pairwise distinct")


def multi_schedules(q: int, n: int, distinct: bool = True) -> list[tuple[Slot, ...]]:
    out = []
    for r in itertools.product(legal_slots(q), repeat=n):
        if distinct and len({i for i, _ in r}) != n:
            continue
        out.append(r)
    return out


def increasing_schedules(q: int, n: int) -> list[tuple[Slot, ...]]:
    return [r for r in itertools.product(legal_slots(q), repeat=n) if all(r[j][0] < r[j + 1][0] for j in range(n - 1))]


def order_permutation(schedule: Sequence[Slot]) -> tuple[int, ...]:
    """pi with i_{pi(1)} < ... < i_{pi(n)}."""
    return tuple(sorted(range(len(schedule)), key=lambda j: schedule[j][0]))


class BatchSimulator:
    """Evaluates schedules on K columns at once; column k has its own (H, x-tuple, theta-tuple)."""

    def __init__(
        self,
        adv: OracleAdversary,
        tables: np.ndarray,
        xs: np.ndarray,
        thetas: np.ndarray,
    ):
        self.adv = adv
        self.layout: RegisterLayout = adv.layout
        self.tables = np.ascontiguousarray(tables, dtype=np.int64)
        self.xs = np.asarray(xs, dtype=np.int64)
        self.thetas = np.asarray(thetas, dtype=np.int64)
        self.K = self.tables.shape[0]
        self.n = self.xs.shape[1]
        if self.tables.shape[1] != self.layout.n_inputs:
            raise ValueError("table width differs from the input register")
        self._prefix = [np.tile(adv.initial[:, None], (1, self.K))]
        self._tables: dict[tuple, np.ndarray] = {(): self.tables}

    def _table(self, active: tuple[int, ...]) -> np.ndarray:
        """Tables reprogrammed at the x_j in `active`, applied in order so later entries win."""
        if active not in self._tables:
            t = self.tables.copy()
            rows = np.arange(self.K)
            for j in active:
                t[rows, self.xs[:, j]] = self.thetas[:, j]
            self._tables[active] = t
        return self._tables[active]

    def prefix(self, i: int) -> np.ndarray:
        """phi_i^H for every column."""
        while len(self._prefix) <= i:
            k = len(self._prefix) - 1
            nxt = self.adv.ops[k] @ apply_oracle_batch(self.layout, self._prefix[k], self.tables)
            self._prefix.append(nxt)
        return self._prefix[i]

    def _query(self, states: np.ndarray, k: int, active: tuple[int, ...]) -> np.ndarray:
        return self.adv.ops[k] @ apply_oracle_batch(self.layout, states, self._table(active))

    def run(self, schedule: Sequence[Slot], stop: int | None = None) -> np.ndarray:
        """Unnormalized S_r states, one per column; entry j measures x_j.

        With `stop`, returns the states right after the measurements at slot `stop`.
        """
        q = self.adv.q
        if len(schedule) != self.n:
            raise ScheduleError("one schedule entry per extracted input")
        by_time = sorted(range(self.n), key=lambda j: schedule[j][0])
        start = min(i for i, _ in schedule)
        states = self.prefix(start)
        for k in range(start, q + 1):
            for j, (i, _) in enumerate(schedule):
                if i == k:
                    reg = self.layout.query_input if k < q else self.layout.output(j)
                    states = kernels.project(states, reg, self.xs[:, j])
            if k == q or k == stop:
                break
            active = tuple(j for j in by_time if k + 1 > schedule[j][0] + schedule[j][1])
            states = self._query(states, k, active)
        return states

    def target(self) -> np.ndarray:
        """A^{H * theta x} phi_0 for every column."""
        states = self.prefix(0)
        full = tuple(range(self.n))
        for k in range(self.adv.q):
            states = self._query(states, k, full)
        return states

    def values(self, states: np.ndarray, predicate: QuantumPredicate) -> np.ndarray:
        xs = [tuple(r) for r in self.xs.tolist()]
        ths = [tuple(r) for r in self.thetas.tolist()]
        return apply_predicate(self.layout, states, xs, ths, predicate)


@dataclass(frozen=True)
class CheckResult:
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def margin(self) -> np.ndarray:
        return self.lhs - self.rhs

    @property
    def min_margin(self) -> float:
        return float(self.margin.min())


def _denominator(q: int, n: int) -> int:
    return (2 * q + 1) ** (2 * n)


def lemma_batch(
    adv: OracleAdversary,
    tables: np.ndarray,
    xs: np.ndarray,
    thetas: np.ndarray,
    predicate: QuantumPredicate,
    distinct: bool = True,
) -> CheckResult:
    """E_r ||G S_r||^2 against ||G A^{H*theta x} phi_0||^2 / (2q+1)^{2n}, per column."""
    sim = BatchSimulator(adv, tables, xs, thetas)
    schedules = multi_schedules(adv.q, sim.n, distinct)
    lhs = np.zeros(sim.K)
    for r in schedules:
        lhs += sim.values(sim.run(r), predicate)
    lhs /= len(schedules)
    rhs = sim.values(sim.target(), predicate) / _denominator(adv.q, sim.n)
    return CheckResult(lhs, rhs)


def _single(adv: OracleAdversary, H: OracleTable, xs: Sequence[int], thetas: Sequence[int]):
    check_table(adv.layout, H)
    if len(set(xs)) != len(xs):
        raise ValueError("extracted inputs must be distinct")
    return H.as_array()[None, :], np.asarray([xs]), np.asarray([thetas])


def lemma1_check(
    adv: OracleAdversary, H: OracleTable, x: int, theta: int, predicate: QuantumPredicate
) -> tuple[float, float, float]:
    t, xs, th = _single(adv, H, [x], [theta])
    res = lemma_batch(adv, t, xs, th, predicate)
    return float(res.lhs[0]), float(res.rhs[0]), float(res.margin[0])


def lemma2_check(
    adv: OracleAdversary,
    H: OracleTable,
    xs: Sequence[int],
    thetas: Sequence[int],
    predicate: QuantumPredicate,
    distinct: bool = True,
) -> tuple[float, float, float]:
    t, x_arr, th = _single(adv, H, list(xs), list(thetas))
    res = lemma_batch(adv, t, x_arr, th, predicate, distinct)
    return float(res.lhs[0]), float(res.rhs[0]), float(res.margin[0])


@dataclass(frozen=True)
class Branching:
    """Outcome-indexed unnormalized final states of one simulator run."""

    measurement_probs: dict[tuple[int, ...], float]
    states: dict[tuple[int, ...], StateVector]
    permutation: tuple[int, ...]


def _branch(adv: OracleAdversary, H: OracleTable, thetas: Sequence[int], schedule: Sequence[Slot]) -> Branching:
    """Branches over every outcome tuple; a repeated outcome keeps the later measurement's value."""
    layout = adv.layout
    n = len(schedule)
    outcomes = list(itertools.product(range(layout.n_inputs), repeat=n))
    K = len(outcomes)
    sim = BatchSimulator(adv, np.tile(H.as_array(), (K, 1)), np.asarray(outcomes).reshape(K, n), np.tile(thetas, (K, 1)))
    finals = sim.run(schedule)
    measured = sim.run(schedule, stop=max(i for i, _ in schedule))
    norms = (np.abs(measured) ** 2).sum(axis=0)
    probs = {o: float(norms[k]) for k, o in enumerate(outcomes)}
    states = {o: StateVector(layout, finals[:, k].copy()) for k, o in enumerate(outcomes)}
    return Branching(probs, states, order_permutation(schedule))


def simulate_single(adv: OracleAdversary, H: OracleTable, theta: int, schedule: Slot) -> Branching:
    check_table(adv.layout, H)
    check_schedule([schedule], adv.q)
    return _branch(adv, H, [theta], [tuple(schedule)])


def simulate_multi(
    adv: OracleAdversary, H: OracleTable, thetas: Sequence[int], schedule: Sequence[Slot]
) -> Branching:
    check_table(adv.layout, H)
    check_schedule(schedule, adv.q, distinct=True)
    if len(thetas) != len(schedule):
        raise ScheduleError("one reprogramming value per schedule entry")
    return _branch(adv, H, list(thetas), [tuple(s) for s in schedule])


# enumeration helpers for the exhaustive checks


def all_tables(layout: RegisterLayout) -> np.ndarray:
    return np.array(list(itertools.product(range(layout.n_y), repeat=layout.n_inputs)), dtype=np.int64).reshape(
        -1, layout.n_inputs
    )


def sample_tables(layout: RegisterLayout, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, layout.n_y, size=(count, layout.n_inputs), dtype=np.int64)


def distinct_tuples(n_inputs: int, n: int) -> list[tuple[int, ...]]:
    return [t for t in itertools.product(range(n_inputs), repeat=n) if len(set(t)) == n]


def grid(tables: np.ndarray, xs: Iterable[tuple], thetas: Iterable[tuple]):
    """Cartesian product of tables, x-tuples and theta-tuples as column arrays."""
    xs = list(xs)
    thetas = list(thetas)
    T, X, TH = [], [], []
    for t in tables:
        for x in xs:
            for th in thetas:
                T.append(t)
                X.append(x)
                TH.append(th)
    return np.asarray(T, dtype=np.int64), np.asarray(X, dtype=np.int64), np.asarray(TH, dtype=np.int64)


def lemma_exhaustive(
    adv: OracleAdversary,
    predicate: QuantumPredicate,
    n: int = 1,
    enumeration_limit: int = 256,
    samples: int = 64,
    rng: np.random.Generator | None = None,
    distinct: bool = True,
) -> CheckResult:
    """All (H, x, theta) when |Y|^|X| <= limit, otherwise `samples` seeded tables."""
    layout = adv.layout
    if layout.n_y**layout.n_inputs <= enumeration_limit:
        tables = all_tables(layout)
    else:
        if rng is None:
            raise ValueError("sampling mode needs an explicit rng")
        tables = sample_tables(layout, samples, rng)
    thetas = list(itertools.product(range(layout.n_y), repeat=n))
    T, X, TH = grid(tables, distinct_tuples(layout.n_inputs, n), thetas)
    return lemma_batch(adv, T, X, TH, predicate, distinct)


def theorem1_check(
    adv: OracleAdversary,
    x0: int,
    predicate: QuantumPredicate,
    tables: np.ndarray | None = None,
) -> tuple[float, float]:
    """(E_{H,theta}[simulator success], E_H[adversary success]) for the target x0.

    The simulator side averages the schedule mixture over (H, theta); the
    adversary side runs A^H unmodified with predicate Pi_{x0, H(x0)}.
    """
    layout = adv.layout
    if tables is None:
        tables = all_tables(layout)
    thetas = [(t,) for t in range(layout.n_y)]
    T, X, TH = grid(tables, [(x0,)], thetas)
    sim = BatchSimulator(adv, T, X, TH)
    schedules = legal_slots(adv.q)
    sim_vals = np.zeros(sim.K)
    for r in schedules:
        sim_vals += sim.values(sim.run([r]), predicate)
    sim_prob = float(sim_vals.mean() / len(schedules))

    direct = BatchSimulator(adv, tables, np.full((len(tables), 1), x0), tables[:, [x0]])
    adv_prob = float(direct.values(direct.prefix(adv.q), predicate).mean())
    return sim_prob, adv_prob
