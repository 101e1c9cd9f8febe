"""Basis-state simulation for classical-step adversaries over hash-chain domains.

States are dicts from basis tuples to amplitudes. Steps map basis tuples to
basis tuples; a step is only accepted when it is injective on the current
support, so it extends to a unitary. Oracle points are ('x0', x0, x) for the
first chain link and ('y', h, x) for later links.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Hashable, NamedTuple, Sequence

import numpy as np

from .simulate import Slot, increasing_schedules

Point = tuple


class Basis(NamedTuple):
    c: int
    qx: Point | None
    qy: int
    outs: tuple
    z: int
    work: tuple


SparseState = dict[Basis, complex]


class MergeError(ValueError):
    """A step sent two support states to the same basis state."""


class NotPowerOfTwo(ValueError):
    pass


def first_link(x0, x1) -> Point:
    return ("x0", x0, x1)


def next_link(h: int, x) -> Point:
    return ("y", h, x)


def chain_points(H: Callable[[Point], int], xs: Sequence) -> tuple[list[Point], list[int]]:
    """Chain inputs v_1..v_n and hashes h_1..h_n for xs = (x0, x1, ..., xn)."""
    points, hashes = [], []
    p = first_link(xs[0], xs[1])
    for i in range(1, len(xs)):
        if i > 1:
            p = next_link(hashes[-1], xs[i])
        points.append(p)
        hashes.append(H(p))
    return points, hashes


def unchain(v: Sequence[Point]) -> tuple:
    """x-tuple carried by chain inputs v_1..v_n, ignoring the hash parts."""
    return (v[0][1], v[0][2]) + tuple(p[2] for p in v[1:])


class LazyOracle:
    """Uniform H over an unbounded domain, filled on demand from a keyed SHAKE256 stream."""

    def __init__(self, key: bytes, range_size: int, overrides: dict | None = None):
        if range_size & (range_size - 1) or range_size < 1:
            raise NotPowerOfTwo(range_size)
        self.key = key
        self.range_size = range_size
        self.overrides = dict(overrides or {})
        self._cache: dict = {}
        self._width = max(1, (range_size.bit_length() + 7) // 8)

    def __call__(self, point: Point) -> int:
        if point in self.overrides:
            return self.overrides[point]
        if point not in self._cache:
            d = hashlib.shake_256(self.key + repr(point).encode()).digest(self._width)
            self._cache[point] = int.from_bytes(d, "big") % self.range_size
        return self._cache[point]

    def reprogrammed(self, points: Sequence[Point], values: Sequence[int]) -> "LazyOracle":
        if len(set(points)) != len(points):
            raise ValueError("reprogramming points must be distinct")
        out = LazyOracle(self.key, self.range_size, {**self.overrides, **dict(zip(points, values))})
        out._cache = self._cache
        return out


def apply_oracle(state: SparseState, H: Callable[[Point], int]) -> SparseState:
    out: SparseState = {}
    for b, a in state.items():
        nb = b._replace(qy=b.qy ^ H(b.qx)) if b.c else b
        out[nb] = a
    return out


def apply_step(state: SparseState, step: Callable[[Basis], Basis]) -> SparseState:
    out: SparseState = {}
    for b, a in state.items():
        nb = step(b)
        if nb in out:
            raise MergeError(f"{b} collides with another support state")
        out[nb] = a
    return out


@dataclass
class SparseAdversary:
    initial: SparseState
    steps: list[Callable[[Basis], Basis]]
    n_outputs: int
    name: str = "adversary"

    @property
    def q(self) -> int:
        return len(self.steps)

    def run(self, H, start_state: SparseState | None = None) -> SparseState:
        state = dict(self.initial if start_state is None else start_state)
        for step in self.steps:
            state = apply_step(apply_oracle(state, H), step)
        return state


def norm2(state: SparseState) -> float:
    return float(sum(abs(a) ** 2 for a in state.values()))


# classical programs compiled to basis steps


@dataclass
class ClassicalProgram:
    """A q-query classical algorithm with a superposed starting label.

    ``labels`` maps a label to its amplitude; ``queries[k](label, answers)``
    gives query k+1 from the answers so far; ``output(label, answers)``
    returns (x0, x1, ..., xn) and the claimed z.
    """

    labels: dict[Hashable, complex]
    queries: list[Callable[[Hashable, tuple], Point]]
    output: Callable[[Hashable, tuple], tuple[tuple, int]]
    n: int
    kind: str = "classical"

    def compile(self) -> SparseAdversary:
        if not self.queries:
            raise ValueError("a classical program needs at least one query")
        blank = (None,) * (self.n + 1)
        initial = {
            Basis(1, self.queries[0](lab, ()), 0, blank, 0, (lab,)): complex(amp) for lab, amp in self.labels.items()
        }
        steps = []
        q = len(self.queries)
        for k in range(1, q + 1):
            steps.append(self._step(k, k == q))
        return SparseAdversary(initial, steps, self.n + 1, self.kind)

    def _step(self, k: int, final: bool):
        queries, output = self.queries, self.output

        def step(b: Basis) -> Basis:
            work = b.work + ((b.qx, b.qy),)
            label, answers = work[0], tuple(a for _, a in work[1:])
            if final:
                xs, z = output(label, answers)
                return Basis(0, None, 0, tuple(xs), z, work)
            return Basis(1, queries[k](label, answers), 0, b.outs, b.z, work)

        return step


def extend_with_chain(adv: SparseAdversary, n: int) -> SparseAdversary:
    """Append n queries recomputing the hash chain of the output tuple; outputs become v_1..v_n."""
    steps = list(adv.steps)
    last = steps[-1]

    def prepare(b: Basis) -> Basis:
        b = last(b)
        return Basis(1, first_link(b.outs[0], b.outs[1]), 0, b.outs, b.z, b.work + ("+",))

    steps[-1] = prepare

    def link(j: int, final: bool):
        def step(b: Basis) -> Basis:
            work = b.work + ((b.qx, b.qy),)
            if final:
                ext = work[work.index("+") + 1 :]
                return Basis(0, None, 0, tuple(p for p, _ in ext), b.z, work)
            return Basis(1, next_link(b.qy, b.outs[j + 1]), 0, b.outs, b.z, work)

        return step

    for j in range(1, n + 1):
        steps.append(link(j, j == n))
    return SparseAdversary(dict(adv.initial), steps, n, adv.name + "+")


# ordered simulator


def _measure(state: SparseState, register: Callable[[Basis], Hashable]) -> dict[Hashable, SparseState]:
    branches: dict[Hashable, SparseState] = {}
    for b, a in state.items():
        branches.setdefault(register(b), {})[b] = a
    return branches


def simulate_schedule(
    adv: SparseAdversary, H: LazyOracle, thetas: Sequence[int], schedule: Sequence[Slot]
) -> dict[tuple, SparseState]:
    """Run the multi-input simulator for one schedule; returns final states per measured tuple.

    Outcome tuples with repeated entries are dropped (their reprogramming is undefined).
    """
    q = adv.q
    n = len(schedule)
    live: list[tuple[dict[int, Point], SparseState]] = [({}, dict(adv.initial))]
    by_time = sorted(range(n), key=lambda j: schedule[j][0])

    def oracle_for(measured: dict[int, Point], k: int):
        active = [j for j in by_time if j in measured and k + 1 > schedule[j][0] + schedule[j][1]]
        if not active:
            return H
        return H.reprogrammed([measured[j] for j in active], [thetas[j] for j in active])

    for k in range(q + 1):
        for j, (i, _) in enumerate(schedule):
            if i != k:
                continue
            reg = (lambda b: b.qx) if k < q else (lambda b, j=j: b.outs[j])
            nxt = []
            for measured, st in live:
                for value, sub in _measure(st, reg).items():
                    if value in measured.values():
                        continue
                    nxt.append(({**measured, j: value}, sub))
            live = nxt
        if k == q:
            break
        live = [(m, apply_step(apply_oracle(st, oracle_for(m, k)), adv.steps[k])) for m, st in live]
    return {tuple(m[j] for j in range(n)): st for m, st in live}


def ordered_success(
    adv_plus: SparseAdversary, H: LazyOracle, thetas: Sequence[int], schedules: Sequence[Sequence[Slot]] | None = None
) -> dict[tuple, float]:
    """P_S per x-tuple for one (H, theta): mean over increasing schedules of the mass with
    OUT = measured v, z = theta_n, reported under the x-part of v."""
    n = adv_plus.n_outputs
    if schedules is None:
        schedules = increasing_schedules(adv_plus.q, n)
    totals: dict[tuple, float] = {}
    for r in schedules:
        for v, st in simulate_schedule(adv_plus, H, thetas, r).items():
            mass = sum(abs(a) ** 2 for b, a in st.items() if b.outs == v and b.z == thetas[-1])
            if mass:
                x = unchain(v)
                totals[x] = totals.get(x, 0.0) + mass
    return {x: m / len(schedules) for x, m in totals.items()}


def ordered_simulate(
    adv: SparseAdversary, H: LazyOracle, thetas: Sequence[int], schedule: Sequence[Slot]
) -> dict[tuple, tuple[float, dict[int, float]]]:
    """Extend adv by the chain queries and run one increasing schedule.

    Returns, per extracted x-tuple (in chain order), its probability and the
    distribution of the output z.
    """
    n = adv.n_outputs - 1
    if any(schedule[j][0] >= schedule[j + 1][0] for j in range(len(schedule) - 1)):
        raise ValueError("the ordered simulator only runs increasing schedules")
    plus = extend_with_chain(adv, n)
    out: dict[tuple, tuple[float, dict[int, float]]] = {}
    for v, st in simulate_schedule(plus, H, thetas, schedule).items():
        x = unchain(v)
        p, zs = out.get(x, (0.0, {}))
        for b, a in st.items():
            zs[b.z] = zs.get(b.z, 0.0) + abs(a) ** 2
            p += abs(a) ** 2
        out[x] = (p, zs)
    return out


def adversary_success(adv: SparseAdversary, H: LazyOracle) -> dict[tuple, float]:
    """P_A per x-tuple: mass of outputs (x, z) with z equal to the last chain hash of x."""
    totals: dict[tuple, float] = {}
    for b, a in adv.run(H).items():
        _, hashes = chain_points(H, b.outs)
        if b.z == hashes[-1]:
            totals[b.outs] = totals.get(b.outs, 0.0) + abs(a) ** 2
    return totals


@dataclass(frozen=True)
class Theorem5Result:
    aggregate: float
    slack: float
    samples: int
    factor: float
    per_tuple: dict

    @property
    def margin(self) -> float:
        return self.slack - self.aggregate


def theorem5_check(adv: SparseAdversary, range_size: int, samples: int, seed: int) -> Theorem5Result:
    """Sum over x of max(0, n! P_A(x) / (q+n+1)^{2n} - P_S(x)) against n!/|Y|.

    P_A and P_S are Monte-Carlo means over the same (H, theta) samples.
    """
    n = adv.n_outputs - 1
    plus = extend_with_chain(adv, n)
    schedules = increasing_schedules(plus.q, n)
    factor = math.factorial(n) / (adv.q + n + 1) ** (2 * n)
    pa: dict[tuple, float] = {}
    ps: dict[tuple, float] = {}
    for s in range(samples):
        key = b"FSQ/v1/sparse" + seed.to_bytes(8, "big") + s.to_bytes(8, "big")
        H = LazyOracle(key, range_size)
        th = hashlib.shake_256(key + b"theta").digest(4 * n)
        thetas = [int.from_bytes(th[4 * j : 4 * j + 4], "big") % range_size for j in range(n)]
        for x, p in adversary_success(adv, H).items():
            pa[x] = pa.get(x, 0.0) + p / samples
        for x, p in ordered_success(plus, H, thetas, schedules).items():
            ps[x] = ps.get(x, 0.0) + p / samples
    per = {x: (pa.get(x, 0.0), ps.get(x, 0.0)) for x in set(pa) | set(ps)}
    agg = sum(max(0.0, factor * a - p) for a, p in per.values())
    return Theorem5Result(agg, math.factorial(n) / range_size, samples, factor, per)


# seeded corpus


def _points(rng: np.random.Generator, n_x0: int, n_x: int, n: int) -> tuple:
    """A duplicate-free-as-points tuple (x0, x1, ..., xn)."""
    return (int(rng.integers(n_x0)),) + tuple(int(v) for v in rng.integers(n_x, size=n))


def chain_program(xs: tuple, n: int) -> ClassicalProgram:
    """Queries the chain in order and outputs its last hash."""

    def query(k):
        return lambda lab, ans: first_link(xs[0], xs[1]) if k == 0 else next_link(ans[-1], xs[k + 1])

    return ClassicalProgram({0: 1}, [query(k) for k in range(n)], lambda lab, ans: (xs, ans[-1]), n, "chain")


def superposed_chain_program(tuples: Sequence[tuple], n: int) -> ClassicalProgram:
    amp = 1 / math.sqrt(len(tuples))

    def query(k):
        return lambda lab, ans: first_link(tuples[lab][0], tuples[lab][1]) if k == 0 else next_link(ans[-1], tuples[lab][k + 1])

    return ClassicalProgram(
        {i: amp for i in range(len(tuples))},
        [query(k) for k in range(n)],
        lambda lab, ans: (tuples[lab], ans[-1]),
        n,
        "superposed-chain",
    )


def guess_second_program(xs: tuple, guess: int) -> ClassicalProgram:
    """Queries the first link, ignores the answer and guesses h_1 for the second."""
    return ClassicalProgram(
        {0: 1},
        [lambda lab, ans: first_link(xs[0], xs[1]), lambda lab, ans: next_link(guess, xs[2])],
        lambda lab, ans: (xs, ans[-1]),
        2,
        "guess-second",
    )


def reversed_program(xs: tuple, guess: int) -> ClassicalProgram:
    """Queries the second link first with a guessed h_1, then the first link."""
    return ClassicalProgram(
        {0: 1},
        [lambda lab, ans: next_link(guess, xs[2]), lambda lab, ans: first_link(xs[0], xs[1])],
        lambda lab, ans: (xs, ans[0]),
        2,
        "reversed",
    )


def junk_program(xs: tuple, points: Sequence[Point], z: int) -> ClassicalProgram:
    return ClassicalProgram(
        {0: 1}, [lambda lab, ans, p=p: p for p in points], lambda lab, ans: (xs, z), 2, "junk"
    )


def repeat_program(xs: tuple) -> ClassicalProgram:
    """Queries the first link twice and claims its hash as the chain end."""
    p = first_link(xs[0], xs[1])
    return ClassicalProgram({0: 1}, [lambda lab, ans: p, lambda lab, ans: p], lambda lab, ans: (xs, ans[-1]), 2, "repeat")


KINDS = ("chain", "superposed-chain", "guess-second", "reversed", "junk", "repeat")


def corpus(count: int, range_size: int, seed: int, n_x0: int = 2, n_x: int = 3) -> list[SparseAdversary]:
    """`count` seeded 2-query, n=2 adversaries cycling through KINDS."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        kind = KINDS[k % len(KINDS)]
        xs = _points(rng, n_x0, n_x, 2)
        if kind == "chain":
            prog = chain_program(xs, 2)
        elif kind == "superposed-chain":
            extra = [xs] + [_points(rng, n_x0, n_x, 2) for _ in range(int(rng.integers(1, 4)))]
            prog = superposed_chain_program(list(dict.fromkeys(extra)), 2)
        elif kind == "guess-second":
            prog = guess_second_program(xs, int(rng.integers(range_size)))
        elif kind == "reversed":
            prog = reversed_program(xs, int(rng.integers(range_size)))
        elif kind == "junk":
            pts = [next_link(int(rng.integers(range_size)), int(rng.integers(n_x))) for _ in range(2)]
            prog = junk_program(xs, pts, int(rng.integers(range_size)))
        else:
            prog = repeat_program(xs)
        out.append(prog.compile())
    return out


def canonical_chain_check(xs: tuple, range_size: int, seed: int) -> tuple[float, dict]:
    """Probability that the chain adversary's tuple comes out, in order, under the
    schedule that measures query j right before it is answered."""
    n = len(xs) - 1
    adv = chain_program(xs, n).compile()
    H = LazyOracle(b"FSQ/v1/sparse/chain" + seed.to_bytes(8, "big"), range_size)
    thetas = [(seed + j) % range_size for j in range(n)]
    res = ordered_simulate(adv, H, thetas, [(j, 0) for j in range(n)])
    return res.get(xs, (0.0, {}))[0], res


__all__ = [
    "Basis",
    "ClassicalProgram",
    "KINDS",
    "LazyOracle",
    "MergeError",
    "SparseAdversary",
    "Theorem5Result",
    "adversary_success",
    "apply_oracle",
    "apply_step",
    "canonical_chain_check",
    "chain_points",
    "chain_program",
    "corpus",
    "extend_with_chain",
    "guess_second_program",
    "junk_program",
    "norm2",
    "ordered_simulate",
    "ordered_success",
    "repeat_program",
    "reversed_program",
    "simulate_schedule",
    "superposed_chain_program",
    "theorem5_check",
    "unchain",
]
