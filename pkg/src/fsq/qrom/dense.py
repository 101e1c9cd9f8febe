"""Dense states, oracle adversaries and quantum predicates."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..fs.oracle import OracleTable
from . import kernels
from .layout import RegisterLayout

TOL = 1e-9


class LayoutMismatch(ValueError):
    pass


@dataclass
class StateVector:
    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.layout.dim,):
            raise LayoutMismatch(f"amplitude vector of shape {self.amps.shape} for dimension {self.layout.dim}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def domain_for(layout: RegisterLayout) -> tuple[int, ...]:
    return tuple(range(layout.n_inputs))


def check_table(layout: RegisterLayout, H: OracleTable) -> None:
    if H.domain != domain_for(layout) or H.range_cardinality != layout.n_y:
        raise LayoutMismatch("oracle table does not match the query registers")


def apply_oracle_batch(layout: RegisterLayout, states: np.ndarray, tables: np.ndarray) -> np.ndarray:
    """XOR oracle on each column of states (D, K) with its own table row (K, |X|)."""
    return kernels.xor_oracle(
        np.ascontiguousarray(states, dtype=np.complex128),
        np.ascontiguousarray(tables, dtype=np.int64),
        *layout.kernel_dims,
    )


def apply_oracle(state: StateVector, H: OracleTable) -> StateVector:
    """|c, x, y> -> |c, x, y ^ c.H(x)>."""
    check_table(state.layout, H)
    out = apply_oracle_batch(state.layout, state.amps[:, None], H.as_array()[None, :])
    return StateVector(state.layout, out[:, 0])


def oracle_matrix(layout: RegisterLayout, H: OracleTable) -> np.ndarray:
    check_table(layout, H)
    return apply_oracle_batch(layout, np.eye(layout.dim, dtype=np.complex128), np.tile(H.as_array(), (layout.dim, 1)))


@dataclass
class Step:
    """A unitary, optionally preceded by a projection."""

    unitary: np.ndarray
    projection: np.ndarray | None = None

    @property
    def operator(self) -> np.ndarray:
        return self.unitary if self.projection is None else self.unitary @ self.projection


@dataclass
class OracleAdversary:
    layout: RegisterLayout
    initial: np.ndarray
    steps: list[Step] = field(default_factory=list)

    def __post_init__(self):
        self.initial = np.asarray(self.initial, dtype=np.complex128)
        d = self.layout.dim
        if self.initial.shape != (d,):
            raise LayoutMismatch("initial state does not match the layout")
        for s in self.steps:
            if s.unitary.shape != (d, d) or (s.projection is not None and s.projection.shape != (d, d)):
                raise LayoutMismatch("step operator does not match the layout")
        self._ops = [s.operator for s in self.steps]

    @property
    def q(self) -> int:
        return len(self.steps)

    @property
    def ops(self) -> list[np.ndarray]:
        return self._ops

    def check(self, tol: float = TOL) -> None:
        """Raise if a step is not unitary or a projection is not idempotent Hermitian."""
        eye = np.eye(self.layout.dim)
        for k, s in enumerate(self.steps, start=1):
            if np.abs(s.unitary.conj().T @ s.unitary - eye).max() > tol:
                raise ValueError(f"step {k} is not unitary")
            P = s.projection
            if P is not None and (np.abs(P @ P - P).max() > tol or np.abs(P.conj().T - P).max() > tol):
                raise ValueError(f"step {k} projection is not an orthogonal projection")
        if abs(np.linalg.norm(self.initial) - 1) > 1e-10:
            raise ValueError("initial state is not normalized")


def run_adversary(
    adv: OracleAdversary, H: OracleTable, start: int = 0, stop: int | None = None, state: StateVector | None = None
) -> StateVector:
    """A_{start -> stop} = A_stop O ... A_{start+1} O, identity when stop <= start."""
    check_table(adv.layout, H)
    stop = adv.q if stop is None else stop
    if not 0 <= start <= adv.q or not 0 <= stop <= adv.q:
        raise ValueError("partial run bounds outside [0, q]")
    amps = (adv.initial if state is None else state.amps)[:, None]
    table = H.as_array()[None, :]
    for k in range(start, stop):
        amps = adv.ops[k] @ apply_oracle_batch(adv.layout, amps, table)
    return StateVector(adv.layout, amps[:, 0])


# predicates


class QuantumPredicate:
    """Family of projections on Z indexed by (x-tuple, theta-tuple).

    ``mask`` returns a boolean diagonal over Z; override ``matrix`` for
    non-diagonal projections and set ``diagonal = False``.
    """

    diagonal = True

    def __init__(self, z_dim: int, fn: Callable[[tuple, tuple], np.ndarray] | None = None):
        self.z_dim = z_dim
        self._fn = fn
        self._cache: dict = {}

    def mask(self, xs: tuple, thetas: tuple) -> np.ndarray:
        key = (tuple(xs), tuple(thetas))
        if key not in self._cache:
            m = np.asarray(self._fn(*key), dtype=bool)
            if m.shape != (self.z_dim,):
                raise LayoutMismatch("predicate mask does not match the Z register")
            self._cache[key] = m
        return self._cache[key]

    def matrix(self, xs: tuple, thetas: tuple) -> np.ndarray:
        return np.diag(self.mask(xs, thetas).astype(np.complex128))


class MatrixPredicate(QuantumPredicate):
    diagonal = False

    def __init__(self, z_dim: int, fn: Callable[[tuple, tuple], np.ndarray]):
        super().__init__(z_dim, None)
        self._mfn = fn

    def matrix(self, xs: tuple, thetas: tuple) -> np.ndarray:
        key = (tuple(xs), tuple(thetas))
        if key not in self._cache:
            self._cache[key] = np.asarray(self._mfn(*key), dtype=np.complex128)
        return self._cache[key]

    def mask(self, xs, thetas):
        raise TypeError("non-diagonal predicate")


def identity_predicate(layout: RegisterLayout) -> QuantumPredicate:
    return QuantumPredicate(layout.z_dim, lambda xs, th: np.ones(layout.z_dim, dtype=bool))


def output_equals_predicate(layout: RegisterLayout, j: int = 0) -> QuantumPredicate:
    """Query-output register holds theta_j."""
    zq = np.arange(layout.z_dim) // layout.work_dim
    return QuantumPredicate(layout.z_dim, lambda xs, th: zq == th[j])


def random_predicate(layout: RegisterLayout, seed: int, density: float = 0.5) -> QuantumPredicate:
    """Diagonal 0/1 projections drawn independently per (x, theta) from a keyed RNG."""

    def fn(xs, th):
        digest = hashlib.sha256(repr((seed, tuple(xs), tuple(th))).encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        return rng.random(layout.z_dim) < density

    return QuantumPredicate(layout.z_dim, fn)


def success_prob(adv: OracleAdversary, H: OracleTable, xs: Sequence[int], predicate: QuantumPredicate) -> float:
    """||G_x^H phi_q^H||^2 with G = |x><x| (x) Pi_{x, H(x)}."""
    final = run_adversary(adv, H)
    xs = tuple(xs)
    thetas = tuple(H[x] for x in xs)
    return float(apply_predicate(adv.layout, final.amps[:, None], [xs], [thetas], predicate)[0])


def apply_predicate(
    layout: RegisterLayout,
    states: np.ndarray,
    xs: Sequence[tuple],
    thetas: Sequence[tuple],
    predicate: QuantumPredicate,
) -> np.ndarray:
    """Per-column ||(|x><x| on the outputs (x) Pi_{x,theta} on Z) psi||^2."""
    K = states.shape[1]
    xs_arr = np.asarray(xs, dtype=np.int64).reshape(K, layout.n_outputs)
    if predicate.diagonal:
        mask = np.ones((layout.dim, K), dtype=bool)
        for j in range(layout.n_outputs):
            mask &= layout.output(j)[:, None] == xs_arr[None, :, j]
        zmasks = np.stack([predicate.mask(tuple(x), tuple(t)) for x, t in zip(xs, thetas)], axis=1)
        mask &= zmasks[layout.z_index, :]
        return kernels.masked_norms(np.ascontiguousarray(states), mask.astype(np.uint8))
    out = np.empty(K)
    lead = layout.dim // layout.z_dim
    for k in range(K):
        v = states[:, k].copy()
        for j in range(layout.n_outputs):
            v[layout.output(j) != xs_arr[k, j]] = 0
        v = v.reshape(lead, layout.z_dim) @ predicate.matrix(tuple(xs[k]), tuple(thetas[k])).T
        out[k] = float(np.vdot(v, v).real)
    return out


# random test adversaries


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary: QR of a complex Gaussian matrix with the phases of R divided out."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))[None, :]


def random_z_projection(layout: RegisterLayout, rng: np.random.Generator) -> np.ndarray:
    bits = rng.random(layout.z_dim) < 0.5
    if layout.z_dim > 1 and (bits.all() or not bits.any()):
        bits[rng.integers(layout.z_dim)] ^= True
    return np.diag(bits[layout.z_index].astype(np.complex128))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_adversary(
    layout: RegisterLayout, q: int, rng: np.random.Generator, projection_steps: int = 0
) -> OracleAdversary:
    """q Haar-random steps, of which `projection_steps` (chosen at random) get a diagonal Z projection."""
    with_proj = set(rng.permutation(q)[: min(projection_steps, q)].tolist()) if q else set()
    steps = [
        Step(random_unitary(layout.dim, rng), random_z_projection(layout, rng) if k in with_proj else None)
        for k in range(q)
    ]
    return OracleAdversary(layout, random_state(layout.dim, rng), steps)
