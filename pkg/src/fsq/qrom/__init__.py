"""Dense and sparse simulation of oracle quantum algorithms and measure-and-reprogram simulators."""

from ..fs.oracle import OracleTable
from .dense import (
    LayoutMismatch,
    MatrixPredicate,
    OracleAdversary,
    QuantumPredicate,
    StateVector,
    Step,
    apply_oracle,
    identity_predicate,
    oracle_matrix,
    output_equals_predicate,
    random_adversary,
    random_predicate,
    random_unitary,
    run_adversary,
    success_prob,
)
from .layout import MAX_DIM, DimensionCapError, RegisterLayout
from .simulate import (
    BatchSimulator,
    Branching,
    CheckResult,
    ScheduleError,
    increasing_schedules,
    legal_slots,
    lemma1_check,
    lemma2_check,
    lemma_batch,
    lemma_exhaustive,
    multi_schedules,
    order_permutation,
    simulate_multi,
    simulate_single,
    theorem1_check,
)


def reprogram(H: OracleTable, x, theta) -> OracleTable:
    return H.reprogram(x, theta)


def reprogram_multi(H: OracleTable, xs, thetas) -> OracleTable:
    return H.reprogram_multi(xs, thetas)
