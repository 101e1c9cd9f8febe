"""Explicit-matrix reference for the measure-and-reprogram checks.

Deliberately slow and literal: builds every operator as a dense matrix with
its own index arithmetic, applies projection and unitary of each step
separately, and loops over schedules one at a time.
"""

from __future__ import annotations

import itertools

import numpy as np


def dims(layout):
    nx, n = layout.n_inputs, layout.n_outputs
    return 2, nx, nx**n, 1 << layout.output_bits, layout.work_dim


def basis_fields(layout):
    """(c, qx, outs tuple, y, w) for every basis index, in index order."""
    C, NX, NO, NY, W = dims(layout)
    n = layout.n_outputs
    out = []
    for c, qx, o, y, w in itertools.product(range(C), range(NX), range(NO), range(NY), range(W)):
        digits = tuple((o // NX ** (n - 1 - j)) % NX for j in range(n))
        out.append((c, qx, digits, y, w))
    return out


def oracle(layout, table) -> np.ndarray:
    fields = basis_fields(layout)
    index = {f: k for k, f in enumerate(fields)}
    D = len(fields)
    M = np.zeros((D, D))
    for k, (c, qx, outs, y, w) in enumerate(fields):
        M[index[(c, qx, outs, y ^ (table[qx] if c else 0), w)], k] = 1
    return M


def diagonal(layout, keep) -> np.ndarray:
    return np.diag([1.0 if keep(f) else 0.0 for f in basis_fields(layout)])


def query_projector(layout, x):
    return diagonal(layout, lambda f: f[1] == x)


def output_projector(layout, j, x):
    return diagonal(layout, lambda f: f[2][j] == x)


def predicate_projector(layout, xs, mask):
    W = layout.work_dim
    return diagonal(layout, lambda f: all(f[2][j] == xs[j] for j in range(len(xs))) and mask[f[3] * W + f[4]])


def reprogrammed(table, points):
    t = list(table)
    for x, theta in points:
        t[x] = theta
    return t


def schedule_state(adv, table, xs, thetas, schedule):
    """Simulator output for one schedule, projecting onto the given outcome tuple."""
    layout = adv.layout
    q = adv.q
    psi = adv.initial.copy()
    for k in range(q + 1):
        for j, (i, _) in enumerate(schedule):
            if i == k:
                P = query_projector(layout, xs[j]) if k < q else output_projector(layout, j, xs[j])
                psi = P @ psi
        if k == q:
            break
        # query k+1 is answered by the reprogrammed oracle at x_j once k+1 > i_j + b_j
        active = [(xs[j], thetas[j]) for j, (i, b) in enumerate(schedule) if k + 1 > i + b]
        psi = oracle(layout, reprogrammed(table, active)) @ psi
        step = adv.steps[k]
        if step.projection is not None:
            psi = step.projection @ psi
        psi = step.unitary @ psi
    return psi


def full_run(adv, table):
    psi = adv.initial.copy()
    O = oracle(adv.layout, table)
    for step in adv.steps:
        psi = O @ psi
        if step.projection is not None:
            psi = step.projection @ psi
        psi = step.unitary @ psi
    return psi


def slots(q):
    return [(i, b) for i in range(q) for b in (0, 1)] + [(q, 0)]


def lemma_sides(adv, table, xs, thetas, predicate, distinct=True):
    """(mean over schedules of ||G S_r||^2, ||G A^{H*theta x}||^2 / (2q+1)^{2n})."""
    n = len(xs)
    G = predicate_projector(adv.layout, xs, predicate.mask(tuple(xs), tuple(thetas)))
    schedules = [r for r in itertools.product(slots(adv.q), repeat=n) if not distinct or len({i for i, _ in r}) == n]
    lhs = np.mean([np.linalg.norm(G @ schedule_state(adv, table, xs, thetas, r)) ** 2 for r in schedules])
    target = full_run(adv, reprogrammed(table, list(zip(xs, thetas))))
    rhs = np.linalg.norm(G @ target) ** 2 / (2 * adv.q + 1) ** (2 * n)
    return float(lhs), float(rhs)
