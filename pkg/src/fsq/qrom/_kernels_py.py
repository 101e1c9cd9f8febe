"""numpy implementations of the batched simulation kernels."""

from __future__ import annotations

import numpy as np


def xor_oracle(states: np.ndarray, tables: np.ndarray, n_x: int, n_o: int, n_y: int, n_w: int) -> np.ndarray:
    D, K = states.shape
    s = states.reshape(2, n_x, n_o, n_y, n_w, K)
    out = s.copy()
    # gather equals scatter because y -> y ^ t is an involution
    idx = np.arange(n_y)[None, None, :, None, None] ^ tables.T[:, None, None, None, :]
    out[1] = np.take_along_axis(s[1], idx, axis=2)
    return out.reshape(D, K)


def project(states: np.ndarray, reg_values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return np.where(reg_values[:, None] == targets[None, :], states, 0)


def masked_norms(states: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return (np.abs(states) ** 2 * mask).sum(axis=0)
