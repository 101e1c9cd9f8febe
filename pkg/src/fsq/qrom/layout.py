"""Register layout for dense simulation.

Tensor factors in order: control bit, query input, output registers X_1..X_n,
query output (m-bit string), work. The Z register is (query output, work).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_DIM = 4096


class DimensionCapError(ValueError):
    def __init__(self, dim: int, cap: int = MAX_DIM):
        super().__init__(f"state dimension {dim} exceeds the cap {cap}")
        self.dim = dim
        self.cap = cap


@dataclass(frozen=True)
class RegisterLayout:
    n_inputs: int
    output_bits: int
    n_outputs: int = 1
    work_dim: int = 1

    def __post_init__(self):
        if self.n_inputs < 1 or self.output_bits < 0 or self.n_outputs < 0 or self.work_dim < 1:
            raise ValueError("invalid register sizes")
        if self.dim > MAX_DIM:
            raise DimensionCapError(self.dim)

    @property
    def n_y(self) -> int:
        return 1 << self.output_bits

    @property
    def n_o(self) -> int:
        return self.n_inputs**self.n_outputs

    @property
    def shape(self) -> tuple[int, int, int, int, int]:
        return (2, self.n_inputs, self.n_o, self.n_y, self.work_dim)

    @property
    def dim(self) -> int:
        return 2 * self.n_inputs * self.n_inputs**self.n_outputs * (1 << self.output_bits) * self.work_dim

    @property
    def z_dim(self) -> int:
        return self.n_y * self.work_dim

    @property
    def kernel_dims(self) -> tuple[int, int, int, int]:
        return self.n_inputs, self.n_o, self.n_y, self.work_dim

    @cached_property
    def _grid(self):
        return [g.reshape(-1).astype(np.int64) for g in np.indices(self.shape)]

    @property
    def control(self) -> np.ndarray:
        return self._grid[0]

    @property
    def query_input(self) -> np.ndarray:
        return self._grid[1]

    @property
    def query_output(self) -> np.ndarray:
        return self._grid[3]

    @property
    def work(self) -> np.ndarray:
        return self._grid[4]

    @cached_property
    def z_index(self) -> np.ndarray:
        return self._grid[3] * self.work_dim + self._grid[4]

    @cached_property
    def _outs(self) -> list[np.ndarray]:
        o = self._grid[2]
        n = self.n_outputs
        return [(o // self.n_inputs ** (n - 1 - j)) % self.n_inputs for j in range(n)]

    def output(self, j: int) -> np.ndarray:
        """Value of output register X_{j+1} at every basis index."""
        return self._outs[j]

    def index(self, c: int, qx: int, outs: tuple[int, ...] = (), qy: int = 0, w: int = 0) -> int:
        if len(outs) != self.n_outputs:
            raise ValueError("one value per output register required")
        o = 0
        for v in outs:
            o = o * self.n_inputs + v
        return int(np.ravel_multi_index((c, qx, o, qy, w), self.shape))

    def basis(self, c: int, qx: int, outs: tuple[int, ...] = (), qy: int = 0, w: int = 0) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.complex128)
        v[self.index(c, qx, outs, qy, w)] = 1.0
        return v
