"""Time the simulation kernels on both backends, then one end-to-end Lemma 1 cell.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--batch 64]

Batches are columns of a (dim, batch) state matrix, one column per oracle
table, which is how the lemma checks call the kernels.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from fsq.qrom import kernels
from fsq.qrom.dense import random_adversary, random_predicate
from fsq.qrom.layout import RegisterLayout
from fsq.qrom.simulate import lemma_exhaustive

LAYOUTS = [RegisterLayout(3, 2, 1, 2), RegisterLayout(3, 1, 2, 2), RegisterLayout(4, 2, 2, 1)]


def kernel_cases(layout: RegisterLayout, batch: int, rng: np.random.Generator):
    states = rng.standard_normal((layout.dim, batch)) + 1j * rng.standard_normal((layout.dim, batch))
    tables = rng.integers(0, layout.n_y, size=(batch, layout.n_inputs))
    targets = rng.integers(0, layout.n_inputs, size=batch)
    mask = (rng.random((layout.dim, batch)) < 0.5).astype(np.uint8)
    return {
        "xor_oracle": lambda: kernels.xor_oracle(states, tables, *layout.kernel_dims),
        "project": lambda: kernels.project(states, layout.query_input, targets),
        "masked_norms": lambda: kernels.masked_norms(states, mask),
    }


def best_of(fn, repeat: int, number: int) -> float:
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args()

    backends = [b for b in ("python", "compiled") if b in kernels.BACKENDS]
    if "compiled" not in backends:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace` to compare")
    before = kernels.get_backend()
    rng = np.random.default_rng(0)

    print(f"{'kernel':14s} {'dim':>6s} " + " ".join(f"{b + ' us':>12s}" for b in backends) + f" {'speedup':>8s}")
    try:
        for layout in LAYOUTS:
            cases = kernel_cases(layout, args.batch, rng)
            for name, fn in cases.items():
                times = []
                for b in backends:
                    kernels.set_backend(b)
                    times.append(best_of(fn, args.repeat, args.number))
                speed = f"{times[0] / times[-1]:8.2f}" if len(times) == 2 else ""
                print(f"{name:14s} {layout.dim:6d} " + " ".join(f"{t * 1e6:12.1f}" for t in times) + f" {speed}")

        layout = RegisterLayout(3, 2, 1, 2)
        adv = random_adversary(layout, 3, np.random.default_rng(1), projection_steps=1)
        pred = random_predicate(layout, 1)
        print(f"\nlemma 1 check, q = 3, |X| = 3, |Y| = 4, dim {layout.dim}, 64 tables")
        for b in backends:
            kernels.set_backend(b)
            t = best_of(lambda: lemma_exhaustive(adv, pred), max(1, args.repeat // 2), 1)
            print(f"  {b:10s} {t * 1e3:8.1f} ms")
    finally:
        kernels.set_backend(before)


if __name__ == "__main__":
    main()
