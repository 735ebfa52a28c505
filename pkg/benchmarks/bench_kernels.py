"""Time the compiled kernels against the numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from pipedreams import kernels, walk
from pipedreams.rng import trial_keys
from pipedreams.shape import staircase


def cases():
    s = staircase(200)
    diags = np.ascontiguousarray(s.diagonals, dtype=np.int32)
    keys = trial_keys(1, "bench", 0, 200)
    cum = walk.transition_matrix(0.5).cumulative
    init = np.zeros(2000, dtype=np.int8) + 1
    k2000 = trial_keys(1, "bench", 0, 2000)
    perm = np.ascontiguousarray(np.random.default_rng(0).permutation(100000) + 1, dtype=np.int64)
    return [
        ("count_inversions n=1e5", lambda k: k.count_inversions(perm)),
        ("subword_inversions staircase(200) x200", lambda k: k.subword_inversions(diags, 0.5, keys, s.n)),
        ("pair_first_kiss ell=4 cap=4096 x2000", lambda k: k.pair_first_kiss(4, init, 0.5, 4096, k2000)),
        ("psi_sample k=4096 x2000", lambda k: k.psi_sample(4096, init, cum, k2000)),
        ("pipe_turns k=100 x2000", lambda k: k.pipe_turns(100, 1, 0.5, k2000)),
    ]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = kernels.available_backends()
    print(f"{'kernel':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases():
        ts = [best_of(lambda: fn(kernels.get_backend(n)), args.repeat) for n in names]
        row = f"{label:42s}" + "".join(f"{t:11.4f}s" for t in ts)
        if len(ts) == 2:
            row += f"{ts[1] / ts[0]:11.1f}x"
        print(row)
    if "compiled" not in names:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
