"""Compare the numba and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--q 5] [--repeat 3]

Each kernel is run once untimed per backend so numba compilation (or cache
loading) is excluded, then timed ``--repeat`` times; the best time is kept.
Results are checked for equality across backends before anything is printed.
"""
import argparse
import time

import numpy as np

from hypercount import kernels
from hypercount.ffield import make_field
from hypercount.matteval import ws_terms, xstrip_terms


def _best(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    spec = make_field(args.q)
    rng = np.random.default_rng(0)
    mats = rng.integers(0, args.q, size=(20000, 7, 7))
    q = args.q
    cases = {
        "det_batch 20000 x 7x7": lambda: kernels.det_batch(mats, spec),
        "brute ws:4 (q^8 points)": lambda: kernels.count_pencil_zeros(4, 8, ws_terms(4), spec),
        "xstrip shard baseline": lambda: kernels.xstrip_shard("baseline", 1, 1, xstrip_terms(), spec),
        "xstrip shard accelerated": lambda: kernels.xstrip_shard("accelerated", 1, 1, xstrip_terms(), spec),
    }
    backends = kernels.available_backends()
    print(f"q = {q}; backends: {', '.join(backends)}")
    print(f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        times, outs = [], []
        for b in backends:
            with kernels.use_backend(b):
                t, out = _best(fn, args.repeat)
            times.append(t)
            outs.append(out)
        if len(outs) == 2:
            assert np.array_equal(np.asarray(outs[0]), np.asarray(outs[1])), f"backends disagree on {name}"
        row = f"{name:28s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
