"""Time the batch walk with the numba and numpy backends on the same uniforms.

    python3 benchmarks/bench_sampler.py --n 1000 --trials 10000
"""

import argparse
import time

import numpy as np

from catpaths import _accel
from catpaths import sampler as SM
from catpaths.model import JumpSet


def bench(ft, U, backend, repeat):
    SM.walk_stats(ft, U[:2], backend)  # compile / warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = SM.walk_stats(ft, U, backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jumps", default="-1:1,1:1,q=1")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    J = JumpSet.parse(args.jumps)
    t0 = time.perf_counter()
    ft = SM.build_float_tables(J, args.n)
    print(f"table build: {time.perf_counter() - t0:.3f}s  ({J}, n={args.n})")
    U = np.random.Generator(np.random.PCG64(args.seed)).random((args.trials, args.n))

    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    results = {}
    for be in backends:
        secs, out = bench(ft, U, be, args.repeat)
        results[be] = out
        rate = args.trials / secs
        print(f"{be:>6}: {secs:8.3f}s  {rate:12.0f} paths/s")
    if len(results) == 2:
        same = all(np.array_equal(a, b) for a, b in zip(results["numpy"], results["numba"]))
        print(f"identical output: {same}")


if __name__ == "__main__":
    main()
