"""Benchmark the compiled bit kernels against the pure-Python fallback.

Times the three kernel entry points on random inputs:

  compose   boolean matrix product of dense n x n relations
  closure   transitive closure of a sparse n x n relation
  clone     BFS closure of ternary term functions of a random groupoid

Usage: python benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeat 5]
"""

import argparse
import random
import time

from goursat import _kernels_py as pure

try:
    from goursat import _kernels as compiled
except ImportError:
    compiled = None

from goursat.kernels import close_vectors


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_compose(backend, n, rng):
    rows_r = [rng.getrandbits(n) for _ in range(n)]
    rows_s = [rng.getrandbits(n) for _ in range(n)]
    return lambda: backend.compose_bits(rows_r, rows_s, n)


def bench_closure(backend, n, rng):
    rows = [0] * n
    for _ in range(2 * n):
        rows[rng.randrange(n)] |= 1 << rng.randrange(n)
    return lambda: backend.transitive_closure_bits(rows)


def bench_clone(backend, n, rng):
    # ternary term functions of a random binary operation on `size` points
    size = 3
    table = bytes(rng.randrange(size) for _ in range(size * size))
    width = size**3
    projs = []
    for i in range(3):
        stride = size ** (2 - i)
        projs.append(bytes((t // stride) % size for t in range(width)))

    def run():
        vectors = list(projs)
        known = set(vectors)
        frontier = 0
        while True:
            before = len(vectors)
            new, _, truncated, _ = backend.expand_layer(
                size, [(2, table)], vectors, known, frontier, 20000, 10**8)
            vectors.extend(new)
            frontier = before
            if truncated or not new:
                return len(vectors)

    return run


BENCHES = {"compose": bench_compose, "closure": bench_closure,
           "clone": bench_clone}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    if compiled is None:
        print("compiled kernels unavailable; timing the pure lane only")
    lanes = [("python", pure)] + ([("compiled", compiled)] if compiled else [])
    print(f"{'bench':<10}{'n':>6}" + "".join(f"{name:>14}" for name, _ in lanes)
          + ("       speedup" if compiled else ""))
    for name, factory in BENCHES.items():
        for n in sizes:
            row = f"{name:<10}{n:>6}"
            times = []
            results = []
            for lane_name, backend in lanes:
                rng = random.Random(1234 + n)
                run = factory(backend, n, rng)
                best, result = timeit(run, args.repeat)
                times.append(best)
                results.append(result)
                row += f"{best * 1000:>12.3f}ms"
            if len(results) == 2:
                assert results[0] == results[1], f"lane mismatch in {name}"
                row += f"{times[0] / times[1]:>12.1f}x"
            print(row)


if __name__ == "__main__":
    main()
