"""Time GF(2) elimination on torus boundary matrices, compiled vs pure Python.

    python benchmarks/bench_gf2.py [--sizes 16 32 48] [--repeat 3]
"""
import argparse
import random
import time

from conleyls import gf2
from conleyls.grid import build_grid
from conleyls.homology import build_pair


def torus_boundaries(n):
    grid = build_grid([[0, 1], [0, 1]], [n, n], [True, True])
    pair = build_pair(grid, range(grid.size))
    return pair.boundary[1], pair.boundary[2], len(pair.chains[1])


def scrambled(rows, ncols, seed=0):
    """Random row combinations; same rank, denser rows."""
    rng = random.Random(seed)
    out = list(rows)
    for i in range(len(out)):
        j = rng.randrange(len(out))
        if i != j:
            out[i] ^= out[j]
    return out


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 48])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if gf2.BACKEND != "cython":
        print("compiled kernel not built; only the Python backend is available")
    print(f"{'n':>4} {'matrix':>10} {'rows':>6} {'rank':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in args.sizes:
        d1, d2, n1 = torus_boundaries(n)
        cases = [("d2", d2, n1), ("d2 mixed", scrambled(d2, n1), n1), ("d1", d1, n * n)]
        for name, rows, ncols in cases:
            tp, rp = best_of(lambda: gf2.rank(rows, "python"), args.repeat)
            if gf2.BACKEND == "cython":
                tc, rc = best_of(lambda: gf2.rank(rows, "cython"), args.repeat)
                assert rc == rp, (rc, rp)
                print(f"{n:>4} {name:>10} {len(rows):>6} {rp:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}")
            else:
                print(f"{n:>4} {name:>10} {len(rows):>6} {rp:>6} {tp:>10.4f} {'-':>10} {'-':>8}")
        tp, kp = best_of(lambda: gf2.left_kernel(d2, n1, "python"), args.repeat)
        if gf2.BACKEND == "cython":
            tc, kc = best_of(lambda: gf2.left_kernel(d2, n1, "cython"), args.repeat)
            assert len(kc) == len(kp)
            print(f"{n:>4} {'kernel d2':>10} {len(d2):>6} {len(kp):>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}")


if __name__ == "__main__":
    main()
