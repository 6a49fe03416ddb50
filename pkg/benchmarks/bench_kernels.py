"""Time each hot kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--n 1500] [--repeat 3]

The first numba call per kernel includes JIT compilation (or a cache load),
so it runs once untimed as warm-up.
"""

import argparse
import time

import numpy as np

from basesc import _kernels
from basesc.spectral import random_graph


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, rng):
    X = rng.random((n, 8))
    Z = X - X.mean(axis=1, keepdims=True)
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    D = ((X[:, None] - X[None]) ** 2).sum(axis=2)
    labels = rng.integers(0, 30, n)
    Y = rng.random((n, 30))
    centers = Y[rng.choice(n, 30, replace=False)]
    small = min(n, 600)
    Ds = D[:small, :small].copy()
    W = random_graph(16, rng)
    return {
        "pairwise_sqeuclidean": (X,),
        "pairwise_correlation": (Z,),
        "lloyd": (Y, centers, 100),
        "cluster_distance_sums": (D, labels, 30),
        "agglomerate": (Ds, 30, 2),
        "subset_conductances": (W,),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"backends available: {', '.join(_kernels.BACKENDS)}; n={args.n}")
    print(f"{'kernel':24s} {'numpy (s)':>10s} {'numba (s)':>10s} {'speedup':>8s}")
    for name, call_args in cases(args.n, rng).items():
        row = {}
        for be in _kernels.BACKENDS:
            fn = _kernels.get(name, be)
            fn(*call_args)  # warm-up / compile
            row[be] = best_of(lambda: fn(*call_args), args.repeat)
        nb = row.get("numba")
        speed = f"{row['numpy'] / nb:8.1f}" if nb else "     n/a"
        nb_txt = f"{nb:10.4f}" if nb else "       n/a"
        print(f"{name:24s} {row['numpy']:10.4f} {nb_txt} {speed}")


if __name__ == "__main__":
    main()
