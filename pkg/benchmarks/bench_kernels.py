"""Time the compiled kernels against their NumPy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 200]

Each row reports the best-of-``repeat`` wall time per call for both
variants on identical inputs, and checks that the two agree.
"""

import argparse
import timeit

import numpy as np

from cfqed import _kernels as K


def cases(size: int, rng):
    diag = rng.uniform(1.0, 3.0, size)
    off = rng.uniform(0.2, 1.0, size - 1)
    offsq = off ** 2
    lo, hi = diag.min() - 2.0, diag.max() + 2.0
    n_br = max(4, size // 50)
    r2 = np.sort(rng.uniform(0.5, 20.0, n_br)) ** 2
    p = rng.uniform(0.01, 0.2, n_br)
    e_mid = float(np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))[size // 2])
    return {
        "cf_backward": ((diag, offsq, 0.37 + 0.2j), K.cf_backward_numba, K.cf_backward_numpy),
        "cf_count": ((diag, offsq, 2.0), K.cf_count_numba, K.cf_count_numpy),
        "lentz": ((diag, offsq, 0.37 + 0.2j), K.lentz_numba, K.lentz_numpy),
        "cf_eigvec": ((diag, off, e_mid), K.cf_eigvec_numba, K.cf_eigvec_numpy),
        "interlace_eigs": ((diag, offsq, 10, lo, hi, 1e-14 * hi), K.interlace_eigs_numba, K.interlace_eigs_numpy),
        "boundary_roots": ((p, r2, 1.0, 4.0 * r2[-1], 1e-12), K.boundary_roots_numba, K.boundary_roots_numpy),
        "laguerre_table": ((min(size, 200), 0.8), K.laguerre_table_numba, K.laguerre_table_numpy),
    }


def _first(x):
    return x[0] if isinstance(x, tuple) else x


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"numba active: {K.USE_NUMBA}")
    print(f"{'kernel':16s} {'numba [us]':>12s} {'numpy [us]':>12s} {'speedup':>8s}  agree")
    for name, (a, fast, slow) in cases(args.size, np.random.default_rng(args.seed)).items():
        ref = _first(slow(*a))
        got = _first(fast(*a))  # also triggers compilation outside the timing
        agree = np.allclose(np.abs(got), np.abs(ref), rtol=1e-9, atol=1e-12, equal_nan=True)
        n = 3
        t_fast = min(timeit.repeat(lambda: fast(*a), number=n, repeat=args.repeat)) / n
        t_slow = min(timeit.repeat(lambda: slow(*a), number=n, repeat=args.repeat)) / n
        print(f"{name:16s} {1e6 * t_fast:12.1f} {1e6 * t_slow:12.1f} {t_slow / t_fast:8.1f}  {agree}")


if __name__ == "__main__":
    main()
