"""Timing comparison of the compiled and pure transport kernels.

Runs the same workloads through both lanes and prints a table with the
speedup.  Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

The compiled lane must be importable for the comparison; otherwise only the
pure lane is timed.
"""

import argparse
from time import perf_counter

import numpy as np

from bratteli._kernels import _fast, _py, backend_name


def _transport_batch(rng, count, m, k):
    batch = []
    for _ in range(count):
        a = rng.random(m) + 0.05
        a /= a.sum()
        b = rng.random(k) + 0.05
        b /= b.sum()
        batch.append((a, b, rng.random((m, k)) * 3.0))
    return batch


def _supports(rng, S, npts):
    idx = rng.integers(0, npts, size=(S, 2)).astype(np.int64)
    w = rng.random(S)
    sup_w = np.stack([w, 1.0 - w], axis=1)
    pts = np.sort(rng.random(npts))
    return idx, sup_w, np.abs(pts[:, None] - pts[None, :])


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = perf_counter()
        fn()
        best = min(best, perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    rows = []

    for m, k, count in [(5, 5, 200), (12, 12, 100), (25, 25, 30)]:
        batch = _transport_batch(rng, count, m, k)

        def pure():
            for a, b, C in batch:
                _py.solve_transport(a.tolist(), b.tolist(), C.tolist(), 1e-9)

        t_py = _time(pure, args.repeat)
        t_fast = None
        if _fast is not None:
            def fast():
                for a, b, C in batch:
                    _fast.solve_transport(a, b, C, 1e-9)

            t_fast = _time(fast, args.repeat)
        rows.append((f"solve_transport {m}x{k} x{count}", t_py, t_fast))

    for S, npts in [(200, 40), (1000, 100), (4000, 200)]:
        idx, w, D = _supports(rng, S, npts)

        t_py = _time(lambda: _py.transfer_table_2(idx, w, D), args.repeat)
        t_fast = None
        if _fast is not None:
            t_fast = _time(lambda: _fast.transfer_table_2(idx, w, D), args.repeat)
        rows.append((f"transfer_table_2 S={S}", t_py, t_fast))

    idx, w, D = _supports(rng, 20000, 300)
    centers = np.arange(0, 20000, 997, dtype=np.int64)

    t_py = _time(lambda: _py.transfer_rows_2(centers, idx, w, D), args.repeat)
    t_fast = None
    if _fast is not None:
        t_fast = _time(lambda: _fast.transfer_rows_2(centers, idx, w, D), args.repeat)
    rows.append((f"transfer_rows_2 S=20000 c={len(centers)}", t_py, t_fast))

    print(f"active backend: {backend_name()}")
    print(f"{'workload':<36} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for name, t_py, t_fast in rows:
        if t_fast is None:
            print(f"{name:<36} {t_py:>10.4f} {'-':>13} {'-':>8}")
        else:
            print(f"{name:<36} {t_py:>10.4f} {t_fast:>13.4f} {t_py / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
