"""Compiled vs NumPy kernels on the workloads that dominate threshold solves.

    python benchmarks/bench_kernels.py [--repeat 3] [--iters 200]

Each case runs the same coupled recursion on both backends from identical
starting states and reports best-of-N wall time plus the largest state
difference, so a speedup is never reported for diverging results.
"""
import argparse
import time

import numpy as np

from hddthresh.galois_bch import build_bch, weight_spectrum
from hddthresh.kernels import get_backend
from hddthresh.miscorrection import miscorrection_table


def _time(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(iters):
    table = miscorrection_table(255, 3, weight_spectrum(build_bch(8, 3), "binomial_approx"))
    coef = np.ascontiguousarray(table.coefficients(0.0213))
    x_lam = np.linspace(0.0, 40.0, 20_000)
    x_p = np.linspace(0.0, 0.2, 20_000)
    return [
        ("scaled update, 20k points", lambda k: k.scaled_update_array(x_lam, 5.4, 3, 0)),
        ("finite update n=255, 20k points", lambda k: k.fn_update_array(x_p, coef)),
        (f"scaled coupled L=1025 w=16, {iters} it",
         lambda k: _coupled(k.scaled_coupled_run, np.full(1025, 5.4), (5.4, 3, 0, 16, iters, 1e-8, 0.0))),
        (f"finite coupled n=255 L=1025 w=16, {iters} it",
         lambda k: _coupled(k.finite_coupled_run, np.full(1025, 0.0213), (coef, 16, iters, 1e-10, 0.0))),
    ]


def _coupled(run, x, args):
    run(x, *args)
    return x


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--iters", type=int, default=200)
    args = ap.parse_args()
    try:
        fast = get_backend("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    slow = get_backend("python")
    print(f"{'case':<42}{'cython s':>11}{'python s':>11}{'speedup':>9}{'max |diff|':>12}")
    for name, job in cases(args.iters):
        tf, of = _time(lambda: job(fast), args.repeat)
        ts, os_ = _time(lambda: job(slow), args.repeat)
        diff = float(np.max(np.abs(of - os_)))
        print(f"{name:<42}{tf:11.4f}{ts:11.4f}{ts / tf:9.1f}{diff:12.2e}")


if __name__ == "__main__":
    main()
