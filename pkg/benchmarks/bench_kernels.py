"""Time the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Prints one
line per kernel with the median time of each backend and the speed-up.
"""
import argparse
import statistics
import sys
import timeit

import numpy as np

from zibayes import kernels
from zibayes.harness import run_scenario, table_configs


def kernel_cases(rng):
    y = rng.negative_binomial(1.5, 1.5 / 3.5, size=900).astype(np.int64)
    w = rng.uniform(size=y.size)
    n, zeros, phi = y.size, int((y == 0).sum()), int(y.sum())
    return {
        "zip_log_jsum": (n, zeros, phi, zeros),
        "zinb_log_jsum": (n, zeros, phi, 1.001, zeros),
        "gamma_sums": (y, 1.5),
        "poisson_loglik": (y, 2.0),
        "zip_loglik": (y, 0.3, 2.0),
        "zinb_loglik": (y, 0.3, 1.5, 2.0),
        "nb_weighted_loglik": (y, w, 1.5, 2.0),
        "nb_weighted_score": (y, w, 1.5, 2.0),
    }


def median_time(fn, args, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(lambda: fn(*args), number=1), 1e-7)))
    times = timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)
    return statistics.median(times) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    cases = kernel_cases(np.random.default_rng(7))
    print(f"{'kernel':22s} {'compiled':>12s} {'python':>12s} {'speed-up':>9s}")
    for name, a in cases.items():
        tc = median_time(getattr(kernels.compiled_backend, name), a, args.repeat)
        tp = median_time(getattr(kernels.python_backend, name), a, args.repeat)
        print(f"{name:22s} {tc * 1e6:10.2f}us {tp * 1e6:10.2f}us {tp / tc:8.1f}x")
    # end to end: one Table 5 scenario with the active backend only, since
    # the harness binds kernels at import
    cfg = table_configs(5, 0.1, 0)[0]
    t = min(timeit.repeat(lambda: run_scenario(cfg, threads=1), number=1, repeat=3))
    print(f"\nTable 5 row 1 ({cfg.reps} replicates, backend {kernels.BACKEND}): {t:.3f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
