"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_backends.py [--repeat 3] [--scale 1.0]

Each case runs on both backends with the same seeds; the outputs are checked
for bit-identity before the timings are reported.
"""

import argparse
import time
from contextlib import contextmanager

import numpy as np

from chaospso import _pure, functions, sources
from chaospso.pso import SwarmConfig, optimize
from chaospso.sources import source_for

try:
    from chaospso import _kernels
except ImportError:
    _kernels = None


@contextmanager
def backend(mod):
    saved = sources.core, functions.core
    sources.core = functions.core = mod
    sources._kernel.cache_clear()
    try:
        yield
    finally:
        sources.core, functions.core = saved
        sources._kernel.cache_clear()


def stream(sid, n):
    return lambda: source_for(sid, 7).take(n)


def objective(fid, n):
    fn = functions.get(fid)
    rng = np.random.default_rng(3)
    lo, hi = np.asarray(fn.lower), np.asarray(fn.upper)
    xs = lo + (hi - lo) * rng.random((n, fn.dim))
    return lambda: np.array([functions.evaluate(fid, x) for x in xs])


def pso(sid, fid, gens):
    cfg = SwarmConfig(generations=gens)
    return lambda: optimize(cfg, fid, source_for(sid, 11))[0]


def cases(scale):
    n = max(1, int(20_000 * scale))
    return [
        ("logistic stream", n, stream("logistic", n)),
        ("weierstrass stream", n, stream("weierstrass", n)),
        ("beta(13,13) stream", n, stream("beta_13_13", n)),
        ("normal stream", n, stream("normal_0.5_0.1", n)),
        ("rastrigin D=30 evals", n // 10, objective(9, n // 10)),
        ("penalized1 D=30 evals", n // 10, objective(24, n // 10)),
        ("PSO sphere, 100x20 gens", 1, pso("uniform_0_1", 13, max(1, int(20 * scale)))),
    ]


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on the work per case")
    args = p.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run `python setup.py build_ext --inplace`")
    print(f"{'case':28s} {'items':>7s} {'compiled':>11s} {'pure':>11s} {'speedup':>8s}")
    for name, items, fn in cases(args.scale):
        with backend(_kernels):
            tc, a = best_of(fn, args.repeat)
        with backend(_pure):
            tp, b = best_of(fn, 1)
        if not np.array_equal(np.asarray(a), np.asarray(b)):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:28s} {items:7d} {tc * 1e3:9.2f}ms {tp * 1e3:9.1f}ms {tp / tc:7.0f}x")


if __name__ == "__main__":
    main()
