"""Time the numpy and numba versions of every kernel.

    python benchmarks/bench_kernels.py [--repeat N] [--dim D]

The first numba call compiles (or loads from the on-disk cache) and is
excluded from the timings.  Also reports the wall time of a full curvature
scan with whichever backend the environment selects.
"""
import argparse
import time
import timeit

import numpy as np

from qgeom import kernels
from qgeom._jit import HAVE_NUMBA, JIT_DISABLED
from qgeom.charts import hopf_chart
from qgeom.curvature import flatness_scan, pullback_field


def make_inputs(rng, dim, batch):
    a = rng.normal(size=(dim, dim))
    ginv = np.linalg.inv(a @ a.T + dim * np.eye(dim))
    dg = rng.normal(size=(dim, dim, dim))
    dg = 0.5 * (dg + dg.transpose(0, 2, 1))
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    dpsi = rng.normal(size=(dim, 8)) + 1j * rng.normal(size=(dim, 8))
    z1 = rng.normal(size=batch) + 1j * rng.normal(size=batch)
    z2 = rng.normal(size=batch) + 1j * rng.normal(size=batch)
    return {
        "christoffel": (ginv, dg),
        "riemann": (rng.normal(size=(dim,) * 3), rng.normal(size=(dim,) * 4)),
        "scalar_curvature": (ginv, rng.normal(size=(dim,) * 4)),
        "qgt": (psi, dpsi, True),
        "minkowski": (rng.normal(size=(batch, 4)), 2.5),
        "twisted_pair": (z1, z2, 1.0, 1.0, np.array([1.0, 1.0, 1.0, -1.0])),
    }


def per_call(fn, args, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=5)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--batch", type=int, default=100_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    inputs = make_inputs(rng, args.dim, args.batch)
    print(f"numba available: {HAVE_NUMBA}; active backend: {'numpy' if JIT_DISABLED else 'numba'}")
    print(f"{'kernel':<18}{'numpy [us]':>14}{'numba [us]':>14}{'speed-up':>10}")
    for name, (vec, loops) in kernels.KERNELS.items():
        call_args = inputs[name]
        batched = name in ("minkowski", "twisted_pair")
        repeat = max(1, args.repeat // 200) if batched else args.repeat
        loops(*call_args)  # compile
        t_np = per_call(vec, call_args, repeat)
        t_nb = per_call(loops, call_args, repeat)
        print(f"{name:<18}{t_np * 1e6:>14.2f}{t_nb * 1e6:>14.2f}{t_np / t_nb:>10.2f}")

    field = pullback_field(hopf_chart(1.0))
    flatness_scan(field, n_points=1)
    start = time.perf_counter()
    flatness_scan(field, n_points=20)
    print(f"3-sphere curvature scan, 20 points: {time.perf_counter() - start:.3f} s")


if __name__ == "__main__":
    main()
