"""Compiled vs numpy kernels: single evaluations, batched values, and a Cramer grid.

    python benchmarks/bench_kernels.py [--repeat 5] [--grid 39]

Prints the best-of-``repeat`` time per case and backend, and the speed-up of
the compiled kernel when it is available.
"""
import argparse
import contextlib
import timeit

import numpy as np

from entrobound import kernels
from entrobound.measures import parse_spec
from entrobound.tilt import cramer_transform
from entrobound.verify import default_grid

FAMILIES = ("atoms:-1=0.25,0=0.5,1=0.25", "uniform:a=-1,b=1,n=201", "gauss:mean=0,sd=1")


@contextlib.contextmanager
def active_backend(impl):
    saved = kernels._impl
    kernels._impl = impl
    try:
        yield
    finally:
        kernels._impl = saved


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def cases(grid_n):
    rng = np.random.default_rng(0)
    us, vs = rng.uniform(-2, 2, 10_000), rng.uniform(-1, 0.3, 10_000)
    for spec in FAMILIES:
        rho = parse_spec(spec)
        z, lw = rho.positions, rho.log_weights
        yield (f"cgf_eval x1000 [{spec}]", 3,
               lambda impl, z=z, lw=lw: [kernels.cgf_eval(z, lw, 0.3, -0.2, impl) for _ in range(1000)])
        yield (f"cgf_values 1e4 tilts [{spec}]", 3,
               lambda impl, z=z, lw=lw: kernels.cgf_values(z, lw, us, vs, impl))
    for spec in FAMILIES:
        rho = parse_spec(spec)
        pts = default_grid(rho, grid_n).points()

        def grid(impl, rho=rho, pts=pts):
            with active_backend(impl):
                for p in pts:
                    cramer_transform(rho, p)

        yield (f"cramer {grid_n}x{grid_n} grid [{spec}]", 1, grid)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=39)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    names = sorted(backends, key=lambda n: n != "python")
    print(f"backends: {', '.join(names)} (default {kernels.BACKEND})")
    print(f"{'case':<55}" + "".join(f"{n:>12}" for n in names) + ("     speed-up" if len(names) > 1 else ""))
    for label, number, fn in cases(args.grid):
        times = [best(lambda: fn(backends[n]), args.repeat, number) for n in names]
        row = f"{label:<55}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:>12.1f}x"
        print(row)


if __name__ == "__main__":
    main()
