"""Time the compiled and pure-Python Strang kernels against each other.

    python benchmarks/bench_backends.py [--steps 2000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from gph import _backend
from gph.propagator import gaussian_ic, strang_steps
from gph.spectral import make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024, 4096])
    args = ap.parse_args()

    names = _backend.available()
    print(f"backends: {', '.join(names)}  (steps={args.steps}, best of {args.repeat})")
    print(f"{'n_points':>8}  " + "  ".join(f"{n:>12}" for n in names) + "  speedup  max|diff|")
    for n in args.sizes:
        f = gaussian_ic(make_grid(n, 20.0), velocity=0.5) * 1.5
        times, outs = {}, {}
        for name in names:
            k = _backend.get(name)
            outs[name] = strang_steps(f, 1e-3, -1, args.steps, kernels=k).values
            times[name] = min(timeit.repeat(lambda: strang_steps(f, 1e-3, -1, args.steps, kernels=k),
                                            number=1, repeat=args.repeat))
        speedup = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        diff = max(np.max(np.abs(outs[a] - outs["python"])) for a in names)
        print(f"{n:>8}  " + "  ".join(f"{times[a] * 1e3:>10.2f}ms" for a in names)
              + f"  {speedup:>7.2f}  {diff:.1e}")


if __name__ == "__main__":
    main()
