"""Time the compiled and numpy AO kernels on the same random instances.

Usage: python benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import timeit

import numpy as np

from irvsim import _kernels

SIZES = [(3, 2), (40, 16), (400, 16), (1000, 16)]


def _instance(nr, nb, seed=0):
    rng = np.random.default_rng(seed)

    def cn(*shape):
        return np.ascontiguousarray((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2))

    return cn(nr), cn(nr, nb), cn(nb)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200, help="calls per measurement")
    parser.add_argument("--iterations", type=int, default=3, help="AO rounds per call")
    args = parser.parse_args(argv)

    backends = {"python": _kernels.load_backend("python")}
    try:
        backends["compiled"] = _kernels.load_backend("compiled")
    except ImportError:
        print("compiled extension not built; timing the numpy backend only")

    print(f"{'N_r':>6} {'N_b':>4} " + " ".join(f"{name + ' [us]':>15}" for name in backends) + "  speedup")
    for nr, nb in SIZES:
        g, H, f = _instance(nr, nb)
        times = {}
        for name, mod in backends.items():
            call = lambda: mod.alternating_optimize(g, H, f, args.iterations, -1.0)  # noqa: E731
            best = min(timeit.repeat(call, number=args.repeat, repeat=5)) / args.repeat
            times[name] = best * 1e6
        speedup = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{nr:>6} {nb:>4} " + " ".join(f"{t:>15.1f}" for t in times.values()) + f"  {speedup:6.2f}x")


if __name__ == "__main__":
    main()
