"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--length 400] [--repeat 5]
"""

from __future__ import annotations

import argparse
import random
import timeit

from qchar import _kernels_py

try:
    from qchar import _kernels
except ImportError:
    _kernels = None


def cases(length: int, rng: random.Random):
    a = [1] + [rng.randint(-50, 50) for _ in range(length - 1)]
    b = [rng.randint(-50, 50) for _ in range(length)]
    depth = length // 4
    width = 2 * depth + 1
    grid = [0] * (width * depth)
    grid[depth * depth] = 1
    return {
        "convolve": lambda m: m.convolve(a, b, length),
        "inverse_unit": lambda m: m.inverse_unit(a, length),
        "power_unit": lambda m: m.power_unit(a, 24, length),
        "geometric_update": lambda m: m.geometric_update(list(grid), width, depth, 1, 1, 3),
    }


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--length", type=int, default=400)
    p.add_argument("--repeat", type=int, default=5)
    ns = p.parse_args(argv)
    rng = random.Random(0)
    table = cases(ns.length, rng)
    print(f"{'kernel':<18} {'python (s)':>12} {'compiled (s)':>13} {'speedup':>8}")
    for name, fn in table.items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=ns.repeat))
        if _kernels is None:
            print(f"{name:<18} {t_py:12.4f} {'n/a':>13} {'':>8}")
            continue
        assert fn(_kernels) == fn(_kernels_py), name
        t_c = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=ns.repeat))
        print(f"{name:<18} {t_py:12.4f} {t_c:13.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
