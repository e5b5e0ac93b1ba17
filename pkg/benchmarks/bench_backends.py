"""Compare the compiled and pure-Python kernel backends.

Times the three hot paths (summed-area table, rectangle-sum batch, and
the strong maximal scan) on a range of grid sizes and verifies that both
backends return bit-identical results on every input.

Usage: python benchmarks/bench_backends.py [--cells 64 128 256] [--repeats 5]
"""

import argparse
import time

import numpy as np

from bifraclab.grid import make_grid, rectangle_family
from bifraclab.kernels import _ref
from bifraclab.operators import rect_arrays

try:
    from bifraclab.kernels import _fast
except ImportError:
    _fast = None


def best_of(repeats, func, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_grid(cells: int, repeats: int) -> None:
    rng = np.random.default_rng(cells)
    values = rng.uniform(0.0, 1.0, (cells, cells))
    grid = make_grid(4.0, cells)
    x0, x1, y0, y1 = rect_arrays(rectangle_family(grid, "dyadic_shifted"))
    sat = _ref.sat2(values)
    cases = [
        ("sat2", (values,), lambda mod: mod.sat2),
        ("rect_sums", (sat, x0, x1, y0, y1), lambda mod: mod.rect_sums),
        ("strong_maximal_scan", (values, x0, x1, y0, y1), lambda mod: mod.strong_maximal_scan),
    ]
    print(f"\n{cells}x{cells} grid, {len(x0)} rectangles (best of {repeats}):")
    for name, args, pick in cases:
        t_ref, r_ref = best_of(repeats, pick(_ref), *args)
        line = f"  {name:22s} python {t_ref * 1e3:9.3f} ms"
        if _fast is not None:
            t_fast, r_fast = best_of(repeats, pick(_fast), *args)
            match = "bit-identical" if np.array_equal(r_ref, r_fast) else "MISMATCH"
            line += f"   compiled {t_fast * 1e3:9.3f} ms   x{t_ref / t_fast:6.1f}   {match}"
        print(line)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, nargs="+", default=[64, 128, 256])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if _fast is None:
        print("compiled backend not built; timing the python backend only")
    for cells in args.cells:
        bench_grid(cells, args.repeats)


if __name__ == "__main__":
    main()
