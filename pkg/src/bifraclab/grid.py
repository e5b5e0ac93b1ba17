"""Discretized product-domain model.

The domain is a truncated box [-L1, L1] x [-L2, L2] carrying a uniform
tensor grid.  Each factor of the product space is represented by one
coordinate axis; the dimensions n and m of the underlying factors enter
only through kernel and weight exponents (radial-slice convention).

Cells carry a single value at their center (piecewise-constant model),
so every integral here is a midpoint sum and rectangle averages are
exact linear functionals of the cell values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ExponentConfig",
    "Grid",
    "Field",
    "Rect",
    "make_grid",
    "sample",
    "integrate",
    "lp_norm",
    "partial_lp_norm",
    "interval_family",
    "rectangle_family",
]

_REL_TOL = 1e-12


def _is_power_of_two(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class ExponentConfig:
    """Exponent bundle (n, m, p, q, alpha, beta) for the product-space setup.

    Requires 1 < p < q and 0 < alpha < n, 0 < beta < m.  When `balanced`
    is set, the relation alpha/n = beta/m = 1/p - 1/q must hold to
    relative tolerance 1e-12.
    """

    n: int
    m: int
    p: float
    q: float
    alpha: float
    beta: float
    balanced: bool = False

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("factor dimensions must be positive integers")
        if not (1.0 < self.p < self.q < float("inf")):
            raise ValueError(f"need 1 < p < q < inf, got p={self.p}, q={self.q}")
        if not (0.0 < self.alpha < self.n):
            raise ValueError(f"need 0 < alpha < n, got alpha={self.alpha}, n={self.n}")
        if not (0.0 < self.beta < self.m):
            raise ValueError(f"need 0 < beta < m, got beta={self.beta}, m={self.m}")
        if self.balanced:
            target = 1.0 / self.p - 1.0 / self.q
            for value in (self.alpha / self.n, self.beta / self.m):
                if abs(value - target) > _REL_TOL * max(abs(target), 1.0):
                    raise ValueError(
                        "balanced config requires alpha/n = beta/m = 1/p - 1/q"
                    )

    @classmethod
    def make_balanced(cls, n: int, m: int, p: float, q: float) -> "ExponentConfig":
        """Construct the balanced config with alpha/n = beta/m = 1/p - 1/q."""
        gap = 1.0 / p - 1.0 / q
        return cls(n=n, m=m, p=p, q=q, alpha=n * gap, beta=m * gap, balanced=True)

    @property
    def p_conj(self) -> float:
        """Hoelder conjugate p/(p-1)."""
        return self.p / (self.p - 1.0)


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [-L1, L1] x [-L2, L2].

    Cell counts are powers of two so that dyadic rectangle families tile
    exactly; cell centers sit at odd multiples of cell_size/2 and hence
    never on a coordinate hyperplane.
    """

    half_widths: tuple[float, float]
    cells: tuple[int, int]
    cell_sizes: tuple[float, float] = field(init=False)

    def __post_init__(self):
        for L in self.half_widths:
            if not (L > 0.0):
                raise ValueError(f"half-width must be positive, got {L}")
        for k in self.cells:
            if not _is_power_of_two(k):
                raise ValueError(f"cells per axis must be a power of two, got {k}")
        object.__setattr__(
            self,
            "cell_sizes",
            tuple(2.0 * L / k for L, k in zip(self.half_widths, self.cells)),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells

    @property
    def cell_area(self) -> float:
        return self.cell_sizes[0] * self.cell_sizes[1]

    def centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along `axis` (0 = first factor)."""
        L = self.half_widths[axis]
        h = self.cell_sizes[axis]
        return -L + h * (np.arange(self.cells[axis]) + 0.5)


@dataclass
class Field:
    """Cell-sampled scalar field: one value per grid cell, constant on the cell."""

    grid: Grid
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}"
            )
        if self.nonnegative and np.any(self.values < 0.0):
            raise ValueError("field flagged nonnegative has negative values")

    def same_grid(self, other: "Field") -> bool:
        return self.grid == other.grid

    def map(self, func, nonnegative: bool = False) -> "Field":
        """New field with values func(values) on the same grid."""
        return Field(self.grid, func(self.values), nonnegative=nonnegative)


@dataclass(frozen=True, order=True)
class Rect:
    """Axis-aligned rectangle given by inclusive cell-index ranges."""

    x0: int
    x1: int
    y0: int
    y1: int

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError("rectangle index ranges must be nonempty")
        if min(self.x0, self.y0) < 0:
            raise ValueError("rectangle index ranges must be nonnegative")

    @property
    def x_len(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def y_len(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def cell_count(self) -> int:
        return self.x_len * self.y_len

    def contains_cell(self, i: int, j: int) -> bool:
        return self.x0 <= i <= self.x1 and self.y0 <= j <= self.y1

    def check_within(self, grid: Grid) -> None:
        if self.x1 >= grid.cells[0] or self.y1 >= grid.cells[1]:
            raise ValueError(f"rectangle {self} exceeds grid shape {grid.shape}")


def make_grid(half_widths, cells_per_axis) -> Grid:
    """Build a uniform grid; scalars are broadcast to both axes."""
    if np.isscalar(half_widths):
        half_widths = (float(half_widths), float(half_widths))
    if np.isscalar(cells_per_axis):
        cells_per_axis = (int(cells_per_axis), int(cells_per_axis))
    return Grid(tuple(float(L) for L in half_widths), tuple(int(k) for k in cells_per_axis))


def sample(expr, grid: Grid) -> Field:
    """Sample a pointwise function of (x, y) at all cell centers.

    Raises ValueError if any sampled value is non-finite (singularities
    must not sit on a cell center).
    """
    x = grid.centers(0)[:, None]
    y = grid.centers(1)[None, :]
    values = np.broadcast_to(np.asarray(expr(x, y), dtype=np.float64), grid.shape).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("sampled field contains non-finite values")
    return Field(grid, values, nonnegative=bool(np.all(values >= 0.0)))


def integrate(f: Field, rect: Rect) -> float:
    """Midpoint-rule integral of f over a rectangle (row-major summation)."""
    rect.check_within(f.grid)
    block = f.values[rect.x0 : rect.x1 + 1, rect.y0 : rect.y1 + 1]
    # row-major accumulation order is part of the contract
    total = 0.0
    for row in block:
        for v in row:
            total += v
    return total * f.grid.cell_area


def lp_norm(f: Field, p: float, weight: Field | None = None) -> float:
    """Full-domain L^p norm of f*weight (weight defaults to 1)."""
    if p < 1.0:
        raise ValueError(f"need p >= 1, got {p}")
    values = f.values
    if weight is not None:
        if not f.same_grid(weight):
            raise ValueError("weight lives on a different grid")
        values = values * weight.values
    return float(
        (np.sum(np.abs(values) ** p) * f.grid.cell_area) ** (1.0 / p)
    )


def partial_lp_norm(f: Field, p: float, weight: Field | None, fixed_axis: int, index: int) -> float:
    """One-factor L^p norm of weight*f along the non-fixed factor.

    `fixed_axis` = 0 freezes the first coordinate at cell `index` and
    integrates over the second factor, and vice versa.
    """
    if fixed_axis not in (0, 1):
        raise ValueError(f"fixed_axis must be 0 or 1, got {fixed_axis}")
    if not (0 <= index < f.grid.cells[fixed_axis]):
        raise ValueError(f"slice index {index} out of range")
    values = f.values
    if weight is not None:
        if not f.same_grid(weight):
            raise ValueError("weight lives on a different grid")
        values = values * weight.values
    line = values[index, :] if fixed_axis == 0 else values[:, index]
    h = f.grid.cell_sizes[1 - fixed_axis]
    return float((np.sum(np.abs(line) ** p) * h) ** (1.0 / p))


def interval_family(n_cells: int, mode: str) -> list[tuple[int, int]]:
    """Inclusive index intervals on one axis.

    dyadic: aligned power-of-two intervals (all single cells included);
    dyadic_shifted: dyadic plus half-length-shifted copies;
    all: every interval (restricted to n_cells <= 16, oracle scale).
    """
    if mode == "all":
        if n_cells > 16:
            raise ValueError("'all' family restricted to <= 16 cells per axis")
        return [(a, b) for a in range(n_cells) for b in range(a, n_cells)]
    if mode not in ("dyadic", "dyadic_shifted"):
        raise ValueError(f"unknown family mode {mode!r}")
    intervals = []
    length = 1
    while length <= n_cells:
        for start in range(0, n_cells, length):
            intervals.append((start, start + length - 1))
        if mode == "dyadic_shifted" and length > 1:
            half = length // 2
            for start in range(half, n_cells - length + 1, length):
                intervals.append((start, start + length - 1))
        length *= 2
    return intervals


def rectangle_family(grid: Grid, mode: str) -> list[Rect]:
    """Product rectangle family: cross product of the per-axis interval families."""
    xs = interval_family(grid.cells[0], mode)
    ys = interval_family(grid.cells[1], mode)
    return [Rect(a, b, c, d) for a, b in xs for c, d in ys]
