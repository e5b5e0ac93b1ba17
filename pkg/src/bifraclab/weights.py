"""Weight constructors, cross A_p classification, and reverse doubling.

Includes the singular pair that defeats the plain two-weight
characteristic: omega = (1+|x|)^(-n) (1+|y|)^(-m) together with
sigma = |x|^(-n/q) |y|^(-m/q) under the balanced exponent relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import ExponentConfig, Field, Rect
from .operators import rect_arrays, resolve_rects, strong_maximal

__all__ = [
    "WeightPair",
    "DoublingResult",
    "counterexample_omega",
    "counterexample_sigma",
    "power_weight",
    "weight_expr",
    "a_p_cross_characteristic",
    "reverse_doubling_epsilon",
    "sample_ap_sigma",
    "sample_omega",
]


@dataclass
class WeightPair:
    """Outer/inner weight pair (omega, sigma) on a shared grid."""

    omega: Field
    sigma: Field
    config: ExponentConfig

    def __post_init__(self):
        if not self.omega.same_grid(self.sigma):
            raise ValueError("omega and sigma live on different grids")
        for name, w in (("omega", self.omega), ("sigma", self.sigma)):
            if np.any(w.values <= 0.0):
                raise ValueError(f"{name} must be strictly positive at every cell")

    def dual_sigma(self) -> Field:
        """The dual weight sigma^(-p/(p-1))."""
        return self.sigma.map(lambda v: v ** (-self.config.p_conj), nonnegative=True)


@dataclass(frozen=True)
class DoublingResult:
    """Largest admissible reverse-doubling exponent with its witness.

    epsilon <= 0 means the weight fails rectangle reverse doubling on
    the tested family.  The witness rectangle is the interval attaining
    the minimal doubling ratio, crossed with the slice cell, on `axis`.
    """

    epsilon: float
    witness: Rect
    axis: int


def counterexample_omega(config: ExponentConfig):
    """Outer weight (1+|x|)^(-n) (1+|y|)^(-m)."""
    n, m = config.n, config.m
    return lambda x, y: (1.0 + np.abs(x)) ** (-n) * (1.0 + np.abs(y)) ** (-m)


def counterexample_sigma(config: ExponentConfig):
    """Inner weight |x|^(-n/q) |y|^(-m/q), singular on the coordinate axes."""
    ax, ay = -config.n / config.q, -config.m / config.q
    return lambda x, y: np.abs(x) ** ax * np.abs(y) ** ay


def power_weight(a: float, b: float):
    """Product power weight |x|^a |y|^b."""
    return lambda x, y: np.abs(x) ** a * np.abs(y) ** b


def weight_expr(kind: str, config: ExponentConfig | None = None, **params):
    """Resolve a weight constructor by name (CLI config surface)."""
    if kind == "constant":
        c = float(params.get("c", 1.0))
        return lambda x, y: c * np.ones_like(x * y)
    if kind == "power":
        return power_weight(float(params.get("a", 0.0)), float(params.get("b", 0.0)))
    if kind in ("counterexample_omega", "counterexample_sigma"):
        if config is None:
            raise ValueError(f"{kind} requires an exponent config")
        maker = counterexample_omega if kind == "counterexample_omega" else counterexample_sigma
        return maker(config)
    raise ValueError(f"unknown weight kind {kind!r}")


def a_p_cross_characteristic(w: Field, p: float, rects) -> "CharacteristicResult":
    """Cross A_p characteristic of a single weight over a rectangle family.

    For p > 1: sup over rectangles of (avg w) (avg w^(-1/(p-1)))^(p-1).
    For p = 1: sup over cells of M w / w with M taken over the same
    family.  Finiteness/stability under refinement is for the caller to
    judge; this only reports the supremum and its maximizer.
    """
    from .characteristics import CharacteristicResult

    if p < 1.0:
        raise ValueError(f"need p >= 1, got {p}")
    if np.any(w.values <= 0.0):
        raise ValueError("weight must be strictly positive")
    rect_list = resolve_rects(w.grid, rects)
    if p == 1.0:
        mw = strong_maximal(w, rect_list)
        ratios = mw.values / w.values
        i, j = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
        return CharacteristicResult(
            value=float(ratios[i, j]), maximizer=Rect(i, i, j, j), kind="A_p_cross"
        )
    x0, x1, y0, y1 = rect_arrays(rect_list)
    counts = (x1 - x0 + 1) * (y1 - y0 + 1)
    avg_w = kernels.rect_sums(kernels.sat2(w.values), x0, x1, y0, y1) / counts
    dual = w.values ** (-1.0 / (p - 1.0))
    avg_dual = kernels.rect_sums(kernels.sat2(dual), x0, x1, y0, y1) / counts
    values = avg_w * avg_dual ** (p - 1.0)
    best = int(np.argmax(values))
    return CharacteristicResult(
        value=float(values[best]), maximizer=rect_list[best], kind="A_p_cross"
    )


def reverse_doubling_epsilon(w: Field, family, n: int = 1, m: int = 1) -> DoublingResult:
    """Largest epsilon with int_Q w <= 2^(-eps*dim) int_2Q w on all tested slices.

    `dim` is n on the first factor and m on the second.  Only intervals
    whose centered double stays inside the domain are tested (even
    lengths, so the double is grid-aligned); slices run over every cell
    of the other factor.  Equivalently the exact minimum of
    log2(mass ratio)/dim over the tested (interval, slice) pairs.
    """
    rect_list = resolve_rects(w.grid, family)
    best = math.inf
    witness = None
    witness_axis = -1
    for axis, dim in ((0, n), (1, m)):
        n_cells = w.grid.cells[axis]
        intervals = sorted({(r.x0, r.x1) if axis == 0 else (r.y0, r.y1) for r in rect_list})
        work = w.values if axis == 0 else w.values.T
        prefix = np.zeros((n_cells + 1, work.shape[1]))
        np.cumsum(work, axis=0, out=prefix[1:])
        for a, b in intervals:
            length = b - a + 1
            half = length // 2
            if length % 2 != 0 or a - half < 0 or b + half >= n_cells:
                continue
            inner = prefix[b + 1] - prefix[a]
            outer = prefix[b + half + 1] - prefix[a - half]
            for j in range(work.shape[1]):
                if inner[j] <= 0.0:
                    continue  # zero mass never constrains the exponent
                eps = math.log2(outer[j] / inner[j]) / dim
                if eps < best:
                    best = eps
                    witness = Rect(a, b, j, j) if axis == 0 else Rect(j, j, a, b)
                    witness_axis = axis
    if witness is None:
        raise ValueError("no testable interval: every centered double leaves the domain")
    return DoublingResult(epsilon=best, witness=witness, axis=witness_axis)


def sample_ap_sigma(config: ExponentConfig, grid, rng: np.random.Generator) -> Field:
    """Random sigma with sigma^p in A_p x A_p by construction.

    Product power weight |x|^a |y|^b with a*p, b*p in the open interior
    of the one-dimensional A_p range (-1, p-1), times a smooth
    perturbation with values in [1/2, 2].
    """
    from .grid import sample

    p = config.p
    lo, hi = -1.0 / p, (p - 1.0) / p
    margin = 0.1 * (hi - lo)
    a = rng.uniform(lo + margin, hi - margin)
    b = rng.uniform(lo + margin, hi - margin)
    k1, k2 = rng.uniform(0.5, 3.0, size=2)
    ph1, ph2 = rng.uniform(0.0, 2.0 * np.pi, size=2)

    def expr(x, y):
        pert = 1.0 + 0.5 * np.sin(k1 * x + ph1) * np.sin(k2 * y + ph2)
        return np.abs(x) ** a * np.abs(y) ** b * pert

    return sample(expr, grid)


def sample_omega(grid, rng: np.random.Generator) -> Field:
    """Random strictly positive outer weight (no structural hypothesis)."""
    from .grid import sample

    a = rng.uniform(-0.4, 0.4)
    b = rng.uniform(-0.4, 0.4)
    k1, k2 = rng.uniform(0.5, 3.0, size=2)
    ph1, ph2 = rng.uniform(0.0, 2.0 * np.pi, size=2)

    def expr(x, y):
        pert = 1.0 + 0.5 * np.sin(k1 * x + ph1) * np.sin(k2 * y + ph2)
        return (1.0 + np.abs(x)) ** a * (1.0 + np.abs(y)) ** b * pert

    return sample(expr, grid)
