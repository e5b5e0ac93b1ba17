"""Rectangle-supremum characteristics of a weight pair.

Three suprema over a rectangle family: the size-weighted two-weight
characteristic, its average form, and the maximal-augmented variant in
which the dual weight is replaced by its strong maximal function.  Each
returns the supremum together with the maximizing rectangle.

Shrinking the supremum to single cells yields two exact pointwise
consequences in the discrete model, provided single-cell rectangles
belong to the families: omega * (M dual)^((p-1)/p) <= A^M everywhere,
and omega <= A^M * sigma everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import kernels
from .grid import Field, Rect
from .operators import rect_arrays, resolve_rects, strong_maximal

if TYPE_CHECKING:
    from .weights import WeightPair

__all__ = [
    "CharacteristicResult",
    "dual_maximal",
    "a_alphabeta_pq",
    "a_pq",
    "a_m_pq",
    "crucial_pointwise",
    "weights_compare",
]


@dataclass(frozen=True)
class CharacteristicResult:
    """Value of a rectangle supremum plus the rectangle attaining it."""

    value: float
    maximizer: Rect
    kind: str

    def to_dict(self) -> dict:
        r = self.maximizer
        return {
            "kind": self.kind,
            "value": self.value,
            "maximizer": [r.x0, r.x1, r.y0, r.y1],
        }


def _rect_cell_sums(values: np.ndarray, x0, x1, y0, y1) -> np.ndarray:
    return kernels.rect_sums(kernels.sat2(values), x0, x1, y0, y1)


def dual_maximal(pair: "WeightPair", maximal_family) -> Field:
    """Strong maximal function of the dual weight sigma^(-p/(p-1)).

    The most expensive intermediate: callers should compute it once and
    pass it to a_m_pq / crucial_pointwise.
    """
    return strong_maximal(pair.dual_sigma(), maximal_family)


def _scan(pair: "WeightPair", family, transformed_dual: Field | None, averaged: bool, kind: str):
    cfg = pair.config
    grid = pair.omega.grid
    rect_list = resolve_rects(grid, family)
    x0, x1, y0, y1 = rect_arrays(rect_list)
    omega_q = pair.omega.values ** cfg.q
    dual = transformed_dual.values if transformed_dual is not None else pair.dual_sigma().values
    sum_w = _rect_cell_sums(omega_q, x0, x1, y0, y1)
    sum_s = _rect_cell_sums(dual, x0, x1, y0, y1)
    h1, h2 = grid.cell_sizes
    len_x = (x1 - x0 + 1) * h1
    len_y = (y1 - y0 + 1) * h2
    exp_dual = (cfg.p - 1.0) / cfg.p
    if averaged:
        vol = len_x * len_y
        values = (sum_w * grid.cell_area / vol) ** (1.0 / cfg.q) * (
            sum_s * grid.cell_area / vol
        ) ** exp_dual
    else:
        prefactor = len_x ** (cfg.alpha / cfg.n - 1.0) * len_y ** (cfg.beta / cfg.m - 1.0)
        values = (
            prefactor
            * (sum_w * grid.cell_area) ** (1.0 / cfg.q)
            * (sum_s * grid.cell_area) ** exp_dual
        )
    best = int(np.argmax(values))
    return CharacteristicResult(value=float(values[best]), maximizer=rect_list[best], kind=kind)


def a_alphabeta_pq(pair: "WeightPair", family) -> CharacteristicResult:
    """Size-weighted characteristic |Q|^(a/n-1) |P|^(b/m-1) (ii w^q)^(1/q) (ii dual)^((p-1)/p)."""
    return _scan(pair, family, None, averaged=False, kind="A_alphabeta_pq")


def a_pq(pair: "WeightPair", family) -> CharacteristicResult:
    """Average form (avg w^q)^(1/q) (avg dual)^((p-1)/p); equals
    a_alphabeta_pq under the balanced exponent relation."""
    return _scan(pair, family, None, averaged=True, kind="A_pq")


def a_m_pq(pair: "WeightPair", family, maximal_family, ms: Field | None = None) -> CharacteristicResult:
    """Maximal-augmented characteristic: the dual weight is replaced by
    its strong maximal function over `maximal_family`."""
    if ms is None:
        ms = dual_maximal(pair, maximal_family)
    return _scan(pair, family, ms, averaged=True, kind="A_M_pq")


def crucial_pointwise(
    pair: "WeightPair", a_m: CharacteristicResult, maximal_family, ms: Field | None = None
) -> Field:
    """Ratio field omega * (M dual)^((p-1)/p) / A^M; <= 1 everywhere when
    single cells belong to both families."""
    if not isinstance(maximal_family, str):
        grid = pair.omega.grid
        singles = {(r.x0, r.y0) for r in maximal_family if r.cell_count == 1}
        if len(singles) != grid.cells[0] * grid.cells[1]:
            raise ValueError("maximal family must contain every single-cell rectangle")
    if ms is None:
        ms = dual_maximal(pair, maximal_family)
    exp_dual = (pair.config.p - 1.0) / pair.config.p
    ratios = pair.omega.values * ms.values**exp_dual / a_m.value
    return Field(pair.omega.grid, ratios, nonnegative=True)


def weights_compare(pair: "WeightPair", a_m: CharacteristicResult) -> Field:
    """Ratio field omega / (A^M * sigma); <= 1 under the same hypothesis."""
    ratios = pair.omega.values / (a_m.value * pair.sigma.values)
    return Field(pair.omega.grid, ratios, nonnegative=True)
