"""Pure-numpy rectangle-scan kernels (fallback backend).

The compiled backend in `_fast.pyx` mirrors these routines operation for
operation: summed-area tables are accumulated axis 0 first then axis 1,
and rectangle sums use the association ((A - B) - C) + D, so the two
backends produce bit-identical results.
"""

from __future__ import annotations

import numpy as np


def sat2(values: np.ndarray) -> np.ndarray:
    """Padded summed-area table: sat[i, j] = sum of values[:i, :j]."""
    n, m = values.shape
    out = np.zeros((n + 1, m + 1), dtype=np.float64)
    np.cumsum(values, axis=0, out=out[1:, 1:])
    np.cumsum(out[1:, 1:], axis=1, out=out[1:, 1:])
    return out


def rect_sums(sat: np.ndarray, x0, x1, y0, y1) -> np.ndarray:
    """Sums over inclusive index rectangles, O(1) each via the table."""
    return ((sat[x1 + 1, y1 + 1] - sat[x0, y1 + 1]) - sat[x1 + 1, y0]) + sat[x0, y0]


def strong_maximal_scan(values, x0, x1, y0, y1):
    """Max over the given rectangles, per cell, of the rectangle mean.

    Cells covered by no rectangle are left at 0.  Rectangles are
    processed in the given order; the max reduction is order-independent.
    """
    table = sat2(values)
    sums = rect_sums(table, x0, x1, y0, y1)
    counts = (x1 - x0 + 1) * (y1 - y0 + 1)
    avgs = sums / counts
    out = np.zeros_like(values)
    for r in range(len(avgs)):
        block = out[x0[r] : x1[r] + 1, y0[r] : y1[r] + 1]
        np.maximum(block, avgs[r], out=block)
    return out


def axis_maximal_scan(values, a0, a1, axis):
    """One-parameter maximal scan: intervals on `axis`, other coordinate frozen.

    out[i, j] for axis=0 is the max over intervals [a0, a1] containing i
    of the interval mean of values[:, j].
    """
    work = values if axis == 0 else values.T
    n = work.shape[0]
    prefix = np.zeros((n + 1, work.shape[1]), dtype=np.float64)
    np.cumsum(work, axis=0, out=prefix[1:])
    out = np.zeros_like(work)
    for r in range(len(a0)):
        avg = (prefix[a1[r] + 1] - prefix[a0[r]]) / (a1[r] - a0[r] + 1)
        block = out[a0[r] : a1[r] + 1]
        np.maximum(block, avg[None, :], out=block)
    return out if axis == 0 else np.ascontiguousarray(out.T)
