"""Worst-case and averaged multidimensional differences of tabulated functions.

For a coordinate subset V, the alternating sum over W below V of
(-1)^|W| f(x with W overridden by y) is a discrete mixed difference; its
supremum over (x, y) bounds mixed partial derivatives, and its expectation
over X (sup over y) is the averaged variant used by the smoothness budgets.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .masks import bits, masks_of_size
from .spaces import CapExceededError, ModelError, TabFn, compensated_sum


def sup_difference(f: TabFn, subset: int) -> float:
    """Worst case |alternating difference| over all base points and overrides.

    For subset == 0 the alternating sum degenerates to f(x), so the value is
    sup |f|.  Brute force: the override y enters only through its coordinates
    in the subset, so y ranges over the sub-lattice only.
    """
    space = f.space
    idx = bits(subset)
    if subset >> space.n:
        raise ModelError("subset has bits beyond the coordinate count")
    sub_size = 1
    for j in idx:
        sub_size *= space.sizes[j]
    if space.size * sub_size > space.lattice_cap:
        raise CapExceededError("sup_difference sweep exceeds the lattice cap")
    base = f.nd
    best = 0.0
    for combo in itertools.product(*[range(space.sizes[j]) for j in idx]):
        arr = base
        for j, yj in zip(idx, combo):
            arr = arr - np.take(arr, [yj], axis=j)
        best = max(best, float(np.abs(arr).max()))
    return best


def _conditional_on(f: TabFn, subset: int) -> np.ndarray:
    """E[f | coordinates in subset], as an array over the subset's axes."""
    arr = f.nd
    drop = [j for j in range(f.space.n) if not subset >> j & 1]
    for j in reversed(drop):
        arr = np.tensordot(arr, f.space.prob_vector(j), axes=(j, 0))
    return arr


def _avg_difference_from_conditional(cond: np.ndarray, f: TabFn, subset: int) -> float:
    """sup over overrides of |E alternating difference|, from E[f | X_subset].

    Replacing coordinate j of the conditional table by its weighted mean
    minus itself realises "average minus substitute at y_j" for every y_j at
    once; folding over the subset's coordinates yields the expected
    alternating sum indexed by the override.
    """
    arr = cond
    for pos, j in enumerate(bits(subset)):
        w = f.space.prob_vector(j).reshape(
            [-1 if p == pos else 1 for p in range(arr.ndim)])
        arr = (arr * w).sum(axis=pos, keepdims=True) - arr
    return float(np.abs(arr).max())


def avg_difference(f: TabFn, subset: int) -> float:
    """sup over y of |E of the alternating difference of f at override y|.

    Dominated by sup_difference for every subset; the value depends on y
    only through the subset coordinates.
    """
    if subset >> f.space.n:
        raise ModelError("subset has bits beyond the coordinate count")
    if subset == 0:
        return abs(compensated_sum(f.values * f.space.weights()))
    return _avg_difference_from_conditional(_conditional_on(f, subset), f, subset)


def avg_difference_all(f: TabFn) -> dict[int, float]:
    """avg_difference for every coordinate subset at once.

    Depth-first over keep/average decisions per coordinate: sibling subsets
    share the reduction work of their common prefix, and memory holds only
    the tables along the current path (at most n of them).
    """
    space = f.space
    n = space.n
    out: dict[int, float] = {}

    def descend(j: int, kept: int, table: np.ndarray):
        # table axes: kept coordinates ascending, then coordinates j..n-1;
        # the mean-minus-substitute fold is already applied on kept axes
        # (it commutes with averaging over the remaining coordinates)
        if j == n:
            out[kept] = float(np.abs(table).max()) if kept else abs(complex(table))
            return
        pos = bin(kept).count("1")     # axis of coordinate j
        w = space.prob_vector(j)
        averaged = np.tensordot(table, w, axes=(pos, 0))
        descend(j + 1, kept, averaged)
        wshape = w.reshape([-1 if p == pos else 1 for p in range(table.ndim)])
        folded = (table * wshape).sum(axis=pos, keepdims=True) - table
        descend(j + 1, kept | (1 << j), folded)

    descend(0, 0, f.nd)
    return out


def difference_budget(f: TabFn, k: int, table: dict[int, float] | None = None) -> float:
    """Max over anchor coordinates of the sum of avg_difference over
    k-subsets containing the anchor."""
    n = f.space.n
    if not 1 <= k <= n:
        raise ModelError(f"k must be in 1..{n}")
    if table is None:
        table = {m: avg_difference(f, m) for m in masks_of_size(n, k)}
    best = 0.0
    for j in range(n):
        tot = math.fsum(table[m] for m in masks_of_size(n, k) if m >> j & 1)
        best = max(best, tot)
    return best


def difference_budgets(f: TabFn) -> list[float]:
    """All budgets for k = 1..n, sharing one conditional-table sweep.

    Index 0 of the result is the k = 1 budget.
    """
    table = avg_difference_all(f)
    return [difference_budget(f, k, table) for k in range(1, f.space.n + 1)]


def interval_derivative_bound(interval_lengths, max_mixed_partial: float) -> float:
    """Product of interval lengths times a supplied mixed-partial bound.

    The caller supplies max |d^|V| f / prod dx_j| over the box; this helper
    only forms the product, which dominates both difference quantities for
    analytic f.
    """
    lengths = [float(v) for v in interval_lengths]
    if any(v < 0 for v in lengths) or max_mixed_partial < 0:
        raise ModelError("lengths and the derivative bound must be nonnegative")
    out = float(max_mixed_partial)
    for v in lengths:
        out *= v
    return out
