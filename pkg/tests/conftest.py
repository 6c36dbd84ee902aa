"""Shared helpers: seeded random models and literal-definition oracles.

The oracles here re-implement the defining formulas by direct enumeration,
independently of the library's vectorized paths, so tests compare two
routes to the same quantity.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from cumlab import FiniteComponent, ProductSpace, TabFn


def random_space(rng: np.random.Generator, n: int, max_support: int = 3,
                 uniform: bool = False) -> ProductSpace:
    comps = []
    for _ in range(n):
        size = int(rng.integers(2, max_support + 1))
        if uniform:
            probs = np.full(size, 1.0 / size)
        else:
            raw = rng.random(size) + 0.1
            probs = raw / raw.sum()
        probs = probs.copy()
        probs[-1] = 1.0 - probs[:-1].sum()
        atoms = np.sort(rng.normal(size=size))
        comps.append(FiniteComponent(tuple(atoms), tuple(probs)))
    return ProductSpace(tuple(comps))


def random_fn(rng: np.random.Generator, space: ProductSpace,
              complex_valued: bool = True, scale: float = 1.0) -> TabFn:
    vals = rng.normal(size=space.size)
    if complex_valued:
        vals = vals + 1j * rng.normal(size=space.size)
    return TabFn(space, scale * vals)


def lattice(space: ProductSpace):
    return itertools.product(*[range(s) for s in space.sizes])


def point_weight(space: ProductSpace, x) -> float:
    w = 1.0
    for j, xj in enumerate(x):
        w *= space.components[j].probs[xj]
    return w


def splice_tuple(x, y, subset_bits):
    return tuple(y[j] if j in subset_bits else x[j] for j in range(len(x)))


def oracle_expect(f: TabFn) -> complex:
    """Definition: plain weighted sum over the lattice."""
    total = 0j
    nd = f.nd
    for x in lattice(f.space):
        total += point_weight(f.space, x) * nd[x]
    return total


def oracle_sup_difference(f: TabFn, subset_bits: set[int]) -> float:
    """Definition: sup over x, y of |alternating splice sum|."""
    nd = f.nd
    subs = [set(c) for r in range(len(subset_bits) + 1)
            for c in itertools.combinations(sorted(subset_bits), r)]
    best = 0.0
    for x in lattice(f.space):
        for y in lattice(f.space):
            tot = sum((-1) ** len(w) * nd[splice_tuple(x, y, w)] for w in subs)
            best = max(best, abs(tot))
    return best


def oracle_avg_difference(f: TabFn, subset_bits: set[int]) -> float:
    """Definition: sup over the FULL y lattice of |E alternating splice sum|."""
    nd = f.nd
    subs = [set(c) for r in range(len(subset_bits) + 1)
            for c in itertools.combinations(sorted(subset_bits), r)]
    best = 0.0
    for y in lattice(f.space):
        tot = 0j
        for x in lattice(f.space):
            wx = point_weight(f.space, x)
            for w in subs:
                tot += (-1) ** len(w) * wx * nd[splice_tuple(x, y, w)]
        best = max(best, abs(tot))
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
