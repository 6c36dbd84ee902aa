"""Finite product probability spaces and complex functions tabulated on them.

A model is a product of independent finite-support components together with
a dense table of function values over the full outcome lattice, stored in
row-major (C) order of the multi-index.  Everything downstream (differences,
decompositions, cumulants) works against these two objects.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .masks import bits

DEFAULT_LATTICE_CAP = 1 << 24

MODEL_SCHEMA_VERSION = 1


class ModelError(ValueError):
    """Invalid model data: bad probabilities, shapes, parameters."""


class CapExceededError(RuntimeError):
    """A configured size cap (lattice, states) would be exceeded."""


class DegenerateModelError(ModelError):
    """The model is degenerate for the requested operation (e.g. zero variance)."""


def worker_count() -> int:
    """Worker cap from the CUMLAB_THREADS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get("CUMLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FiniteComponent:
    """One independent coordinate: finitely many atoms with probabilities."""

    atoms: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise ModelError("component must have at least one atom")
        if len(self.atoms) != len(self.probs):
            raise ModelError("atoms and probs must have equal length")
        if any(p < 0 for p in self.probs):
            raise ModelError("probabilities must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ModelError("probabilities must sum to 1 within 1e-12")

    @property
    def size(self) -> int:
        return len(self.atoms)


def uniform_component(atoms: Sequence[float]) -> FiniteComponent:
    k = len(atoms)
    return FiniteComponent(tuple(float(a) for a in atoms), (1.0 / k,) * k)


def bernoulli_component(p: float) -> FiniteComponent:
    """Atoms (0, 1) with P(1) = p."""
    return FiniteComponent((0.0, 1.0), (1.0 - p, p))


@dataclass(frozen=True)
class ProductSpace:
    """Product of independent finite components; the law of the random vector."""

    components: tuple[FiniteComponent, ...]
    lattice_cap: int = DEFAULT_LATTICE_CAP

    def __post_init__(self):
        if len(self.components) < 1:
            raise ModelError("need at least one component")
        total = 1
        for c in self.components:
            total *= c.size
            if total > self.lattice_cap:
                raise CapExceededError(
                    f"lattice size exceeds cap {self.lattice_cap}")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.components)

    @property
    def size(self) -> int:
        return int(np.prod(self.sizes, dtype=object))

    def prob_vector(self, j: int) -> np.ndarray:
        return np.asarray(self.components[j].probs, dtype=float)

    def atom_vector(self, j: int) -> np.ndarray:
        return np.asarray(self.components[j].atoms, dtype=float)

    def weights(self) -> np.ndarray:
        """Flat product-law weights over the lattice, row-major order."""
        w = np.ones(1)
        for c in self.components:
            w = np.multiply.outer(w, np.asarray(c.probs)).reshape(-1)
        return w

    def check_point(self, x: Sequence[int]) -> tuple[int, ...]:
        if len(x) != self.n:
            raise ModelError("point has wrong dimension")
        for j, xj in enumerate(x):
            if not 0 <= xj < self.components[j].size:
                raise ModelError(f"index {xj} out of range for coordinate {j}")
        return tuple(int(v) for v in x)


def splice(x: Sequence[int], y: Sequence[int], subset: int) -> tuple[int, ...]:
    """Point taking coordinates from y on ``subset`` and from x elsewhere."""
    if len(x) != len(y):
        raise ModelError("points must have equal dimension")
    return tuple(y[j] if subset >> j & 1 else x[j] for j in range(len(x)))


@dataclass(frozen=True)
class TabFn:
    """A complex function on the full lattice, tabulated densely.

    ``values`` is flat in row-major multi-index order (last coordinate
    fastest).  Entries must be finite.
    """

    space: ProductSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.space.size,):
            raise ModelError(
                f"value table has length {v.shape}, lattice needs {self.space.size}")
        if not np.all(np.isfinite(v)):
            raise ModelError("value table contains non-finite entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def nd(self) -> np.ndarray:
        """The table reshaped to one axis per coordinate (read-only view)."""
        return self.values.reshape(self.space.sizes)

    def at(self, x: Sequence[int]) -> complex:
        return complex(self.nd[tuple(self.space.check_point(x))])

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values.imag)) <= tol)

    def __add__(self, other):
        if isinstance(other, TabFn):
            if other.space is not self.space and other.space != self.space:
                raise ModelError("mismatched spaces")
            return TabFn(self.space, self.values + other.values)
        return TabFn(self.space, self.values + complex(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1 if isinstance(other, TabFn) else -complex(other))

    def __mul__(self, c):
        if isinstance(c, TabFn):
            if c.space != self.space:
                raise ModelError("mismatched spaces")
            return TabFn(self.space, self.values * c.values)
        return TabFn(self.space, self.values * complex(c))

    __rmul__ = __mul__


def tabulate(space: ProductSpace, fn: Callable[[tuple[int, ...]], complex]) -> TabFn:
    """Evaluate ``fn`` on every multi-index of the lattice."""
    sizes = space.sizes
    out = np.empty(space.size, dtype=complex)
    for flat, idx in enumerate(np.ndindex(*sizes)):
        out[flat] = fn(idx)
    return TabFn(space, out)


def compensated_sum(values: np.ndarray) -> complex:
    """Exactly rounded sum of a complex array in its storage order.

    math.fsum carries exact partial sums, so the result is the correctly
    rounded value of the mathematical sum; determinism across runs and
    chunkings follows.
    """
    v = np.asarray(values)
    re = math.fsum(v.real.tolist())
    if np.iscomplexobj(v):
        im = math.fsum(v.imag.tolist())
        return complex(re, im)
    return complex(re, 0.0)


def expect(f: TabFn) -> complex:
    """E f(X) under the product law, fixed-order compensated summation."""
    return compensated_sum(f.values * f.space.weights())


def variance(f: TabFn) -> complex:
    mu = expect(f)
    centered = f.values - mu
    return compensated_sum(centered * centered * f.space.weights())


def standardized(f: TabFn, factor: complex = 1.0) -> TabFn:
    """factor * (f - E f) / sqrt(Var f); rejects zero-variance models."""
    mu = expect(f)
    var = variance(f)
    if abs(var) <= 0.0:
        raise DegenerateModelError("zero variance, cannot standardize")
    sigma = math.sqrt(abs(var))
    return TabFn(f.space, factor * (f.values - mu) / sigma)


# -- built-in functions ------------------------------------------------------

def builtin_sum(space: ProductSpace) -> TabFn:
    """f(x) = sum of atom values, one per coordinate."""
    nd = np.zeros(space.sizes, dtype=complex)
    for j in range(space.n):
        shape = [1] * space.n
        shape[j] = space.sizes[j]
        nd = nd + space.atom_vector(j).reshape(shape)
    return TabFn(space, nd.reshape(-1))


def builtin_product_pairs(space: ProductSpace, pairs=None) -> TabFn:
    """f(x) = sum over selected index pairs (j, k) of x_j * x_k.

    Defaults to all pairs j < k.
    """
    n = space.n
    if pairs is None:
        pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    nd = np.zeros(space.sizes, dtype=complex)
    for j, k in pairs:
        if not (0 <= j < n and 0 <= k < n) or j == k:
            raise ModelError(f"bad pair ({j}, {k})")
        sj = [1] * n
        sj[j] = space.sizes[j]
        sk = [1] * n
        sk[k] = space.sizes[k]
        nd = nd + space.atom_vector(j).reshape(sj) * space.atom_vector(k).reshape(sk)
    return TabFn(space, nd.reshape(-1))


def vertex_count_for_edges(n_edges: int) -> int:
    """v with C(v, 2) == n_edges, or raise."""
    v = int((1 + math.isqrt(1 + 8 * n_edges)) // 2)
    if v * (v - 1) // 2 != n_edges:
        raise ModelError(
            f"{n_edges} coordinates do not form a complete edge set C(v,2)")
    return v


def edge_list(v: int) -> list[tuple[int, int]]:
    """Coordinate order for edge indicators: (0,1), (0,2), .., (v-2,v-1)."""
    return [(i, j) for i in range(v) for j in range(i + 1, v)]


def builtin_triangle_count(space: ProductSpace) -> TabFn:
    """Interpret the coordinates as edge indicators and count triangles.

    Coordinate index for edge (i, j), i < j, follows ``edge_list``.  An edge
    is present when the coordinate's *index* is 1, so components must be
    binary.
    """
    v = vertex_count_for_edges(space.n)
    if any(s != 2 for s in space.sizes):
        raise ModelError("triangle_count requires binary components")
    edges = edge_list(v)
    eindex = {e: b for b, e in enumerate(edges)}
    triangles = []
    for a in range(v):
        for b in range(a + 1, v):
            for c in range(b + 1, v):
                triangles.append((eindex[(a, b)], eindex[(a, c)], eindex[(b, c)]))
    nd = np.zeros(space.sizes, dtype=complex)
    for e1, e2, e3 in triangles:
        shape1 = [1] * space.n
        shape1[e1] = 2
        shape2 = [1] * space.n
        shape2[e2] = 2
        shape3 = [1] * space.n
        shape3[e3] = 2
        ind = np.array([0.0, 1.0])
        nd = nd + (ind.reshape(shape1) * ind.reshape(shape2) * ind.reshape(shape3))
    return TabFn(space, nd.reshape(-1))


BUILTIN_FUNCTIONS = {
    "sum": builtin_sum,
    "product_pairs": builtin_product_pairs,
    "triangle_count": builtin_triangle_count,
}


# -- JSON model format -------------------------------------------------------

def space_from_dict(data: dict, lattice_cap: int = DEFAULT_LATTICE_CAP) -> ProductSpace:
    try:
        comps = data["components"]
    except (KeyError, TypeError):
        raise ModelError("model must have a 'components' list") from None
    if not isinstance(comps, list) or not comps:
        raise ModelError("'components' must be a nonempty list")
    built = []
    for i, c in enumerate(comps):
        try:
            built.append(FiniteComponent(tuple(float(a) for a in c["atoms"]),
                                         tuple(float(p) for p in c["probs"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"component {i}: {exc}") from None
    return ProductSpace(tuple(built), lattice_cap=lattice_cap)


def model_from_dict(data: dict, lattice_cap: int = DEFAULT_LATTICE_CAP) -> TabFn:
    """Build the tabulated function described by a model dict.

    Schema::

        {"components": [{"atoms": [..], "probs": [..]}, ...],
         "function": {"kind": "table", "re": [..], "im": [..]}
                   | {"kind": "builtin",
                      "name": "sum" | "product_pairs" | "triangle_count",
                      "params": {...}}}
    """
    space = space_from_dict(data, lattice_cap=lattice_cap)
    try:
        fdesc = data["function"]
        kind = fdesc["kind"]
    except (KeyError, TypeError):
        raise ModelError("model must have a 'function' with a 'kind'") from None
    if kind == "table":
        re = fdesc.get("re")
        if re is None:
            raise ModelError("table function needs 're'")
        im = fdesc.get("im", [0.0] * len(re))
        if len(re) != len(im):
            raise ModelError("'re' and 'im' must have equal length")
        vals = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
        return TabFn(space, vals)
    if kind == "builtin":
        name = fdesc.get("name")
        if name not in BUILTIN_FUNCTIONS:
            raise ModelError(f"unknown builtin function {name!r}")
        params = fdesc.get("params", {}) or {}
        if name == "product_pairs":
            pairs = params.get("pairs")
            if pairs is not None:
                pairs = [tuple(int(v) for v in p) for p in pairs]
            return builtin_product_pairs(space, pairs)
        if params:
            raise ModelError(f"builtin {name!r} takes no params")
        return BUILTIN_FUNCTIONS[name](space)
    raise ModelError(f"unknown function kind {kind!r}")


def load_model(path: str, lattice_cap: int = DEFAULT_LATTICE_CAP) -> TabFn:
    """Read a model JSON file; JSON syntax errors propagate with location."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return model_from_dict(data, lattice_cap=lattice_cap)
