"""Subset-indexed decompositions of functions and their operator algebra.

A decomposition stores, for each coordinate subset V, a table over the
V-sub-lattice; the represented function is the sum of all parts.  Addition
is part-wise, the product convolves over subset unions, and the weighted
norm (sup-norm of each part scaled by e^{gamma |V|}) is submultiplicative,
which makes the space a commutative unital Banach algebra.  The expectation,
substitution and finite-difference operators act part-wise and drive the
conditional joint cumulants.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .masks import bits, set_partitions, submasks
from .spaces import CapExceededError, ModelError, ProductSpace, TabFn

MAX_COORDS = 16          # full-subset operations are O(3^n) in subset pairs
MAX_CUMULANT_ORDER = 8   # Bell(8) = 4140 partition terms

_PART_TOL = 1e-15        # parts with sup below this are dropped from storage


def _part_shape(space: ProductSpace, mask: int) -> tuple[int, ...]:
    return tuple(space.sizes[j] for j in bits(mask))


def _lift(arr: np.ndarray, mask: int, target: int, space: ProductSpace) -> np.ndarray:
    """View a part over ``mask`` as broadcastable over the axes of ``target``."""
    shape = tuple(space.sizes[j] if mask >> j & 1 else 1 for j in bits(target))
    return arr.reshape(shape)


@dataclass(frozen=True)
class Decomposition:
    """Map from coordinate subsets to tables over the matching sub-lattices.

    Absent subsets are the zero function.  Part arrays are indexed with one
    axis per subset coordinate, ascending; storage itself guarantees that a
    part depends only on its subset's coordinates.
    """

    space: ProductSpace
    parts: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.space.n > MAX_COORDS:
            raise CapExceededError(
                f"decompositions support at most {MAX_COORDS} coordinates")
        clean: dict[int, np.ndarray] = {}
        for mask, arr in self.parts.items():
            if mask >> self.space.n:
                raise ModelError("part subset has bits beyond the coordinate count")
            a = np.asarray(arr, dtype=complex)
            want = _part_shape(self.space, mask)
            if a.shape != want:
                raise ModelError(
                    f"part {mask:#x} has shape {a.shape}, expected {want}")
            if float(np.abs(a).max(initial=0.0)) <= _PART_TOL:
                continue
            a = a.copy()
            a.setflags(write=False)
            clean[mask] = a
        object.__setattr__(self, "parts", clean)

    def part(self, mask: int) -> np.ndarray:
        """The table for ``mask``, zeros if absent."""
        got = self.parts.get(mask)
        if got is not None:
            return got
        return np.zeros(_part_shape(self.space, mask), dtype=complex)

    def part_value(self, mask: int, x: Sequence[int]) -> complex:
        got = self.parts.get(mask)
        if got is None:
            return 0j
        return complex(got[tuple(x[j] for j in bits(mask))])

    def is_free_of(self, j: int) -> bool:
        return all(not mask >> j & 1 for mask in self.parts)

    def is_restricted_to(self, j: int) -> bool:
        return all(mask >> j & 1 for mask in self.parts)

    def dump(self) -> dict:
        """Debug dump: subset as sorted index list -> [re table, im table]."""
        out = {}
        for mask in sorted(self.parts):
            arr = self.parts[mask]
            key = ",".join(str(j) for j in bits(mask))
            out[key] = {"re": arr.real.reshape(-1).tolist(),
                        "im": arr.imag.reshape(-1).tolist()}
        return out


def zero(space: ProductSpace) -> Decomposition:
    return Decomposition(space, {})


def unit(space: ProductSpace) -> Decomposition:
    """Multiplicative unit: 1 on the empty subset, nothing else."""
    return Decomposition(space, {0: np.asarray(1.0 + 0j)})


def constant(space: ProductSpace, c: complex) -> Decomposition:
    return Decomposition(space, {0: np.asarray(complex(c))})


def add(pi: Decomposition, om: Decomposition,
        c1: complex = 1.0, c2: complex = 1.0) -> Decomposition:
    """Part-wise linear combination c1*pi + c2*om."""
    if pi.space != om.space:
        raise ModelError("mismatched spaces")
    out: dict[int, np.ndarray] = {}
    for mask in sorted(set(pi.parts) | set(om.parts)):
        a = c1 * pi.parts.get(mask, 0) + c2 * om.parts.get(mask, 0)
        out[mask] = np.asarray(a, dtype=complex).reshape(_part_shape(pi.space, mask))
    return Decomposition(pi.space, out)


def multiply(pi: Decomposition, om: Decomposition) -> Decomposition:
    """Union convolution: part at V is the sum over V1 | V2 == V of products.

    Accumulation per output subset runs in (V1, V2) lexicographic order so
    results are bit-identical across runs.
    """
    if pi.space != om.space:
        raise ModelError("mismatched spaces")
    space = pi.space
    acc: dict[int, np.ndarray] = {}
    for m1 in sorted(pi.parts):
        a1 = pi.parts[m1]
        for m2 in sorted(om.parts):
            target = m1 | m2
            prod = _lift(a1, m1, target, space) * _lift(om.parts[m2], m2, target, space)
            if target in acc:
                acc[target] = acc[target] + prod
            else:
                acc[target] = np.broadcast_to(prod, _part_shape(space, target)).copy()
    return Decomposition(space, acc)


def realize(pi: Decomposition) -> TabFn:
    """The represented function: pointwise sum of all parts on the lattice."""
    space = pi.space
    full = (1 << space.n) - 1
    nd = np.zeros(space.sizes, dtype=complex)
    for mask in sorted(pi.parts):
        nd = nd + _lift(pi.parts[mask], mask, full, space)
    return TabFn(space, nd.reshape(-1))


def weighted_norm(pi: Decomposition, gamma: float) -> float:
    """Sum over subsets of the part sup-norm times e^{gamma |V|}."""
    if gamma < 0:
        raise ModelError("gamma must be nonnegative")
    return math.fsum(
        float(np.abs(pi.parts[mask]).max()) * math.exp(gamma * bin(mask).count("1"))
        for mask in sorted(pi.parts))


def decomp_allclose(pi: Decomposition, om: Decomposition, tol: float = 1e-12) -> bool:
    """Part-by-part comparison, absolute tolerance scaled by part norms."""
    if pi.space != om.space:
        return False
    for mask in set(pi.parts) | set(om.parts):
        a, b = pi.part(mask), om.part(mask)
        scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
        if float(np.abs(a - b).max()) > tol * scale:
            return False
    return True


def hoeffding(f: TabFn) -> Decomposition:
    """Canonical decomposition from conditional expectations.

    The part at V is the inclusion-exclusion combination of E[f | X_W] over
    W below V, with sign (-1)^{|V| + |W|}.  Parts average to zero over each
    of their own coordinates, and the parts sum back to f pointwise.
    """
    space = f.space
    if space.n > MAX_COORDS:
        raise CapExceededError(
            f"decompositions support at most {MAX_COORDS} coordinates")
    total = 1
    for s in space.sizes:
        total *= s + 1
    if total > space.lattice_cap:
        raise CapExceededError("conditional-table family exceeds the lattice cap")
    n = space.n
    full = (1 << n) - 1
    cond: dict[int, np.ndarray] = {full: f.nd}
    for mask in sorted(range(1 << n), key=lambda m: -bin(m).count("1")):
        if mask == full:
            continue
        rem = full & ~mask
        j = (rem & -rem).bit_length() - 1
        parent = mask | (1 << j)
        ax = bits(parent).index(j)
        cond[mask] = np.tensordot(cond[parent], space.prob_vector(j), axes=(ax, 0))
    parts: dict[int, np.ndarray] = {}
    for v_mask in range(1 << n):
        acc = np.zeros(_part_shape(space, v_mask), dtype=complex)
        vsize = bin(v_mask).count("1")
        for w_mask in submasks(v_mask):
            sign = -1.0 if (vsize + bin(w_mask).count("1")) % 2 else 1.0
            acc = acc + sign * _lift(cond[w_mask], w_mask, v_mask, space)
        parts[v_mask] = acc
    return Decomposition(space, parts)


# -- operators ----------------------------------------------------------------

def average_out(pi: Decomposition, j: int) -> Decomposition:
    """Expectation operator for coordinate j.

    Parts containing j are averaged over X_j and folded into the part one
    level down; parts already free of j pass through.  The result is j-free
    and never grows the weighted norm.
    """
    space = pi.space
    if not 0 <= j < space.n:
        raise ModelError(f"coordinate {j} out of range")
    w = space.prob_vector(j)
    out: dict[int, np.ndarray] = {}
    for mask in sorted(pi.parts):
        arr = pi.parts[mask]
        if mask >> j & 1:
            ax = bits(mask).index(j)
            tgt = mask & ~(1 << j)
            avg = np.tensordot(arr, w, axes=(ax, 0))
            out[tgt] = out.get(tgt, 0) + avg
        else:
            out[mask] = out.get(mask, 0) + arr
    return Decomposition(space, {m: np.asarray(a, dtype=complex).reshape(
        _part_shape(space, m)) for m, a in out.items()})


def substitute(pi: Decomposition, j: int, y: Sequence[int]) -> Decomposition:
    """Substitution operator: like average_out but plugs in y_j instead."""
    space = pi.space
    if not 0 <= j < space.n:
        raise ModelError(f"coordinate {j} out of range")
    yj = int(y[j])
    if not 0 <= yj < space.sizes[j]:
        raise ModelError(f"override index {yj} out of range for coordinate {j}")
    out: dict[int, np.ndarray] = {}
    for mask in sorted(pi.parts):
        arr = pi.parts[mask]
        if mask >> j & 1:
            ax = bits(mask).index(j)
            tgt = mask & ~(1 << j)
            sub = np.take(arr, yj, axis=ax)
            out[tgt] = out.get(tgt, 0) + sub
        else:
            out[mask] = out.get(mask, 0) + arr
    return Decomposition(space, {m: np.asarray(a, dtype=complex).reshape(
        _part_shape(space, m)) for m, a in out.items()})


def substitute_many(pi: Decomposition, subset: int, y: Sequence[int]) -> Decomposition:
    """Compose the substitution operator over every coordinate in subset."""
    out = pi
    for j in bits(subset):
        out = substitute(out, j, y)
    return out


def difference_op(pi: Decomposition, subset: int, y: Sequence[int]) -> Decomposition:
    """(identity - substitute) composed over the subset's coordinates.

    Order does not matter: the per-coordinate operators commute.  Equals the
    alternating sum over submasks W of (-1)^{|W|} substitute_many(pi, W, y).
    """
    out = pi
    for j in bits(subset):
        out = add(out, substitute(out, j, y), 1.0, -1.0)
    return out


def sup_difference_norm(pi: Decomposition, subset: int, gamma: float) -> float:
    """sup over overrides y of the weighted norm of difference_op(pi, ., y).

    Only the subset coordinates of y matter, so y sweeps the sub-lattice.
    """
    space = pi.space
    idx = bits(subset)
    if subset == 0:
        return weighted_norm(pi, gamma)
    best = 0.0
    base = [0] * space.n
    for combo in itertools.product(*[range(space.sizes[j]) for j in idx]):
        yy = list(base)
        for j, v in zip(idx, combo):
            yy[j] = v
        best = max(best, weighted_norm(difference_op(pi, subset, yy), gamma))
    return best


def split_restricted_free(pi: Decomposition, j: int) -> tuple[Decomposition, Decomposition]:
    """Unique split into parts containing j and parts avoiding j.

    The weighted norm is additive across the two sides.
    """
    res = {m: a for m, a in pi.parts.items() if m >> j & 1}
    free = {m: a for m, a in pi.parts.items() if not m >> j & 1}
    return (Decomposition(pi.space, res), Decomposition(pi.space, free))


def average_out_from(pi: Decomposition, j: int) -> Decomposition:
    """Compose average_out over coordinates j, j+1, .., n-1 (1-based j).

    ``j`` follows the 1..n+1 convention of conditional cumulants: j = n+1 is
    the identity, j = 1 averages everything out.
    """
    space = pi.space
    if not 1 <= j <= space.n + 1:
        raise ModelError(f"j must be in 1..{space.n + 1}")
    out = pi
    for jj in range(space.n - 1, j - 2, -1):
        out = average_out(out, jj)
    return out


def exp_truncated(pi: Decomposition, eps: float, gamma: float = 0.0) -> Decomposition:
    """Partial sum of the exponential series with a certified norm tail.

    The truncation index J is the smallest with
    sum_{j > J} ||pi||_gamma^j / j! < eps, bounded by the geometric tail
    term/(1 - x/(J+2)).  The realized function then matches exp(f_pi)
    within eps * e^{||pi||_gamma} pointwise.
    """
    if eps <= 0:
        raise ModelError("eps must be positive")
    x = weighted_norm(pi, gamma)
    if not math.isfinite(x):
        raise ModelError("decomposition norm is not finite")
    J = 0
    term = 1.0
    while True:
        nxt = term * x / (J + 1)       # = x^{J+1}/(J+1)!
        if x < J + 2 and nxt / (1.0 - x / (J + 2)) < eps:
            break
        term = nxt
        J += 1
        if J > 1000:
            raise ModelError("exponential series does not shrink; norm too large")
    acc = unit(pi.space)
    power = unit(pi.space)
    for k in range(1, J + 1):
        power = multiply(power, pi)
        acc = add(acc, power, 1.0, 1.0 / math.factorial(k))
    return acc


def conditional_cumulant(pis: Sequence[Decomposition], j: int) -> Decomposition:
    """Joint cumulant of decompositions, conditioned past coordinate j.

    Sums over set partitions of the argument list: (|blocks|-1)! alternating
    sign, times the composed-expectation of each block's product.  With
    j = n+1 this is the argument itself for one argument and zero for more.
    """
    r = len(pis)
    if r == 0:
        raise ModelError("need at least one argument")
    if r > MAX_CUMULANT_ORDER:
        raise CapExceededError(
            f"cumulant order capped at {MAX_CUMULANT_ORDER}")
    space = pis[0].space
    for p in pis[1:]:
        if p.space != space:
            raise ModelError("mismatched spaces")
    if not 1 <= j <= space.n + 1:
        raise ModelError(f"j must be in 1..{space.n + 1}")
    if j == space.n + 1:
        if r == 1:
            return pis[0]
        return zero(space)
    total = zero(space)
    for blocks in set_partitions(r):
        coef = math.factorial(len(blocks) - 1) * (-1.0) ** (len(blocks) - 1)
        prod = unit(space)
        for block in blocks:
            bprod = pis[block[0]]
            for k in block[1:]:
                bprod = multiply(bprod, pis[k])
            prod = multiply(prod, average_out_from(bprod, j))
        total = add(total, prod, 1.0, coef)
    return total


def conditional_cumulant_power(pi: Decomposition, r: int, j: int) -> Decomposition:
    """Order-r conditional cumulant of a single decomposition."""
    return conditional_cumulant([pi] * r, j)
