"""Edgeworth corrections to the local normal approximation of triangle counts.

Correction polynomials are assembled as exact rationals indexed by integer
partitions, applied to derivatives of the normal density through the
probabilists' Hermite polynomials, and compared against the exact triangle
count distribution obtained by enumerating every labelled graph.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, sqrt, pi
from typing import Mapping, Sequence

import numpy as np

from .masks import integer_partitions
from .cumulants import cumulants_from_moments
from .spaces import ModelError, worker_count

MAX_PMF_VERTICES = 7     # 2^21 labelled graphs


@dataclass(frozen=True)
class LambdaSeq:
    """Standardized cumulants, indexed from order 3 upward."""

    values: tuple[float, ...]

    def get(self, r: int) -> float:
        if r < 3 or r - 3 >= len(self.values):
            raise ModelError(f"standardized cumulant order {r} not available")
        return self.values[r - 3]

    @property
    def max_order(self) -> int:
        return len(self.values) + 2

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "LambdaSeq":
        if not mapping:
            return cls(())
        top = max(mapping)
        return cls(tuple(float(mapping.get(r, 0.0)) for r in range(3, top + 1)))


def correction_poly_terms(s: int) -> list[tuple[Fraction, dict[int, int], int]]:
    """Exact terms of the order-s correction polynomial.

    One term per integer partition of s: the multiplicity k_j of part size j
    contributes a factor lambda_{j+2}^{k_j} y^{(j+2) k_j} / (k_j! ((j+2)!)^{k_j}).
    Returns (rational coefficient, lambda powers by order, y-degree) triples.
    """
    out = []
    for mults in integer_partitions(s):
        coeff = Fraction(1)
        powers: dict[int, int] = {}
        degree = 0
        for j, kj in enumerate(mults, start=1):
            if kj == 0:
                continue
            coeff *= Fraction(1, factorial(kj)) * Fraction(1, factorial(j + 2) ** kj)
            powers[j + 2] = powers.get(j + 2, 0) + kj
            degree += (j + 2) * kj
        out.append((coeff, powers, degree))
    return out


@dataclass(frozen=True)
class EdgeworthPoly:
    """Numeric correction polynomial: sparse map from y-degree to coefficient."""

    s: int
    coeffs: dict[int, float]


def edgeworth_poly(s: int, lam: LambdaSeq) -> EdgeworthPoly:
    coeffs: dict[int, float] = {}
    for coeff, powers, degree in correction_poly_terms(s):
        c = float(coeff)
        for r, p in powers.items():
            c *= lam.get(r) ** p
        coeffs[degree] = coeffs.get(degree, 0.0) + c
    return EdgeworthPoly(s, coeffs)


def hermite_he(k: int, x: float) -> float:
    """Probabilists' Hermite polynomial by upward recurrence."""
    if k < 0:
        raise ModelError("order must be >= 0")
    h0, h1 = 1.0, x
    if k == 0:
        return h0
    for i in range(1, k):
        h0, h1 = h1, x * h1 - i * h0
    return h1


def normal_density(x: float) -> float:
    return math.exp(-0.5 * x * x) / sqrt(2.0 * pi)


def normal_deriv(k: int, x: float) -> float:
    """k-th derivative of the normal density: (-1)^k He_k(x) phi(x)."""
    sign = -1.0 if k % 2 else 1.0
    return sign * hermite_he(k, x) * normal_density(x)


def edgeworth_series(m: int, lam: LambdaSeq, x: float) -> float:
    """Normal density plus correction terms of orders 1..m at x.

    A monomial c y^k acts on the density as c (-1)^k phi^{(k)}, i.e.
    c He_k(x) phi(x).
    """
    phi = normal_density(x)
    total = 0.0
    for s in range(m + 1):
        for coeff, powers, degree in correction_poly_terms(s):
            c = float(coeff)
            for r, p in powers.items():
                c *= lam.get(r) ** p
            total += c * hermite_he(degree, x) * phi
    return total


# -- triangle counts in the binomial random graph -----------------------------

def triangle_mean_variance(v: int, p: float) -> tuple[float, float]:
    """Exact mean and variance of the triangle count on v labelled vertices.

    Variance = 12 C(v,4)(p^5 - p^6) from ordered pairs of triangles sharing
    one edge, plus C(v,3)(p^3 - p^6) from the per-triangle indicators.
    """
    if v < 1 or not 0.0 <= p <= 1.0:
        raise ModelError("need v >= 1 and p in [0, 1]")
    mu = comb(v, 3) * p ** 3
    var = 12.0 * comb(v, 4) * (p ** 5 - p ** 6) + comb(v, 3) * (p ** 3 - p ** 6)
    return float(mu), float(var)


_TABLE_CACHE: dict[int, np.ndarray] = {}


def _edge_triangle_masks(v: int) -> list[int]:
    edges = [(i, j) for i in range(v) for j in range(i + 1, v)]
    eindex = {e: b for b, e in enumerate(edges)}
    masks = []
    for a in range(v):
        for b in range(a + 1, v):
            for c in range(b + 1, v):
                masks.append((1 << eindex[(a, b)]) | (1 << eindex[(a, c)])
                             | (1 << eindex[(b, c)]))
    return masks


def _count_chunk(lo: int, hi: int, tmasks: list[int], n_edges: int, kmax: int) -> np.ndarray:
    ids = np.arange(lo, hi, dtype=np.uint32)
    ecnt = np.bitwise_count(ids).astype(np.int64)
    tcnt = np.zeros(hi - lo, dtype=np.int64)
    for tm in tmasks:
        tcnt += (ids & np.uint32(tm)) == np.uint32(tm)
    table = np.zeros((n_edges + 1, kmax + 1), dtype=np.int64)
    np.add.at(table, (ecnt, tcnt), 1)
    return table


def graph_count_table(v: int) -> np.ndarray:
    """Integer table N[e, t]: labelled graphs on v vertices with e edges and
    t triangles.  Enumeration is chunked over the edge-subset range; chunk
    histograms are summed in range order, so the result is exact and the
    same for any worker count.
    """
    if not 3 <= v <= MAX_PMF_VERTICES:
        raise ModelError(f"v must be in 3..{MAX_PMF_VERTICES}")
    cached = _TABLE_CACHE.get(v)
    if cached is not None:
        return cached
    n_edges = v * (v - 1) // 2
    kmax = comb(v, 3)
    tmasks = _edge_triangle_masks(v)
    total = 1 << n_edges
    chunk = 1 << 18
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    workers = worker_count()
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda r: _count_chunk(r[0], r[1], tmasks, n_edges, kmax), ranges))
    else:
        parts = [_count_chunk(lo, hi, tmasks, n_edges, kmax) for lo, hi in ranges]
    table = np.zeros((n_edges + 1, kmax + 1), dtype=np.int64)
    for part in parts:
        table += part
    _TABLE_CACHE[v] = table
    return table


@dataclass(frozen=True)
class TrianglePMF:
    """Exact distribution of the triangle count, with the formula moments."""

    n_vertices: int
    p: float
    probs: np.ndarray            # index k = triangle count, 0..C(v,3)
    mu: float
    sigma2: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if abs(math.fsum(probs.tolist()) - 1.0) > 1e-12:
            raise ModelError("triangle pmf must sum to 1 within 1e-12")
        if probs.shape != (comb(self.n_vertices, 3) + 1,):
            raise ModelError("triangle pmf has the wrong support length")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def moment(self, r: int) -> float:
        ks = np.arange(len(self.probs), dtype=float)
        return float(math.fsum((ks ** r * self.probs).tolist()))


def triangle_pmf(v: int, p: float) -> TrianglePMF:
    """Exact triangle-count distribution by full graph enumeration."""
    if not 0.0 <= p <= 1.0:
        raise ModelError("p must be in [0, 1]")
    table = graph_count_table(v)
    n_edges = v * (v - 1) // 2
    # exact integer counts weighted by p^e (1-p)^(M-e)
    ew = np.array([p ** e * (1.0 - p) ** (n_edges - e) for e in range(n_edges + 1)])
    probs = ew @ table
    mu, var = triangle_mean_variance(v, p)
    return TrianglePMF(v, p, probs, mu, var)


def pmf_cumulants(pmf: TrianglePMF, r_max: int) -> tuple[list[float], LambdaSeq | None]:
    """Cumulants of the exact distribution and their standardized sequence.

    Standardization uses the distribution's own second cumulant; for a
    degenerate distribution the standardized sequence is None.
    """
    moments = [complex(pmf.moment(r)) for r in range(r_max + 1)]
    kap = [z.real for z in cumulants_from_moments(moments)]
    if len(kap) < 2 or kap[1] <= 0.0:
        return kap, None
    sigma = sqrt(kap[1])
    lam = LambdaSeq(tuple(kap[r - 1] / sigma ** r for r in range(3, r_max + 1)))
    return kap, lam


@dataclass(frozen=True)
class TriangleReport:
    """Per-k table and sup errors of the corrected local approximations."""

    n_vertices: int
    p: float
    mu: float
    sigma: float
    lam: LambdaSeq
    ks: np.ndarray               # all k in 0..C(v,3)
    sigma_pr: np.ndarray         # sigma * Pr(T = k)
    approximations: np.ndarray   # shape (m_max+1, len(ks)); row m = order m
    sup_errors: tuple[float, ...]
    argmax_k: tuple[int, ...]

    def realized(self) -> np.ndarray:
        """Indices k with positive probability."""
        return np.nonzero(self.sigma_pr > 0)[0]


def triangle_report(v: int, p: float, m_max: int) -> TriangleReport:
    """Compare sigma Pr(T=k) with the order-m series for every m <= m_max.

    The sup error for order m runs over the full integer support 0..C(v,3);
    the standardized cumulants come from the exact distribution.
    """
    if m_max < 0:
        raise ModelError("m_max must be >= 0")
    pmf = triangle_pmf(v, p)
    kap, lam = pmf_cumulants(pmf, m_max + 2)
    if lam is None:
        raise ModelError("degenerate triangle distribution, no standardized series")
    mu = kap[0]
    sigma = sqrt(kap[1])
    ks = np.arange(len(pmf.probs))
    xs = (ks - mu) / sigma
    rows = []
    for m in range(m_max + 1):
        rows.append([edgeworth_series(m, lam, float(x)) for x in xs])
    approx = np.asarray(rows)
    sig_pr = sigma * pmf.probs
    errs = np.abs(sig_pr[None, :] - approx)
    sups = tuple(float(errs[m].max()) for m in range(m_max + 1))
    args = tuple(int(errs[m].argmax()) for m in range(m_max + 1))
    return TriangleReport(v, p, mu, sigma, lam, ks, sig_pr, approx, sups, args)
