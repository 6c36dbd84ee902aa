"""Exact counting of labelled regular graphs and the matching log-asymptotics.

The exact count eliminates one vertex at a time from a sorted multiset of
residual degrees: the eliminated vertex (taken from the highest residual
class) connects to a choice of distinct vertices summing over residual
classes, with binomial multiplicities.  States are count vectors, memoized;
all arithmetic is exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lgamma, log, sqrt
from typing import Callable

import numpy as np

from .spaces import CapExceededError, ModelError

DEFAULT_STATE_CAP = 2_000_000
BRUTEFORCE_EDGE_CAP = 24

# correction polynomials, exact rational coefficients in ascending powers
CORRECTION_POLYS: dict[int, tuple[Fraction, ...]] = {
    1: (Fraction(0), Fraction(1, 4)),
    2: (Fraction(0), Fraction(0), Fraction(-1, 4)),
    3: (Fraction(0), Fraction(0), Fraction(2, 24), Fraction(-23, 24)),
    4: (Fraction(0), Fraction(0), Fraction(0), Fraction(22, 24), Fraction(-129, 24)),
    5: (Fraction(0), Fraction(0), Fraction(0), Fraction(-3, 12), Fraction(115, 12),
        Fraction(-483, 12)),
    6: (Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(-375, 60),
        Fraction(6615, 60), Fraction(-22097, 60)),
    7: (Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(1046, 720),
        Fraction(-87318, 720), Fraction(1002900, 720), Fraction(-2791541, 720)),
}

MAX_CORRECTION_ORDER = max(CORRECTION_POLYS)


def correction_poly(j: int, x: float) -> float:
    """Evaluate the j-th correction polynomial at x (Horner, float)."""
    if j not in CORRECTION_POLYS:
        raise ModelError(f"only correction orders 1..{MAX_CORRECTION_ORDER} are known")
    total = 0.0
    for c in reversed(CORRECTION_POLYS[j]):
        total = total * x + float(c)
    return total


def count_regular_graphs(n: int, d: int, max_states: int = DEFAULT_STATE_CAP,
                         _priority: str = "max") -> int:
    """Exact number of labelled d-regular graphs on n vertices.

    Odd d*n gives 0 (handshake parity).  ``_priority`` selects which residual
    class supplies the next eliminated vertex; any choice yields the same
    count, which the tests assert.
    """
    if n < 1:
        raise ModelError("n must be >= 1")
    if d < 0 or d > n - 1:
        return 0
    if (n * d) % 2 == 1:
        return 0
    if _priority not in ("max", "min"):
        raise ModelError("_priority must be 'max' or 'min'")
    pick_max = _priority == "max"
    memo: dict[tuple[int, ...], int] = {}

    def count(state: tuple[int, ...]) -> int:
        if pick_max:
            r = len(state) - 1
            while r > 0 and state[r] == 0:
                r -= 1
        else:
            r = 1
            while r < len(state) and state[r] == 0:
                r += 1
            if r == len(state):
                r = 0
        if r == 0:
            return 1
        cached = memo.get(state)
        if cached is not None:
            return cached
        if len(memo) >= max_states:
            raise CapExceededError(
                f"residual-state count exceeds cap {max_states}")
        t = list(state)
        t[r] -= 1       # the eliminated vertex leaves its class
        total = 0
        chosen = [0] * len(t)

        # choose how many neighbours come from each residual class; counts
        # are against the pre-elimination classes, so no vertex is reused
        def rec(c: int, need: int, mult: int):
            nonlocal total
            if need == 0:
                child = list(t)
                for cc in range(1, len(t)):
                    child[cc] -= chosen[cc]
                    child[cc - 1] += chosen[cc]
                total += mult * count(tuple(child))
                return
            if c == 0 or sum(t[1:c + 1]) < need:
                return
            for k in range(min(need, t[c]), -1, -1):
                chosen[c] = k
                rec(c - 1, need - k, mult * comb(t[c], k))
            chosen[c] = 0

        rec(len(t) - 1, r, 1)
        memo[state] = total
        return total

    start = [0] * (d + 1)
    start[d] = n
    return count(tuple(start))


def count_regular_graphs_bruteforce(n: int, d: int) -> int:
    """Oracle: enumerate every edge subset and keep the d-regular ones."""
    if n < 1:
        raise ModelError("n must be >= 1")
    n_edges = n * (n - 1) // 2
    if n_edges > BRUTEFORCE_EDGE_CAP:
        raise CapExceededError(
            f"brute force capped at {BRUTEFORCE_EDGE_CAP} potential edges")
    if d < 0 or d > n - 1:
        return 0
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    incident = np.zeros((n, n_edges), dtype=np.uint64)
    for b, (i, j) in enumerate(edges):
        incident[i, b] = 1
        incident[j, b] = 1
    total = 1 << n_edges
    count = 0
    chunk = 1 << 20
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
        ok = np.ones(len(ids), dtype=bool)
        for v in range(n):
            mask = np.uint64(sum(1 << b for b in range(n_edges) if incident[v, b]))
            deg = np.bitwise_count(ids & mask)
            ok &= deg == d
        count += int(ok.sum())
    return count


def log_bigint(x: int) -> float:
    """Natural log of a positive integer, accurate to the last few ulps."""
    if x <= 0:
        raise ModelError("argument must be positive")
    b = x.bit_length()
    if b <= 900:
        return log(x)
    shift = b - 64
    return log(x >> shift) + shift * log(2.0)


@dataclass(frozen=True)
class RegularGraphApproximation:
    """Log-space pieces of the order-m asymptotic count."""

    n: int
    d: int
    m: int
    edge_density: float          # d / (n - 1)
    density_factor: float        # edge_density * (1 - edge_density)
    leading_log: float           # log sqrt(2) + entropy and binomial terms
    correction_terms: tuple[float, ...]
    log_value: float
    correction_ratio: float      # exp of the summed correction terms


def regular_graph_asymptotic(n: int, d: int, m: int) -> RegularGraphApproximation:
    """Order-m log-asymptotic approximation of the regular graph count.

    Assembled entirely in log space: entropy of the edge density to the
    binomial pair count, the n-th power of a log-binomial via log-gamma, and
    m correction terms.  Only orders up to 7 are available.
    """
    if not 1 <= m <= MAX_CORRECTION_ORDER:
        raise ModelError(f"m must be in 1..{MAX_CORRECTION_ORDER}")
    if not 0 < d < n - 1:
        raise ModelError("asymptotic form needs 0 < d < n-1")
    lam = d / (n - 1)
    Lam = lam * (1.0 - lam)
    leading = 0.5 * log(2.0)
    leading += comb(n, 2) * (lam * log(lam) + (1.0 - lam) * log(1.0 - lam))
    leading += n * (lgamma(n) - lgamma(d + 1) - lgamma(n - d))
    terms = tuple(correction_poly(j, Lam) / (Lam ** j * float(n) ** (j - 1))
                  for j in range(1, m + 1))
    corr = math.fsum(terms)
    return RegularGraphApproximation(
        n=n, d=d, m=m, edge_density=lam, density_factor=Lam,
        leading_log=leading, correction_terms=terms,
        log_value=leading + corr, correction_ratio=math.exp(corr))


def log_approx_by_order(n: int, d: int, m_max: int = MAX_CORRECTION_ORDER) -> list[float]:
    return [regular_graph_asymptotic(n, d, m).log_value for m in range(1, m_max + 1)]


def conjecture_gap(n: int, d: int, exact: int | None = None) -> float:
    """|log exact - log approx at order 7| times d^3 (n-d)^3 n.

    Evidence value for the conjectured uniform error rate; there is no pass
    threshold attached.
    """
    if exact is None:
        exact = count_regular_graphs(n, d)
    if exact <= 0:
        raise ModelError("no graphs to compare (parity or range)")
    gap = abs(log_bigint(exact) - regular_graph_asymptotic(n, d, 7).log_value)
    return gap * d ** 3 * (n - d) ** 3 * n


# -- series around the generating function ------------------------------------

def _series_mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros(order + 1, dtype=complex)
    for i in range(order + 1):
        if a[i] == 0:
            continue
        hi = order + 1 - i
        out[i:] += a[i] * b[:hi]
    return out


def edge_factor_log_coeffs(lam: float, count: int) -> np.ndarray:
    """Taylor coefficients c_1..c_count of log(1 + lam (e^{ix} - 1)) at 0.

    Composes the exponential series into log(1 + u) with truncated power
    series arithmetic; index 0 of the returned array is c_1.
    """
    if count < 1:
        raise ModelError("count must be >= 1")
    if not 0.0 < lam < 1.0:
        raise ModelError("edge density must be in (0, 1)")
    order = count
    u = np.zeros(order + 1, dtype=complex)
    for ell in range(1, order + 1):
        u[ell] = lam * (1j) ** ell / math.factorial(ell)
    total = np.zeros(order + 1, dtype=complex)
    upow = np.zeros(order + 1, dtype=complex)
    upow[0] = 1.0
    for k in range(1, order + 1):
        upow = _series_mul(upow, u, order)
        total += (-1.0) ** (k + 1) * upow / k
    return total[1:]


Monomial = tuple[int, ...]


def _poly_mul(a: dict[Monomial, tuple[Fraction, Fraction]],
              b: dict[Monomial, tuple[Fraction, Fraction]],
              nvars: int) -> dict[Monomial, tuple[Fraction, Fraction]]:
    out: dict[Monomial, tuple[Fraction, Fraction]] = {}
    for ea, (ra, ia) in a.items():
        for eb, (rb, ib) in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            re = ra * rb - ia * ib
            im = ra * ib + ia * rb
            old = out.get(key)
            if old is None:
                out[key] = (re, im)
            else:
                out[key] = (old[0] + re, old[1] + im)
    return out


def hubbard_stratonovich_poly_exact(d: int) -> dict[Monomial, tuple[Fraction, Fraction]]:
    """Exact coefficient polynomial in x_1..x_d from the degree-d extraction.

    Extracts the z^d coefficient of (1+z^2)^{-1/2} exp(sum_j i^{j+1} x_j z^j / j)
    with exact rational real/imaginary parts per monomial; the monomial key
    lists exponents of x_1..x_d.
    """
    if d < 1:
        raise ModelError("d must be >= 1")
    zero_mono: Monomial = (0,) * d
    # series over z: list index = z degree, value = polynomial in x
    series: list[dict[Monomial, tuple[Fraction, Fraction]]] = [
        {zero_mono: (Fraction(1), Fraction(0))} if k == 0 else {}
        for k in range(d + 1)]
    for j in range(1, d + 1):
        # exp(i^{j+1} x_j z^j / j) truncated at z^d
        factor: list[dict[Monomial, tuple[Fraction, Fraction]]] = [
            {} for _ in range(d + 1)]
        factor[0] = {zero_mono: (Fraction(1), Fraction(0))}
        tmax = d // j
        for t in range(1, tmax + 1):
            # (i^{j+1}/j)^t / t! times x_j^t at degree j*t
            ipow = ((1j) ** ((j + 1) * t))
            scale = Fraction(1, j ** t * math.factorial(t))
            re = scale * int(ipow.real)
            im = scale * int(ipow.imag)
            mono = tuple(t if idx == j - 1 else 0 for idx in range(d))
            factor[j * t] = {mono: (re, im)}
        new: list[dict[Monomial, tuple[Fraction, Fraction]]] = [
            {} for _ in range(d + 1)]
        for za in range(d + 1):
            if not series[za]:
                continue
            for zb in range(d + 1 - za):
                if not factor[zb]:
                    continue
                prod = _poly_mul(series[za], factor[zb], d)
                tgt = new[za + zb]
                for key, (re, im) in prod.items():
                    old = tgt.get(key)
                    if old is None:
                        tgt[key] = (re, im)
                    else:
                        tgt[key] = (old[0] + re, old[1] + im)
        series = new
    # multiply by (1 + z^2)^{-1/2}: coefficient of z^{2k} is (-1/4)^k C(2k, k)
    out: dict[Monomial, tuple[Fraction, Fraction]] = {}
    for k in range(0, d // 2 + 1):
        c = Fraction(-1, 4) ** k * comb(2 * k, k)
        src = series[d - 2 * k]
        for key, (re, im) in src.items():
            old = out.get(key, (Fraction(0), Fraction(0)))
            out[key] = (old[0] + c * re, old[1] + c * im)
    return {key: v for key, v in out.items() if v[0] != 0 or v[1] != 0}


def hubbard_stratonovich_poly(d: int) -> dict[Monomial, complex]:
    """Float view of the exact coefficient polynomial."""
    return {key: complex(float(re), float(im))
            for key, (re, im) in hubbard_stratonovich_poly_exact(d).items()}
