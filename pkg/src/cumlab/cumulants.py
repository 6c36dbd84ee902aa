"""Moments, cumulants and certified truncation of the cumulant series.

The certificate checker evaluates, for a tabulated complex function, whether
the smoothness budgets admit a feasible series parameter alpha; if so it
compares the exact E e^f against exp of the truncated cumulant sum and
records whether the observed per-coordinate deviation and the cumulant
magnitudes sit inside their certified envelopes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

import numpy as np

from .differences import difference_budgets, sup_difference
from .masks import masks_of_size, set_partitions
from .spaces import ModelError, DegenerateModelError, TabFn, compensated_sum

ALPHA_MAX = 0.01          # feasibility search stays inside (0, 1/100]
ALPHA_BISECT_TOL = 1e-12

CERTIFICATE_SCHEMA_VERSION = 1


def raw_moments(f: TabFn, r_max: int) -> list[complex]:
    """E f^j for j = 0..r_max by exact summation over the lattice."""
    if r_max < 0:
        raise ModelError("r_max must be >= 0")
    w = f.space.weights()
    out = [complex(1.0)]
    power = np.ones_like(f.values)
    for _ in range(r_max):
        power = power * f.values
        out.append(compensated_sum(power * w))
    return out


def cumulants_from_moments(moments: Sequence[complex]) -> list[complex]:
    """kappa_1..kappa_R from raw moments m_0..m_R.

    Standard recursion from the generating identity:
    m_r = sum_k C(r-1, k-1) kappa_k m_{r-k}.
    """
    if not moments or abs(moments[0] - 1.0) > 1e-9:
        raise ModelError("moments must start with m_0 = 1")
    R = len(moments) - 1
    kap: list[complex] = [0j] * (R + 1)
    for r in range(1, R + 1):
        acc = moments[r]
        for k in range(1, r):
            acc -= comb(r - 1, k - 1) * kap[k] * moments[r - k]
        kap[r] = acc
    return kap[1:]


def cumulants(f: TabFn, r_max: int) -> list[complex]:
    """kappa_1..kappa_{r_max} of f(X)."""
    return cumulants_from_moments(raw_moments(f, r_max))


def joint_cumulant(fs: Sequence[TabFn]) -> complex:
    """Joint cumulant over the set-partition lattice.

    Reduces to the mean for one argument and the covariance for two; with
    all arguments equal it matches the univariate cumulant of that order.
    """
    r = len(fs)
    if r == 0:
        raise ModelError("need at least one function")
    space = fs[0].space
    for g in fs[1:]:
        if g.space != space:
            raise ModelError("mismatched spaces")
    w = space.weights()
    total = 0j
    for blocks in set_partitions(r):
        coef = factorial(len(blocks) - 1) * (-1.0) ** (len(blocks) - 1)
        prod = 1.0 + 0j
        for block in blocks:
            vals = fs[block[0]].values
            for k in block[1:]:
                vals = vals * fs[k].values
            prod *= compensated_sum(vals * w)
        total += coef * prod
    return total


def cumulant_series_approx(f: TabFn, m: int) -> complex:
    """exp of the cumulant sum truncated at order m."""
    if m < 1:
        raise ModelError("m must be >= 1")
    kap = cumulants(f, m)
    return cmath.exp(sum(kap[r - 1] / factorial(r) for r in range(1, m + 1)))


def exact_exp_expectation(f: TabFn) -> complex:
    """E e^{f(X)} by exact summation."""
    return compensated_sum(np.exp(f.values) * f.space.weights())


def hypothesis_lhs(s_vals: Sequence[float], t: int, alpha: float) -> float:
    """Left side of the feasibility condition at index t.

    s_vals[k-1] is the k-th smoothness budget; the condition compares
    sum_{k >= t} e^{3 alpha k / 2} 2^t C(k-1, t-1) s_k against alpha.
    """
    n = len(s_vals)
    return math.fsum(
        math.exp(1.5 * alpha * k) * (2.0 ** t) * comb(k - 1, t - 1) * s_vals[k - 1]
        for k in range(t, n + 1))


def find_alpha(f: TabFn, m: int, s_vals: Sequence[float] | None = None) -> float | None:
    """Minimal feasible alpha in (0, 1/100], or None.

    Feasibility means the hypothesis left side stays at or below alpha for
    every index t in 1..m.  The left side grows with alpha, so the feasible
    set's boundary is found by bisection; all-zero budgets give alpha = 0.
    """
    if m < 1:
        raise ModelError("m must be >= 1")
    if s_vals is None:
        s_vals = difference_budgets(f)
    if max(s_vals, default=0.0) == 0.0:
        return 0.0

    def feasible(alpha: float) -> bool:
        return max(hypothesis_lhs(s_vals, t, alpha) for t in range(1, m + 1)) <= alpha

    if not feasible(ALPHA_MAX):
        return None
    lo, hi = 0.0, ALPHA_MAX
    while hi - lo > ALPHA_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def cumulant_magnitude_bound(n: int, r: int, alpha: float) -> float:
    """Certified envelope n (r-1)!/(50 r) (80 alpha)^r for order r >= 2."""
    return n * factorial(r - 1) / (50.0 * r) * (80.0 * alpha) ** r


def delta_envelope(alpha: float, m: int) -> float:
    """Certified bound e^{(100 alpha)^{m+1}} - 1 on the per-coordinate deviation."""
    return math.expm1((100.0 * alpha) ** (m + 1))


def _complex_pair(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


@dataclass(frozen=True)
class CumulantCertificate:
    """Everything the truncation theorem check produces for one function.

    delta_actual is the principal n-th root of exact/approx minus one; any
    other root choice has the same modulus, which is what the bound tests.
    """

    m: int
    n: int
    alpha: float | None
    gamma: float | None
    s_values: tuple[float, ...]
    feasible: bool
    hypothesis_ok: tuple[bool, ...]
    kappa: tuple[complex, ...]
    approx: complex
    exact: complex
    delta_actual: complex | None
    delta_bound: float | None
    delta_ok: bool | None
    kappa_bounds_ok: tuple[bool, ...]
    variant: str = "complex"

    @property
    def passed(self) -> bool:
        return (self.feasible and all(self.hypothesis_ok)
                and bool(self.delta_ok) and all(self.kappa_bounds_ok))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": CERTIFICATE_SCHEMA_VERSION,
            "variant": self.variant,
            "m": self.m,
            "n": self.n,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "s_values": list(self.s_values),
            "feasible": self.feasible,
            "hypothesis_ok": list(self.hypothesis_ok),
            "kappa": [_complex_pair(k) for k in self.kappa],
            "approx": _complex_pair(self.approx),
            "exact": _complex_pair(self.exact),
            "delta_actual": (None if self.delta_actual is None
                             else _complex_pair(self.delta_actual)),
            "delta_bound": self.delta_bound,
            "delta_ok": self.delta_ok,
            "kappa_bounds_ok": list(self.kappa_bounds_ok),
            "passed": self.passed,
        }


def _finish_certificate(f: TabFn, m: int, alpha, gamma, s_vals, hyp_ok, variant):
    n = f.space.n
    kap = tuple(cumulants(f, m))
    approx = cmath.exp(sum(kap[r - 1] / factorial(r) for r in range(1, m + 1)))
    exact = exact_exp_expectation(f)
    if approx == 0:
        raise DegenerateModelError("truncated approximation is zero; no ratio")
    feasible = alpha is not None
    if feasible:
        # principal branch of the n-th root of the ratio
        delta = cmath.exp(cmath.log(exact / approx) / n) - 1.0
        bound = delta_envelope(alpha, m)
        delta_ok = abs(delta) <= bound
        kb = tuple(abs(kap[r - 1]) <= cumulant_magnitude_bound(n, r, alpha)
                   for r in range(2, m + 1))
    else:
        delta, bound, delta_ok, kb = None, None, None, ()
    return CumulantCertificate(
        m=m, n=n, alpha=alpha, gamma=gamma, s_values=tuple(s_vals),
        feasible=feasible, hypothesis_ok=tuple(hyp_ok), kappa=kap,
        approx=approx, exact=exact, delta_actual=delta, delta_bound=bound,
        delta_ok=delta_ok, kappa_bounds_ok=kb, variant=variant)


def certify(f: TabFn, m: int) -> CumulantCertificate:
    """Run the complex-function truncation check at order m.

    Budgets come from the averaged differences; alpha from the bisection;
    gamma is fixed at 1.5 alpha, matching the feasibility condition's
    exponential weight.
    """
    if m < 1:
        raise ModelError("m must be >= 1")
    s_vals = difference_budgets(f)
    alpha = find_alpha(f, m, s_vals)
    if alpha is not None:
        gamma = 1.5 * alpha
        hyp_ok = [hypothesis_lhs(s_vals, t, alpha) <= alpha
                  for t in range(1, m + 1)]
    else:
        gamma = None
        hyp_ok = [False] * m
    return _finish_certificate(f, m, alpha, gamma, s_vals, hyp_ok, "complex")


def certify_real(f: TabFn, m: int) -> CumulantCertificate:
    """Real-function variant: alpha is the max anchored sum of worst-case
    differences over subset sizes 1..m.

    No feasibility search is involved; the certificate records the same
    deviation and cumulant envelopes.  The order-1 cumulant carries the raw
    mean and has no certified envelope, so magnitude flags start at order 2.
    """
    if m < 1:
        raise ModelError("m must be >= 1")
    if not f.is_real():
        raise ModelError("real-variant certificate needs a real function")
    n = f.space.n
    alpha = 0.0
    for v in range(1, m + 1):
        table = {mask: sup_difference(f, mask) for mask in masks_of_size(n, v)}
        for j in range(n):
            tot = math.fsum(val for mask, val in table.items() if mask >> j & 1)
            alpha = max(alpha, tot)
    s_vals = difference_budgets(f)
    hyp_ok = [True] * m
    return _finish_certificate(f, m, alpha, 1.5 * alpha, s_vals, hyp_ok, "real")
