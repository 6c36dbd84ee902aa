"""Built-in randomized property suite behind the selftest CLI command.

A trimmed mirror of the pytest suite: every module's load-bearing invariants
run against seeded random instances so a deployed install can vouch for
itself without the test tree.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from . import decompositions as dc
from . import differences as df
from . import edgeworth as ew
from . import normal_approx as na
from . import regular_graphs as rg
from .cumulants import certify, cumulants, joint_cumulant
from .spaces import (FiniteComponent, ProductSpace, TabFn, bernoulli_component,
                     builtin_sum, expect, standardized, uniform_component)


def _random_space(rng: np.random.Generator, n: int, max_support: int = 3) -> ProductSpace:
    comps = []
    for _ in range(n):
        size = int(rng.integers(2, max_support + 1))
        raw = rng.random(size) + 0.1
        probs = raw / raw.sum()
        probs[-1] = 1.0 - probs[:-1].sum()
        atoms = np.sort(rng.normal(size=size))
        comps.append(FiniteComponent(tuple(atoms), tuple(probs)))
    return ProductSpace(tuple(comps))


def _random_fn(rng: np.random.Generator, space: ProductSpace, complex_valued=True) -> TabFn:
    vals = rng.normal(size=space.size)
    if complex_valued:
        vals = vals + 1j * rng.normal(size=space.size)
    return TabFn(space, vals)


def _check_algebra(rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(2, 5))
        space = _random_space(rng, n)
        f = _random_fn(rng, space)
        g = _random_fn(rng, space)
        pi, om = dc.hoeffding(f), dc.hoeffding(g)
        worst = max(worst, float(np.abs(dc.realize(pi).values - f.values).max()))
        prod = dc.realize(dc.multiply(pi, om)).values
        worst = max(worst, float(np.abs(prod - f.values * g.values).max()))
        gamma = float(rng.random())
        if dc.weighted_norm(dc.multiply(pi, om), gamma) > \
                dc.weighted_norm(pi, gamma) * dc.weighted_norm(om, gamma) * (1 + 1e-12):
            return False, "norm submultiplicativity violated"
        j = int(rng.integers(0, n))
        k = int(rng.integers(0, n))
        ejj = dc.average_out(dc.average_out(pi, j), j)
        if not dc.decomp_allclose(ejj, dc.average_out(pi, j)):
            return False, "expectation operator not idempotent"
        jk = dc.average_out(dc.average_out(pi, j), k)
        kj = dc.average_out(dc.average_out(pi, k), j)
        if not dc.decomp_allclose(jk, kj):
            return False, "expectation operators do not commute"
    return worst < 1e-12, f"max pointwise defect {worst:.2e}"


def _check_difference_lemma(rng) -> tuple[bool, str]:
    for _ in range(15):
        n = int(rng.integers(2, 4))
        space = _random_space(rng, n)
        f = _random_fn(rng, space)
        pi = dc.hoeffding(f)
        vmask = int(rng.integers(1, 1 << n))
        wmask = int(rng.integers(0, 1 << n))
        y = tuple(int(rng.integers(0, s)) for s in space.sizes)
        x = tuple(int(rng.integers(0, s)) for s in space.sizes)
        lhs = abs(dc.difference_op(pi, vmask, y).part_value(wmask, x))
        rhs = df.avg_difference(f, vmask | wmask)
        if lhs > rhs + 1e-10:
            return False, f"difference bound violated: {lhs} > {rhs}"
    return True, "bound held on all samples"


def _check_certificates(rng) -> tuple[bool, str]:
    checked = 0
    for n in (4, 6):
        space = ProductSpace(tuple(bernoulli_component(0.5) for _ in range(n)))
        base = builtin_sum(space)
        for t in (0.002, 0.01):
            f = standardized(base, 1j * t)
            for m in (1, 2):
                cert = certify(f, m)
                if not cert.feasible:
                    continue
                checked += 1
                if not cert.delta_ok or not all(cert.kappa_bounds_ok):
                    return False, f"certificate violated at n={n} t={t} m={m}"
    return checked > 0, f"{checked} feasible certificates all passed"


def _check_cumulant_paths(rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        space = _random_space(rng, n)
        f = _random_fn(rng, space)
        r = int(rng.integers(1, 5))
        scale = 1.0 / max(1.0, float(np.abs(f.values).max()))
        f = f * scale
        a = cumulants(f, r)[r - 1]
        b = joint_cumulant([f] * r)
        pi = dc.hoeffding(f)
        c = dc.conditional_cumulant([pi] * r, 1).part_value(0, (0,) * n)
        ref = max(1.0, abs(a))
        worst = max(worst, abs(a - b) / ref, abs(a - c) / ref)
    return worst < 1e-9, f"max relative spread {worst:.2e}"


def _check_edgeworth(rng) -> tuple[bool, str]:
    display = {
        (1, 3): Fraction(1, 6), (2, 4): Fraction(1, 24), (2, 6): Fraction(1, 72),
        (3, 5): Fraction(1, 120), (3, 7): Fraction(1, 144), (3, 9): Fraction(1, 1296),
        (4, 6): Fraction(1, 720), (4, 8): None, (4, 10): Fraction(1, 1728),
        (4, 12): Fraction(1, 31104),
    }
    for s in range(1, 5):
        for coeff, powers, degree in ew.correction_poly_terms(s):
            want = display.get((s, degree), "missing")
            if want == "missing":
                return False, f"unexpected term degree {degree} at order {s}"
            if want is not None and coeff != want:
                return False, f"coefficient {coeff} != {want} at order {s}"
    rep = ew.triangle_report(6, 0.5, 1)
    if not rep.sup_errors[1] <= rep.sup_errors[0]:
        return False, "order-1 correction did not improve the sup error"
    return True, "display coefficients exact; correction improves the fit"


def _check_regular_graphs(rng) -> tuple[bool, str]:
    for n in range(2, 7):
        for d in range(n):
            if rg.count_regular_graphs(n, d) != rg.count_regular_graphs_bruteforce(n, d):
                return False, f"exact/bruteforce mismatch at ({n}, {d})"
    approx = rg.regular_graph_asymptotic(12, 6, 1).log_value
    exact = rg.log_bigint(rg.count_regular_graphs(12, 6))
    if abs(approx - exact) / abs(exact) > 0.05:
        return False, "order-1 asymptotic off by more than 5% in log scale"
    lam = 0.375
    c = rg.edge_factor_log_coeffs(lam, 3)
    Lam = lam * (1 - lam)
    want = [1j * lam, -Lam / 2, -1j * Lam * (1 - 2 * lam) / 6]
    if max(abs(c[i] - want[i]) for i in range(3)) > 1e-12:
        return False, "log-series coefficients disagree with the closed forms"
    return True, "counts, asymptotics and series coefficients agree"


def _check_normal_approx(rng) -> tuple[bool, str]:
    for n in (4, 8):
        space = ProductSpace(tuple(bernoulli_component(0.5) for _ in range(n)))
        f = builtin_sum(space)
        dist = na.sup_cdf_distance(f)
        for T in (2.0, 5.0):
            if na.feller_bound(f, T) < dist:
                return False, f"smoothing bound below the exact distance at n={n}"
    for n in (4, 16, 64):
        scaled = na.bernoulli_sum_cdf_distance(n) * math.sqrt(n)
        if not 0.1 <= scaled <= 0.8:
            return False, f"scaling bracket violated at n={n}: {scaled}"
    return True, "smoothing bound valid; scaling inside the bracket"


CHECKS: list[tuple[str, Callable]] = [
    ("decomposition algebra", _check_algebra),
    ("difference-operator bound", _check_difference_lemma),
    ("truncation certificates", _check_certificates),
    ("cumulant cross-paths", _check_cumulant_paths),
    ("edgeworth corrections", _check_edgeworth),
    ("regular graph counts", _check_regular_graphs),
    ("normal approximation", _check_normal_approx),
]


def run_selftest(seed: int = 20240901, emit=print) -> bool:
    rng = np.random.default_rng(seed)
    all_ok = True
    for name, check in CHECKS:
        ok, detail = check(rng)
        all_ok &= ok
        emit(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    emit(f"selftest {'passed' if all_ok else 'FAILED'} "
         f"({len(CHECKS)} check groups, seed {seed})")
    return all_ok
