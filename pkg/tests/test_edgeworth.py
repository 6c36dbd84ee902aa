import math
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cumlab import (LambdaSeq, ModelError, ProductSpace, TabFn,
                    bernoulli_component, builtin_triangle_count, correction_poly_terms,
                    cumulants, edgeworth_poly, edgeworth_series, graph_count_table,
                    hermite_he, integer_partitions, normal_density, normal_deriv,
                    pmf_cumulants, triangle_mean_variance, triangle_pmf,
                    triangle_report)

LAM = LambdaSeq((0.31, -0.12, 0.05, 0.02, -0.01, 0.003, 0.001, 0.0004, 0.0001, 0.00005))


def partition_count_oracle(s: int) -> int:
    """Independent counter: p(n) by the standard two-argument recursion."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def count(n, largest):
        if n == 0:
            return 1
        return sum(count(n - j, min(j, n - j)) for j in range(1, min(largest, n) + 1))

    return count(s, s)


class TestIntegerPartitions:
    def test_zero_has_one_empty_partition(self):
        assert integer_partitions(0) == [()]

    def test_four_has_five(self):
        parts = integer_partitions(4)
        assert len(parts) == 5
        # 4; 3+1; 2+2; 2+1+1; 1+1+1+1 as multiplicity vectors
        assert set(parts) == {(0, 0, 0, 1), (1, 0, 1, 0), (0, 2, 0, 0),
                              (2, 1, 0, 0), (4, 0, 0, 0)}

    @given(st.integers(1, 20))
    @settings(max_examples=20, deadline=None)
    def test_count_matches_recursive_oracle(self, s):
        assert len(integer_partitions(s)) == partition_count_oracle(s)

    @given(st.integers(1, 12))
    @settings(max_examples=12, deadline=None)
    def test_multiplicities_sum_back(self, s):
        for mults in integer_partitions(s):
            assert sum((j + 1) * k for j, k in enumerate(mults)) == s


class TestCorrectionPolys:
    def test_order_zero_is_one(self):
        assert correction_poly_terms(0) == [(Fraction(1), {}, 0)]

    def test_order_one(self):
        assert correction_poly_terms(1) == [(Fraction(1, 6), {3: 1}, 3)]

    def test_order_two(self):
        terms = {(deg, tuple(sorted(p.items()))): c
                 for c, p, deg in correction_poly_terms(2)}
        assert terms[(4, ((4, 1),))] == Fraction(1, 24)
        assert terms[(6, ((3, 2),))] == Fraction(1, 72)

    def test_degree_parity_and_range(self):
        for s in range(1, 8):
            for _, _, deg in correction_poly_terms(s):
                assert deg % 2 == s % 2
                assert s + 2 <= deg <= 3 * s

    def test_numeric_poly_assembles_terms(self):
        poly = edgeworth_poly(2, LAM)
        assert poly.coeffs[4] == pytest.approx(LAM.get(4) / 24)
        assert poly.coeffs[6] == pytest.approx(LAM.get(3) ** 2 / 72)


class TestNormalDeriv:
    def test_zeroth_is_density(self):
        x = 0.83
        assert normal_deriv(0, x) == pytest.approx(math.exp(-x * x / 2) / math.sqrt(2 * math.pi))

    def test_first_vanishes_at_zero(self):
        assert normal_deriv(1, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_matches_finite_differences(self):
        # central differences of the density, Richardson-extrapolated to
        # fourth order, as the oracle for the third derivative
        x = 0.7

        def d3(h):
            return (normal_density(x + 2 * h) - 2 * normal_density(x + h)
                    + 2 * normal_density(x - h) - normal_density(x - 2 * h)) / (2 * h ** 3)

        oracle = (4.0 * d3(0.005) - d3(0.01)) / 3.0
        assert normal_deriv(3, x) == pytest.approx(oracle, abs=1e-6)

    def test_hermite_recurrence_values(self):
        x = 1.3
        assert hermite_he(2, x) == pytest.approx(x * x - 1)
        assert hermite_he(3, x) == pytest.approx(x ** 3 - 3 * x)


class TestSeries:
    def test_order_zero_is_density(self):
        for x in (-1.5, 0.0, 2.3):
            assert edgeworth_series(0, LAM, x) == pytest.approx(normal_density(x))

    def test_order_one_unchanged_at_zero(self):
        # He_3(0) = 0 kills the first correction at the origin
        assert edgeworth_series(1, LAM, 0.0) == pytest.approx(normal_density(0.0))

    def test_matches_expanded_display_at_order_four(self, rng):
        # hand-coded expansion with the ten display constants
        for _ in range(5):
            lam = LambdaSeq(tuple(rng.normal(scale=0.3, size=4)))
            x = float(rng.normal())
            l3, l4, l5, l6 = (lam.get(r) for r in (3, 4, 5, 6))
            phi_k = lambda k: normal_deriv(k, x)
            want = (normal_density(x)
                    - l3 / 6 * phi_k(3)
                    + (l4 / 24 * phi_k(4) + l3 ** 2 / 72 * phi_k(6))
                    - (l5 / 120 * phi_k(5) + l3 * l4 / 144 * phi_k(7)
                       + l3 ** 3 / 1296 * phi_k(9))
                    + (l6 / 720 * phi_k(6)
                       + (l4 ** 2 / 1152 + l3 * l5 / 720) * phi_k(8)
                       + l3 ** 2 * l4 / 1728 * phi_k(10)
                       + l3 ** 4 / 31104 * phi_k(12)))
            assert edgeworth_series(4, lam, x) == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_integrates_to_one(self):
        # every correction term is a perfect derivative; trapezoid quadrature
        xs = np.linspace(-12.0, 12.0, 8001)
        for m in range(5):
            ys = [edgeworth_series(m, LAM, float(x)) for x in xs]
            assert np.trapezoid(ys, xs) == pytest.approx(1.0, abs=1e-8)


class TestTriangleMoments:
    def test_complete_graph_deterministic(self):
        mu, var = triangle_mean_variance(6, 1.0)
        assert mu == comb(6, 3)
        assert var == 0.0

    def test_empty_graph(self):
        assert triangle_mean_variance(6, 0.0) == (0.0, 0.0)

    def test_formula_matches_pmf_moments(self):
        for v, p in ((4, 0.37), (5, 0.5), (6, 0.5)):
            pmf = triangle_pmf(v, p)
            mu_pmf = pmf.moment(1)
            var_pmf = pmf.moment(2) - mu_pmf ** 2
            mu, var = triangle_mean_variance(v, p)
            assert mu_pmf == pytest.approx(mu, rel=1e-12)
            assert var_pmf == pytest.approx(var, rel=1e-12)


class TestTrianglePmf:
    def test_single_triangle(self):
        p = 0.37
        pmf = triangle_pmf(3, p)
        assert pmf.probs[1] == pytest.approx(p ** 3)
        assert pmf.probs[0] == pytest.approx(1 - p ** 3)

    def test_k4_full_graph_probability(self):
        # only the complete graph on 4 vertices holds 4 triangles: 2^-6
        pmf = triangle_pmf(4, 0.5)
        assert pmf.probs[4] == pytest.approx(1.0 / 64)

    def test_sums_to_one(self):
        for v, p in ((4, 0.3), (5, 0.55), (6, 0.5)):
            pmf = triangle_pmf(v, p)
            assert math.fsum(pmf.probs.tolist()) == pytest.approx(1.0, abs=1e-12)

    def test_matches_edge_indicator_lattice_oracle(self):
        # second oracle: the tabulated triangle-count function on the full
        # edge lattice, with independent per-edge weights
        for v, p in ((4, 0.4), (5, 0.5)):
            m = v * (v - 1) // 2
            sp = ProductSpace(tuple(bernoulli_component(p) for _ in range(m)))
            f = builtin_triangle_count(sp)
            w = sp.weights()
            hist = np.zeros(comb(v, 3) + 1)
            for val, wt in zip(f.values.real, w):
                hist[int(round(val))] += wt
            pmf = triangle_pmf(v, p)
            assert np.abs(pmf.probs - hist).max() < 1e-12

    def test_table_is_exact_integer_census(self):
        table = graph_count_table(5)
        assert table.sum() == 2 ** 10
        # graphs with all 10 edges: one, with C(5,3) = 10 triangles
        assert table[10, 10] == 1

    def test_vertex_cap(self):
        with pytest.raises(ModelError):
            triangle_pmf(8, 0.5)


class TestPmfCumulants:
    def test_first_two_match_formulas(self):
        pmf = triangle_pmf(6, 0.5)
        kap, lam = pmf_cumulants(pmf, 4)
        mu, var = triangle_mean_variance(6, 0.5)
        assert kap[0] == pytest.approx(mu, rel=1e-10)
        assert kap[1] == pytest.approx(var, rel=1e-10)
        assert lam is not None

    def test_degenerate_pmf(self):
        pmf = triangle_pmf(4, 1.0)
        kap, lam = pmf_cumulants(pmf, 4)
        assert kap[0] == pytest.approx(4.0)
        for r in range(2, 5):
            assert kap[r - 1] == pytest.approx(0.0, abs=1e-9)
        assert lam is None

    def test_third_cumulant_positive_at_half(self):
        # recorded behaviour of the exact distribution at p = 1/2, small v
        for v in (4, 5, 6):
            kap, _ = pmf_cumulants(triangle_pmf(v, 0.5), 3)
            assert kap[2] > 0


class TestTriangleReport:
    def test_order_zero_column_is_plain_local_error(self):
        rep = triangle_report(5, 0.5, 0)
        pmf = triangle_pmf(5, 0.5)
        kap, _ = pmf_cumulants(pmf, 2)
        sigma = math.sqrt(kap[1])
        errs = [abs(sigma * pmf.probs[k] - normal_density((k - kap[0]) / sigma))
                for k in range(len(pmf.probs))]
        assert rep.sup_errors[0] == pytest.approx(max(errs), rel=1e-12)

    def test_first_correction_improves(self):
        rep = triangle_report(6, 0.5, 1)
        assert rep.sup_errors[1] <= rep.sup_errors[0]

    def test_argmax_bookkeeping(self):
        rep = triangle_report(6, 0.3, 2)
        for m in range(3):
            k = rep.argmax_k[m]
            err = abs(rep.sigma_pr[k] - rep.approximations[m, k])
            assert err == pytest.approx(rep.sup_errors[m], rel=1e-12)

    def test_realized_counts_have_positive_mass(self):
        rep = triangle_report(6, 0.5, 0)
        realized = rep.realized()
        assert rep.sigma_pr[realized].min() > 0
        # v=6 leaves some impossible counts below C(6,3)
        assert len(realized) < len(rep.ks)
