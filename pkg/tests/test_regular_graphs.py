import math
from fractions import Fraction

import numpy as np
import pytest

from cumlab import (CORRECTION_POLYS, CapExceededError, ModelError,
                    conjecture_gap, correction_poly, count_regular_graphs,
                    count_regular_graphs_bruteforce, edge_factor_log_coeffs,
                    hubbard_stratonovich_poly, hubbard_stratonovich_poly_exact,
                    log_approx_by_order, log_bigint, regular_graph_asymptotic)

# transcription reference: a second, independent entry of the published
# coefficient lists (ascending powers, un-reduced display form)
F = Fraction
POLY_LITERALS = {
    1: (F(0), F(1, 4)),
    2: (F(0), F(0), F(-1, 4)),
    3: (F(0), F(0), F(2, 24), F(-23, 24)),
    4: (F(0), F(0), F(0), F(22, 24), F(-129, 24)),
    5: (F(0), F(0), F(0), F(-3, 12), F(115, 12), F(-483, 12)),
    6: (F(0), F(0), F(0), F(0), F(-375, 60), F(6615, 60), F(-22097, 60)),
    7: (F(0), F(0), F(0), F(0), F(1046, 720), F(-87318, 720), F(1002900, 720),
        F(-2791541, 720)),
}


def double_factorial(n):
    out = 1
    for k in range(n, 0, -2):
        out *= k
    return out


class TestExactCounts:
    def test_known_small_values(self):
        assert count_regular_graphs(3, 2) == 1
        assert count_regular_graphs(4, 1) == 3
        assert count_regular_graphs(4, 2) == 3
        assert count_regular_graphs(5, 2) == 12
        assert count_regular_graphs(6, 3) == 70

    def test_empty_and_complete(self):
        # d*n = n(n-1) is always even: the complete graph exists for every n
        for n in range(1, 9):
            assert count_regular_graphs(n, 0) == 1
            assert count_regular_graphs(n, n - 1) == 1

    def test_parity_gives_zero(self):
        assert count_regular_graphs(5, 3) == 0
        assert count_regular_graphs(7, 1) == 0

    def test_matches_bruteforce_up_to_six(self):
        for n in range(1, 7):
            for d in range(n):
                assert count_regular_graphs(n, d) == \
                    count_regular_graphs_bruteforce(n, d), (n, d)

    def test_bruteforce_triangle(self):
        assert count_regular_graphs_bruteforce(3, 2) == 1

    def test_bruteforce_parity(self):
        assert count_regular_graphs_bruteforce(5, 1) == 0

    def test_bruteforce_cap(self):
        with pytest.raises(CapExceededError):
            count_regular_graphs_bruteforce(8, 3)

    def test_perfect_matchings_double_factorial(self):
        for n in range(4, 15, 2):
            assert count_regular_graphs(n, 1) == double_factorial(n - 1)
        for n in range(5, 14, 2):
            assert count_regular_graphs(n, 1) == 0

    def test_complement_symmetry(self):
        for n in range(4, 13):
            for d in range(n):
                assert count_regular_graphs(n, d) == \
                    count_regular_graphs(n, n - 1 - d), (n, d)

    def test_elimination_priority_invariance(self):
        for n, d in ((6, 3), (8, 3), (9, 4), (10, 5)):
            assert count_regular_graphs(n, d, _priority="max") == \
                count_regular_graphs(n, d, _priority="min")

    def test_state_cap(self):
        with pytest.raises(CapExceededError):
            count_regular_graphs(14, 7, max_states=10)


class TestAsymptotics:
    def test_polynomial_transcription_against_literals(self):
        for j, want in POLY_LITERALS.items():
            assert CORRECTION_POLYS[j] == want, j

    def test_first_two_polynomials(self):
        x = 0.21
        assert correction_poly(1, x) == pytest.approx(x / 4)
        assert correction_poly(2, x) == pytest.approx(-x * x / 4)

    def test_seventh_polynomial_top_coefficient(self):
        # highest coefficient -2791541/720 on x^7
        assert CORRECTION_POLYS[7][7] == Fraction(-2791541, 720)
        assert len(CORRECTION_POLYS[7]) == 8

    def test_degree_matches_order(self):
        for j, coeffs in CORRECTION_POLYS.items():
            assert len(coeffs) == j + 1
            assert coeffs[-1] != 0

    def test_first_order_within_five_percent_log(self):
        exact = log_bigint(count_regular_graphs(12, 6))
        approx = regular_graph_asymptotic(12, 6, 1).log_value
        assert abs(approx - exact) / abs(exact) < 0.05

    def test_gap_shrinks_with_order_at_14_7(self):
        exact = log_bigint(count_regular_graphs(14, 7))
        gaps = [abs(v - exact) for v in log_approx_by_order(14, 7)]
        for a, b in zip(gaps, gaps[1:]):
            assert b <= a + 1e-15

    def test_order_range_checked(self):
        with pytest.raises(ModelError):
            regular_graph_asymptotic(12, 6, 8)
        with pytest.raises(ModelError):
            regular_graph_asymptotic(12, 0, 1)

    def test_conjecture_gap_value_and_symmetric_pair(self):
        # evidence table entries; complementary degrees share the exact count
        g1 = conjecture_gap(10, 3)
        g2 = conjecture_gap(10, 6)
        assert math.isfinite(g1) and g1 > 0
        assert math.isfinite(g2) and g2 > 0

    def test_matching_comparator_for_degree_one(self):
        # (n-1)!! is the exact comparator at d = 1
        for n in (8, 10, 12):
            assert count_regular_graphs(n, 1) == double_factorial(n - 1)
            gap = conjecture_gap(n, 1)
            assert math.isfinite(gap)

    def test_log_bigint_accuracy(self):
        assert log_bigint(10 ** 300) == pytest.approx(300 * math.log(10), rel=1e-14)
        huge = 7 ** 3000
        assert log_bigint(huge) == pytest.approx(3000 * math.log(7), rel=1e-14)


class TestEdgeFactorSeries:
    def test_displayed_leading_coefficients(self):
        lam = 0.3125
        Lam = lam * (1 - lam)
        c = edge_factor_log_coeffs(lam, 3)
        assert c[0] == pytest.approx(1j * lam, abs=1e-15)
        assert c[1] == pytest.approx(-Lam / 2, abs=1e-15)
        assert c[2] == pytest.approx(-1j * Lam * (1 - 2 * lam) / 6, abs=1e-15)

    def test_matches_cauchy_integral_oracle(self):
        # independent oracle: Taylor coefficients by FFT over a small circle
        lam = 0.47
        L = 6
        N = 256
        r = 0.1
        zs = r * np.exp(2j * np.pi * np.arange(N) / N)
        vals = np.log(1 + lam * (np.exp(1j * zs) - 1))
        coeffs = np.fft.fft(vals) / N
        oracle = np.array([coeffs[l] / r ** l for l in range(1, L + 1)])
        got = edge_factor_log_coeffs(lam, L)
        assert np.abs(got - oracle).max() < 1e-9

    def test_bad_density_rejected(self):
        with pytest.raises(ModelError):
            edge_factor_log_coeffs(0.0, 3)


class TestCoefficientPolynomial:
    def test_degree_one(self):
        poly = hubbard_stratonovich_poly(1)
        assert set(poly) == {(1,)}
        assert poly[(1,)] == pytest.approx(-1.0)

    def test_degree_two(self):
        # series oracle by hand to z^2: x_1^2/2 - i x_2/2 - 1/2
        poly = hubbard_stratonovich_poly(2)
        assert poly[(2, 0)] == pytest.approx(0.5)
        assert poly[(0, 1)] == pytest.approx(-0.5j)
        assert poly[(0, 0)] == pytest.approx(-0.5)
        assert set(poly) == {(2, 0), (0, 1), (0, 0)}

    def test_total_degree_equals_d(self):
        for d in range(1, 7):
            exact = hubbard_stratonovich_poly_exact(d)
            degrees = [sum(mono) for mono in exact]
            assert max(degrees) == d
            # the top monomial x_1^d has coefficient (-1)^d / d!
            top = exact[(d,) + (0,) * (d - 1)]
            want = Fraction((-1) ** d, math.factorial(d))
            assert top == (want, Fraction(0))

    def test_numeric_evaluation_matches_univariate_series_oracle(self, rng):
        # plug numbers into the x variables first, then extract the z^d
        # coefficient of the resulting univariate series numerically
        for d in (2, 3, 4, 5):
            xs = rng.normal(size=d)
            order = d + 1
            series = np.zeros(order, dtype=complex)
            series[0] = 1.0
            for j in range(1, d + 1):
                factor = np.zeros(order, dtype=complex)
                for t in range(0, (order - 1) // j + 1):
                    factor[j * t] = (1j ** (j + 1) * xs[j - 1] / j) ** t \
                        / math.factorial(t)
                new = np.zeros(order, dtype=complex)
                for a_deg in range(order):
                    if series[a_deg] == 0:
                        continue
                    for b_deg in range(order - a_deg):
                        new[a_deg + b_deg] += series[a_deg] * factor[b_deg]
                series = new
            sqrt_part = np.zeros(order, dtype=complex)
            for k in range(0, (order - 1) // 2 + 1):
                sqrt_part[2 * k] = (-0.25) ** k * math.comb(2 * k, k)
            total = np.zeros(order, dtype=complex)
            for a_deg in range(order):
                for b_deg in range(order - a_deg):
                    total[a_deg + b_deg] += series[a_deg] * sqrt_part[b_deg]
            oracle = total[d]
            poly = hubbard_stratonovich_poly(d)
            value = sum(c * np.prod([xs[i] ** e for i, e in enumerate(mono)])
                        for mono, c in poly.items())
            assert value == pytest.approx(oracle, rel=1e-10, abs=1e-12)
